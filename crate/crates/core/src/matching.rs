//! Finite bipartite graphs and covering matchings.
//!
//! A *matching of S* is a set of pairwise non-adjacent edges touching every
//! node of `S`. Coverage of one side is decided by a maximum matching
//! (augmenting paths) on the subgraph whose covered side is restricted to `S`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Bipartite graph with nodes `0..left` and `0..right`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    /// Sorted, deduplicated right neighbours of each left node.
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            adj: vec![Vec::new(); left],
        }
    }

    pub fn with_edges<I>(left: usize, right: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = BipartiteGraph::new(left, right);
        for (l, r) in edges {
            g.add_edge(l, r)?;
        }
        Ok(g)
    }

    /// Adds an edge; duplicates are ignored.
    pub fn add_edge(&mut self, l: usize, r: usize) -> Result<()> {
        if l >= self.left {
            return Err(Error::IndexOutOfRange {
                index: l,
                limit: self.left,
            });
        }
        if r >= self.right {
            return Err(Error::IndexOutOfRange {
                index: r,
                limit: self.right,
            });
        }
        if let Err(pos) = self.adj[l].binary_search(&r) {
            self.adj[l].insert(pos, r);
        }
        Ok(())
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj.get(l).is_some_and(|n| n.binary_search(&r).is_ok())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, ns)| ns.iter().map(move |&r| (l, r)))
    }

    fn transposed(&self) -> BipartiteGraph {
        let mut adj = vec![Vec::new(); self.right];
        for (l, r) in self.edges() {
            adj[r].push(l);
        }
        BipartiteGraph {
            left: self.right,
            right: self.left,
            adj,
        }
    }

    /// Size of a maximum matching.
    pub fn max_matching_size(&self) -> usize {
        let all: Vec<usize> = (0..self.left).collect();
        self.matched_from(&all)
    }

    /// Whether some matching covers every node of `nodes` on `side`.
    pub fn has_matching_covering(&self, side: Side, nodes: &[usize]) -> Result<bool> {
        let g;
        let graph = match side {
            Side::Left => self,
            Side::Right => {
                g = self.transposed();
                &g
            }
        };
        let mut sorted = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&n| n >= graph.left) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                limit: graph.left,
            });
        }
        if sorted.len() > graph.right {
            return Ok(false);
        }
        Ok(graph.matched_from(&sorted) == sorted.len())
    }

    /// Kuhn's augmenting-path matching restricted to the given left nodes.
    fn matched_from(&self, lefts: &[usize]) -> usize {
        let mut owner: Vec<Option<usize>> = vec![None; self.right];
        let mut size = 0;
        for &l in lefts {
            let mut seen = vec![false; self.right];
            if self.augment(l, &mut seen, &mut owner) {
                size += 1;
            }
        }
        size
    }

    fn augment(&self, l: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &self.adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let free = match owner[r] {
                None => true,
                Some(other) => self.augment(other, seen, owner),
            };
            if free {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_examples() {
        let g = BipartiteGraph::with_edges(1, 1, [(0, 0)]).unwrap();
        assert!(g.has_matching_covering(Side::Left, &[0]).unwrap());

        let g = BipartiteGraph::with_edges(2, 1, [(0, 0), (1, 0)]).unwrap();
        assert!(!g.has_matching_covering(Side::Left, &[0, 1]).unwrap());
        assert!(g.has_matching_covering(Side::Right, &[0]).unwrap());

        let g = BipartiteGraph::with_edges(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
        assert!(g.has_matching_covering(Side::Left, &[0, 1]).unwrap());
    }

    #[test]
    fn max_matching_examples() {
        assert_eq!(BipartiteGraph::new(3, 3).max_matching_size(), 0);
        let k22 = BipartiteGraph::with_edges(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(k22.max_matching_size(), 2);
        let star = BipartiteGraph::with_edges(1, 3, [(0, 0), (0, 1), (0, 2)]).unwrap();
        assert_eq!(star.max_matching_size(), 1);
    }

    #[test]
    fn out_of_range() {
        let mut g = BipartiteGraph::new(2, 2);
        assert!(g.add_edge(2, 0).is_err());
        assert!(g.add_edge(0, 5).is_err());
        assert!(g.has_matching_covering(Side::Right, &[2]).is_err());
    }

    #[test]
    fn empty_cover_is_trivial() {
        let g = BipartiteGraph::new(0, 0);
        assert!(g.has_matching_covering(Side::Left, &[]).unwrap());
        assert!(g.has_matching_covering(Side::Right, &[]).unwrap());
    }

    #[test]
    fn augmenting_path_needed() {
        // greedy 0->0 blocks 1 unless rerouted
        let g = BipartiteGraph::with_edges(2, 2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        assert_eq!(g.max_matching_size(), 2);
    }
}
