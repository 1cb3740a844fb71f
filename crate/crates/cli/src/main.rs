//! `skolem`: decide sentences, evaluate formulas on positive integers and
//! print compiled set representations.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skolem_core::{oracle, Error, Limits, SemiskolemianSet};

#[derive(Debug, Parser)]
#[command(
    name = "skolem",
    version,
    about = "Decision procedure for multiplicative arithmetic"
)]
struct Cli {
    #[command(flatten)]
    config: Config,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Config {
    /// Cap on disjuncts per operation.
    #[arg(long, global = true, env = "SKOLEM_MAX_DISJUNCTS", default_value_t = Limits::DEFAULT_MAX_DISJUNCTS, value_parser = positive)]
    max_disjuncts: usize,

    /// Cap on nodes per Presburger formula.
    #[arg(long, global = true, env = "SKOLEM_MAX_FORMULA_NODES", default_value_t = Limits::DEFAULT_MAX_FORMULA_NODES, value_parser = positive)]
    max_formula_nodes: usize,

    /// Output format.
    #[arg(long, global = true, env = "SKOLEM_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,

    /// Quantifier bound used by the self-test oracle.
    #[arg(long, global = true, env = "SKOLEM_ORACLE_BOUND", default_value_t = 64, value_parser = positive)]
    oracle_bound: usize,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct Input {
    /// Formula file; `-` or omitted reads standard input.
    file: Option<PathBuf>,

    /// Formula text given inline instead of a file.
    #[arg(short = 'e', long = "expr", conflicts_with = "file")]
    expr: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the truth value of a sentence.
    Decide(Input),
    /// Evaluate a formula at positive integers given with --assign.
    Eval {
        #[command(flatten)]
        input: Input,
        /// `var=value` pairs, one per free variable.
        #[arg(long = "assign", value_name = "VAR=VALUE")]
        assign: Vec<String>,
    },
    /// Print the compiled semiskolemian representation.
    Compile {
        #[command(flatten)]
        input: Input,
        /// Coordinate order, comma separated (default: order of first occurrence).
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Run the oracle battery and report pass/fail counts.
    Selftest {
        /// Predicates are probed on arguments 1..=N.
        #[arg(long, default_value_t = 20, value_parser = positive)]
        probe_max: usize,
    },
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn from_core(err: Error, origin: &str) -> Self {
        let code = match &err {
            Error::ResourceLimit(_) | Error::InstanceTooLarge(_) => 3,
            Error::Domain(_) => 4,
            _ => 2,
        };
        let message = match &err {
            Error::Syntax {
                line,
                column,
                message,
            } => format!("{origin}:{line}:{column}: syntax error: {message}"),
            other => format!("{origin}: {other}"),
        };
        Failure { code, message }
    }
}

fn read_input(input: &Input) -> Result<(String, String), Failure> {
    if let Some(text) = &input.expr {
        return Ok((text.clone(), "<expr>".into()));
    }
    match &input.file {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map(|t| (t, path.display().to_string()))
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::usage(format!("<stdin>: {e}")))?;
            Ok((text, "<stdin>".into()))
        }
    }
}

fn parse_assignment(pairs: &[String]) -> Result<BTreeMap<String, u64>, Failure> {
    let mut out = BTreeMap::new();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--assign expects VAR=VALUE, got `{pair}`")))?;
        let value: u64 = value
            .trim()
            .parse()
            .map_err(|e| Failure::usage(format!("--assign {pair}: {e}")))?;
        if out.insert(name.trim().to_string(), value).is_some() {
            return Err(Failure::usage(format!("`{name}` assigned twice")));
        }
    }
    Ok(out)
}

fn print_bool(format: Format, value: bool) {
    match format {
        Format::Text => println!("{value}"),
        Format::Json => println!("{{\"result\":{value}}}"),
    }
}

fn print_set(format: Format, set: &SemiskolemianSet) {
    match format {
        Format::Text => println!("{set}"),
        Format::Json => println!("{}", set.to_json()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let limits = Limits {
        max_formula_nodes: cli.config.max_formula_nodes,
        max_disjuncts: cli.config.max_disjuncts,
    };
    let format = if cli.config.json {
        Format::Json
    } else {
        cli.config.format
    };
    match cli.command {
        Command::Decide(input) => {
            let (text, origin) = read_input(&input)?;
            let f = skolem_core::parse(&text).map_err(|e| Failure::from_core(e, &origin))?;
            let value =
                skolem_core::decide(&f, &limits).map_err(|e| Failure::from_core(e, &origin))?;
            print_bool(format, value);
        }
        Command::Eval { input, assign } => {
            let (text, origin) = read_input(&input)?;
            let f = skolem_core::parse(&text).map_err(|e| Failure::from_core(e, &origin))?;
            let assignment = parse_assignment(&assign)?;
            let value = skolem_core::eval_ground(&f, &assignment, &limits)
                .map_err(|e| Failure::from_core(e, &origin))?;
            print_bool(format, value);
        }
        Command::Compile { input, vars } => {
            let (text, origin) = read_input(&input)?;
            let f = skolem_core::parse(&text).map_err(|e| Failure::from_core(e, &origin))?;
            let order = vars.unwrap_or_else(|| f.free_vars());
            let set = skolem_core::compile(&f, &order, &limits)
                .map_err(|e| Failure::from_core(e, &origin))?;
            print_set(format, &set);
        }
        Command::Selftest { probe_max } => {
            let reports =
                oracle::run_battery(&limits, cli.config.oracle_bound as u64, probe_max as u64);
            let failed = reports.iter().filter(|r| !r.passed()).count();
            match format {
                Format::Text => {
                    for r in &reports {
                        let status = if r.passed() { "PASS" } else { "FAIL" };
                        println!("{status} {} ({} checks, {} ms)", r.name, r.checks, r.millis);
                        for f in r.failures.iter().take(5) {
                            println!("    {f}");
                        }
                    }
                    println!("{} passed, {} failed", reports.len() - failed, failed);
                }
                Format::Json => {
                    let cases: Vec<String> = reports
                        .iter()
                        .map(|r| {
                            format!(
                                "{{\"name\":{:?},\"passed\":{},\"checks\":{},\"failures\":{}}}",
                                r.name,
                                r.passed(),
                                r.checks,
                                r.failures.len()
                            )
                        })
                        .collect();
                    println!(
                        "{{\"passed\":{},\"failed\":{},\"cases\":[{}]}}",
                        reports.len() - failed,
                        failed,
                        cases.join(",")
                    );
                }
            }
            if failed > 0 {
                return Err(Failure {
                    code: 1,
                    message: format!("selftest: {failed} case(s) failed"),
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
