//! Batch front end: one subcommand per decision procedure, JSON instance
//! files in, one certified JSON report on standard output. Exit 0 covers
//! every computed verdict, negative answers included; 1 is a usage error;
//! 2 is malformed input.

mod commands;
mod report;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use commands::CliError;
use report::Report;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "paradesk",
    version,
    about = "Exact decision procedures for inverse-monoid dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide invariant-mean feasibility, with a mean or a refutation.
    Mean {
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        instance: Option<PathBuf>,
        /// Recheck the witness inside a previously emitted report.
        #[arg(long)]
        verify: Option<PathBuf>,
        /// Cylinder depth for the prefix backend.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Search for a Tarski matrix over the instance's base idempotent.
    Tarski {
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        instance: Option<PathBuf>,
        #[arg(long)]
        verify: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        /// Search budget for the finite backend.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Compare two type-semigroup elements, with equivalence witnesses.
    Type {
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        instance: Option<PathBuf>,
        #[arg(long)]
        verify: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Embed the prefix-exchange group along a tight orthogonal pair.
    Vembed {
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        instance: Option<PathBuf>,
        #[arg(long)]
        verify: Option<PathBuf>,
        /// Leaf bound for the embedded test census.
        #[arg(long, default_value_t = 3)]
        max_leaves: usize,
    },
    /// Decide whether two copies of a subset fit in its neighborhood.
    Wobble {
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        space: Option<PathBuf>,
        #[arg(long)]
        verify: Option<PathBuf>,
        /// Subset of points: "a..b", "a..=b", or "p,q,r".
        #[arg(long = "E", required_unless_present = "verify")]
        subset: Option<String>,
        /// Displacement bound, a rational like "2" or "5/2".
        #[arg(long = "C", required_unless_present = "verify")]
        bound: Option<String>,
    },
    /// Compare Koopman and regular operator norms on formal elements.
    Rep {
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        instance: Option<PathBuf>,
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Classify the idempotent D- and J-order of a generated monoid.
    Green {
        #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
        instance: Option<PathBuf>,
        #[arg(long)]
        verify: Option<PathBuf>,
        /// Element budget for the closure.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
}

fn read_input(path: &PathBuf) -> Result<(Vec<u8>, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| {
        CliError::Input(format!("cannot read {}: {e}", path.display()))
    })?;
    let digest = report::digest(&bytes);
    Ok((bytes, digest))
}

fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Input(format!("malformed input: {e}")))
}

struct Run {
    command: &'static str,
    args: BTreeMap<String, String>,
    input_digest: String,
    instance: serde_json::Value,
    outcome: commands::Outcome,
}

fn execute(cmd: Cmd) -> Result<Run, CliError> {
    match cmd {
        Cmd::Mean { instance, verify, depth } => {
            if let Some(path) = verify {
                return verify_run("mean", &path);
            }
            let (bytes, input_digest) = read_input(&instance.expect("clap requires"))?;
            let dto = parse_json(&bytes)?;
            let (echo, outcome) = commands::run_mean(&dto, depth)?;
            Ok(Run {
                command: "mean",
                args: args([("depth", depth.to_string())]),
                input_digest,
                instance: echo,
                outcome,
            })
        }
        Cmd::Tarski { instance, verify, degree, budget } => {
            if let Some(path) = verify {
                return verify_run("tarski", &path);
            }
            let (bytes, input_digest) = read_input(&instance.expect("clap requires"))?;
            let dto = parse_json(&bytes)?;
            let (echo, outcome) = commands::run_tarski(&dto, degree, budget)?;
            Ok(Run {
                command: "tarski",
                args: args([
                    ("degree", degree.to_string()),
                    ("budget", budget.to_string()),
                ]),
                input_digest,
                instance: echo,
                outcome,
            })
        }
        Cmd::Type { instance, verify, budget } => {
            if let Some(path) = verify {
                return verify_run("type", &path);
            }
            let (bytes, input_digest) = read_input(&instance.expect("clap requires"))?;
            let dto = parse_json(&bytes)?;
            let (echo, outcome) = commands::run_type(&dto, budget)?;
            Ok(Run {
                command: "type",
                args: args([("budget", budget.to_string())]),
                input_digest,
                instance: echo,
                outcome,
            })
        }
        Cmd::Vembed { instance, verify, max_leaves } => {
            if let Some(path) = verify {
                return verify_run("vembed", &path);
            }
            let (bytes, input_digest) = read_input(&instance.expect("clap requires"))?;
            let dto = parse_json(&bytes)?;
            let (echo, outcome) = commands::run_vembed(&dto, max_leaves)?;
            Ok(Run {
                command: "vembed",
                args: args([("max_leaves", max_leaves.to_string())]),
                input_digest,
                instance: echo,
                outcome,
            })
        }
        Cmd::Wobble { space, verify, subset, bound } => {
            if let Some(path) = verify {
                return verify_run("wobble", &path);
            }
            let (bytes, input_digest) = read_input(&space.expect("clap requires"))?;
            let dto = parse_json(&bytes)?;
            let subset = subset.expect("clap requires");
            let bound = bound.expect("clap requires");
            let (echo, outcome) = commands::run_wobble(&dto, &subset, &bound)?;
            Ok(Run {
                command: "wobble",
                args: args([("E", subset), ("C", bound)]),
                input_digest,
                instance: echo,
                outcome,
            })
        }
        Cmd::Rep { instance, verify } => {
            if let Some(path) = verify {
                return verify_run("rep", &path);
            }
            let (bytes, input_digest) = read_input(&instance.expect("clap requires"))?;
            let dto = parse_json(&bytes)?;
            let (echo, outcome) = commands::run_rep(&dto)?;
            Ok(Run {
                command: "rep",
                args: BTreeMap::new(),
                input_digest,
                instance: echo,
                outcome,
            })
        }
        Cmd::Green { instance, verify, cap } => {
            if let Some(path) = verify {
                return verify_run("green", &path);
            }
            let (bytes, input_digest) = read_input(&instance.expect("clap requires"))?;
            let dto = parse_json(&bytes)?;
            let (echo, outcome) = commands::run_green(&dto, cap)?;
            Ok(Run {
                command: "green",
                args: args([("cap", cap.to_string())]),
                input_digest,
                instance: echo,
                outcome,
            })
        }
    }
}

fn args<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn verify_run(expected: &'static str, path: &PathBuf) -> Result<Run, CliError> {
    let (bytes, input_digest) = read_input(path)?;
    let report: Report = parse_json(&bytes)?;
    if report.command != expected {
        return Err(CliError::Input(format!(
            "report was emitted by `{}`, not `{expected}`",
            report.command
        )));
    }
    let outcome = commands::verify(&report)?;
    Ok(Run {
        command: expected,
        args: args([("mode", "verify".to_string())]),
        input_digest,
        instance: report.instance,
        outcome,
    })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let started = Instant::now();
    match execute(cli.command) {
        Ok(run) => {
            let report = Report {
                tool: report::tool_version(),
                command: run.command.to_string(),
                args: run.args,
                input_digest: run.input_digest,
                instance: run.instance,
                verdict: run.outcome.verdict,
                scope: run.outcome.scope,
                witness: run.outcome.witness,
                tolerance: run.outcome.tolerance,
                timing_ms: started.elapsed().as_millis(),
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            std::process::exit(2);
        }
    }
}
