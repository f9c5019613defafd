use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use wsbn_cli::dsl::{parse_model_bytes, Model};
use wsbn_cli::report::{QueryReport, RunFile, VerdictKind};
use wsbn_cli::run::{explore_queries, replay_witness, run_queries, ExploreSettings, VerifyOptions};

/// Coverability checker for broadcast networks of well-structured and
/// pushdown processes.
#[derive(Parser)]
#[command(name = "wsbn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide every query of a model file.
    Verify {
        model: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        max_basis: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Check saturation invariants at every iteration.
        #[arg(long)]
        audit: bool,
        /// Skip witness construction for positive answers.
        #[arg(long)]
        no_witness: bool,
    },
    /// Bounded forward search on networks of up to `--nodes` processes.
    Explore {
        model: PathBuf,
        #[arg(long)]
        nodes: usize,
        /// Maximum number of broadcasts.
        #[arg(long)]
        depth: usize,
        /// Discard configurations with a larger counter or stack height.
        #[arg(long, default_value_t = 8)]
        cap: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a witness, report or explore file against a model.
    Replay {
        model: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
}

const INPUT_ERROR: u8 = 1;

fn load(path: &Path) -> Result<Model, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_model_bytes(&bytes)
        .and_then(|m| m.compile())
        .map_err(|d| format!("{}:{d}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}

fn summary(q: &QueryReport) -> String {
    let mut line = format!(
        "line {}: cover {} [{}]: {} ({:.1} ms)",
        q.line,
        q.target,
        q.semantics,
        q.verdict.as_str(),
        q.elapsed_us as f64 / 1000.0
    );
    if let Some(w) = &q.witness {
        line += &format!(", witness with {} nodes and {} steps", w.initial.vertices.len(), w.steps.len());
    }
    if let Some(t) = &q.topologies {
        if q.verdict == VerdictKind::NotCoverable && !t.exhaustive {
            line += ", within the vertex bound only";
        }
    }
    if let Some(reason) = &q.exhausted {
        line += &format!(": {reason}");
    }
    if let Some(e) = &q.witness_error {
        line += &format!(", no witness: {e}");
    }
    line
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Verify {
            model,
            report,
            max_basis,
            max_iters,
            audit,
            no_witness,
        } => {
            let m = load(&model)?;
            let options = VerifyOptions {
                max_basis,
                max_iters,
                audit,
                witnesses: !no_witness,
                ..VerifyOptions::default()
            };
            let r = run_queries(&m, &options);
            for q in &r.queries {
                println!("{}", summary(q));
            }
            if let Some(path) = report {
                write_json(&path, &r)?;
            }
            Ok(r.exit_code() as u8)
        }
        Command::Explore {
            model,
            nodes,
            depth,
            cap,
            max_states,
            report,
        } => {
            let m = load(&model)?;
            let settings = ExploreSettings {
                nodes,
                depth,
                magnitude_cap: cap,
                max_states,
            };
            let r = explore_queries(&m, &settings);
            for q in &r.queries {
                let outcome = match (&q.found_nodes, &q.exhausted) {
                    (_, Some(reason)) => format!("search stopped: {reason}"),
                    (Some(n), None) => {
                        let steps = q.witness.as_ref().map_or(0, |w| w.steps.len());
                        format!("run found on {n} nodes with {steps} steps")
                    }
                    (None, None) => {
                        let cap_note = if q.capped { ", some configurations over the cap were dropped" } else { "" };
                        format!("no run within the bounds ({} states{cap_note})", q.explored)
                    }
                };
                println!("line {}: cover {} [{}]: {outcome}", q.line, q.target, q.semantics);
            }
            if let Some(path) = report {
                write_json(&path, &r)?;
            }
            Ok(r.exit_code() as u8)
        }
        Command::Replay { model, witness } => {
            let m = load(&model)?;
            let text = fs::read_to_string(&witness).map_err(|e| format!("{}: {e}", witness.display()))?;
            let file = RunFile::parse(&text).map_err(|e| format!("{}: {e}", witness.display()))?;
            let witnesses = file.witnesses();
            if witnesses.is_empty() {
                return Err(format!("{}: contains no witness", witness.display()));
            }
            for (i, w) in witnesses.into_iter().enumerate() {
                let s = replay_witness(&m, w).map_err(|e| format!("witness {}: {e}", i + 1))?;
                let covers: Vec<String> = s.covers.iter().map(|l| format!("line {l}")).collect();
                let covers = if covers.is_empty() { "no query target".to_owned() } else { covers.join(", ") };
                println!(
                    "witness {}: valid [{}], {} nodes, {} steps, covers {covers}",
                    i + 1,
                    s.semantics,
                    s.nodes,
                    s.steps
                );
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
