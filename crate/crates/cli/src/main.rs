use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use cutkit::{corpus, run_scenario, Scenario, ScenarioReport};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "cutkit", version, about = "Circle cutting and blowup checks on local models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario by name.
    Run {
        /// Path to a scenario JSON file, or the name of a bundled scenario.
        scenario: Option<String>,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long, env = "CUTKIT_SEED")]
        seed: Option<u64>,
        /// Only report jobs whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// List bundled scenarios and exit.
        #[arg(long)]
        list_corpus: bool,
    },
    /// Run bundled scenarios.
    Corpus {
        /// Scenario name; omit with --all.
        name: Option<String>,
        /// Run every bundled scenario in parallel.
        #[arg(long)]
        all: bool,
        /// Write every bundled scenario as JSON into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long, env = "CUTKIT_SEED")]
        seed: Option<u64>,
    },
    /// Run every registered property and print a JSON report.
    Suite {
        #[arg(long, env = "CUTKIT_SEED", default_value_t = 42)]
        seed: u64,
        /// Trials per property instead of each default.
        #[arg(long)]
        trials: Option<usize>,
        /// Write the JSON report to this path instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Failure before any job ran.
enum Fatal {
    Schema(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Fatal {
    fn from(e: anyhow::Error) -> Self {
        Fatal::Internal(e)
    }
}

fn load(arg: &str) -> Result<Scenario, Fatal> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(s) = corpus::get(arg) {
            return Ok(s);
        }
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    Scenario::from_json(&text).map_err(|e| Fatal::Schema(format!("{arg}: {e}")))
}

fn write_json(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn finish(reports: &[ScenarioReport]) -> u8 {
    reports.iter().map(|r| r.exit_code()).max().unwrap_or(0) as u8
}

fn main_inner(cli: Cli) -> Result<u8, Fatal> {
    match cli.command {
        Command::Run { scenario, json, seed, filter, list_corpus } => {
            if list_corpus {
                for name in corpus::names() {
                    println!("{name}");
                }
                return Ok(0);
            }
            let Some(arg) = scenario else {
                return Err(Fatal::Schema("no scenario given".into()));
            };
            let s = load(&arg)?;
            let report = run_scenario(&s, seed, filter.as_deref());
            print!("{}", report.to_text());
            if let Some(path) = json {
                write_json(&path, &report.to_json())?;
            }
            Ok(finish(&[report]))
        }
        Command::Corpus { name, all, export, seed } => {
            if let Some(dir) = export {
                std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                for s in corpus::all() {
                    write_json(&dir.join(format!("{}.json", s.name)), &s.to_json())?;
                }
                return Ok(0);
            }
            let scenarios = match (name, all) {
                (Some(n), false) => {
                    vec![corpus::get(&n).ok_or_else(|| Fatal::Schema(format!("no bundled scenario `{n}`")))?]
                }
                (None, true) => corpus::all(),
                (None, false) => {
                    for n in corpus::names() {
                        println!("{n}");
                    }
                    return Ok(0);
                }
                (Some(_), true) => return Err(Fatal::Schema("give a name or --all, not both".into())),
            };
            let reports: Vec<ScenarioReport> = scenarios.par_iter().map(|s| run_scenario(s, seed, None)).collect();
            for r in &reports {
                print!("{}", r.to_text());
            }
            Ok(finish(&reports))
        }
        Command::Suite { seed, trials, json } => {
            let report = cutkit_core::verify::run_suite(seed, trials).map_err(|e| Fatal::Internal(e.into()))?;
            let text = serde_json::to_string_pretty(&report).context("serializing suite report")? + "\n";
            match json {
                Some(path) if path.as_os_str() != "-" => write_json(&path, &text)?,
                _ => print!("{text}"),
            }
            if !report.all_passed() {
                for r in report.results.iter().filter(|r| !r.passed()) {
                    eprintln!("FAIL {}", r.name);
                }
                return Ok(1);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fatal::Schema(msg)) => {
            eprintln!("schema error: {msg}");
            ExitCode::from(2)
        }
        Err(Fatal::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
