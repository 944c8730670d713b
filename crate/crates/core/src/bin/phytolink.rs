//! `phytolink` — run, validate and list scenario files.
//!
//! Exit codes: 0 success, 1 validation failure, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phytolink::scenario::{load_scenario, run_scenario, RunOptions};

#[derive(Parser)]
#[command(name = "phytolink", version, about = "Plant communication link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV traces plus summary.json.
    Run {
        scenario: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte Carlo trials (0 or at least 100).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Check a scenario file and report every problem found.
    Validate { scenario: PathBuf },
    /// List the scenario files shipped with the crate.
    ListExamples,
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { scenario } => match load_scenario(&scenario) {
            Ok(cfg) => {
                println!("{}: ok ({} link, hash {})", scenario.display(), cfg.modality.name(), cfg.config_hash());
                ExitCode::SUCCESS
            }
            Err(errs) => {
                for issue in &errs.0 {
                    eprintln!("{}: {issue}", scenario.display());
                }
                ExitCode::from(1)
            }
        },
        Command::Run {
            scenario,
            seed,
            out,
            trials,
        } => {
            let cfg = match load_scenario(&scenario) {
                Ok(cfg) => cfg,
                Err(errs) => {
                    for issue in &errs.0 {
                        eprintln!("{}: {issue}", scenario.display());
                    }
                    return ExitCode::from(1);
                }
            };
            if let Some(t) = trials {
                if t != 0 && t < phytolink::linkstats::MIN_TRIALS {
                    eprintln!("--trials must be 0 or at least {}", phytolink::linkstats::MIN_TRIALS);
                    return ExitCode::from(1);
                }
            }
            let opts = RunOptions {
                seed,
                out,
                trials,
                dry_run: false,
            };
            match run_scenario(&cfg, &opts) {
                Ok(run) => {
                    let m = &run.summary.metrics;
                    println!(
                        "{}: ser = {} (noiseless {}), {} trials -> {}",
                        run.summary.name,
                        m["ser"],
                        m["ser_noiseless"],
                        run.summary.trials,
                        run.out_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}: {e}", scenario.display());
                    ExitCode::from(2)
                }
            }
        }
        Command::ListExamples => {
            let dir = scenario_dir();
            let mut names: Vec<PathBuf> = match std::fs::read_dir(&dir) {
                Ok(rd) => rd
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "toml"))
                    .collect(),
                Err(e) => {
                    eprintln!("{}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            };
            names.sort();
            for p in names {
                let summary = load_scenario(&p)
                    .map(|c| format!("{:<10} {:?}", c.modality.name(), c.modulation()).to_lowercase())
                    .unwrap_or_else(|_| "invalid".into());
                println!("{:<32} {summary}  {}", p.file_stem().unwrap().to_string_lossy(), p.display());
            }
            ExitCode::SUCCESS
        }
    }
}
