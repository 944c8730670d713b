//! Scenario files: load a TOML description of one link, run it end to end,
//! and write CSV traces plus a JSON summary.
//!
//! ```no_run
//! use phytolink::scenario::{load_scenario, run_scenario, RunOptions};
//!
//! let cfg = load_scenario("examples/scenarios/air-csk-demo.toml".as_ref()).unwrap();
//! let out = run_scenario(&cfg, &RunOptions::default()).unwrap();
//! println!("SER = {}", out.summary.metrics["ser"]);
//! ```

mod config;
mod export;
mod pipeline;
mod run;

pub use config::*;
pub use export::{export_csv, read_csv};
pub use pipeline::{frame_for, NamedSeries, Pipeline, TrialOutcome, SYMBOL_STREAM};
pub use run::{run_scenario, RunOptions, RunOutput, Summary};
