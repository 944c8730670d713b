//! Load a shipped scenario, run it and print the summary.
//!
//! `cargo run --example run_scenario -- [path/to/scenario.toml]`

use std::path::PathBuf;

use phytolink::scenario::{load_scenario, run_scenario, RunOptions};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios/air-csk-demo.toml"));
    let cfg = match load_scenario(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let out = std::env::temp_dir().join("phytolink-example").join(&cfg.name);
    let opts = RunOptions {
        out: Some(out),
        ..RunOptions::default()
    };
    match run_scenario(&cfg, &opts) {
        Ok(run) => {
            println!("{}", serde_json::to_string_pretty(&run.summary).unwrap());
            println!("wrote {} files to {}", run.files.len(), run.out_dir.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
}
