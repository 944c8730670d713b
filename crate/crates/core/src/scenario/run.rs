//! Running a scenario and writing its artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{Modality, Modulation, ScenarioConfig};
use super::export::export_csv;
use super::pipeline::{Pipeline, TrialOutcome};
use crate::channel_air::{ChannelResponse, Medium};
use crate::error::{Error, Result};
use crate::linkstats::{snr_estimate, Snr, MIN_TRIALS};
use crate::numerics::RandomSource;

/// Command-line style overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<usize>,
    /// Compute only; skip writing files.
    pub dry_run: bool,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub modality: Modality,
    pub modulation: Modulation,
    pub seed: u64,
    pub version: String,
    pub config_hash: String,
    pub n_symbols: usize,
    pub trials: usize,
    pub metrics: BTreeMap<String, Value>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Summary,
    /// Effective configuration after overrides.
    pub config: ScenarioConfig,
    /// Realisation written to `received*.csv` and `detected.csv`.
    pub outcome: TrialOutcome,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Applies `opts`, runs the link and (unless `dry_run`) writes CSV traces,
/// `detected.csv` and `summary.json` to the output directory.
///
/// Everything is a function of the effective configuration, so repeated runs
/// produce byte-identical files.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput> {
    let mut cfg = cfg.clone();
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &opts.out {
        cfg.output = Some(out.clone());
    }
    if let Some(t) = opts.trials {
        if t != 0 && t < MIN_TRIALS {
            return Err(Error::param("trials", format!("must be 0 or at least {MIN_TRIALS}")));
        }
        cfg.link.trials = Some(t);
    }

    let pipeline = Pipeline::new(&cfg)?;
    let clean = pipeline.noiseless().map_err(|e| e.at("noiseless run"))?;
    let trials = cfg.trials();
    let noisy = pipeline.is_noisy();
    let representative = if noisy {
        pipeline.trial(RandomSource::new(cfg.seed, 0)).map_err(|e| e.at("trial"))?
    } else {
        clean.clone()
    };

    let mut metrics = pipeline.metrics.clone();
    metrics.insert("ser_noiseless".into(), json!(clean.detection.ser));
    if trials > 0 {
        let mc = pipeline.monte_carlo(trials, cfg.seed).map_err(|e| e.at("monte carlo"))?;
        metrics.insert("ser".into(), json!(mc.ser));
        metrics.insert("ci95".into(), json!(mc.ci95));
    } else {
        metrics.insert("ser".into(), json!(representative.detection.ser));
        metrics.insert("ci95".into(), Value::Null);
    }
    metrics.insert("errors".into(), json!(representative.detection.errors));
    metrics.insert("erasures".into(), json!(representative.detection.erasures));
    let snr = match cfg.modality {
        Modality::Acoustic => cfg.link.snr_db.map_or(Snr::Infinite, Snr::Db),
        _ => {
            let mut worst = Snr::Infinite;
            for (c, r) in clean.received.iter().zip(&representative.received) {
                let s = snr_estimate(
                    &ChannelResponse::new(c.clone(), 0.0, Medium::Air),
                    &ChannelResponse::new(r.clone(), 0.0, Medium::Air),
                )?;
                if s.db() < worst.db() {
                    worst = s;
                }
            }
            worst
        }
    };
    metrics.insert(
        "snr_db".into(),
        match snr {
            Snr::Db(v) if v.is_finite() => json!(v),
            _ => json!("inf"),
        },
    );

    let summary = Summary {
        name: cfg.name.clone(),
        modality: cfg.modality,
        modulation: cfg.modulation(),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.config_hash(),
        n_symbols: pipeline.frame().len(),
        trials,
        metrics,
    };
    let out_dir = cfg.output_dir();
    let mut files = Vec::new();
    if !opts.dry_run {
        files = write_artifacts(&pipeline, &representative, &summary, &out_dir).map_err(|e| e.at("export"))?;
    }
    Ok(RunOutput {
        summary,
        config: cfg,
        outcome: representative,
        out_dir,
        files,
    })
}

fn write_artifacts(
    pipeline: &Pipeline,
    outcome: &TrialOutcome,
    summary: &Summary,
    dir: &std::path::Path,
) -> Result<Vec<PathBuf>> {
    let mut series = pipeline.series.clone();
    let n = outcome.received.len();
    for (j, r) in outcome.received.iter().enumerate() {
        let name = if n == 1 { "received".to_string() } else { format!("received_{j}") };
        series.push((name, r.clone()));
    }
    let mut files = export_csv(&series, dir)?;

    let frame = pipeline.frame();
    let mut text = String::from("symbol,t_start[s],truth,decided,statistic\n");
    for (i, (&truth, decided)) in frame.symbols().iter().zip(&outcome.detection.decided_symbols).enumerate() {
        let decided = decided.map_or_else(|| "erasure".to_string(), |d| d.to_string());
        let stat = outcome.detection.statistics.get(i).copied().unwrap_or(f64::NAN);
        writeln!(text, "{i},{:?},{truth},{decided},{stat:?}", i as f64 * frame.symbol_period()).expect("write to String");
    }
    let path = dir.join("detected.csv");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.push(path);

    if let Some(events) = &outcome.events {
        let path = dir.join("events.csv");
        crate::acoustic::export_event_csv(events, &path)?;
        files.push(path);
    }

    let path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(summary).expect("summary serialises");
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(files)
}
