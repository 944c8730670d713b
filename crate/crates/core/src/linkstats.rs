//! Link-layer analysis shared by every modality: symbol detection, channel
//! memory metrics, SNR and seeded Monte Carlo error rates.
//!
//! Frames start at `t = 0`; symbol `i` occupies `[i·T, (i+1)·T)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel_air::ChannelResponse;
use crate::error::{ensure, Error, Result};
use crate::numerics::{RandomSource, TimeSeries};
use crate::transmitter::{validate_ratio_table, SymbolFrame};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// Decisions per symbol; `None` marks an erasure.
    pub decided_symbols: Vec<Option<usize>>,
    /// Per-symbol detection statistic (window mean, event count, ...).
    pub statistics: Vec<f64>,
    /// Wrong decisions plus erasures.
    pub errors: usize,
    pub erasures: usize,
    pub ser: f64,
}

impl DetectionResult {
    fn score(decided: Vec<Option<usize>>, statistics: Vec<f64>, truth: &[usize]) -> Self {
        let erasures = decided.iter().filter(|d| d.is_none()).count();
        let errors = decided
            .iter()
            .zip(truth)
            .filter(|(d, t)| **d != Some(**t))
            .count();
        DetectionResult {
            ser: errors as f64 / truth.len() as f64,
            decided_symbols: decided,
            statistics,
            errors,
            erasures,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsiMetrics {
    /// Time from emission (`t = 0`) until 95% of the response integral arrived.
    pub delay_spread_s: f64,
    /// Fraction of the response integral arriving after one symbol period.
    pub isi_ratio: f64,
}

/// Integral of the piecewise-linear interpolant of `s` over `(−∞, t]`,
/// with the series taken as zero before its first sample.
fn integral_until(s: &TimeSeries, t: f64) -> f64 {
    let v = s.values();
    let dt = s.dt();
    let u = (t - s.t0()) / dt;
    if u <= 0.0 {
        return 0.0;
    }
    let full = (u.floor() as usize).min(v.len() - 1);
    let mut acc = 0.0;
    for k in 0..full {
        acc += 0.5 * (v[k] + v[k + 1]) * dt;
    }
    if full < v.len() - 1 {
        let f = u - full as f64;
        let v_t = v[full] + f * (v[full + 1] - v[full]);
        acc += 0.5 * (v[full] + v_t) * f * dt;
    }
    acc
}

pub fn isi_metrics(h: &ChannelResponse, symbol_period: f64) -> Result<IsiMetrics> {
    ensure(symbol_period >= 0.0, "symbol_period", "must be non-negative")?;
    let s = &h.series;
    ensure(s.values().iter().all(|&v| v >= 0.0), "h", "response must be non-negative")?;
    let total = integral_until(s, f64::INFINITY);
    if !(total > 0.0) {
        return Err(Error::Domain("channel response is identically zero".into()));
    }
    let delay_spread_s = crate::channel_air::time_to_fraction(s, 0.95).max(0.0);
    let isi_ratio = ((total - integral_until(s, symbol_period)) / total).clamp(0.0, 1.0);
    Ok(IsiMetrics {
        delay_spread_s,
        isi_ratio,
    })
}

/// Per-symbol statistic computed over the sampling window.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    #[default]
    WindowMean,
    /// Correlation with a pulse template sampled from the window start,
    /// normalised by the template energy.
    Matched { template: Vec<f64> },
    /// Rise of the signal across the window (last sample minus the sample
    /// just before the window), for integrating channels.
    Increment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorOptions {
    /// Window start relative to the symbol start (s).
    pub window_offset: f64,
    /// Window length (s); the remainder of the period when unset.
    pub window_width: Option<f64>,
    pub statistic: Statistic,
    /// Background level subtracted before the statistic is computed.
    pub baseline: f64,
}

impl Default for DetectorOptions {
    fn default() -> Self {
        DetectorOptions {
            window_offset: 0.0,
            window_width: None,
            statistic: Statistic::WindowMean,
            baseline: 0.0,
        }
    }
}

impl DetectorOptions {
    fn validate(&self, period: f64) -> Result<()> {
        ensure(self.window_offset >= 0.0, "window_offset", "must be non-negative")?;
        ensure(self.window_offset < period, "window_offset", "must be shorter than the symbol period")?;
        if let Some(w) = self.window_width {
            ensure(w > 0.0, "window_width", "must be positive")?;
        }
        if let Statistic::Matched { template } = &self.statistic {
            let e: f64 = template.iter().map(|g| g * g).sum();
            ensure(e > 0.0, "template", "must have non-zero energy")?;
        }
        ensure(self.baseline.is_finite(), "baseline", "must be finite")
    }
}

/// Sample index range `[lo, hi)` with `t0 + k·dt ∈ [start, end)`, clipped to
/// the samples present; an empty overlap is an error.
fn window_indices(s: &TimeSeries, start: f64, end: f64) -> Result<(usize, usize)> {
    let eps = 1e-9;
    let lo = ((start - s.t0()) / s.dt() - eps).ceil().max(0.0);
    let hi = ((end - s.t0()) / s.dt() - eps).ceil().min(s.len() as f64);
    if hi <= lo {
        return Err(Error::Domain(format!(
            "sampling window [{start}, {end}) lies outside the signal [{}, {}]",
            s.t0(),
            s.end_time()
        )));
    }
    Ok((lo as usize, hi as usize))
}

/// Per-symbol detection statistic of `s` over the frame windows.
pub fn symbol_statistics(s: &TimeSeries, frame: &SymbolFrame, opts: &DetectorOptions) -> Result<Vec<f64>> {
    let period = frame.symbol_period();
    opts.validate(period)?;
    let width = opts.window_width.unwrap_or(period - opts.window_offset);
    let v = s.values();
    (0..frame.len())
        .map(|i| {
            let start = i as f64 * period + opts.window_offset;
            let (lo, hi) = window_indices(s, start, start + width)?;
            let x = v[lo..hi].iter().map(|x| x - opts.baseline);
            Ok(match &opts.statistic {
                Statistic::WindowMean => x.sum::<f64>() / (hi - lo) as f64,
                Statistic::Increment => v[hi - 1] - v[lo.saturating_sub(1)],
                Statistic::Matched { template } => {
                    let (num, den) = x
                        .zip(template)
                        .fold((0.0, 0.0), |(n, d), (x, g)| (n + x * g, d + g * g));
                    num / den
                }
            })
        })
        .collect()
}

/// Threshold detector with window-mean statistics.
pub fn detect_csk(received: &ChannelResponse, frame: &SymbolFrame, thresholds: &[f64]) -> Result<DetectionResult> {
    detect_csk_with(received, frame, thresholds, &DetectorOptions::default())
}

/// Threshold detector; symbol = number of thresholds at or below the statistic.
pub fn detect_csk_with(
    received: &ChannelResponse,
    frame: &SymbolFrame,
    thresholds: &[f64],
    opts: &DetectorOptions,
) -> Result<DetectionResult> {
    if thresholds.len() + 1 != frame.alphabet_size() {
        return Err(Error::param(
            "thresholds",
            format!("{} thresholds for alphabet of size {}", thresholds.len(), frame.alphabet_size()),
        ));
    }
    ensure(thresholds.iter().all(|t| t.is_finite()), "thresholds", "must be finite")?;
    ensure(thresholds.windows(2).all(|w| w[0] < w[1]), "thresholds", "must be strictly increasing")?;
    let stats = symbol_statistics(&received.series, frame, opts)?;
    let decided = stats
        .iter()
        .map(|&x| Some(thresholds.partition_point(|&t| t <= x)))
        .collect();
    Ok(DetectionResult::score(decided, stats, frame.symbols()))
}

/// Midpoints between adjacent levels, the natural CSK thresholds.
pub fn midpoint_thresholds(levels: &[f64]) -> Vec<f64> {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Nearest-ratio detector over one response per species.
pub fn detect_rsk(
    received: &[ChannelResponse],
    frame: &SymbolFrame,
    ratio_table: &[Vec<f64>],
) -> Result<DetectionResult> {
    detect_rsk_with(received, frame, ratio_table, &DetectorOptions::default())
}

/// Window means are normalised to sum one and matched to the closest table
/// row (Euclidean). Windows where every species is zero are erasures.
pub fn detect_rsk_with(
    received: &[ChannelResponse],
    frame: &SymbolFrame,
    ratio_table: &[Vec<f64>],
    opts: &DetectorOptions,
) -> Result<DetectionResult> {
    ensure(received.len() >= 2, "received", "at least two species are required")?;
    validate_ratio_table(ratio_table, frame.alphabet_size())?;
    if ratio_table[0].len() != received.len() {
        return Err(Error::LengthMismatch(ratio_table[0].len(), received.len()));
    }
    for (a, row) in ratio_table.iter().enumerate() {
        if ratio_table[..a].contains(row) {
            return Err(Error::param("ratio_table", format!("row {a} repeats an earlier row")));
        }
    }
    let per_species: Vec<Vec<f64>> = received
        .iter()
        .map(|r| symbol_statistics(&r.series, frame, opts))
        .collect::<Result<_>>()?;
    let mut decided = Vec::with_capacity(frame.len());
    let mut totals = Vec::with_capacity(frame.len());
    for i in 0..frame.len() {
        let m: Vec<f64> = per_species.iter().map(|s| s[i].max(0.0)).collect();
        let sum: f64 = m.iter().sum();
        totals.push(sum);
        if !(sum > 0.0) {
            decided.push(None);
            continue;
        }
        let best = ratio_table
            .iter()
            .map(|row| row.iter().zip(&m).map(|(r, x)| (x / sum - r).powi(2)).sum::<f64>())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(s, _)| s);
        decided.push(best);
    }
    Ok(DetectionResult::score(decided, totals, frame.symbols()))
}

/// Event-count detector: symbol `s` is signalled by `counts[s]` events in its
/// period; decisions pick the closest count (lower symbol on ties).
pub fn detect_events(events: &[f64], frame: &SymbolFrame, counts: &[usize]) -> Result<DetectionResult> {
    if counts.len() != frame.alphabet_size() {
        return Err(Error::LengthMismatch(frame.alphabet_size(), counts.len()));
    }
    for (a, c) in counts.iter().enumerate() {
        ensure(!counts[..a].contains(c), "counts", "event counts must be distinct")?;
    }
    ensure(events.windows(2).all(|w| w[0] <= w[1]), "events", "event times must be sorted")?;
    let mut observed = vec![0usize; frame.len()];
    for &t in events {
        if let Some(i) = frame.symbol_index_at(t) {
            observed[i] += 1;
        }
    }
    let decided = observed
        .iter()
        .map(|&n| {
            counts
                .iter()
                .enumerate()
                .min_by_key(|(_, &c)| c.abs_diff(n))
                .map(|(s, _)| s)
        })
        .collect();
    let stats = observed.iter().map(|&n| n as f64).collect();
    Ok(DetectionResult::score(decided, stats, frame.symbols()))
}

/// Signal-to-noise ratio; identical signals are reported as `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Snr {
    Db(f64),
    Infinite,
}

impl Snr {
    pub fn db(self) -> f64 {
        match self {
            Snr::Db(v) => v,
            Snr::Infinite => f64::INFINITY,
        }
    }
}

/// `10·log10(Σ clean² / Σ (noisy − clean)²)`.
pub fn snr_estimate(clean: &ChannelResponse, noisy: &ChannelResponse) -> Result<Snr> {
    clean.series.check_aligned(&noisy.series)?;
    let signal: f64 = clean.values().iter().map(|x| x * x).sum();
    let noise: f64 = clean
        .values()
        .iter()
        .zip(noisy.values())
        .map(|(c, n)| (n - c) * (n - c))
        .sum();
    if noise == 0.0 {
        return Ok(Snr::Infinite);
    }
    Ok(Snr::Db(10.0 * (signal / noise).log10()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub ser: f64,
    /// Normal-approximation 95% half-width, `1.96 · sd / √n`.
    pub ci95: f64,
    pub n_trials: usize,
}

pub const MIN_TRIALS: usize = 100;

/// Runs `trial(i, rng_i)` for `i in 0..n_trials`, each returning the SER of
/// one independent realisation.
///
/// Trial `i` receives the stream `i` of the base seed, so results do not
/// depend on scheduling; trials run in parallel and are reduced in order.
pub fn monte_carlo_ser<F>(n_trials: usize, rng: RandomSource, trial: F) -> Result<MonteCarlo>
where
    F: Fn(usize, RandomSource) -> Result<f64> + Sync,
{
    ensure(n_trials >= MIN_TRIALS, "n_trials", "at least 100 trials are required")?;
    let sers: Vec<Result<f64>> = (0..n_trials)
        .into_par_iter()
        .map(|i| trial(i, RandomSource::new(rng.seed, i as u64)))
        .collect();
    let mut values = Vec::with_capacity(n_trials);
    for (index, r) in sers.into_iter().enumerate() {
        match r {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Trial {
                    index,
                    source: Box::new(Error::Domain(format!("trial returned SER {v}"))),
                })
            }
            Err(e) => {
                return Err(Error::Trial {
                    index,
                    source: Box::new(e),
                })
            }
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MonteCarlo {
        ser: mean,
        ci95: 1.96 * var.sqrt() / n.sqrt(),
        n_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_air::Medium;
    use crate::numerics::{TimeGrid, Unit};
    use rand::Rng;

    fn resp(values: Vec<f64>, dt: f64) -> ChannelResponse {
        ChannelResponse::new(TimeSeries::new(0.0, dt, values, Unit::Concentration).unwrap(), 1.0, Medium::Air)
    }

    fn piecewise(frame: &SymbolFrame, levels: &[f64], dt: f64) -> ChannelResponse {
        let grid = frame.grid(dt).unwrap();
        let s = TimeSeries::from_fn(grid, Unit::Concentration, |t| {
            levels[frame.symbols()[frame.symbol_index_at(t).unwrap()]]
        })
        .unwrap();
        ChannelResponse::new(s, 1.0, Medium::Air)
    }

    #[test]
    fn increment_statistic_reads_rises() {
        let frame = SymbolFrame::new(vec![1, 0, 1], 4.0, 2).unwrap();
        // staircase: +2 during symbols 0 and 2, flat during symbol 1
        let v = vec![0.5, 1.0, 1.5, 2.0, 2.0, 2.0, 2.0, 2.0, 2.5, 3.0, 3.5, 4.0];
        let s = TimeSeries::new(0.0, 1.0, v, crate::numerics::Unit::Flux).unwrap();
        let opts = DetectorOptions {
            statistic: Statistic::Increment,
            ..DetectorOptions::default()
        };
        let st = symbol_statistics(&s, &frame, &opts).unwrap();
        assert_eq!(st, vec![1.5, 0.0, 2.0]);
    }

    #[test]
    fn isi_examples() {
        let h = resp(vec![0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        assert_eq!(isi_metrics(&h, 4.0).unwrap().isi_ratio, 0.0);
        assert!(isi_metrics(&h, 1e-9).unwrap().isi_ratio > 1.0 - 1e-9);
        let m = isi_metrics(&h, 2.0).unwrap();
        assert!((m.isi_ratio - 0.5).abs() < 1e-12);
        assert!(m.delay_spread_s > 2.0 && m.delay_spread_s < 4.0);
        assert!(isi_metrics(&resp(vec![0.0; 5], 1.0), 1.0).is_err());
    }

    #[test]
    fn csk_examples() {
        let frame = SymbolFrame::new(vec![0, 1, 1, 0, 1], 10.0, 2).unwrap();
        let r = piecewise(&frame, &[1.0, 3.0], 0.5);
        let d = detect_csk(&r, &frame, &[2.0]).unwrap();
        assert_eq!(d.ser, 0.0);
        assert_eq!(d.statistics, vec![1.0, 3.0, 3.0, 1.0, 3.0]);

        let zero = resp(vec![0.0; 100], 0.5);
        let d = detect_csk(&zero, &frame, &[0.1]).unwrap();
        assert!(d.decided_symbols.iter().all(|s| *s == Some(0)));

        let frame4 = SymbolFrame::new(vec![0, 1, 2, 3], 10.0, 4).unwrap();
        let r4 = piecewise(&frame4, &[0.0, 1.0, 2.0, 3.0], 0.5);
        assert!(detect_csk(&r4, &frame4, &[1.5, 0.5, 2.5]).is_err());
        assert_eq!(detect_csk(&r4, &frame4, &midpoint_thresholds(&[0.0, 1.0, 2.0, 3.0])).unwrap().ser, 0.0);

        let short = resp(vec![1.0; 10], 0.5);
        assert!(detect_csk(&short, &frame, &[2.0]).is_err());
    }

    #[test]
    fn csk_window_options() {
        let frame = SymbolFrame::new(vec![1, 0], 10.0, 2).unwrap();
        let r = piecewise(&frame, &[1.0, 3.0], 0.5);
        let late = DetectorOptions {
            window_offset: 5.0,
            window_width: Some(2.0),
            baseline: 1.0,
            ..DetectorOptions::default()
        };
        let d = detect_csk_with(&r, &frame, &[1.0], &late).unwrap();
        assert_eq!(d.statistics, vec![2.0, 0.0]);
        let matched = DetectorOptions {
            statistic: Statistic::Matched { template: vec![1.0; 20] },
            ..DetectorOptions::default()
        };
        let d = detect_csk_with(&r, &frame, &[2.0], &matched).unwrap();
        assert_eq!(d.statistics, vec![3.0, 1.0]);
        assert_eq!(d.ser, 0.0);
    }

    fn rsk_responses(frame: &SymbolFrame, table: &[Vec<f64>], scale: f64) -> Vec<ChannelResponse> {
        (0..table[0].len())
            .map(|j| {
                let levels: Vec<f64> = table.iter().map(|row| scale * row[j]).collect();
                piecewise(frame, &levels, 0.5)
            })
            .collect()
    }

    #[test]
    fn rsk_examples() {
        let table = vec![vec![0.8, 0.2], vec![0.3, 0.7]];
        let frame = SymbolFrame::new(vec![0, 1, 1, 0, 0, 1], 8.0, 2).unwrap();
        let rx = rsk_responses(&frame, &table, 2.0);
        let base = detect_rsk(&rx, &frame, &table).unwrap();
        assert_eq!(base.ser, 0.0);
        let scaled: Vec<ChannelResponse> = rx
            .iter()
            .map(|r| ChannelResponse::new(r.series.scale(7.3).unwrap(), r.distance, r.medium))
            .collect();
        assert_eq!(detect_rsk(&scaled, &frame, &table).unwrap().decided_symbols, base.decided_symbols);

        let onehot = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(detect_rsk(&rsk_responses(&frame, &onehot, 1.0), &frame, &onehot).unwrap().ser, 0.0);

        let silent = vec![resp(vec![0.0; 96], 0.5), resp(vec![0.0; 96], 0.5)];
        let d = detect_rsk(&silent, &frame, &table).unwrap();
        assert_eq!(d.erasures, 6);
        assert_eq!(d.ser, 1.0);
        assert!(detect_rsk(&silent[..1], &frame, &table).is_err());
        assert!(detect_rsk(&rx, &frame, &[table[0].clone(), table[0].clone()]).is_err());
    }

    #[test]
    fn event_examples() {
        let frame = SymbolFrame::new(vec![0, 2, 1, 2], 10.0, 3).unwrap();
        let counts = [0, 1, 3];
        let events = vec![12.0, 14.0, 16.0, 25.0, 31.0, 32.0, 33.0];
        assert_eq!(detect_events(&events, &frame, &counts).unwrap().ser, 0.0);
        let d = detect_events(&[], &frame, &counts).unwrap();
        assert!(d.decided_symbols.iter().all(|s| *s == Some(0)));
        let boundary = detect_events(&[10.0], &frame, &counts).unwrap();
        assert_eq!(boundary.statistics, vec![0.0, 1.0, 0.0, 0.0]);
        assert!(detect_events(&[2.0, 1.0], &frame, &counts).is_err());
        assert!(detect_events(&[], &frame, &[0, 1, 1]).is_err());
    }

    #[test]
    fn snr_examples() {
        let clean = resp(vec![1.0, -1.0, 1.0, -1.0], 1.0);
        let noisy = resp(vec![2.0, -2.0, 2.0, -2.0], 1.0);
        assert!(snr_estimate(&clean, &noisy).unwrap().db().abs() < 1e-12);
        assert_eq!(snr_estimate(&clean, &clean).unwrap(), Snr::Infinite);
        let louder = resp(vec![11.0, -11.0, 11.0, -11.0], 1.0);
        let a = snr_estimate(&clean, &noisy).unwrap().db();
        let b = snr_estimate(&clean, &louder).unwrap().db();
        assert!((a - b - 20.0).abs() < 1e-12);
        let other = ChannelResponse::new(
            TimeSeries::new(0.5, 1.0, vec![0.0; 4], Unit::Concentration).unwrap(),
            1.0,
            Medium::Air,
        );
        assert!(snr_estimate(&clean, &other).is_err());
    }

    #[test]
    fn monte_carlo_examples() {
        let zero = monte_carlo_ser(200, RandomSource::new(1, 0), |_, _| Ok(0.0)).unwrap();
        assert_eq!((zero.ser, zero.ci95), (0.0, 0.0));

        let coin = |_: usize, rng: RandomSource| {
            let mut r = rng.rng();
            let flips = (0..20).filter(|_| r.random::<bool>()).count();
            Ok(flips as f64 / 20.0)
        };
        let a = monte_carlo_ser(10_000, RandomSource::new(42, 0), coin).unwrap();
        assert!((a.ser - 0.5).abs() < 0.02);
        let b = monte_carlo_ser(10_000, RandomSource::new(42, 0), coin).unwrap();
        assert_eq!(a.ser.to_bits(), b.ser.to_bits());
        assert!(monte_carlo_ser(99, RandomSource::new(1, 0), |_, _| Ok(0.0)).is_err());

        let failing = monte_carlo_ser(100, RandomSource::new(1, 0), |i, _| {
            if i == 37 {
                Err(Error::EmptySeries)
            } else {
                Ok(0.0)
            }
        });
        assert!(matches!(failing, Err(Error::Trial { index: 37, .. })));
    }

    #[test]
    fn window_grid_alignment() {
        let grid = TimeGrid::new(0.0, 0.1, 100).unwrap();
        let s = TimeSeries::zeros(grid, Unit::Concentration);
        assert_eq!(window_indices(&s, 0.0, 1.0).unwrap(), (0, 10));
        assert_eq!(window_indices(&s, 9.0, 10.0).unwrap(), (90, 100));
        // partial overlap is clipped, no overlap is rejected
        assert_eq!(window_indices(&s, 9.0, 10.2).unwrap(), (90, 100));
        assert_eq!(window_indices(&s, -0.25, 0.2).unwrap(), (0, 2));
        assert!(window_indices(&s, 10.0, 11.0).is_err());
    }
}
