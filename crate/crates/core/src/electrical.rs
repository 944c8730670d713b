//! Electrical signalling: passive cable conduction, action potentials (AP),
//! variation potentials (VP) and a feature-based AP/VP/SP classifier.
//!
//! Active spikes use a threshold–refractory abstraction: every spike has the
//! same stereotyped shape, and a new spike needs an upward threshold crossing
//! at least one refractory period after the previous one.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numerics::{RandomSource, TimeGrid, TimeSeries, Unit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableParams {
    /// Axial resistance per length (Ω/m).
    pub r_i: f64,
    /// Membrane resistance times length (Ω·m).
    pub r_m: f64,
    /// Membrane capacitance per length (F/m).
    pub c_m: f64,
    /// Cable length (m).
    pub length: f64,
    /// Clamp voltage at `x = 0` (V).
    pub v_boundary: f64,
}

impl CableParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.r_i > 0.0 && self.r_i.is_finite(), "r_i", "must be positive")?;
        ensure(self.r_m > 0.0 && self.r_m.is_finite(), "r_m", "must be positive")?;
        ensure(self.c_m > 0.0 && self.c_m.is_finite(), "c_m", "must be positive")?;
        ensure(self.length > 0.0 && self.length.is_finite(), "length", "must be positive")?;
        ensure(self.v_boundary.is_finite(), "v_boundary", "must be finite")
    }

    /// Membrane time constant `r_m · C_m` (s).
    pub fn time_constant(&self) -> f64 {
        self.r_m * self.c_m
    }
}

/// `λ = √(r_m / r_i)`.
pub fn electrotonic_length(p: &CableParams) -> f64 {
    (p.r_m / p.r_i).sqrt()
}

/// Semi-infinite steady state `V_b · e^{−x/λ}`.
///
/// Only valid when the cable is at least five length constants long; shorter
/// cables need [`simulate_cable_transient`], which honours the sealed end.
pub fn cable_steady_state(p: &CableParams, x: &[f64]) -> Result<Vec<f64>> {
    p.validate()?;
    let lambda = electrotonic_length(p);
    if p.length < 5.0 * lambda {
        return Err(Error::Domain(format!(
            "cable length {} m is shorter than 5λ = {} m; the semi-infinite profile does not apply, use the transient solver",
            p.length,
            5.0 * lambda
        )));
    }
    Ok(x.iter().map(|&xi| p.v_boundary * (-xi / lambda).exp()).collect())
}

/// Largest admissible explicit time step, `0.4 · C_m · r_i · dx²`.
pub fn max_cable_dt(p: &CableParams, dx: f64) -> f64 {
    0.4 * p.c_m * p.r_i * dx * dx
}

/// Space-time voltage on the node grid `x_i = i·dx`, `i = 0..=n_cells`.
#[derive(Debug, Clone, PartialEq)]
pub struct CableSolution {
    pub x: Vec<f64>,
    pub grid: TimeGrid,
    /// `v[k][i]`: voltage at time `grid.time(k)` and node `i`.
    pub v: Vec<Vec<f64>>,
}

impl CableSolution {
    pub fn final_profile(&self) -> &[f64] {
        self.v.last().expect("solution has at least one time")
    }

    /// Voltage trace at node `i`.
    pub fn trace(&self, i: usize) -> Result<TimeSeries> {
        ensure(i < self.x.len(), "node", "index out of range")?;
        TimeSeries::new(
            self.grid.t0,
            self.grid.dt,
            self.v.iter().map(|row| row[i]).collect(),
            Unit::Voltage,
        )
    }
}

/// Explicit finite differences for `(1/r_i) V_xx − V/r_m − C_m V_t = 0`.
///
/// `x = 0` is clamped to `v_boundary` at every recorded time (including the
/// first); the far end is sealed (zero axial current, mirror ghost node).
pub fn simulate_cable_transient(
    p: &CableParams,
    v0: &[f64],
    grid: TimeGrid,
    n_cells: usize,
) -> Result<CableSolution> {
    p.validate()?;
    ensure(n_cells >= 2, "n_cells", "at least two cells are required")?;
    if v0.len() != n_cells + 1 {
        return Err(Error::LengthMismatch(n_cells + 1, v0.len()));
    }
    ensure(v0.iter().all(|v| v.is_finite()), "v0", "must be finite")?;
    let dx = p.length / n_cells as f64;
    let max_dt = max_cable_dt(p, dx);
    if grid.dt > max_dt {
        return Err(Error::Unstable { dt: grid.dt, max_dt });
    }
    let a = grid.dt / (p.c_m * p.r_i * dx * dx);
    let b = grid.dt / (p.c_m * p.r_m);
    let n = n_cells;

    let mut cur = v0.to_vec();
    cur[0] = p.v_boundary;
    let mut next = cur.clone();
    let mut v = Vec::with_capacity(grid.n);
    v.push(cur.clone());
    for _ in 1..grid.n {
        next[0] = p.v_boundary;
        for i in 1..n {
            next[i] = cur[i] + a * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) - b * cur[i];
        }
        next[n] = cur[n] + a * 2.0 * (cur[n - 1] - cur[n]) - b * cur[n];
        std::mem::swap(&mut cur, &mut next);
        v.push(cur.clone());
    }
    Ok(CableSolution {
        x: (0..=n).map(|i| i as f64 * dx).collect(),
        grid,
        v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APParams {
    /// Stimulus level that triggers a spike on an upward crossing.
    pub threshold: f64,
    /// Spike amplitude (V); identical for every spike.
    pub amplitude: f64,
    /// Plateau duration (s).
    pub duration: f64,
    /// Minimum spacing between spikes (s).
    pub refractory: f64,
    /// Propagation speed (m/s).
    pub speed: f64,
    /// Repolarisation time constant after the plateau (s).
    pub decay_tau: f64,
    /// Standard deviation of the trigger latency (s); zero disables jitter.
    pub jitter: f64,
}

impl Default for APParams {
    fn default() -> Self {
        APParams {
            threshold: 0.01,
            amplitude: 0.08,
            duration: 5.0,
            refractory: 20.0,
            // 60 cm/min
            speed: 0.01,
            decay_tau: 0.5,
            jitter: 0.0,
        }
    }
}

impl APParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.threshold.is_finite(), "threshold", "must be finite")?;
        ensure(self.amplitude > 0.0, "amplitude", "must be positive")?;
        ensure(self.duration > 0.0, "duration", "must be positive")?;
        ensure(self.refractory >= self.duration, "refractory", "must be at least the spike duration")?;
        ensure(self.speed > 0.0, "speed", "must be positive")?;
        ensure(self.decay_tau > 0.0, "decay_tau", "must be positive")?;
        ensure(self.jitter >= 0.0, "jitter", "must be non-negative")
    }

    /// Speed in cm/min, the customary unit for plant electrical signals.
    pub fn speed_cm_per_min(&self) -> f64 {
        self.speed * 100.0 * 60.0
    }

    /// Travel time over `distance` (s).
    pub fn arrival_delay(&self, distance: f64) -> f64 {
        distance / self.speed
    }

    /// Stereotyped spike shape `τ` seconds after onset.
    pub fn spike_shape(&self, tau: f64) -> f64 {
        if tau < 0.0 || tau >= self.refractory {
            0.0
        } else if tau < self.duration {
            self.amplitude
        } else {
            self.amplitude * (-(tau - self.duration) / self.decay_tau).exp()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApTrain {
    pub spike_times: Vec<f64>,
    /// Superposition of stereotyped spikes on the stimulus grid.
    pub waveform: TimeSeries,
}

/// Threshold–refractory spike generator.
///
/// A sample at or above threshold whose predecessor was below it (or the
/// first sample) is a crossing. With `rng` and a positive jitter the spike
/// fires after an extra `|N(0, jitter)|` latency; refractoriness is measured
/// between emitted spikes.
pub fn generate_ap_train(
    stimulus: &TimeSeries,
    p: &APParams,
    rng: Option<RandomSource>,
) -> Result<ApTrain> {
    p.validate()?;
    if let Some(k) = stimulus.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: stimulus.time(k) });
    }
    let mut jitter = match rng {
        Some(src) if p.jitter > 0.0 => {
            let normal = Normal::new(0.0, p.jitter).map_err(|e| Error::param("jitter", e.to_string()))?;
            let mut r = src.rng();
            Some(move || normal.sample(&mut r).abs())
        }
        _ => None,
    };
    let values = stimulus.values();
    let mut spike_times: Vec<f64> = Vec::new();
    for k in 0..values.len() {
        let above = values[k] >= p.threshold;
        let was_below = k == 0 || values[k - 1] < p.threshold;
        if !(above && was_below) {
            continue;
        }
        let t = stimulus.time(k) + jitter.as_mut().map_or(0.0, |j| j());
        if spike_times.last().is_none_or(|&last| t - last >= p.refractory) {
            spike_times.push(t);
        }
    }
    let waveform = TimeSeries::from_fn(stimulus.grid(), Unit::Voltage, |t| {
        spike_times.iter().map(|&ts| p.spike_shape(t - ts)).sum()
    })?;
    Ok(ApTrain {
        spike_times,
        waveform,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPParams {
    /// Peak amplitude per unit stimulus at the source (V).
    pub gain: f64,
    /// Rise time constant (s).
    pub rise: f64,
    /// Decay time constant (s).
    pub decay: f64,
    /// Spatial decline rate of amplitude and speed (1/m).
    pub speed_decay: f64,
    /// Propagation speed at the source (m/s); no default is assumed.
    pub speed: f64,
}

impl VPParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.gain > 0.0, "gain", "must be positive")?;
        ensure(self.rise > 0.0, "rise", "must be positive")?;
        ensure(self.decay > 0.0, "decay", "must be positive")?;
        ensure(self.speed_decay >= 0.0, "speed_decay", "must be non-negative")?;
        ensure(self.speed > 0.0, "speed", "must be positive")
    }

    /// Peak amplitude after travelling `distance`.
    pub fn amplitude(&self, stimulus_strength: f64, distance: f64) -> f64 {
        self.gain * stimulus_strength * (-self.speed_decay * distance).exp()
    }

    /// Arrival delay with speed declining by the same exponential factor.
    pub fn arrival_delay(&self, distance: f64) -> f64 {
        distance / (self.speed * (-self.speed_decay * distance).exp())
    }
}

/// Difference of exponentials normalised to a unit peak.
fn unit_biexponential(tau: f64, rise: f64, decay: f64) -> f64 {
    if tau < 0.0 {
        return 0.0;
    }
    if ((rise - decay) / decay).abs() < 1e-9 {
        return tau / rise * (1.0 - tau / rise).exp();
    }
    let t_peak = rise * decay / (decay - rise) * (decay / rise).ln();
    let f = |t: f64| (-t / decay).exp() - (-t / rise).exp();
    f(tau) / f(t_peak)
}

/// Graded VP observed at `distance` from a stimulus applied at `t = 0`.
pub fn generate_vp(stimulus_strength: f64, distance: f64, p: &VPParams, grid: TimeGrid) -> Result<TimeSeries> {
    p.validate()?;
    ensure(stimulus_strength >= 0.0, "stimulus_strength", "must be non-negative")?;
    ensure(distance >= 0.0, "distance", "must be non-negative")?;
    let amp = p.amplitude(stimulus_strength, distance);
    let delay = p.arrival_delay(distance);
    TimeSeries::from_fn(grid, Unit::Voltage, |t| amp * unit_biexponential(t - delay, p.rise, p.decay))
}

/// User-scalable environmental modifiers of gain and speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub gain: f64,
    pub speed: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Environment { gain: 1.0, speed: 1.0 }
    }
}

impl Environment {
    pub fn apply_ap(&self, p: &APParams) -> Result<APParams> {
        ensure(self.gain > 0.0 && self.speed > 0.0, "environment", "multipliers must be positive")?;
        Ok(APParams {
            amplitude: p.amplitude * self.gain,
            speed: p.speed * self.speed,
            ..p.clone()
        })
    }

    pub fn apply_vp(&self, p: &VPParams) -> Result<VPParams> {
        ensure(self.gain > 0.0 && self.speed > 0.0, "environment", "multipliers must be positive")?;
        Ok(VPParams {
            gain: p.gain * self.gain,
            speed: p.speed * self.speed,
            ..p.clone()
        })
    }
}

/// Distance profile for potentials transmitted through soil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SoilProfile {
    Exponential,
    Gaussian,
}

/// Attenuation factor `e^{−d/ℓ}` or `e^{−d²/2ℓ²}`.
pub fn soil_attenuation(distance: f64, length_scale: f64, profile: SoilProfile) -> Result<f64> {
    ensure(distance >= 0.0, "distance", "must be non-negative")?;
    ensure(length_scale > 0.0, "length_scale", "must be positive")?;
    let u = distance / length_scale;
    Ok(match profile {
        SoilProfile::Exponential => (-u).exp(),
        SoilProfile::Gaussian => (-0.5 * u * u).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalClass {
    Ap,
    Vp,
    Sp,
    Unknown,
}

/// Thresholds for [`classify_signal`]. Durations are full widths at half
/// maximum of the dominant deflection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub baseline: f64,
    /// Deflections smaller than this are treated as absent (V).
    pub min_amplitude: f64,
    pub ap_max_duration: f64,
    pub vp_min_duration: f64,
    pub vp_max_duration: f64,
    pub sp_min_duration: f64,
    pub sp_max_duration: f64,
    /// Minimum ratio of time above 90% to time above 50% of the peak for a
    /// flat-topped, stereotyped spike.
    pub plateau_fraction: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            baseline: 0.0,
            min_amplitude: 1e-4,
            ap_max_duration: 20.0,
            vp_min_duration: 10.0,
            vp_max_duration: 1800.0,
            sp_min_duration: 480.0,
            sp_max_duration: 720.0,
            plateau_fraction: 0.6,
        }
    }
}

/// Features of the dominant deflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalFeatures {
    /// Signed peak deflection from baseline.
    pub peak: f64,
    pub duration: f64,
    pub plateau_fraction: f64,
}

/// Extracts peak, FWHM and plateau fraction of the largest deflection, or
/// `None` when the waveform never leaves the baseline band.
pub fn signal_features(waveform: &TimeSeries, cfg: &ClassifierConfig) -> Option<SignalFeatures> {
    let dev: Vec<f64> = waveform.values().iter().map(|v| v - cfg.baseline).collect();
    let (k_peak, _) = dev
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
    let peak = dev[k_peak];
    if !(peak.abs() >= cfg.min_amplitude) {
        return None;
    }
    let level = |frac: f64| {
        let thr = frac * peak.abs();
        let mut lo = k_peak;
        while lo > 0 && dev[lo - 1] * peak.signum() >= thr {
            lo -= 1;
        }
        let mut hi = k_peak;
        while hi + 1 < dev.len() && dev[hi + 1] * peak.signum() >= thr {
            hi += 1;
        }
        (hi - lo + 1) as f64 * waveform.dt()
    };
    let half = level(0.5);
    Some(SignalFeatures {
        peak,
        duration: half,
        plateau_fraction: level(0.9) / half,
    })
}

/// Rule-based AP / VP / SP decision.
///
/// Depolarising flat-topped deflections shorter than `ap_max_duration` are
/// APs; other depolarising deflections within the VP duration band are VPs;
/// hyperpolarising deflections within the SP band are SPs.
pub fn classify_signal(waveform: &TimeSeries, cfg: &ClassifierConfig) -> SignalClass {
    let Some(f) = signal_features(waveform, cfg) else {
        return SignalClass::Unknown;
    };
    if f.peak > 0.0 {
        if f.plateau_fraction >= cfg.plateau_fraction && f.duration < cfg.ap_max_duration {
            SignalClass::Ap
        } else if (cfg.vp_min_duration..=cfg.vp_max_duration).contains(&f.duration) {
            SignalClass::Vp
        } else {
            SignalClass::Unknown
        }
    } else if (cfg.sp_min_duration..=cfg.sp_max_duration).contains(&f.duration) {
        SignalClass::Sp
    } else {
        SignalClass::Unknown
    }
}

/// Smooth hyperpolarising `−A·sin²` deflection whose FWHM is `fwhm`,
/// starting at `onset`. Used to exercise the classifier.
pub fn sp_template(grid: TimeGrid, amplitude: f64, fwhm: f64, onset: f64) -> Result<TimeSeries> {
    ensure(amplitude > 0.0, "amplitude", "must be positive")?;
    ensure(fwhm > 0.0, "fwhm", "must be positive")?;
    let total = 2.0 * fwhm;
    TimeSeries::from_fn(grid, Unit::Voltage, |t| {
        let tau = t - onset;
        if (0.0..=total).contains(&tau) {
            let s = (std::f64::consts::PI * tau / total).sin();
            -amplitude * s * s
        } else {
            0.0
        }
    })
}
