//! Emission models for leaf and root transmitters and the CSK/RSK modulators
//! that turn symbol frames into release flux.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numerics::{integrate_driven, TimeGrid, TimeSeries, Unit};

/// Release flux produced by a transmitter.
pub type EmissionProfile = TimeSeries;

/// Stress-driven transcriptional controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptionParams {
    /// Maximum transcription rate (mol/s).
    pub nu_max: f64,
    /// Regulation constant per stress unit.
    pub w: f64,
    /// Transcriptional delay offset inside the logistic.
    pub c_delay: f64,
    /// Degradation rate (1/s).
    pub k_d: f64,
    /// Degradation dynamics g(t); `None` means g ≡ 0.
    #[serde(default)]
    pub g: Option<TimeSeries>,
    /// Emission window `[tau_b, tau_e)` in seconds.
    pub tau_b: f64,
    pub tau_e: f64,
}

impl TranscriptionParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.nu_max > 0.0, "nu_max", "must be positive")?;
        ensure(self.k_d >= 0.0, "k_d", "must be non-negative")?;
        ensure(self.w.is_finite() && self.c_delay.is_finite(), "w", "must be finite")?;
        ensure(self.tau_b >= 0.0, "tau_b", "must be non-negative")?;
        ensure(self.tau_e > self.tau_b, "tau_e", "must exceed tau_b")
    }
}

/// Transcription rate `I(t) = nu_max / (1 + exp(-w·s + c)) - k_d·g(t)`.
pub fn transcription_rate(s: &TimeSeries, p: &TranscriptionParams) -> Result<TimeSeries> {
    p.validate()?;
    if let Some(g) = &p.g {
        s.check_aligned(g)?;
    }
    let values = s
        .values()
        .iter()
        .enumerate()
        .map(|(k, &sk)| {
            let g = p.g.as_ref().map_or(0.0, |g| g.values()[k]);
            logistic(p.w * sk - p.c_delay) * p.nu_max - p.k_d * g
        })
        .collect();
    TimeSeries::new(s.t0(), s.dt(), values, Unit::Flux)
}

/// `1/(1+exp(-x))` evaluated without overflow for large |x|.
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Emitted message: the running integral of `I` from `tau_b`, gated to the
/// half-open window `[tau_b, tau_e)`.
pub fn emit_message(s: &TimeSeries, p: &TranscriptionParams) -> Result<TimeSeries> {
    let rate = transcription_rate(s, p)?;
    if p.tau_b < rate.t0() {
        return Err(Error::param("tau_b", "emission onset precedes the first sample"));
    }
    Ok(gated_running_integral(&rate, p.tau_b, p.tau_e))
}

/// Running trapezoid of `rate` starting at `start` (linearly interpolated
/// when `start` falls between samples); zero outside `[start, end)`.
fn gated_running_integral(rate: &TimeSeries, start: f64, end: f64) -> TimeSeries {
    let v = rate.values();
    let dt = rate.dt();
    let mut out = vec![0.0; v.len()];
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..v.len() {
        let t = rate.time(k);
        if t < start {
            continue;
        }
        match prev {
            None => {
                // partial first segment from `start` to t
                let ts = start;
                let vs = rate.value_at(ts);
                acc += 0.5 * (t - ts) * (vs + v[k]);
            }
            Some((_, pv)) => acc += 0.5 * dt * (pv + v[k]),
        }
        prev = Some((t, v[k]));
        if t < end {
            out[k] = acc;
        }
    }
    TimeSeries::new(rate.t0(), dt, out, Unit::Dimensionless)
        .expect("integral of a finite series is finite")
}

/// Aqueous/lipid/gas storage pools feeding emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompartmentParams {
    /// Aqueous partition fraction in `[0, 1]`.
    pub eta: f64,
    /// Aqueous → gas transfer constant (1/s).
    pub k_aq: f64,
    /// Lipid → gas transfer constant (1/s).
    pub k_lipid: f64,
    /// Gas → air emission constant (1/s).
    pub k_gas: f64,
    /// Initial pools `[S_a, S_l, S_g]` in mol.
    #[serde(default)]
    pub s0: [f64; 3],
}

impl CompartmentParams {
    pub fn validate(&self) -> Result<()> {
        ensure((0.0..=1.0).contains(&self.eta), "eta", "must lie in [0, 1]")?;
        ensure(self.k_aq > 0.0, "k_aq", "must be positive")?;
        ensure(self.k_lipid > 0.0, "k_lipid", "must be positive")?;
        ensure(self.k_gas > 0.0, "k_gas", "must be positive")?;
        ensure(self.s0.iter().all(|&v| v >= 0.0), "s0", "pools must be non-negative")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompartmentOutput {
    pub aqueous: TimeSeries,
    pub lipid: TimeSeries,
    pub gas: TimeSeries,
    /// Emitted flux `k_gas · S_g`.
    pub flux: EmissionProfile,
}

/// Integrates the three-pool model driven by the production series `s`.
///
/// `s` is held constant across each sampling interval.
pub fn step_compartments(s: &TimeSeries, p: &CompartmentParams) -> Result<CompartmentOutput> {
    p.validate()?;
    if let Some(k) = s.values().iter().position(|&v| v < 0.0) {
        return Err(Error::param(
            "production",
            format!("negative input flux at t = {}", s.time(k)),
        ));
    }
    let (eta, ka, kl, kg) = (p.eta, p.k_aq, p.k_lipid, p.k_gas);
    let mut pools = integrate_driven(
        |_, x, u, dx| {
            dx[0] = eta * u[0] - ka * x[0];
            dx[1] = (1.0 - eta) * u[0] - kl * x[1];
            dx[2] = ka * x[0] + kl * x[1] - kg * x[2];
        },
        &p.s0,
        s.grid(),
        &[s],
    )?;
    for pool in &mut pools {
        *pool = pool.map(|v| v.max(0.0))?;
    }
    let gas = pools.pop().expect("three pools");
    let lipid = pools.pop().expect("three pools");
    let aqueous = pools.pop().expect("three pools");
    let flux = gas.map(|v| kg * v)?.with_unit(Unit::Flux);
    Ok(CompartmentOutput {
        aqueous,
        lipid,
        gas,
        flux,
    })
}

/// Stress-to-production law for the root surface pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProductionLaw {
    /// `q_max·s/(K_s + s)`: the saturating secretion law without its basal term.
    Saturating,
    Constant { rate: f64 },
    Linear { gain: f64 },
}

impl Default for ProductionLaw {
    fn default() -> Self {
        ProductionLaw::Saturating
    }
}

/// Root exudation parameters shared by the three root emitter models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEmitterParams {
    /// Basal secretion (mol/(m²·s)).
    pub q0: f64,
    /// Maximum inducible flux (mol/(m²·s)).
    pub q_max: f64,
    /// Half-activation stress.
    pub k_s: f64,
    /// Pulse amplitude (mol/(m²·s)).
    pub amplitude: f64,
    /// Pulse onset (s).
    pub tau_b: f64,
    /// Release time constant (s).
    pub tau_rel: f64,
    /// Surface-pool release and metabolic rates (1/s).
    pub k_rel: f64,
    pub k_met: f64,
    /// Initial surface pool (mol/m²).
    #[serde(default)]
    pub e0: f64,
    #[serde(default)]
    pub production: ProductionLaw,
}

impl Default for RootEmitterParams {
    fn default() -> Self {
        RootEmitterParams {
            q0: 0.0,
            q_max: 1.0,
            k_s: 1.0,
            amplitude: 1.0,
            tau_b: 0.0,
            tau_rel: 1.0,
            k_rel: 0.1,
            k_met: 0.0,
            e0: 0.0,
            production: ProductionLaw::Saturating,
        }
    }
}

impl RootEmitterParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.q0 >= 0.0, "q0", "must be non-negative")?;
        ensure(self.q_max > 0.0, "q_max", "must be positive")?;
        ensure(self.k_s > 0.0, "k_s", "must be positive")?;
        ensure(self.tau_rel > 0.0, "tau_rel", "must be positive")?;
        ensure(self.k_rel >= 0.0, "k_rel", "must be non-negative")?;
        ensure(self.k_met >= 0.0, "k_met", "must be non-negative")?;
        ensure(self.e0 >= 0.0, "e0", "must be non-negative")
    }

    fn production_rate(&self, s: f64) -> f64 {
        match self.production {
            ProductionLaw::Saturating => self.q_max * (s / (self.k_s + s)),
            ProductionLaw::Constant { rate } => rate,
            ProductionLaw::Linear { gain } => gain * s,
        }
    }
}

fn check_stress(s: &TimeSeries) -> Result<()> {
    match s.values().iter().position(|&v| v < 0.0) {
        Some(k) => Err(Error::param(
            "stress",
            format!("negative stress at t = {}", s.time(k)),
        )),
        None => Ok(()),
    }
}

/// Saturating root secretion `q0 + q_max·s/(K_s + s)`.
pub fn root_flux_mm(s: &TimeSeries, p: &RootEmitterParams) -> Result<EmissionProfile> {
    p.validate()?;
    check_stress(s)?;
    s.map(|v| p.q0 + p.q_max * (v / (p.k_s + v)))
        .map(|ts| ts.with_unit(Unit::ArealFlux))
}

/// Exponentially decaying release pulse starting at `tau_b`.
pub fn root_flux_pulse(p: &RootEmitterParams, grid: TimeGrid) -> Result<EmissionProfile> {
    p.validate()?;
    TimeSeries::from_fn(grid, Unit::ArealFlux, |t| {
        if t < p.tau_b {
            p.q0
        } else {
            p.q0 + p.amplitude * (-(t - p.tau_b) / p.tau_rel).exp()
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoolOutput {
    pub pool: TimeSeries,
    pub flux: EmissionProfile,
    /// Set when nothing drains the pool while production is positive.
    pub unbounded_pool: bool,
}

/// Finite surface pool `dE/dt = P(s) - (k_rel + k_met)·E`, `q = k_rel·E`.
pub fn step_surface_pool(s: &TimeSeries, p: &RootEmitterParams) -> Result<SurfacePoolOutput> {
    p.validate()?;
    let production = s.map(|v| p.production_rate(v))?;
    if let Some(k) = production.values().iter().position(|&v| v < 0.0) {
        return Err(Error::param(
            "production",
            format!("negative production at t = {}", s.time(k)),
        ));
    }
    let loss = p.k_rel + p.k_met;
    let unbounded_pool = loss == 0.0 && production.values().iter().any(|&v| v > 0.0);
    let mut traces = integrate_driven(
        |_, x, u, dx| dx[0] = u[0] - loss * x[0],
        &[p.e0],
        s.grid(),
        &[&production],
    )?;
    let pool = traces.pop().expect("one state").map(|v| v.max(0.0))?;
    let flux = pool.map(|v| p.k_rel * v)?.with_unit(Unit::ArealFlux);
    Ok(SurfacePoolOutput {
        pool,
        flux,
        unbounded_pool,
    })
}

/// Discrete symbol sequence with its timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFrame {
    symbols: Vec<usize>,
    symbol_period: f64,
    alphabet_size: usize,
}

impl SymbolFrame {
    pub fn new(symbols: Vec<usize>, symbol_period: f64, alphabet_size: usize) -> Result<Self> {
        ensure(alphabet_size >= 2, "alphabet_size", "must be at least 2")?;
        ensure(
            symbol_period.is_finite() && symbol_period > 0.0,
            "symbol_period",
            "must be positive",
        )?;
        ensure(!symbols.is_empty(), "symbols", "frame must not be empty")?;
        if let Some(&s) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(Error::param(
                "symbols",
                format!("symbol {s} outside alphabet of size {alphabet_size}"),
            ));
        }
        Ok(SymbolFrame {
            symbols,
            symbol_period,
            alphabet_size,
        })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.symbol_period * self.symbols.len() as f64
    }

    /// Sampling grid starting at 0 that covers the whole frame.
    pub fn grid(&self, dt: f64) -> Result<TimeGrid> {
        let n = (self.duration() / dt).round() as usize;
        TimeGrid::new(0.0, dt, n.max(1))
    }

    /// Index of the symbol active at `t`, if any (half-open periods).
    pub fn symbol_index_at(&self, t: f64) -> Option<usize> {
        if t < 0.0 {
            return None;
        }
        // small guard against t = k·period landing just below the boundary
        let k = (t / self.symbol_period + 1e-9).floor() as usize;
        (k < self.symbols.len()).then_some(k)
    }
}

/// Pulse shaping applied within each symbol period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseShape {
    #[default]
    Rect,
    /// `level · exp(-(t - t_k)/tau_rel)` from the start of each period.
    Exp { tau_rel: f64 },
}

/// Concentration shift keying: symbol `k` releases at `levels[symbols[k]]`.
pub fn modulate_csk(
    frame: &SymbolFrame,
    levels: &[f64],
    shape: PulseShape,
    dt: f64,
) -> Result<EmissionProfile> {
    if levels.len() != frame.alphabet_size() {
        return Err(Error::param(
            "levels",
            format!(
                "{} levels given for alphabet of size {}",
                levels.len(),
                frame.alphabet_size()
            ),
        ));
    }
    ensure(levels[0] >= 0.0, "levels", "must be non-negative")?;
    ensure(
        levels.windows(2).all(|w| w[1] > w[0]),
        "levels",
        "must be strictly increasing",
    )?;
    if let PulseShape::Exp { tau_rel } = shape {
        ensure(tau_rel > 0.0, "tau_rel", "must be positive")?;
    }
    let grid = frame.grid(dt)?;
    let period = frame.symbol_period();
    TimeSeries::from_fn(grid, Unit::Flux, |t| match frame.symbol_index_at(t) {
        None => 0.0,
        Some(k) => {
            let level = levels[frame.symbols()[k]];
            match shape {
                PulseShape::Rect => level,
                PulseShape::Exp { tau_rel } => {
                    level * (-(t - k as f64 * period).max(0.0) / tau_rel).exp()
                }
            }
        }
    })
}

/// Ratio shift keying over `K` species: during symbol `k`, species `i`
/// releases `total_flux · ratio_table[symbols[k]][i]`.
pub fn modulate_rsk(
    frame: &SymbolFrame,
    ratio_table: &[Vec<f64>],
    total_flux: f64,
    dt: f64,
) -> Result<Vec<EmissionProfile>> {
    validate_ratio_table(ratio_table, frame.alphabet_size())?;
    ensure(total_flux >= 0.0, "total_flux", "must be non-negative")?;
    let n_species = ratio_table[0].len();
    let grid = frame.grid(dt)?;
    (0..n_species)
        .map(|i| {
            TimeSeries::from_fn(grid, Unit::Flux, |t| match frame.symbol_index_at(t) {
                None => 0.0,
                Some(k) => total_flux * ratio_table[frame.symbols()[k]][i],
            })
        })
        .collect()
}

pub(crate) fn validate_ratio_table(table: &[Vec<f64>], alphabet_size: usize) -> Result<()> {
    if table.len() != alphabet_size {
        return Err(Error::param(
            "ratio_table",
            format!("{} rows for alphabet of size {alphabet_size}", table.len()),
        ));
    }
    let k = table[0].len();
    ensure(k >= 1, "ratio_table", "rows must name at least one species")?;
    for (s, row) in table.iter().enumerate() {
        if row.len() != k {
            return Err(Error::param("ratio_table", format!("row {s} has {} species, expected {k}", row.len())));
        }
        if row.iter().any(|&r| r < 0.0 || !r.is_finite()) {
            return Err(Error::param("ratio_table", format!("row {s} has a negative fraction")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::param("ratio_table", format!("row {s} sums to {sum}, not 1")));
        }
    }
    Ok(())
}
