//! Aboveground VOC propagation: the free-space advection–diffusion–reaction
//! Green's function, continuous-source convolution, correlated turbulence
//! noise and multi-source superposition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numerics::{convolve_causal, cumulative_trapezoid, RandomSource, TimeGrid, TimeSeries, Unit};
use crate::transmitter::EmissionProfile;

/// Propagation medium of a [`ChannelResponse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Medium {
    Air,
    Soil,
    Network,
    Cable,
    Acoustic,
}

/// Signal observed at a receiver plus where it was observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelResponse {
    pub series: TimeSeries,
    /// Source–receiver distance (m).
    pub distance: f64,
    pub medium: Medium,
}

impl ChannelResponse {
    pub fn new(series: TimeSeries, distance: f64, medium: Medium) -> Self {
        ChannelResponse {
            series,
            distance,
            medium,
        }
    }

    pub fn values(&self) -> &[f64] {
        self.series.values()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirChannelParams {
    /// Released amount for an instantaneous puff (mol).
    pub mass: f64,
    /// Diffusivity (m²/s).
    pub diffusivity: f64,
    /// Mean wind vector (m/s).
    pub wind: [f64; 3],
    /// First-order loss rate (1/s).
    pub loss_rate: f64,
}

impl AirChannelParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.diffusivity > 0.0 && self.diffusivity.is_finite(), "diffusivity", "must be positive")?;
        ensure(self.loss_rate >= 0.0, "loss_rate", "must be non-negative")?;
        ensure(self.mass >= 0.0, "mass", "must be non-negative")?;
        ensure(self.wind.iter().all(|w| w.is_finite()), "wind", "must be finite")
    }
}

/// Receiver position relative to the source (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationPoint {
    pub r: [f64; 3],
}

impl ObservationPoint {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        ensure(r.iter().all(|v| v.is_finite()), "r", "coordinates must be finite")?;
        Ok(ObservationPoint { r })
    }

    /// Point at `distance` along the x axis.
    pub fn on_axis(distance: f64) -> Self {
        ObservationPoint {
            r: [distance, 0.0, 0.0],
        }
    }

    pub fn distance(&self) -> f64 {
        norm(self.r)
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `c(r,t) = M/(4πDt)^{3/2} · exp(-|r - u t|²/(4Dt)) · exp(-λt)` for `t > 0`.
pub fn concentration(p: &AirChannelParams, r: [f64; 3], t: f64) -> f64 {
    let d = p.diffusivity;
    let dx = [r[0] - p.wind[0] * t, r[1] - p.wind[1] * t, r[2] - p.wind[2] * t];
    let dist2 = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
    p.mass / (4.0 * PI * d * t).powf(1.5) * (-dist2 / (4.0 * d * t)).exp() * (-p.loss_rate * t).exp()
}

/// Impulse response of the free-space channel sampled on `grid`.
pub fn impulse_response(
    p: &AirChannelParams,
    obs: &ObservationPoint,
    grid: TimeGrid,
) -> Result<ChannelResponse> {
    p.validate()?;
    if grid.t0 <= 0.0 {
        return Err(Error::param(
            "t_grid",
            "sample times must be strictly positive (Green's function is singular at t = 0)",
        ));
    }
    let series = TimeSeries::from_fn(grid, Unit::Concentration, |t| concentration(p, obs.r, t))?;
    Ok(ChannelResponse::new(series, obs.distance(), Medium::Air))
}

/// Concentration produced by a continuous release `flux` (mol/s).
///
/// The per-mole kernel is sampled from `t = dt` on and has as many samples as
/// `flux`; the output is truncated to the same length, so sample `k` sits at
/// `flux.t0 + (k + 1)·dt`.
pub fn propagate_continuous(
    flux: &EmissionProfile,
    p: &AirChannelParams,
    obs: &ObservationPoint,
) -> Result<ChannelResponse> {
    let unit_params = AirChannelParams { mass: 1.0, ..p.clone() };
    let kernel = unit_kernel(&unit_params, obs, flux.dt(), flux.len())?;
    convolve_truncated(flux, &kernel, obs.distance(), Medium::Air)
}

pub(crate) fn unit_kernel(
    p: &AirChannelParams,
    obs: &ObservationPoint,
    dt: f64,
    n: usize,
) -> Result<TimeSeries> {
    let grid = TimeGrid::new(dt, dt, n)?;
    Ok(impulse_response(p, obs, grid)?
        .series
        .with_unit(Unit::ResponsePerMole))
}

pub(crate) fn convolve_truncated(
    flux: &TimeSeries,
    kernel: &TimeSeries,
    distance: f64,
    medium: Medium,
) -> Result<ChannelResponse> {
    let flux = if flux.unit() == Unit::Flux || flux.unit() == Unit::Dimensionless {
        flux.clone()
    } else {
        flux.clone().with_unit(Unit::Flux)
    };
    let full = convolve_causal(&flux, kernel)?;
    let mut values = full.values().to_vec();
    values.truncate(flux.len());
    let series = TimeSeries::new(full.t0(), full.dt(), values, full.unit())?;
    Ok(ChannelResponse::new(series, distance, medium))
}

/// Sample-wise sum of aligned responses from several sources.
pub fn superpose_sources(responses: &[ChannelResponse]) -> Result<ChannelResponse> {
    let (first, rest) = responses
        .split_first()
        .ok_or_else(|| Error::Domain("no responses to superpose".into()))?;
    let mut series = first.series.clone();
    for r in rest {
        series = series.add(&r.series)?;
    }
    Ok(ChannelResponse::new(series, first.distance, first.medium))
}

/// Exact discretisation of a stationary Ornstein–Uhlenbeck process with
/// standard deviation `sigma` and correlation time `tau_corr`, started from
/// its stationary law.
pub fn ou_process(n: usize, dt: f64, sigma: f64, tau_corr: f64, rng: RandomSource) -> Result<Vec<f64>> {
    ensure(sigma >= 0.0, "sigma_rel", "must be non-negative")?;
    ensure(tau_corr > 0.0, "tau_corr", "must be positive")?;
    ensure(dt > 0.0, "dt", "must be positive")?;
    let a = (-dt / tau_corr).exp();
    let b = sigma * (1.0 - a * a).sqrt();
    let xi = rng.standard_normals(n);
    let mut out = Vec::with_capacity(n);
    let mut x = 0.0;
    for (k, z) in xi.into_iter().enumerate() {
        x = if k == 0 { sigma * z } else { a * x + b * z };
        out.push(x);
    }
    Ok(out)
}

/// Multiplicative correlated turbulence: `c · (1 + n(t))`, clamped at zero.
pub fn add_turbulence_noise(
    resp: &ChannelResponse,
    sigma_rel: f64,
    tau_corr: f64,
    rng: RandomSource,
) -> Result<ChannelResponse> {
    ensure(sigma_rel >= 0.0, "sigma_rel", "must be non-negative")?;
    ensure(tau_corr > 0.0, "tau_corr", "must be positive")?;
    if sigma_rel == 0.0 {
        return Ok(resp.clone());
    }
    let n = ou_process(resp.series.len(), resp.series.dt(), sigma_rel, tau_corr, rng)?;
    let values = resp
        .values()
        .iter()
        .zip(n)
        .map(|(c, e)| (c * (1.0 + e)).max(0.0))
        .collect();
    let series = TimeSeries::new(resp.series.t0(), resp.series.dt(), values, resp.series.unit())?;
    Ok(ChannelResponse::new(series, resp.distance, resp.medium))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaySpread {
    pub t_peak: f64,
    /// Earliest time at which the requested energy fraction has arrived.
    pub t_tail: f64,
    /// Log–log slope over the last decade of the record after the peak.
    pub tail_exponent: f64,
}

pub fn delay_spread_metrics(resp: &ChannelResponse, energy_fraction: f64) -> Result<DelaySpread> {
    ensure(
        energy_fraction > 0.0 && energy_fraction < 1.0,
        "energy_fraction",
        "must lie in (0, 1)",
    )?;
    let s = &resp.series;
    if s.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("response must be non-negative".into()));
    }
    let (k_peak, peak) = s.argmax();
    if peak <= 0.0 {
        return Err(Error::Domain("response is identically zero".into()));
    }
    let t_peak = s.time(k_peak);
    let t_tail = time_to_fraction(s, energy_fraction).max(t_peak);

    let t_end = s.end_time();
    let t_start = (t_end / 10.0).max(t_peak);
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &c) in s.values().iter().enumerate().skip(k_peak + 1) {
        let t = s.time(k);
        if t < t_start || c <= 0.0 || t <= 0.0 {
            continue;
        }
        let (x, y) = (t.ln(), c.ln());
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let tail_exponent = if n >= 2.0 && denom > 0.0 {
        (n * sxy - sx * sy) / denom
    } else {
        f64::NAN
    };
    Ok(DelaySpread {
        t_peak,
        t_tail,
        tail_exponent,
    })
}

/// Earliest time at which the running trapezoid reaches `fraction` of the
/// total, linearly interpolated inside the crossing interval.
pub(crate) fn time_to_fraction(s: &TimeSeries, fraction: f64) -> f64 {
    let cum = cumulative_trapezoid(s.values(), s.dt());
    let total = *cum.last().expect("non-empty");
    if total <= 0.0 {
        return s.t0();
    }
    let target = fraction * total;
    for k in 1..cum.len() {
        if cum[k] >= target {
            let seg = cum[k] - cum[k - 1];
            let frac = if seg > 0.0 { (target - cum[k - 1]) / seg } else { 0.0 };
            return s.time(k - 1) + frac * s.dt();
        }
    }
    s.end_time()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::trapezoid_integral;

    fn still(mass: f64, d: f64, lambda: f64) -> AirChannelParams {
        AirChannelParams {
            mass,
            diffusivity: d,
            wind: [0.0; 3],
            loss_rate: lambda,
        }
    }

    #[test]
    fn green_function_unit_point() {
        let p = still(1.0, 1.0, 0.0);
        let c = concentration(&p, [0.0; 3], 1.0 / (4.0 * PI));
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn green_function_plume_centre() {
        let p = AirChannelParams {
            mass: 1.0,
            diffusivity: 0.25,
            wind: [0.3, -0.1, 0.2],
            loss_rate: 0.0,
        };
        let t = 2.0;
        let r = [0.6, -0.2, 0.4];
        let expected = (2.0 * PI).powf(-1.5);
        assert!((concentration(&p, r, t) - expected).abs() < 1e-14);
        assert!((expected - 0.06350).abs() < 1e-5);
    }

    #[test]
    fn loss_is_a_pure_factor() {
        let a = still(1.0, 0.1, 0.0);
        let b = still(1.0, 0.1, 0.35);
        let (r, t) = ([0.2, 0.1, 0.0], 1.7);
        let ratio = concentration(&b, r, t) / concentration(&a, r, t);
        assert!((ratio - (-0.35f64 * t).exp()).abs() < 1e-15);
    }

    #[test]
    fn impulse_response_rejects_origin() {
        let p = still(1.0, 0.1, 0.0);
        let grid = TimeGrid::new(0.0, 0.1, 5).unwrap();
        assert!(impulse_response(&p, &ObservationPoint::on_axis(0.1), grid).is_err());
    }

    #[test]
    fn continuous_impulse_matches_green_function() {
        let p = still(3.0, 0.01, 0.01);
        let obs = ObservationPoint::on_axis(0.1);
        let dt = 0.05;
        let grid = TimeGrid::new(0.0, dt, 400).unwrap();
        let flux = TimeSeries::impulse(grid, 3.0, Unit::Flux).unwrap();
        let out = propagate_continuous(&flux, &p, &obs).unwrap();
        let direct = impulse_response(&p, &obs, TimeGrid::new(dt, dt, 400).unwrap()).unwrap();
        let peak = direct.series.argmax().1;
        for (a, b) in out.values().iter().zip(direct.values()) {
            assert!((a - b).abs() <= 0.01 * peak);
        }
        let zero = propagate_continuous(&TimeSeries::zeros(grid, Unit::Flux), &p, &obs).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn superposition_examples() {
        let p = still(1.0, 0.01, 0.0);
        let obs = ObservationPoint::on_axis(0.05);
        let grid = TimeGrid::new(0.1, 0.1, 50).unwrap();
        let r = impulse_response(&p, &obs, grid).unwrap();
        assert_eq!(superpose_sources(&[r.clone()]).unwrap(), r);
        let two = superpose_sources(&[r.clone(), r.clone()]).unwrap();
        for (a, b) in two.values().iter().zip(r.values()) {
            assert_eq!(*a, 2.0 * b);
        }
        let zero = ChannelResponse::new(TimeSeries::zeros(grid, Unit::Concentration), 0.05, Medium::Air);
        assert_eq!(superpose_sources(&[r.clone(), zero]).unwrap(), r);
        let other = impulse_response(&p, &obs, TimeGrid::new(0.2, 0.1, 50).unwrap()).unwrap();
        assert!(superpose_sources(&[r, other]).is_err());
    }

    #[test]
    fn turbulence_noise_contract() {
        let p = still(1.0, 0.01, 0.0);
        let obs = ObservationPoint::on_axis(0.05);
        let r = impulse_response(&p, &obs, TimeGrid::new(0.1, 0.1, 200).unwrap()).unwrap();
        let same = add_turbulence_noise(&r, 0.0, 1.0, RandomSource::new(1, 0)).unwrap();
        assert_eq!(same, r);
        for seed in 0..20 {
            let noisy = add_turbulence_noise(&r, 2.0, 0.5, RandomSource::new(seed, 0)).unwrap();
            assert!(noisy.values().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn delay_spread_peak_and_ordering() {
        let d = 0.02;
        let r = 0.3;
        let p = still(1.0, d, 0.0);
        let dt = 0.01;
        let grid = TimeGrid::new(dt, dt, 20_000).unwrap();
        let resp = impulse_response(&p, &ObservationPoint::on_axis(r), grid).unwrap();
        let m = delay_spread_metrics(&resp, 0.99).unwrap();
        assert!((m.t_peak - r * r / (6.0 * d)).abs() <= dt);
        assert!(m.t_tail >= m.t_peak);

        let zero = ChannelResponse::new(TimeSeries::zeros(grid, Unit::Concentration), r, Medium::Air);
        assert!(delay_spread_metrics(&zero, 0.5).is_err());
        assert!(trapezoid_integral(&resp.series) > 0.0);
    }
}
