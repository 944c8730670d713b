//! Acoustic emission: cavitation clicks from xylem vessel resonance, free-field
//! ultrasonic propagation, mechanosensitive-channel detection and a simple
//! click detector.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numerics::{TimeGrid, TimeSeries, Unit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VesselParams {
    /// Sound speed in sap (m/s).
    pub v_l: f64,
    /// Vessel length (m).
    pub l_vessel: f64,
    /// Vessel radius (m).
    pub r_vessel: f64,
    /// Sap density (kg/m³).
    pub rho_l: f64,
    /// Sap viscosity (Pa·s).
    pub eta_l: f64,
}

impl Default for VesselParams {
    fn default() -> Self {
        VesselParams {
            v_l: 1500.0,
            l_vessel: 0.005,
            r_vessel: 20e-6,
            rho_l: 1000.0,
            eta_l: 1e-3,
        }
    }
}

impl VesselParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.v_l > 0.0, "v_l", "must be positive")?;
        ensure(self.l_vessel > 0.0, "l_vessel", "must be positive")?;
        ensure(self.r_vessel > 0.0, "r_vessel", "must be positive")?;
        ensure(self.r_vessel < self.l_vessel, "r_vessel", "must be smaller than the vessel length")?;
        ensure(self.rho_l > 0.0, "rho_l", "must be positive")?;
        ensure(self.eta_l > 0.0, "eta_l", "must be positive")
    }

    /// Fundamental `f_1 = v_l / (2L)`.
    pub fn fundamental(&self) -> f64 {
        0.5 * self.v_l / self.l_vessel
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticMedium {
    /// Sound speed (m/s).
    pub c_air: f64,
    /// Band absorption (dB/m).
    pub alpha_db_per_m: f64,
    /// Distance at which the source waveform is specified (m).
    pub r_ref: f64,
}

impl Default for AcousticMedium {
    fn default() -> Self {
        AcousticMedium {
            c_air: 343.0,
            alpha_db_per_m: 3.0,
            r_ref: 0.01,
        }
    }
}

impl AcousticMedium {
    pub fn validate(&self) -> Result<()> {
        ensure(self.c_air > 0.0, "c_air", "must be positive")?;
        ensure(self.alpha_db_per_m >= 0.0, "alpha_db_per_m", "must be non-negative")?;
        ensure(self.r_ref > 0.0, "r_ref", "must be positive")
    }

    /// Pressure gain `(r_ref/d) · 10^{−α(d − r_ref)/20}`.
    pub fn gain(&self, distance: f64) -> f64 {
        self.r_ref / distance * 10f64.powf(-self.alpha_db_per_m * (distance - self.r_ref) / 20.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MSChannelParams {
    /// Closed→open free energy in units of `k_B T`.
    pub dg_over_kt: f64,
    /// Pressure-to-energy coupling (1/Pa, in `k_B T` units).
    pub coupling: f64,
}

impl MSChannelParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.dg_over_kt.is_finite(), "dg_over_kt", "must be finite")?;
        ensure(self.coupling >= 0.0 && self.coupling.is_finite(), "coupling", "must be non-negative")
    }
}

/// `f_m = (m/2) · v_l / L` for `m = 1..=m_max`.
pub fn vessel_resonance_freqs(p: &VesselParams, m_max: usize) -> Result<Vec<f64>> {
    p.validate()?;
    ensure(m_max >= 1, "m_max", "must be at least 1")?;
    Ok((1..=m_max).map(|m| m as f64 * p.fundamental()).collect())
}

/// Viscous damping time `τ_s = ρ R² / (4η)`.
pub fn damping_time(p: &VesselParams) -> f64 {
    p.rho_l * p.r_vessel * p.r_vessel / (4.0 * p.eta_l)
}

/// Default detector dead time, three damping times.
pub fn default_dead_time(p: &VesselParams) -> f64 {
    3.0 * damping_time(p)
}

fn check_sampling(p: &VesselParams, dt: f64, highest: f64) -> Result<()> {
    let required = 1.0 / (10.0 * highest);
    if dt > required {
        return Err(Error::param(
            "dt",
            format!("grid step {dt} s undersamples the {highest} Hz mode; dt must be at most {required} s"),
        ));
    }
    p.validate()
}

/// Fundamental-mode click `A·sin(2π f_1 τ)·e^{−τ/τ_s}`, with `τ` measured from
/// the grid start.
pub fn synth_click(p: &VesselParams, amplitude: f64, grid: TimeGrid) -> Result<TimeSeries> {
    synth_click_modes(p, &[amplitude], grid)
}

/// Superposition of the first `weights.len()` vessel modes sharing the `τ_s`
/// envelope; `weights[m-1]` is the pressure amplitude of mode `m`.
pub fn synth_click_modes(p: &VesselParams, weights: &[f64], grid: TimeGrid) -> Result<TimeSeries> {
    ensure(!weights.is_empty(), "weights", "at least one mode is required")?;
    let freqs = vessel_resonance_freqs(p, weights.len())?;
    check_sampling(p, grid.dt, *freqs.last().expect("non-empty"))?;
    let tau_s = damping_time(p);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut values = Vec::with_capacity(grid.n);
    for k in 0..grid.n {
        let tau = k as f64 * grid.dt;
        let env = (-tau / tau_s).exp();
        let s: f64 = weights
            .iter()
            .zip(&freqs)
            .map(|(w, f)| w * (two_pi * f * tau).sin())
            .sum();
        values.push(s * env);
    }
    TimeSeries::new(grid.t0, grid.dt, values, Unit::Pressure)
}

/// Fundamental-mode clicks starting at each onset time on a shared grid.
pub fn click_train(p: &VesselParams, amplitude: f64, onsets: &[f64], grid: TimeGrid) -> Result<TimeSeries> {
    let f1 = p.fundamental();
    check_sampling(p, grid.dt, f1)?;
    let tau_s = damping_time(p);
    let w = 2.0 * std::f64::consts::PI * f1;
    TimeSeries::from_fn(grid, Unit::Pressure, |t| {
        onsets
            .iter()
            .filter(|&&t0| t >= t0)
            .map(|&t0| {
                let tau = t - t0;
                amplitude * (w * tau).sin() * (-tau / tau_s).exp()
            })
            .sum()
    })
}

/// Spherical spreading plus absorption, delayed by `distance / c`.
pub fn propagate_air_acoustic(click: &TimeSeries, medium: &AcousticMedium, distance: f64) -> Result<TimeSeries> {
    medium.validate()?;
    if !(distance >= medium.r_ref) {
        return Err(Error::param(
            "distance",
            format!("{distance} m is inside the reference distance {} m", medium.r_ref),
        ));
    }
    Ok(click.scale(medium.gain(distance))?.shifted(distance / medium.c_air))
}

/// Two-state Boltzmann open probability `1 / (1 + e^{ΔG − κp})`.
pub fn ms_channel_open_prob(pressure: f64, p: &MSChannelParams) -> f64 {
    let dg = p.dg_over_kt - p.coupling * pressure;
    if dg >= 0.0 {
        let e = (-dg).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + dg.exp())
    }
}

/// Times where `|x|` reaches `threshold`, ignoring re-triggers within
/// `dead_time` of the last event.
pub fn detect_clicks(signal: &TimeSeries, threshold: f64, dead_time: f64) -> Result<Vec<f64>> {
    ensure(threshold > 0.0, "threshold", "must be positive")?;
    ensure(dead_time >= 0.0, "dead_time", "must be non-negative")?;
    let mut events: Vec<f64> = Vec::new();
    for (k, v) in signal.values().iter().enumerate() {
        if v.abs() < threshold {
            continue;
        }
        let t = signal.time(k);
        if events.last().is_none_or(|&last| t - last > dead_time) {
            events.push(t);
        }
    }
    Ok(events)
}

/// Writes event times as a one-column CSV with header `t_event[s]`.
pub fn export_event_csv(events: &[f64], path: &Path) -> Result<()> {
    let mut out = String::from("t_event[s]\n");
    for t in events {
        let _ = writeln!(out, "{t:?}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonance_examples() {
        let p = VesselParams::default();
        let f = vessel_resonance_freqs(&p, 4).unwrap();
        assert!((f[0] - 150e3).abs() < 1e-6);
        for (m, fm) in f.iter().enumerate() {
            assert_eq!(fm / f[0], (m + 1) as f64);
        }
        let half = VesselParams {
            l_vessel: p.l_vessel / 2.0,
            ..p.clone()
        };
        let g = vessel_resonance_freqs(&half, 4).unwrap();
        assert!(f.iter().zip(&g).all(|(a, b)| *b == 2.0 * a));
        assert!(vessel_resonance_freqs(&p, 0).is_err());
    }

    #[test]
    fn damping_examples() {
        let p = VesselParams::default();
        assert!((damping_time(&p) - 1e-4).abs() < 1e-16);
        let wide = VesselParams {
            r_vessel: 2.0 * p.r_vessel,
            ..p.clone()
        };
        assert!((damping_time(&wide) / damping_time(&p) - 4.0).abs() < 1e-12);
        let thick = VesselParams {
            eta_l: 2.0 * p.eta_l,
            ..p.clone()
        };
        assert!((damping_time(&thick) / damping_time(&p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn click_shape() {
        let p = VesselParams::default();
        let dt = 1.0 / (40.0 * p.fundamental());
        let grid = TimeGrid::new(0.0, dt, 4000).unwrap();
        let c = synth_click(&p, 2.0, grid).unwrap();
        assert_eq!(c.values()[0], 0.0);
        // envelope at τ_s: look at the local peak magnitude around τ_s
        let tau = damping_time(&p);
        let period = 1.0 / p.fundamental();
        let k0 = ((tau - period / 2.0) / dt) as usize;
        let k1 = ((tau + period / 2.0) / dt) as usize;
        let local = c.values()[k0..=k1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let expect = 2.0 * (-1f64).exp();
        // the sampled peak may be off the crest by up to the envelope change over half a period
        assert!((local - expect).abs() < expect * (period / tau), "{local} vs {expect}");
        let coarse = TimeGrid::new(0.0, 2.0 * dt * 4.0 + 1e-9, 10).unwrap();
        assert!(synth_click(&p, 1.0, coarse).is_err());
    }

    #[test]
    fn propagation_examples() {
        let p = VesselParams::default();
        let grid = TimeGrid::new(0.0, 1.0 / (20.0 * p.fundamental()), 200).unwrap();
        let c = synth_click(&p, 1.0, grid).unwrap();
        let lossless = AcousticMedium {
            alpha_db_per_m: 0.0,
            ..AcousticMedium::default()
        };
        let same = propagate_air_acoustic(&c, &lossless, lossless.r_ref).unwrap();
        assert_eq!(same.values(), c.values());
        assert!((same.t0() - lossless.r_ref / lossless.c_air).abs() < 1e-18);
        let far = propagate_air_acoustic(&c, &lossless, 2.0 * lossless.r_ref).unwrap();
        assert!((far.max_abs() / c.max_abs() - 0.5).abs() < 1e-12);
        let lossy = AcousticMedium {
            alpha_db_per_m: 6.0,
            r_ref: 1.0,
            ..AcousticMedium::default()
        };
        let one = propagate_air_acoustic(&c, &lossy, 1.0).unwrap();
        let two = propagate_air_acoustic(&c, &lossy, 2.0).unwrap();
        let extra = two.max_abs() / one.max_abs() / 0.5;
        assert!((extra - 10f64.powf(-0.3)).abs() < 1e-12);
        assert!((extra - 0.501).abs() < 1e-3);
        assert!(propagate_air_acoustic(&c, &lossy, 0.5).is_err());
    }

    #[test]
    fn open_probability_examples() {
        let mut p = MSChannelParams {
            dg_over_kt: 0.0,
            coupling: 0.1,
        };
        assert_eq!(ms_channel_open_prob(0.0, &p), 0.5);
        p.dg_over_kt = 3f64.ln();
        assert!((ms_channel_open_prob(0.0, &p) - 0.25).abs() < 1e-15);
        assert!(ms_channel_open_prob(1e6, &p) > 1.0 - 1e-12);
        let ps: Vec<f64> = (-100..100).map(|i| ms_channel_open_prob(i as f64, &p)).collect();
        assert!(ps.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!(ps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn detector_examples() {
        let p = VesselParams::default();
        let dt = 1.0 / (20.0 * p.fundamental());
        let grid = TimeGrid::new(0.0, dt, 20000).unwrap();
        let silence = TimeSeries::zeros(grid, Unit::Pressure);
        assert!(detect_clicks(&silence, 0.1, 0.0).unwrap().is_empty());

        let dead = default_dead_time(&p);
        let one = click_train(&p, 1.0, &[1e-3], grid).unwrap();
        let ev = detect_clicks(&one, 0.2, dead).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - 1e-3).abs() <= 1.0 / (4.0 * p.fundamental()) + dt);

        let apart = click_train(&p, 1.0, &[1e-3, 1e-3 + 2.0 * dead], grid).unwrap();
        assert_eq!(detect_clicks(&apart, 0.2, dead).unwrap().len(), 2);
        let close = click_train(&p, 1.0, &[1e-3, 1e-3 + 0.5 * dead], grid).unwrap();
        assert_eq!(detect_clicks(&close, 0.2, dead).unwrap().len(), 1);
        assert!(detect_clicks(&one, 0.0, dead).is_err());
    }

    #[test]
    fn event_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("events.csv");
        export_event_csv(&[0.5, 1.25], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "t_event[s]\n0.5\n1.25\n");
    }
}
