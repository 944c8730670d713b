//! Belowground propagation through porous soil.
//!
//! The default path is the retarded free-space Green's function (effective
//! single-phase equation with instantaneous air–water partitioning). A 1-D
//! explicit finite-difference solver of the two-phase balance exists to
//! validate it.

use serde::{Deserialize, Serialize};

use crate::channel_air::{concentration, AirChannelParams, ChannelResponse, Medium};
use crate::error::{ensure, Error, Result};
use crate::numerics::{TimeGrid, TimeSeries, Unit};
use crate::transmitter::EmissionProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoilParams {
    /// Volumetric air fraction.
    pub theta_a: f64,
    /// Volumetric water fraction.
    pub theta_w: f64,
    /// Effective pore-network diffusivity (m²/s).
    pub d_eff: f64,
    /// Bulk soil-gas velocity along the source–receiver line (m/s).
    pub velocity: f64,
    /// First-order loss rate (1/s).
    pub k_d: f64,
    /// Air–water partition coefficient, `c_a = K_H · c_w` at equilibrium.
    pub k_h: f64,
    /// Retardation factor (≥ 1).
    pub retardation: f64,
}

impl Default for SoilParams {
    fn default() -> Self {
        SoilParams {
            theta_a: 0.3,
            theta_w: 0.0,
            d_eff: 1e-7,
            velocity: 0.0,
            k_d: 0.0,
            k_h: 1.0,
            retardation: 1.0,
        }
    }
}

impl SoilParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.theta_a >= 0.0, "theta_a", "must be non-negative")?;
        ensure(self.theta_w >= 0.0, "theta_w", "must be non-negative")?;
        ensure(self.theta_a + self.theta_w <= 1.0, "theta_a", "theta_a + theta_w must not exceed 1")?;
        ensure(self.d_eff > 0.0 && self.d_eff.is_finite(), "d_eff", "must be positive")?;
        ensure(self.k_d >= 0.0, "k_d", "must be non-negative")?;
        ensure(self.k_h > 0.0, "k_h", "must be positive")?;
        ensure(self.retardation >= 1.0, "retardation", "must be at least 1")?;
        ensure(self.velocity.is_finite(), "velocity", "must be finite")
    }

    /// Composite storage `theta_a + theta_w / K_H` multiplying `∂c_a/∂t`.
    pub fn storage(&self) -> f64 {
        self.theta_a + self.theta_w / self.k_h
    }

    /// Equivalent free-space parameters of the retarded effective equation.
    pub fn effective_air_params(&self, mass: f64) -> AirChannelParams {
        let r = self.retardation;
        AirChannelParams {
            mass,
            diffusivity: self.d_eff / r,
            wind: [self.velocity / r, 0.0, 0.0],
            loss_rate: self.k_d,
        }
    }
}

/// Impulse response at `distance` from a release of `mass` moles.
pub fn effective_impulse_response(
    p: &SoilParams,
    distance: f64,
    mass: f64,
    grid: TimeGrid,
) -> Result<ChannelResponse> {
    p.validate()?;
    ensure(distance > 0.0, "distance", "must be positive")?;
    if grid.t0 <= 0.0 {
        return Err(Error::param("t_grid", "sample times must be strictly positive"));
    }
    let air = p.effective_air_params(mass);
    air.validate()?;
    let r = [distance, 0.0, 0.0];
    let series = TimeSeries::from_fn(grid, Unit::Concentration, |t| concentration(&air, r, t))?;
    Ok(ChannelResponse::new(series, distance, Medium::Soil))
}

/// Continuous release through the effective soil channel, using the same
/// kernel sampling convention as the air channel.
pub fn propagate_continuous(
    flux: &EmissionProfile,
    p: &SoilParams,
    distance: f64,
) -> Result<ChannelResponse> {
    p.validate()?;
    ensure(distance > 0.0, "distance", "must be positive")?;
    let air = p.effective_air_params(1.0);
    let kernel = crate::channel_air::unit_kernel(
        &air,
        &crate::channel_air::ObservationPoint::on_axis(distance),
        flux.dt(),
        flux.len(),
    )?;
    let mut out = crate::channel_air::convolve_truncated(flux, &kernel, distance, Medium::Soil)?;
    out.distance = distance;
    Ok(out)
}

/// Largest stable step of the explicit upwind scheme.
pub fn max_stable_dt(p: &SoilParams, dx: f64) -> f64 {
    let rate = 2.0 * p.d_eff / (dx * dx) + p.velocity.abs() / dx + p.k_d;
    0.8 * p.storage() / rate
}

/// Explicit finite-difference solution of the 1-D two-phase balance
/// `S·∂c_a/∂t = D_eff ∂²c_a/∂x² − v ∂c_a/∂x − k_d c_a`,
/// `S = theta_a + theta_w/K_H`, on `n_cells` cells of `[0, length]`.
///
/// The areal `flux` (mol/(m²·s)) enters the first cell; the far end has zero
/// gradient. The step is the flux's sampling step, held constant over each
/// interval. Returns the air-phase concentration of every cell, each tagged
/// with its cell-centre distance.
pub fn solve_dual_phase_1d(
    p: &SoilParams,
    flux: &EmissionProfile,
    length: f64,
    n_cells: usize,
) -> Result<Vec<ChannelResponse>> {
    p.validate()?;
    ensure(n_cells >= 8, "n_cells", "at least 8 cells are required")?;
    ensure(length > 0.0, "length", "must be positive")?;
    let storage = p.storage();
    ensure(storage > 0.0, "theta_a", "soil must have positive storage capacity")?;
    let dx = length / n_cells as f64;
    let dt = flux.dt();
    let max_dt = max_stable_dt(p, dx);
    if dt > max_dt {
        return Err(Error::Unstable { dt, max_dt });
    }
    let d = p.d_eff;
    let v = p.velocity;
    let mut c = vec![0.0; n_cells];
    let mut next = vec![0.0; n_cells];
    let mut traces: Vec<Vec<f64>> = (0..n_cells).map(|_| Vec::with_capacity(flux.len())).collect();
    let q = flux.values();
    for k in 0..flux.len() {
        for (tr, &ci) in traces.iter_mut().zip(&c) {
            tr.push(ci);
        }
        if k + 1 == flux.len() {
            break;
        }
        for i in 0..n_cells {
            // diffusive face fluxes, positive towards +x
            let left = if i == 0 { q[k] } else { -d * (c[i] - c[i - 1]) / dx };
            let right = if i + 1 == n_cells { 0.0 } else { -d * (c[i + 1] - c[i]) / dx };
            // first-order upwind advection
            let adv_left = if i == 0 {
                0.0
            } else if v >= 0.0 {
                v * c[i - 1]
            } else {
                v * c[i]
            };
            let adv_right = if i + 1 == n_cells {
                if v > 0.0 { v * c[i] } else { 0.0 }
            } else if v >= 0.0 {
                v * c[i]
            } else {
                v * c[i + 1]
            };
            let net = (left + adv_left - right - adv_right) / dx - p.k_d * c[i];
            next[i] = (c[i] + dt * net / storage).max(0.0);
        }
        std::mem::swap(&mut c, &mut next);
    }
    traces
        .into_iter()
        .enumerate()
        .map(|(i, values)| {
            let series = TimeSeries::new(flux.t0(), dt, values, Unit::Concentration)?;
            Ok(ChannelResponse::new(series, (i as f64 + 0.5) * dx, Medium::Soil))
        })
        .collect()
}

/// Arrival characteristics of a breakthrough curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Breakthrough {
    Arrived { t_arrival: f64, t_peak: f64, peak: f64 },
    NoBreakthrough { t_peak: f64, peak: f64 },
}

impl Breakthrough {
    pub fn arrival(&self) -> Option<f64> {
        match self {
            Breakthrough::Arrived { t_arrival, .. } => Some(*t_arrival),
            Breakthrough::NoBreakthrough { .. } => None,
        }
    }
}

/// First upward crossing of `threshold`, linearly interpolated between
/// samples, plus the location and height of the maximum.
pub fn breakthrough_curve(resp: &ChannelResponse, threshold: f64) -> Result<Breakthrough> {
    ensure(threshold > 0.0, "threshold", "must be positive")?;
    let s = &resp.series;
    let (k_peak, peak) = s.argmax();
    let t_peak = s.time(k_peak);
    let v = s.values();
    let Some(k) = v.iter().position(|&c| c >= threshold) else {
        return Ok(Breakthrough::NoBreakthrough { t_peak, peak });
    };
    let t_arrival = if k == 0 {
        s.t0()
    } else {
        let (a, b) = (v[k - 1], v[k]);
        s.time(k - 1) + (threshold - a) / (b - a) * s.dt()
    };
    Ok(Breakthrough::Arrived {
        t_arrival,
        t_peak,
        peak,
    })
}

/// Total time the response spends at or above `fraction` of its peak.
pub fn persistence(resp: &ChannelResponse, fraction: f64) -> f64 {
    let s = &resp.series;
    let (_, peak) = s.argmax();
    if peak <= 0.0 {
        return 0.0;
    }
    s.values().iter().filter(|&&c| c >= fraction * peak).count() as f64 * s.dt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_air::{impulse_response, ObservationPoint};
    use crate::numerics::trapezoid_integral;

    #[test]
    fn dry_soil_reduces_to_air() {
        let soil = SoilParams {
            d_eff: 2e-3,
            ..SoilParams::default()
        };
        let grid = TimeGrid::new(0.5, 0.5, 100).unwrap();
        let s = effective_impulse_response(&soil, 0.1, 1.0, grid).unwrap();
        let air = AirChannelParams {
            mass: 1.0,
            diffusivity: 2e-3,
            wind: [0.0; 3],
            loss_rate: 0.0,
        };
        let a = impulse_response(&air, &ObservationPoint::on_axis(0.1), grid).unwrap();
        assert_eq!(s.values(), a.values());
    }

    #[test]
    fn retardation_doubles_peak_time() {
        let r = 0.02;
        let dt = 5.0;
        let grid = TimeGrid::new(dt, dt, 4000).unwrap();
        let base = SoilParams::default();
        let slow = SoilParams {
            retardation: 2.0,
            ..base.clone()
        };
        let t1 = effective_impulse_response(&base, r, 1.0, grid).unwrap();
        let t2 = effective_impulse_response(&slow, r, 1.0, grid).unwrap();
        let p1 = t1.series.time(t1.series.argmax().0);
        let p2 = t2.series.time(t2.series.argmax().0);
        assert!((p1 - r * r / (6.0 * base.d_eff)).abs() <= dt);
        assert!((p2 - 2.0 * r * r / (6.0 * base.d_eff)).abs() <= dt);
    }

    #[test]
    fn loss_reduces_dose() {
        let grid = TimeGrid::new(10.0, 10.0, 5000).unwrap();
        let base = SoilParams::default();
        let lossy = SoilParams {
            k_d: 1e-4,
            ..base.clone()
        };
        let a = trapezoid_integral(&effective_impulse_response(&base, 0.02, 1.0, grid).unwrap().series);
        let b = trapezoid_integral(&effective_impulse_response(&lossy, 0.02, 1.0, grid).unwrap().series);
        assert!(b < a);
    }

    #[test]
    fn fd_zero_input_stays_zero() {
        let p = SoilParams {
            d_eff: 1e-4,
            ..SoilParams::default()
        };
        let flux = TimeSeries::zeros(TimeGrid::new(0.0, 0.1, 100).unwrap(), Unit::ArealFlux);
        let cells = solve_dual_phase_1d(&p, &flux, 0.1, 10).unwrap();
        assert_eq!(cells.len(), 10);
        assert!(cells.iter().all(|c| c.values().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn fd_rejects_unstable_step() {
        let p = SoilParams {
            d_eff: 1e-3,
            ..SoilParams::default()
        };
        let flux = TimeSeries::zeros(TimeGrid::new(0.0, 1.0, 10).unwrap(), Unit::ArealFlux);
        match solve_dual_phase_1d(&p, &flux, 0.1, 10) {
            Err(Error::Unstable { max_dt, .. }) => {
                assert!((max_dt - max_stable_dt(&p, 0.01)).abs() < 1e-15)
            }
            other => panic!("expected instability error, got {other:?}"),
        }
        assert!(solve_dual_phase_1d(&p, &flux, 0.1, 4).is_err());
    }

    #[test]
    fn fd_pulse_conserves_mass() {
        let p = SoilParams {
            theta_a: 0.35,
            d_eff: 1e-4,
            ..SoilParams::default()
        };
        let n_cells = 100;
        let length = 0.5;
        let dx = length / n_cells as f64;
        let dt = 0.5 * max_stable_dt(&p, dx);
        let mass = 2.0e-3;
        let flux = TimeSeries::impulse(TimeGrid::new(0.0, dt, 2000).unwrap(), mass, Unit::ArealFlux).unwrap();
        let cells = solve_dual_phase_1d(&p, &flux, length, n_cells).unwrap();
        let last = flux.len() - 1;
        let total: f64 = cells.iter().map(|c| p.theta_a * c.values()[last] * dx).sum();
        assert!((total - mass).abs() / mass < 0.01, "total {total}");
    }

    #[test]
    fn breakthrough_examples() {
        let dt = 1.0;
        let series = TimeSeries::new(1.0, dt, vec![0.0, 0.0, 0.5, 2.0, 1.0, 0.5], Unit::Concentration).unwrap();
        let resp = ChannelResponse::new(series, 0.01, Medium::Soil);
        assert!(matches!(breakthrough_curve(&resp, 5.0).unwrap(), Breakthrough::NoBreakthrough { peak, .. } if peak == 2.0));
        match breakthrough_curve(&resp, 1.0).unwrap() {
            Breakthrough::Arrived { t_arrival, t_peak, peak } => {
                assert!((t_arrival - (3.0 + 1.0 / 3.0)).abs() < 1e-12);
                assert_eq!(t_peak, 4.0);
                assert_eq!(peak, 2.0);
            }
            other => panic!("{other:?}"),
        }
        // vanishing threshold lands within the interval preceding the first nonzero sample
        let t0p = breakthrough_curve(&resp, 1e-300).unwrap().arrival().unwrap();
        assert!((2.0..=3.0).contains(&t0p));
        assert!(breakthrough_curve(&resp, 0.0).is_err());
    }
}
