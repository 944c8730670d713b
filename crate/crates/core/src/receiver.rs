//! Uptake at leaf and root surfaces.
//!
//! The Robin condition is applied pointwise to the concentration delivered by
//! a channel model (well-mixed boundary layer); the exterior field is not
//! depleted by the receiver.

use serde::{Deserialize, Serialize};

use crate::channel_air::ChannelResponse;
use crate::error::{ensure, Result};
use crate::numerics::{TimeSeries, Unit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UptakeParams {
    /// Effective mass-transfer coefficient (m/s).
    pub k_a_recv: f64,
    /// Internal concentration (mol/m³); the initial value for accumulation.
    pub c_int: f64,
    /// Characteristic leaf length (m).
    pub l_char: f64,
    /// Diffusivity of the surrounding medium (m²/s).
    pub d_medium: f64,
    /// Absorbing surface (m²).
    pub area: f64,
    /// Transporter saturation flux (mol/(m²·s)).
    pub j_max: f64,
    /// Half-saturation concentration (mol/m³).
    pub k_m: f64,
}

impl Default for UptakeParams {
    fn default() -> Self {
        UptakeParams {
            k_a_recv: 1e-3,
            c_int: 0.0,
            l_char: 0.05,
            d_medium: 1e-5,
            area: 1e-3,
            j_max: 1e-6,
            k_m: 1e-3,
        }
    }
}

impl UptakeParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.k_a_recv >= 0.0, "k_a_recv", "must be non-negative")?;
        ensure(self.c_int >= 0.0, "c_int", "must be non-negative")?;
        ensure(self.l_char > 0.0, "l_char", "must be positive")?;
        ensure(self.d_medium > 0.0, "d_medium", "must be positive")?;
        ensure(self.area > 0.0, "area", "must be positive")?;
        ensure(self.j_max > 0.0, "j_max", "must be positive")?;
        ensure(self.k_m > 0.0, "k_m", "must be positive")
    }

    /// Low-concentration linear rate `J_max / K_m`.
    pub fn k_c(&self) -> f64 {
        self.j_max / self.k_m
    }
}

/// Robin boundary flux `k_a (c − c_int)`, positive into the receiver.
pub fn robin_uptake_flux(c_ambient: f64, p: &UptakeParams) -> f64 {
    p.k_a_recv * (c_ambient - p.c_int)
}

/// `Sh = k_a · L / D`.
pub fn sherwood_number(p: &UptakeParams) -> f64 {
    p.k_a_recv * p.l_char / p.d_medium
}

/// Linear root uptake; the same mixed boundary form as at the leaf.
pub fn root_uptake_linear(c_w: f64, p: &UptakeParams) -> f64 {
    robin_uptake_flux(c_w, p)
}

/// Transporter-limited uptake `J_max c / (K_m + c)`.
pub fn root_uptake_mm(c_w: f64, p: &UptakeParams) -> f64 {
    p.j_max * (c_w / (p.k_m + c_w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UptakeLaw {
    Robin,
    Mm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Accumulation {
    pub c_int: TimeSeries,
    /// Cumulative absorbed amount `area · ∫ flux dt` (mol).
    pub dose_series: TimeSeries,
    pub dose: f64,
}

/// Integrates the internal pool `dc_int/dt = area · flux / volume`.
///
/// Under the saturating law the flux does not depend on `c_int`, so the
/// internal concentration is held at zero and only the dose accumulates.
pub fn accumulate_internal(
    resp: &ChannelResponse,
    p: &UptakeParams,
    law: UptakeLaw,
    volume: f64,
) -> Result<Accumulation> {
    p.validate()?;
    ensure(volume > 0.0, "volume", "must be positive")?;
    let ambient = &resp.series;
    let c0 = match law {
        UptakeLaw::Robin => p.c_int,
        UptakeLaw::Mm => 0.0,
    };
    // ambient held constant over each step, so both laws integrate exactly:
    // Robin relaxes c_int exponentially towards the ambient value, the
    // saturating law absorbs at a constant rate
    let rate = p.area * p.k_a_recv / volume;
    let h = ambient.dt();
    let decay = (-rate * h).exp();
    let n = ambient.len();
    let mut c = Vec::with_capacity(n);
    let mut absorbed = Vec::with_capacity(n);
    let (mut c_k, mut dose_k) = (c0, 0.0);
    for &u in ambient.values() {
        c.push(c_k);
        absorbed.push(dose_k);
        let c_amb = u.max(0.0);
        match law {
            UptakeLaw::Robin => {
                // area·∫flux = volume·Δc_int, taken from the start so
                // rounding does not accumulate
                c_k = c_amb + (c_k - c_amb) * decay;
                dose_k = volume * (c_k - c0);
            }
            UptakeLaw::Mm => dose_k += p.area * root_uptake_mm(c_amb, p) * h,
        }
    }
    let dose_series = TimeSeries::new(ambient.t0(), h, absorbed, Unit::Dimensionless)?;
    let c_int = TimeSeries::new(ambient.t0(), h, c, Unit::Concentration)?;
    let dose = *dose_series.values().last().expect("non-empty");
    Ok(Accumulation {
        c_int,
        dose_series,
        dose,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_air::Medium;
    use crate::numerics::TimeGrid;

    fn p() -> UptakeParams {
        UptakeParams {
            k_a_recv: 2.0,
            c_int: 1.0,
            l_char: 0.1,
            d_medium: 0.5,
            area: 0.01,
            j_max: 3.0,
            k_m: 0.2,
        }
    }

    #[test]
    fn robin_examples() {
        let mut q = p();
        assert_eq!(robin_uptake_flux(3.0, &q), 4.0);
        assert_eq!(robin_uptake_flux(q.c_int, &q), 0.0);
        assert!(robin_uptake_flux(0.5, &q) < 0.0);
        q.k_a_recv = 0.0;
        assert_eq!(robin_uptake_flux(3.0, &q), 0.0);
    }

    #[test]
    fn sherwood_examples() {
        let mut q = p();
        q.k_a_recv = 5.0;
        assert!((sherwood_number(&q) - 1.0).abs() < 1e-15);
        let mut wide = q.clone();
        wide.l_char *= 2.0;
        assert!((sherwood_number(&wide) - 2.0).abs() < 1e-15);
        q.k_a_recv = 0.0;
        assert_eq!(sherwood_number(&q), 0.0);
    }

    #[test]
    fn root_linear_examples() {
        let mut q = p();
        q.k_a_recv = 1.0;
        assert_eq!(root_uptake_linear(q.c_int, &q), 0.0);
        q.c_int = 0.0;
        assert!((root_uptake_linear(0.3, &q) - 0.3).abs() < 1e-15);
        assert!((root_uptake_linear(0.6, &q) - 2.0 * root_uptake_linear(0.3, &q)).abs() < 1e-15);
    }

    #[test]
    fn root_mm_examples() {
        let q = p();
        assert_eq!(root_uptake_mm(q.k_m, &q), q.j_max / 2.0);
        assert_eq!(root_uptake_mm(0.0, &q), 0.0);
        assert!(root_uptake_mm(100.0 * q.k_m, &q) >= 0.99 * q.j_max);
        let eps = 1e-9;
        assert!((root_uptake_mm(eps, &q) / eps - q.k_c()).abs() / q.k_c() < 1e-6);
    }

    fn ambient(value: f64, dt: f64, n: usize) -> ChannelResponse {
        let grid = TimeGrid::new(0.0, dt, n).unwrap();
        ChannelResponse::new(TimeSeries::constant(grid, value, Unit::Concentration).unwrap(), 0.0, Medium::Air)
    }

    #[test]
    fn zero_ambient_gives_nothing() {
        let mut q = p();
        q.c_int = 0.0;
        let acc = accumulate_internal(&ambient(0.0, 0.1, 100), &q, UptakeLaw::Robin, 1e-3).unwrap();
        assert!(acc.c_int.values().iter().all(|&v| v == 0.0));
        assert_eq!(acc.dose, 0.0);
        let acc = accumulate_internal(&ambient(0.0, 0.1, 100), &q, UptakeLaw::Mm, 1e-3).unwrap();
        assert_eq!(acc.dose, 0.0);
    }

    #[test]
    fn robin_equilibrates() {
        let mut q = p();
        q.c_int = 0.0;
        q.k_a_recv = 0.5;
        q.area = 0.02;
        let volume = 0.01;
        let tau = volume / (q.area * q.k_a_recv);
        let dt = tau / 200.0;
        let n = (5.0 * tau / dt).round() as usize + 1;
        let c0 = 2.0;
        let acc = accumulate_internal(&ambient(c0, dt, n), &q, UptakeLaw::Robin, volume).unwrap();
        let last = *acc.c_int.values().last().unwrap();
        assert!((last - c0).abs() / c0 < 0.01, "c_int(5τ) = {last}");
        assert!((acc.dose - volume * last).abs() < 1e-9);
    }

    #[test]
    fn mm_dose_is_monotone() {
        let acc = accumulate_internal(&ambient(0.4, 0.01, 200), &p(), UptakeLaw::Mm, 1e-3).unwrap();
        assert!(acc.dose_series.values().windows(2).all(|w| w[1] >= w[0]));
        assert!(acc.c_int.values().iter().all(|&v| v == 0.0));
        assert!(accumulate_internal(&ambient(0.4, 0.01, 10), &p(), UptakeLaw::Mm, 0.0).is_err());
    }
}
