//! Shared numerics: uniformly sampled series, causal convolution, fixed-step
//! RK4 integration, trapezoidal quadrature and seeded random streams.
//!
//! Every signal in the crate (emission flux, concentration at a receiver,
//! membrane voltage, acoustic pressure) travels as a [`TimeSeries`].

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Unit tag carried by a [`TimeSeries`]. Checked at combination points only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    /// mol/m³
    Concentration,
    /// mol/s
    Flux,
    /// mol/(m²·s)
    ArealFlux,
    /// concentration per mole released (1/m³)
    ResponsePerMole,
    Voltage,
    Pressure,
    Stress,
    Dimensionless,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Concentration => "mol/m^3",
            Unit::Flux => "mol/s",
            Unit::ArealFlux => "mol/(m^2*s)",
            Unit::ResponsePerMole => "1/m^3",
            Unit::Voltage => "V",
            Unit::Pressure => "Pa",
            Unit::Stress => "stress",
            Unit::Dimensionless => "1",
        }
    }

    /// Unit of `input (*) kernel` where the convolution carries an implicit
    /// factor of seconds.
    pub fn convolution_product(input: Unit, kernel: Unit) -> Result<Unit> {
        match (input, kernel) {
            (Unit::Dimensionless, k) => Ok(k),
            (i, Unit::Dimensionless) => Ok(i),
            (Unit::Flux, Unit::ResponsePerMole) => Ok(Unit::Concentration),
            (a, b) => Err(Error::UnitMismatch(a.to_string(), b.to_string())),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Uniform sampling grid `t0 + k·dt` for `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        ensure(t0.is_finite(), "t0", "must be finite")?;
        ensure(dt.is_finite() && dt > 0.0, "dt", "must be positive and finite")?;
        ensure(n > 0, "n", "grid must contain at least one sample")?;
        Ok(TimeGrid { t0, dt, n })
    }

    /// Grid covering `[t0, t1]` inclusive with `floor((t1 - t0)/dt) + 1` samples.
    pub fn spanning(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        ensure(t1 > t0, "t_span", "end must exceed start")?;
        ensure(dt.is_finite() && dt > 0.0, "dt", "must be positive and finite")?;
        let n = ((t1 - t0) / dt * (1.0 + 1e-12)).floor() as usize + 1;
        TimeGrid::new(t0, dt, n)
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.time(k))
    }

    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }
}

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    unit: Unit,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, unit: Unit) -> Result<Self> {
        TimeGrid::new(t0, dt, values.len().max(1))?;
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                t: t0 + k as f64 * dt,
            });
        }
        Ok(TimeSeries {
            t0,
            dt,
            values,
            unit,
        })
    }

    pub fn zeros(grid: TimeGrid, unit: Unit) -> Self {
        TimeSeries {
            t0: grid.t0,
            dt: grid.dt,
            values: vec![0.0; grid.n],
            unit,
        }
    }

    pub fn constant(grid: TimeGrid, value: f64, unit: Unit) -> Result<Self> {
        TimeSeries::new(grid.t0, grid.dt, vec![value; grid.n], unit)
    }

    pub fn from_fn(grid: TimeGrid, unit: Unit, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = grid.times().map(&mut f).collect();
        TimeSeries::new(grid.t0, grid.dt, values, unit)
    }

    /// Discrete impulse carrying `mass`: a single sample of height `mass/dt`.
    pub fn impulse(grid: TimeGrid, mass: f64, unit: Unit) -> Result<Self> {
        let mut values = vec![0.0; grid.n];
        values[0] = mass / grid.dt;
        TimeSeries::new(grid.t0, grid.dt, values, unit)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            t0: self.t0,
            dt: self.dt,
            n: self.values.len(),
        }
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.time(k))
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    /// Same grid, shifted start time.
    pub fn shifted(mut self, delay: f64) -> Self {
        self.t0 += delay;
        self
    }

    /// Sample-wise map; the result must stay finite.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        TimeSeries::new(
            self.t0,
            self.dt,
            self.values.iter().map(|&v| f(v)).collect(),
            self.unit,
        )
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        self.map(|v| v * factor)
    }

    /// Errors unless both series share start time, step and length.
    pub fn check_aligned(&self, other: &TimeSeries) -> Result<()> {
        if self.dt != other.dt || self.t0 != other.t0 {
            return Err(Error::GridMismatch {
                t0_a: self.t0,
                dt_a: self.dt,
                t0_b: other.t0,
                dt_b: other.dt,
            });
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    /// Sample-wise sum of two aligned series with equal units.
    pub fn add(&self, other: &TimeSeries) -> Result<Self> {
        self.check_aligned(other)?;
        if self.unit != other.unit {
            return Err(Error::UnitMismatch(
                self.unit.to_string(),
                other.unit.to_string(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        TimeSeries::new(self.t0, self.dt, values, self.unit)
    }

    /// Linear interpolation; clamps to the end samples outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.dt;
        if x <= 0.0 {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if x >= last as f64 {
            return self.values[last];
        }
        let k = x.floor() as usize;
        let frac = x - k as f64;
        self.values[k] + frac * (self.values[k + 1] - self.values[k])
    }

    /// Index and value of the first maximum.
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = (0, self.values[0]);
        for (k, &v) in self.values.iter().enumerate() {
            if v > best.1 {
                best = (k, v);
            }
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Causal discrete convolution `out[k] = dt · Σ_{j≤k} input[j]·kernel[k−j]`.
///
/// Output length is `input.len() + kernel.len() - 1` and the output starts at
/// `input.t0 + kernel.t0`.
pub fn convolve_causal(input: &TimeSeries, kernel: &TimeSeries) -> Result<TimeSeries> {
    if input.is_empty() || kernel.is_empty() {
        return Err(Error::EmptySeries);
    }
    if input.dt != kernel.dt {
        return Err(Error::GridMismatch {
            t0_a: input.t0,
            dt_a: input.dt,
            t0_b: kernel.t0,
            dt_b: kernel.dt,
        });
    }
    let unit = Unit::convolution_product(input.unit, kernel.unit)?;
    let n = input.len() + kernel.len() - 1;
    let mut out = vec![0.0; n];
    for (j, &x) in input.values.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (m, &h) in kernel.values.iter().enumerate() {
            out[j + m] += x * h;
        }
    }
    for v in &mut out {
        *v *= input.dt;
    }
    TimeSeries::new(input.t0 + kernel.t0, input.dt, out, unit)
}

/// Trapezoidal rule over all samples. A single sample integrates to zero.
pub fn trapezoid_integral(ts: &TimeSeries) -> f64 {
    trapezoid(&ts.values, ts.dt)
}

pub(crate) fn trapezoid(values: &[f64], dt: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    dt * (inner + 0.5 * (values[0] + values[values.len() - 1]))
}

/// Running trapezoidal integral, `out[0] = 0`.
pub fn cumulative_trapezoid(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

fn check_derivative(t: f64, dx: &[f64]) -> Result<()> {
    if dx.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

/// Scratch buffers for the classical RK4 step.
pub(crate) struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    pub(crate) fn step<F>(&mut self, rhs: &mut F, t: f64, x: &mut [f64], h: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let dim = x.len();
        rhs(t, x, &mut self.k1);
        check_derivative(t, &self.k1)?;
        for i in 0..dim {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        rhs(t + 0.5 * h, &self.tmp, &mut self.k2);
        check_derivative(t + 0.5 * h, &self.k2)?;
        for i in 0..dim {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        rhs(t + 0.5 * h, &self.tmp, &mut self.k3);
        check_derivative(t + 0.5 * h, &self.k3)?;
        for i in 0..dim {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        rhs(t + h, &self.tmp, &mut self.k4);
        check_derivative(t + h, &self.k4)?;
        for i in 0..dim {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        Ok(())
    }
}

/// Fixed-step classical RK4 over `t_span` with step `dt`.
///
/// Returns one dimensionless series per state component, sampled at
/// `floor((t1 - t0)/dt) + 1` points starting at `t0`.
pub fn integrate_ode<F>(
    mut rhs: F,
    state0: &[f64],
    t_span: (f64, f64),
    dt: f64,
) -> Result<Vec<TimeSeries>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let grid = TimeGrid::spanning(t_span.0, t_span.1, dt)?;
    integrate_driven(
        |t, x, _u, dx| rhs(t, x, dx),
        state0,
        grid,
        &[],
    )
}

/// RK4 on `grid` with external drive series held constant over each step
/// (zero-order hold): the step from `t_k` to `t_{k+1}` sees `drive[i][k]`.
///
/// Each drive must share the grid exactly.
pub fn integrate_driven<F>(
    mut rhs: F,
    state0: &[f64],
    grid: TimeGrid,
    drives: &[&TimeSeries],
) -> Result<Vec<TimeSeries>>
where
    F: FnMut(f64, &[f64], &[f64], &mut [f64]),
{
    ensure(!state0.is_empty(), "state0", "must not be empty")?;
    for d in drives {
        if d.t0 != grid.t0 || d.dt != grid.dt {
            return Err(Error::GridMismatch {
                t0_a: grid.t0,
                dt_a: grid.dt,
                t0_b: d.t0,
                dt_b: d.dt,
            });
        }
        if d.len() != grid.n {
            return Err(Error::LengthMismatch(grid.n, d.len()));
        }
    }
    let dim = state0.len();
    let mut traces: Vec<Vec<f64>> = (0..dim).map(|_| Vec::with_capacity(grid.n)).collect();
    let mut x = state0.to_vec();
    let mut u = vec![0.0; drives.len()];
    let mut stepper = Rk4::new(dim);
    for k in 0..grid.n {
        for (i, tr) in traces.iter_mut().enumerate() {
            tr.push(x[i]);
        }
        if k + 1 == grid.n {
            break;
        }
        for (slot, d) in u.iter_mut().zip(drives) {
            *slot = d.values[k];
        }
        let mut f = |t: f64, s: &[f64], ds: &mut [f64]| rhs(t, s, &u, ds);
        stepper.step(&mut f, grid.time(k), &mut x, grid.dt)?;
    }
    traces
        .into_iter()
        .map(|v| TimeSeries::new(grid.t0, grid.dt, v, Unit::Dimensionless))
        .collect()
}

/// Seeded, stream-addressable random source.
///
/// Equal `(seed, stream)` pairs produce identical sequences irrespective of
/// thread scheduling, since each consumer builds its own generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        RandomSource { seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RandomSource { stream, ..self }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    pub fn standard_normals(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }
}

/// Adds zero-mean white Gaussian noise of standard deviation `sigma`.
pub fn add_white_noise(ts: &TimeSeries, sigma: f64, rng: RandomSource) -> Result<TimeSeries> {
    ensure(sigma >= 0.0, "sigma", "must be non-negative")?;
    if sigma == 0.0 {
        return Ok(ts.clone());
    }
    let noise = rng.standard_normals(ts.len());
    let values = ts
        .values
        .iter()
        .zip(noise)
        .map(|(v, n)| v + sigma * n)
        .collect();
    TimeSeries::new(ts.t0, ts.dt, values, ts.unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>, dt: f64) -> TimeSeries {
        TimeSeries::new(0.0, dt, values, Unit::Dimensionless).unwrap()
    }

    #[test]
    fn rejects_bad_series() {
        assert_eq!(
            TimeSeries::new(0.0, 1.0, vec![], Unit::Flux),
            Err(Error::EmptySeries)
        );
        assert!(TimeSeries::new(0.0, 0.0, vec![1.0], Unit::Flux).is_err());
        assert!(matches!(
            TimeSeries::new(0.0, 0.5, vec![1.0, f64::NAN], Unit::Flux),
            Err(Error::NonFinite { t }) if t == 0.5
        ));
    }

    #[test]
    fn add_requires_exact_grid() {
        let a = series(vec![1.0, 2.0], 1.0);
        let b = TimeSeries::new(0.5, 1.0, vec![1.0, 2.0], Unit::Dimensionless).unwrap();
        assert!(matches!(a.add(&b), Err(Error::GridMismatch { .. })));
        let c = series(vec![1.0, 2.0], 0.5);
        assert!(a.add(&c).is_err());
        let d = series(vec![3.0, 4.0], 1.0).with_unit(Unit::Flux);
        assert!(matches!(a.add(&d), Err(Error::UnitMismatch(..))));
        assert_eq!(a.add(&a).unwrap().values(), &[2.0, 4.0]);
    }

    #[test]
    fn convolution_identity_and_zero() {
        let dt = 0.1;
        let grid = TimeGrid::new(0.0, dt, 5).unwrap();
        let delta = TimeSeries::impulse(grid, 1.0, Unit::Dimensionless).unwrap();
        let h = series(vec![0.3, 0.2, 0.1], dt);
        let out = convolve_causal(&delta, &h).unwrap();
        assert_eq!(out.len(), 5 + 3 - 1);
        for (a, b) in out.values().iter().zip(h.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(out.values()[3..].iter().all(|&v| v == 0.0));

        let zero = TimeSeries::zeros(grid, Unit::Dimensionless);
        assert!(convolve_causal(&zero, &h).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn convolution_of_steps_counts_up() {
        let a = series(vec![1.0; 6], 1.0);
        let out = convolve_causal(&a, &a).unwrap();
        for k in 0..6 {
            assert_eq!(out.values()[k], (k + 1) as f64);
        }
    }

    #[test]
    fn convolution_errors() {
        let a = series(vec![1.0; 3], 1.0);
        let b = series(vec![1.0; 3], 0.5);
        assert!(matches!(convolve_causal(&a, &b), Err(Error::GridMismatch { .. })));
        let v = a.clone().with_unit(Unit::Voltage);
        let p = a.clone().with_unit(Unit::Pressure);
        assert!(matches!(convolve_causal(&v, &p), Err(Error::UnitMismatch(..))));
        let f = a.clone().with_unit(Unit::Flux);
        let k = a.with_unit(Unit::ResponsePerMole);
        assert_eq!(convolve_causal(&f, &k).unwrap().unit(), Unit::Concentration);
    }

    #[test]
    fn ode_constant_and_ramp() {
        let out = integrate_ode(|_, _, dx| dx[0] = 0.0, &[3.0], (0.0, 1.0), 0.1).unwrap();
        assert!(out[0].values().iter().all(|&v| v == 3.0));
        assert_eq!(out[0].len(), 11);

        let out = integrate_ode(|_, _, dx| dx[0] = 1.0, &[0.0], (0.0, 2.0), 0.25).unwrap();
        assert_eq!(*out[0].values().last().unwrap(), 2.0);
    }

    #[test]
    fn ode_exponential_decay() {
        let out = integrate_ode(|_, x, dx| dx[0] = -x[0], &[1.0], (0.0, 1.0), 1e-3).unwrap();
        let last = *out[0].values().last().unwrap();
        assert_eq!(out[0].len(), 1001);
        assert!((last - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn ode_reports_failure_time() {
        let err = integrate_ode(
            |t, _, dx| dx[0] = if t >= 0.5 { f64::INFINITY } else { 1.0 },
            &[0.0],
            (0.0, 1.0),
            0.25,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { t } if (0.25..=0.5).contains(&t)));
    }

    #[test]
    fn trapezoid_cases() {
        assert_eq!(trapezoid_integral(&series(vec![1.0; 5], 0.5)), 2.0);
        assert_eq!(trapezoid_integral(&series(vec![4.0], 0.5)), 0.0);
        let ramp = TimeSeries::from_fn(TimeGrid::new(0.0, 0.1, 11).unwrap(), Unit::Dimensionless, |t| t).unwrap();
        assert!((trapezoid_integral(&ramp) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_source_is_reproducible() {
        let a = RandomSource::new(7, 3).standard_normals(1000);
        let b = RandomSource::new(7, 3).standard_normals(1000);
        let c = RandomSource::new(7, 4).standard_normals(1000);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
