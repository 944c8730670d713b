//! Breakthrough of a root exudate pulse through soil, analytic versus the
//! finite-difference pore-network solver, and the effect of retardation.

use phytolink::channel_soil::{breakthrough_curve, effective_impulse_response, max_stable_dt, solve_dual_phase_1d, SoilParams};
use phytolink::{TimeGrid, TimeSeries, Unit};

fn main() -> phytolink::Result<()> {
    let distance = 0.02;
    for r in [1.0, 2.0, 4.0] {
        let p = SoilParams {
            d_eff: 1e-7,
            velocity: 5e-6,
            retardation: r,
            ..SoilParams::default()
        };
        let h = effective_impulse_response(&p, distance, 1.0, TimeGrid::new(1.0, 1.0, 40_000)?)?;
        let (_, peak) = h.series.argmax();
        let bt = breakthrough_curve(&h, 0.01 * peak)?;
        println!("R = {r}: {bt:?}");
    }

    let p = SoilParams::default();
    let (length, n_cells) = (0.05, 100);
    let dt = 0.8 * max_stable_dt(&p, length / n_cells as f64);
    let pulse = TimeSeries::impulse(TimeGrid::new(0.0, dt, 20_000)?, 1e-6, Unit::ArealFlux)?;
    let cells = solve_dual_phase_1d(&p, &pulse, length, n_cells)?;
    let probe = &cells[40];
    let (k, c) = probe.series.argmax();
    println!("finite differences, cell 40 (x = {:.4} m): peak {c:.3e} mol/m^3 at {:.0} s", probe.distance, probe.series.time(k));
    Ok(())
}
