//! From a stress signal to emitted flux: transcriptional control, the
//! three storage pools, and the root exudation models.

use phytolink::transmitter::{emit_message, root_flux_pulse, step_compartments, step_surface_pool, CompartmentParams, RootEmitterParams, TranscriptionParams};
use phytolink::numerics::trapezoid_integral;
use phytolink::{TimeGrid, TimeSeries, Unit};

fn main() -> phytolink::Result<()> {
    let grid = TimeGrid::new(0.0, 1.0, 3600)?;
    let stress = TimeSeries::from_fn(grid, Unit::Stress, |t| if (600.0..1800.0).contains(&t) { 1.0 } else { 0.0 })?;
    let tp = TranscriptionParams {
        nu_max: 1e-9,
        w: 8.0,
        c_delay: 4.0,
        k_d: 1e-3,
        g: None,
        tau_b: 0.0,
        tau_e: 3600.0,
    };
    let message = emit_message(&stress, &tp)?;
    println!("transcribed message: peak {:.3e} mol", message.argmax().1);

    let pools = step_compartments(&stress.scale(1e-9)?, &CompartmentParams {
        eta: 0.7,
        k_aq: 2e-3,
        k_lipid: 5e-4,
        k_gas: 1e-2,
        s0: [0.0; 3],
    })?;
    println!(
        "three-pool emitter: emitted {:.3e} mol of {:.3e} produced",
        trapezoid_integral(&pools.flux),
        1e-9 * 1200.0
    );

    let root = RootEmitterParams {
        amplitude: 1e-8,
        tau_b: 60.0,
        tau_rel: 300.0,
        ..RootEmitterParams::default()
    };
    let pulse = root_flux_pulse(&root, grid)?;
    println!("root pulse: {:.3e} mol/m^2 released", trapezoid_integral(&pulse));
    let pool = step_surface_pool(&stress, &root)?;
    println!("surface pool: final {:.3e} mol/m^2, unbounded = {}", pool.pool.values().last().unwrap(), pool.unbounded_pool);
    Ok(())
}
