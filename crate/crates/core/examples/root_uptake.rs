//! Dose absorbed by a receiving leaf: the Robin boundary between a perfect
//! sink and a reflecting surface, and the saturating transporter law.

use phytolink::channel_air::{propagate_continuous, AirChannelParams, ObservationPoint};
use phytolink::receiver::{accumulate_internal, root_uptake_mm, UptakeLaw, UptakeParams};
use phytolink::{TimeGrid, TimeSeries, Unit};

fn main() -> phytolink::Result<()> {
    let air = AirChannelParams {
        mass: 1.0,
        diffusivity: 0.05,
        wind: [0.5, 0.0, 0.0],
        loss_rate: 0.0,
    };
    let flux = TimeSeries::constant(TimeGrid::new(0.0, 0.5, 600)?, 1e-6, Unit::Flux)?;
    let ambient = propagate_continuous(&flux, &air, &ObservationPoint::on_axis(1.0))?;
    for k_a in [0.0, 1e-5, 1e-4, 1e-3, 1e-2] {
        let p = UptakeParams {
            k_a_recv: k_a,
            ..UptakeParams::default()
        };
        let acc = accumulate_internal(&ambient, &p, UptakeLaw::Robin, 1e-6)?;
        println!("k_a = {k_a:>7.0e} m/s  dose = {:.4e} mol", acc.dose);
    }
    let p = UptakeParams::default();
    println!("MM uptake at c = K_m: {:e} (J_max/2 = {:e})", root_uptake_mm(p.k_m, &p), p.j_max / 2.0);
    Ok(())
}
