//! Puff release in a wind: where the plume is, how much is left, and how
//! slowly the calm-air tail decays.

use phytolink::channel_air::{concentration, delay_spread_metrics, impulse_response, AirChannelParams, ObservationPoint};
use phytolink::TimeGrid;

fn main() -> phytolink::Result<()> {
    let windy = AirChannelParams {
        mass: 1e-3,
        diffusivity: 0.05,
        wind: [1.0, 0.0, 0.0],
        loss_rate: 1e-3,
    };
    println!("plume centre after t seconds (wind 1 m/s along x):");
    for t in [2.0, 5.0, 10.0] {
        let (x_best, _) = (0..=400)
            .map(|i| i as f64 * 0.05)
            .map(|x| (x, concentration(&windy, [x, 0.0, 0.0], t)))
            .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        println!("  t = {t:>4} s  argmax x = {x_best:.2} m");
    }

    let calm = AirChannelParams {
        wind: [0.0; 3],
        loss_rate: 0.0,
        ..windy
    };
    let grid = TimeGrid::new(0.1, 0.1, 20_000)?;
    let h = impulse_response(&calm, &ObservationPoint::on_axis(1.0), grid)?;
    let ds = delay_spread_metrics(&h, 0.95)?;
    println!(
        "calm air at 1 m: peak at {:.2} s, 95% delivered by {:.1} s, tail exponent {:.3}",
        ds.t_peak, ds.t_tail, ds.tail_exponent
    );
    Ok(())
}
