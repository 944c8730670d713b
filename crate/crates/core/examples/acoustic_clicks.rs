//! Cavitation clicks: vessel resonance, airborne ultrasound loss, click
//! detection and mechanosensitive channel gating at the receiver.

use phytolink::acoustic::{click_train, damping_time, detect_clicks, ms_channel_open_prob, propagate_air_acoustic, vessel_resonance_freqs, AcousticMedium, MSChannelParams, VesselParams};
use phytolink::numerics::{add_white_noise, RandomSource};
use phytolink::TimeGrid;

fn main() -> phytolink::Result<()> {
    let vessel = VesselParams::default();
    println!("harmonics: {:?} Hz, damping time {:.2e} s", vessel_resonance_freqs(&vessel, 4)?, damping_time(&vessel));

    let grid = TimeGrid::new(0.0, 1e-7, 30_000)?;
    let onsets = [2e-4, 1.2e-3, 2.2e-3];
    let click = click_train(&vessel, 1.0, &onsets, grid)?;
    let medium = AcousticMedium::default();
    for d in [0.02, 0.04, 0.08, 0.16] {
        println!("gain at {d:.2} m: {:.4} ({:.2} dB)", medium.gain(d), 20.0 * medium.gain(d).log10());
    }
    let received = propagate_air_acoustic(&click, &medium, 0.1)?;
    let peak = medium.gain(0.1);
    let power = received.values().iter().map(|x| x * x).sum::<f64>() / received.len() as f64;
    let noisy = add_white_noise(&received, (power / 10.0).sqrt(), RandomSource::new(3, 0))?;
    let events = detect_clicks(&noisy, 0.5 * peak, 3.0 * damping_time(&vessel))?;
    println!("detected clicks at {events:?} s (sent {onsets:?} + {:.2e} s)", 0.1 / medium.c_air);

    let ms = MSChannelParams { dg_over_kt: 5.0, coupling: 100.0 };
    for p in [0.0, 0.05, 0.1] {
        println!("open probability at {p} Pa: {:.4}", ms_channel_open_prob(p, &ms));
    }
    Ok(())
}
