//! Action potentials, variation potentials and system potentials, and
//! telling them apart from the waveform alone.

use phytolink::electrical::{classify_signal, generate_ap_train, generate_vp, sp_template, APParams, ClassifierConfig, VPParams};
use phytolink::{RandomSource, TimeGrid, TimeSeries, Unit};

fn main() -> phytolink::Result<()> {
    let ap = APParams {
        jitter: 0.5,
        ..APParams::default()
    };
    let grid = TimeGrid::new(0.0, 0.1, 3000)?;
    let stimulus = TimeSeries::from_fn(grid, Unit::Dimensionless, |t| if (t % 60.0) < 2.0 { 0.03 } else { 0.0 })?;
    let train = generate_ap_train(&stimulus, &ap, Some(RandomSource::new(9, 0)))?;
    println!("AP: {} spikes at {:?} s, {:.0} cm/min", train.spike_times.len(), train.spike_times, ap.speed_cm_per_min());

    let vp = VPParams {
        gain: 0.05,
        rise: 20.0,
        decay: 200.0,
        speed_decay: 2.0,
        speed: 0.002,
    };
    let vp_wave = generate_vp(1.0, 0.1, &vp, TimeGrid::new(0.0, 1.0, 3000)?)?;
    let sp = sp_template(TimeGrid::new(0.0, 1.0, 3000)?, 0.02, 600.0, 100.0)?;

    let cfg = ClassifierConfig::default();
    let single = generate_ap_train(&stimulus, &APParams::default(), None)?.waveform;
    for (label, w) in [("AP train", &single), ("VP", &vp_wave), ("SP", &sp)] {
        println!("{label:<9} -> {:?}", classify_signal(w, &cfg));
    }
    Ok(())
}
