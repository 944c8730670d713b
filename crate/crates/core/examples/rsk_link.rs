//! Ratio-shift keying: the blend ratio carries the symbol, so decisions
//! survive any common change in emission strength or dilution.

use phytolink::channel_air::{propagate_continuous, AirChannelParams, ObservationPoint};
use phytolink::linkstats::detect_rsk;
use phytolink::transmitter::{modulate_rsk, SymbolFrame};

fn main() -> phytolink::Result<()> {
    let table = vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.7, 0.2], vec![0.2, 0.1, 0.7]];
    let frame = SymbolFrame::new(vec![0, 2, 1, 1, 0, 2, 2, 1], 60.0, 3)?;
    let air = AirChannelParams {
        mass: 1.0,
        diffusivity: 0.05,
        wind: [0.5, 0.0, 0.0],
        loss_rate: 0.0,
    };
    for total in [1e-7, 1e-6, 1e-4] {
        let species = modulate_rsk(&frame, &table, total, 1.5)?;
        let received = species
            .iter()
            .map(|e| propagate_continuous(e, &air, &ObservationPoint::on_axis(1.0)))
            .collect::<phytolink::Result<Vec<_>>>()?;
        let d = detect_rsk(&received, &frame, &table)?;
        println!("total flux {total:e} mol/s: decided {:?}, SER = {}", d.decided_symbols, d.ser);
    }
    Ok(())
}
