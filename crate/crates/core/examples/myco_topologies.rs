//! Common mycorrhizal networks: how topology sets the mixing time, and a
//! nutrient pulse crossing the network.

use phytolink::mycorrhizal::{build_topology, cmn_end_to_end, fiedler_latency, flow_assisted_k, simulate_network_diffusion, InterfaceParams, MycoNetwork, Topology};
use phytolink::{RandomSource, TimeGrid, TimeSeries, Unit};

fn main() -> phytolink::Result<()> {
    let k = flow_assisted_k(2e-5, 0.01);
    let n = 20;
    for (label, kind) in [
        ("ring lattice", Topology::Regular { degree: 2 }),
        ("random p=0.3", Topology::Random { p_edge: 0.3 }),
        ("scale-free m=2", Topology::ScaleFree { m_attach: 2 }),
    ] {
        let net = build_topology(kind, n, RandomSource::new(42, 0))?.with_k_scale(k)?;
        let f = fiedler_latency(&net)?;
        let max_deg = net.degrees().into_iter().max().unwrap_or(0);
        println!("{label:<15} edges {:>3}  max degree {max_deg:>2}  lambda_2 {:.4}  t_mix {:.0} s", net.edges().len(), f.lambda_2, f.t_mix);
    }

    let pair = MycoNetwork::from_pairs(2, &[(0, 1)], 1.0)?;
    let grid = TimeGrid::new(0.0, 0.05, 41)?;
    let d = simulate_network_diffusion(&pair, &[1.0, 0.0], grid)?;
    println!("two nodes at t = 2 s: {:.6} / {:.6}", d.nodes[0].values()[40], d.nodes[1].values()[40]);

    let ring = build_topology(Topology::Regular { degree: 2 }, 6, RandomSource::new(1, 0))?.with_k_scale(k)?;
    let c_root = TimeSeries::from_fn(TimeGrid::new(0.0, 50.0, 400)?, Unit::Concentration, |t| if t < 2000.0 { 1.0 } else { 0.0 })?;
    let ifc = InterfaceParams {
        v_max_p: 1e-3,
        k_m_p: 0.5,
        v_max_f: 1e-3,
        k_m_f: 50.0,
        node_volume: 1.0,
    };
    let out = cmn_end_to_end(&c_root, &ring, 0, 3, &ifc)?;
    println!("flux delivered across the ring after 20000 s: {:.3e} mol/s", out.values().last().unwrap());
    print!("{}", ring.to_edge_list());
    Ok(())
}
