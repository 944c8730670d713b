//! Passive spread of a clamped voltage along a phloem cable.

use phytolink::electrical::{cable_steady_state, electrotonic_length, max_cable_dt, simulate_cable_transient, CableParams};
use phytolink::TimeGrid;

fn main() -> phytolink::Result<()> {
    let p = CableParams {
        r_i: 1e9,
        r_m: 1e7,
        c_m: 1e-6,
        length: 0.8,
        v_boundary: -0.05,
    };
    let lambda = electrotonic_length(&p);
    let n_cells = 160;
    let dx = p.length / n_cells as f64;
    let dt = 0.5 * max_cable_dt(&p, dx);
    let t_end = 10.0 * p.time_constant();
    let grid = TimeGrid::spanning(0.0, t_end, dt)?;
    let sol = simulate_cable_transient(&p, &vec![0.0; n_cells + 1], grid, n_cells)?;
    let exact = cable_steady_state(&p, &sol.x)?;
    println!("lambda = {lambda:.3} m, tau_m = {:.1} s, {} steps", p.time_constant(), sol.grid.n);
    for i in (0..=n_cells).step_by(20) {
        println!("  x = {:.2} m  V = {:+.5} V  steady state {:+.5} V", sol.x[i], sol.final_profile()[i], exact[i]);
    }
    Ok(())
}
