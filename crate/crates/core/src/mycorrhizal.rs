//! Common mycorrhizal network links.
//!
//! Junction nodes exchange signal through hyphal edges, `dC/dt = -K·L·C`
//! with `L` the weighted graph Laplacian. Plants couple in and out through
//! saturating interfaces in cascade with the network.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numerics::{RandomSource, Rk4, TimeGrid, TimeSeries, Unit};

/// Cytosolic small-solute diffusivity (m²/s).
pub const CYTOSOL_DIFFUSIVITY: f64 = 1e-10;
/// Pressure-driven cytoplasmic flow speed (m/s); "tens of micrometres per second".
pub const HYPHAL_FLOW_SPEED: f64 = 2e-5;
/// Edge length used for the shipped latency regimes (m).
pub const DEFAULT_EDGE_LENGTH: f64 = 0.01;

/// Conductance scale for purely diffusive transport over an edge.
pub fn diffusive_k(diffusivity: f64, edge_length: f64) -> f64 {
    diffusivity / (edge_length * edge_length)
}

/// Conductance scale when bulk flow carries the signal along an edge.
pub fn flow_assisted_k(speed: f64, edge_length: f64) -> f64 {
    speed / edge_length
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub conductance: f64,
}

/// Undirected weighted network of plant/fungus junctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MycoNetwork {
    n_nodes: usize,
    edges: Vec<Edge>,
    k_scale: f64,
    connected: bool,
}

impl MycoNetwork {
    pub fn new(n_nodes: usize, edges: Vec<Edge>, k_scale: f64) -> Result<Self> {
        ensure(n_nodes >= 1, "n_nodes", "must be positive")?;
        ensure(k_scale > 0.0 && k_scale.is_finite(), "k_scale", "must be positive")?;
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.i >= n_nodes || e.j >= n_nodes {
                return Err(Error::param("edges", format!("edge ({}, {}) references a missing node", e.i, e.j)));
            }
            if e.i == e.j {
                return Err(Error::param("edges", format!("self-loop at node {}", e.i)));
            }
            if !(e.conductance >= 0.0 && e.conductance.is_finite()) {
                return Err(Error::param("edges", format!("edge ({}, {}) has invalid conductance", e.i, e.j)));
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::param("edges", format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        let connected = is_connected(n_nodes, &edges);
        Ok(MycoNetwork {
            n_nodes,
            edges,
            k_scale,
            connected,
        })
    }

    /// Unit-conductance network from index pairs.
    pub fn from_pairs(n_nodes: usize, pairs: &[(usize, usize)], k_scale: f64) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|&(i, j)| Edge { i, j, conductance: 1.0 })
            .collect();
        MycoNetwork::new(n_nodes, edges, k_scale)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn k_scale(&self) -> f64 {
        self.k_scale
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn with_k_scale(mut self, k_scale: f64) -> Result<Self> {
        ensure(k_scale > 0.0 && k_scale.is_finite(), "k_scale", "must be positive")?;
        self.k_scale = k_scale;
        Ok(self)
    }

    /// Copy of the network with one more edge.
    pub fn with_edge(&self, edge: Edge) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push(edge);
        MycoNetwork::new(self.n_nodes, edges, self.k_scale)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges
            .iter()
            .any(|e| (e.i == i && e.j == j) || (e.i == j && e.j == i))
    }

    /// Unweighted node degrees.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_nodes];
        for e in &self.edges {
            d[e.i] += 1;
            d[e.j] += 1;
        }
        d
    }

    fn weighted_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_nodes];
        for e in &self.edges {
            d[e.i] += e.conductance;
            d[e.j] += e.conductance;
        }
        d
    }

    /// Dense Laplacian `Deg − Adj` (conductance weighted, without `K`).
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n_nodes, self.n_nodes);
        for e in &self.edges {
            l[(e.i, e.j)] -= e.conductance;
            l[(e.j, e.i)] -= e.conductance;
            l[(e.i, e.i)] += e.conductance;
            l[(e.j, e.j)] += e.conductance;
        }
        l
    }

    /// `out = −K · L · c`, computed edge by edge.
    fn diffusion_rhs(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in &self.edges {
            let f = self.k_scale * e.conductance * (c[e.j] - c[e.i]);
            out[e.i] += f;
            out[e.j] -= f;
        }
    }

    /// Edge-list text: a `# n_nodes=.. k_scale=..` header, then one
    /// `i j conductance` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n_nodes={} k_scale={}\n", self.n_nodes, self.k_scale);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.i, e.j, e.conductance);
        }
        out
    }

    /// Parses [`to_edge_list`](Self::to_edge_list) output. Without a header the
    /// node count is inferred from the largest index and `K` defaults to 1.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut n_nodes = None;
        let mut k_scale = 1.0;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for tok in header.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("n_nodes=") {
                        n_nodes = v.parse().ok();
                    } else if let Some(v) = tok.strip_prefix("k_scale=") {
                        k_scale = v
                            .parse()
                            .map_err(|_| Error::Domain(format!("line {}: bad k_scale", lineno + 1)))?;
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Domain(format!("line {}: expected `i j conductance`", lineno + 1));
            if fields.len() != 3 {
                return Err(bad());
            }
            edges.push(Edge {
                i: fields[0].parse().map_err(|_| bad())?,
                j: fields[1].parse().map_err(|_| bad())?,
                conductance: fields[2].parse().map_err(|_| bad())?,
            });
        }
        let n = n_nodes.unwrap_or_else(|| edges.iter().map(|e| e.i.max(e.j) + 1).max().unwrap_or(1));
        MycoNetwork::new(n, edges, k_scale)
    }
}

fn is_connected(n: usize, edges: &[Edge]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for e in edges.iter().filter(|e| e.conductance > 0.0) {
        adj[e.i].push(e.j);
        adj[e.j].push(e.i);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// Topology families for generated networks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// Ring lattice, each node linked to `degree/2` neighbours on each side.
    Regular { degree: usize },
    /// Independent edges with probability `p_edge`, redrawn until connected.
    Random { p_edge: f64 },
    /// Preferential attachment with `m_attach` edges per arriving node.
    ScaleFree { m_attach: usize },
}

const CONNECT_RETRIES: usize = 200;

/// Generates a unit-conductance network with `K = 1`.
pub fn build_topology(kind: Topology, n_nodes: usize, rng: RandomSource) -> Result<MycoNetwork> {
    ensure(n_nodes >= 2, "n_nodes", "at least two nodes are required")?;
    match kind {
        Topology::Regular { degree } => {
            ensure(degree >= 2 && degree % 2 == 0, "degree", "ring lattice degree must be even and at least 2")?;
            ensure(degree < n_nodes, "degree", "must be smaller than the node count")?;
            let mut pairs = Vec::new();
            for i in 0..n_nodes {
                for off in 1..=degree / 2 {
                    let j = (i + off) % n_nodes;
                    // n = degree + 1 would revisit pairs from the other side
                    if !pairs.contains(&(j, i)) {
                        pairs.push((i, j));
                    }
                }
            }
            MycoNetwork::from_pairs(n_nodes, &pairs, 1.0)
        }
        Topology::Random { p_edge } => {
            ensure(p_edge > 0.0 && p_edge <= 1.0, "p_edge", "must lie in (0, 1]")?;
            let mut r = rng.rng();
            for _ in 0..CONNECT_RETRIES {
                let mut pairs = Vec::new();
                for i in 0..n_nodes {
                    for j in i + 1..n_nodes {
                        if p_edge >= 1.0 || r.random::<f64>() < p_edge {
                            pairs.push((i, j));
                        }
                    }
                }
                let net = MycoNetwork::from_pairs(n_nodes, &pairs, 1.0)?;
                if net.is_connected() {
                    return Ok(net);
                }
            }
            Err(Error::Domain(format!(
                "no connected random graph after {CONNECT_RETRIES} draws (n = {n_nodes}, p = {p_edge})"
            )))
        }
        Topology::ScaleFree { m_attach } => {
            ensure(m_attach >= 1 && m_attach < n_nodes, "m_attach", "must satisfy 1 <= m < n_nodes")?;
            let mut r = rng.rng();
            let seed = m_attach + 1;
            let mut pairs = Vec::new();
            // each endpoint appears once per incident edge
            let mut endpoints: Vec<usize> = Vec::new();
            for i in 0..seed.min(n_nodes) {
                for j in i + 1..seed.min(n_nodes) {
                    pairs.push((i, j));
                    endpoints.push(i);
                    endpoints.push(j);
                }
            }
            for new in seed..n_nodes {
                let mut targets: Vec<usize> = Vec::with_capacity(m_attach);
                while targets.len() < m_attach {
                    let &t = endpoints.choose(&mut r).expect("seed clique has edges");
                    if !targets.contains(&t) {
                        targets.push(t);
                    }
                }
                for t in targets {
                    pairs.push((t, new));
                    endpoints.push(t);
                    endpoints.push(new);
                }
            }
            MycoNetwork::from_pairs(n_nodes, &pairs, 1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDiffusion {
    /// One concentration trace per node.
    pub nodes: Vec<TimeSeries>,
    /// Set for disconnected graphs, which only equilibrate per component.
    pub disconnected: bool,
}

/// Substep count keeping `h · K · λ_max` at most 0.05 (Gershgorin bound).
fn substeps(net: &MycoNetwork, dt: f64) -> usize {
    let lmax = 2.0 * net.weighted_degrees().into_iter().fold(0.0, f64::max);
    let rate = net.k_scale * lmax;
    if rate == 0.0 {
        1
    } else {
        ((dt * rate / 0.05).ceil() as usize).max(1)
    }
}

/// Integrates `dC/dt = −K·L·C + e_src·J(t)/V_node` on `grid`. The optional
/// source value is held over each grid interval.
fn integrate_network(
    net: &MycoNetwork,
    c0: &[f64],
    grid: TimeGrid,
    source: Option<(usize, &[f64])>,
) -> Result<Vec<Vec<f64>>> {
    let n = net.n_nodes;
    let subs = substeps(net, grid.dt);
    let h = grid.dt / subs as f64;
    let mut c = c0.to_vec();
    let mut traces: Vec<Vec<f64>> = (0..n).map(|_| Vec::with_capacity(grid.n)).collect();
    let mut stepper = Rk4::new(n);
    for k in 0..grid.n {
        for (tr, &ci) in traces.iter_mut().zip(&c) {
            tr.push(ci);
        }
        if k + 1 == grid.n {
            break;
        }
        let inject = source.map(|(node, s)| (node, s[k]));
        let mut rhs = |_t: f64, x: &[f64], dx: &mut [f64]| {
            net.diffusion_rhs(x, dx);
            if let Some((node, j)) = inject {
                dx[node] += j;
            }
        };
        for s in 0..subs {
            stepper.step(&mut rhs, grid.time(k) + s as f64 * h, &mut c, h)?;
        }
    }
    Ok(traces)
}

/// Source-free Laplacian diffusion from the initial node concentrations.
pub fn simulate_network_diffusion(
    net: &MycoNetwork,
    c0: &[f64],
    grid: TimeGrid,
) -> Result<NetworkDiffusion> {
    if c0.len() != net.n_nodes {
        return Err(Error::LengthMismatch(net.n_nodes, c0.len()));
    }
    ensure(c0.iter().all(|&v| v >= 0.0 && v.is_finite()), "c0", "must be non-negative")?;
    let traces = integrate_network(net, c0, grid, None)?;
    let nodes = traces
        .into_iter()
        .map(|v| TimeSeries::new(grid.t0, grid.dt, v, Unit::Concentration))
        .collect::<Result<_>>()?;
    Ok(NetworkDiffusion {
        nodes,
        disconnected: !net.connected,
    })
}

/// All Laplacian eigenvalues in ascending order.
pub fn laplacian_spectrum(net: &MycoNetwork) -> Vec<f64> {
    let eig = SymmetricEigen::new(net.laplacian());
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiedlerLatency {
    /// Second-smallest Laplacian eigenvalue.
    pub lambda_2: f64,
    /// Dominant mixing time `1/(K·λ₂)` (s).
    pub t_mix: f64,
}

pub fn fiedler_latency(net: &MycoNetwork) -> Result<FiedlerLatency> {
    if net.n_nodes < 2 || !net.connected {
        return Err(Error::Disconnected);
    }
    let lambda_2 = laplacian_spectrum(net)[1];
    Ok(FiedlerLatency {
        lambda_2,
        t_mix: 1.0 / (net.k_scale * lambda_2),
    })
}

/// Saturating plant ↔ fungus interfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceParams {
    /// Plant → fungus saturation (mol/s) and half-saturation (mol/m³).
    pub v_max_p: f64,
    pub k_m_p: f64,
    /// Fungus → plant saturation (mol/s) and half-saturation (mol/m³).
    pub v_max_f: f64,
    pub k_m_f: f64,
    /// Volume that converts injected amount into node concentration (m³).
    #[serde(default = "unit_volume")]
    pub node_volume: f64,
}

fn unit_volume() -> f64 {
    1.0
}

impl InterfaceParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.v_max_p > 0.0, "v_max_p", "must be positive")?;
        ensure(self.k_m_p > 0.0, "k_m_p", "must be positive")?;
        ensure(self.v_max_f > 0.0, "v_max_f", "must be positive")?;
        ensure(self.k_m_f > 0.0, "k_m_f", "must be positive")?;
        ensure(self.node_volume > 0.0, "node_volume", "must be positive")
    }
}

/// `J_pf = V_max,p · c / (K_M,p + c)`.
pub fn plant_to_fungus_flux(c_root: f64, p: &InterfaceParams) -> f64 {
    p.v_max_p * (c_root / (p.k_m_p + c_root))
}

/// `J_fp = V_max,f · c / (K_M,f + c)`.
pub fn fungus_to_plant_flux(c_fungus: f64, p: &InterfaceParams) -> f64 {
    p.v_max_f * (c_fungus / (p.k_m_f + c_fungus))
}

/// Root concentration at `tx_node` → network → flux delivered at `rx_node`.
///
/// The receiving interface reads the node concentration without depleting it.
pub fn cmn_end_to_end(
    c_root_tx: &TimeSeries,
    net: &MycoNetwork,
    tx_node: usize,
    rx_node: usize,
    ifc: &InterfaceParams,
) -> Result<TimeSeries> {
    ifc.validate()?;
    ensure(tx_node < net.n_nodes && rx_node < net.n_nodes, "tx_node", "node index out of range")?;
    ensure(tx_node != rx_node, "rx_node", "must differ from tx_node")?;
    if let Some(k) = c_root_tx.values().iter().position(|&v| v < 0.0) {
        return Err(Error::param("c_root_tx", format!("negative concentration at t = {}", c_root_tx.time(k))));
    }
    let injected: Vec<f64> = c_root_tx
        .values()
        .iter()
        .map(|&c| plant_to_fungus_flux(c, ifc) / ifc.node_volume)
        .collect();
    let c0 = vec![0.0; net.n_nodes];
    let traces = integrate_network(net, &c0, c_root_tx.grid(), Some((tx_node, &injected)))?;
    let out = traces[rx_node]
        .iter()
        .map(|&c| fungus_to_plant_flux(c.max(0.0), ifc))
        .collect();
    TimeSeries::new(c_root_tx.t0(), c_root_tx.dt(), out, Unit::Flux)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ifc() -> InterfaceParams {
        InterfaceParams {
            v_max_p: 2.0,
            k_m_p: 0.5,
            v_max_f: 1.5,
            k_m_f: 0.25,
            node_volume: 1.0,
        }
    }

    #[test]
    fn interface_examples() {
        let p = ifc();
        assert_eq!(plant_to_fungus_flux(p.k_m_p, &p), p.v_max_p / 2.0);
        assert_eq!(plant_to_fungus_flux(0.0, &p), 0.0);
        assert!(plant_to_fungus_flux(1e12, &p) < p.v_max_p);
        assert_eq!(fungus_to_plant_flux(p.k_m_f, &p), p.v_max_f / 2.0);
        assert_eq!(fungus_to_plant_flux(0.0, &p), 0.0);
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        assert!(xs.windows(2).all(|w| fungus_to_plant_flux(w[1], &p) > fungus_to_plant_flux(w[0], &p)));
    }

    #[test]
    fn network_validation() {
        assert!(MycoNetwork::from_pairs(3, &[(0, 0)], 1.0).is_err());
        assert!(MycoNetwork::from_pairs(3, &[(0, 1), (1, 0)], 1.0).is_err());
        assert!(MycoNetwork::from_pairs(3, &[(0, 3)], 1.0).is_err());
        let net = MycoNetwork::from_pairs(3, &[(0, 1)], 1.0).unwrap();
        assert!(!net.is_connected());
        assert_eq!(fiedler_latency(&net), Err(Error::Disconnected));
    }

    #[test]
    fn laplacian_is_symmetric_with_zero_rows() {
        let net = build_topology(Topology::Random { p_edge: 0.4 }, 12, RandomSource::new(3, 0)).unwrap();
        let l = net.laplacian();
        for i in 0..12 {
            assert!(l.row(i).sum().abs() < 1e-12);
            for j in 0..12 {
                assert_eq!(l[(i, j)], l[(j, i)]);
            }
        }
        assert!(laplacian_spectrum(&net)[0].abs() < 1e-10);
    }

    #[test]
    fn topology_examples() {
        let ring = build_topology(Topology::Regular { degree: 2 }, 5, RandomSource::new(0, 0)).unwrap();
        assert_eq!(ring.edges().len(), 5);
        assert!(ring.degrees().iter().all(|&d| d == 2));

        let k4 = build_topology(Topology::Random { p_edge: 1.0 }, 4, RandomSource::new(0, 0)).unwrap();
        assert_eq!(k4.edges().len(), 6);

        let tree = build_topology(Topology::ScaleFree { m_attach: 1 }, 3, RandomSource::new(9, 0)).unwrap();
        assert_eq!(tree.edges().len(), 2);
        assert!(tree.is_connected());

        assert!(build_topology(Topology::Regular { degree: 3 }, 6, RandomSource::new(0, 0)).is_err());
        assert!(build_topology(Topology::Random { p_edge: 0.0 }, 6, RandomSource::new(0, 0)).is_err());
        assert!(build_topology(Topology::ScaleFree { m_attach: 6 }, 6, RandomSource::new(0, 0)).is_err());
        assert!(build_topology(Topology::Regular { degree: 2 }, 1, RandomSource::new(0, 0)).is_err());
    }

    #[test]
    fn dense_ring_has_no_duplicates() {
        let net = build_topology(Topology::Regular { degree: 4 }, 5, RandomSource::new(0, 0)).unwrap();
        assert_eq!(net.edges().len(), 10);
    }

    #[test]
    fn scale_free_is_right_skewed() {
        for seed in 0..5 {
            let net = build_topology(Topology::ScaleFree { m_attach: 2 }, 80, RandomSource::new(seed, 0)).unwrap();
            let mut d = net.degrees();
            d.sort_unstable();
            let median = d[d.len() / 2];
            assert!(*d.last().unwrap() >= 2 * median, "seed {seed}: {d:?}");
        }
    }

    #[test]
    fn two_node_closed_form() {
        let net = MycoNetwork::from_pairs(2, &[(0, 1)], 1.0).unwrap();
        let grid = TimeGrid::new(0.0, 0.01, 301).unwrap();
        let out = simulate_network_diffusion(&net, &[1.0, 0.0], grid).unwrap();
        for (k, t) in grid.times().enumerate() {
            let e = (-2.0 * t).exp();
            assert!((out.nodes[0].values()[k] - 0.5 * (1.0 + e)).abs() < 1e-6);
            assert!((out.nodes[1].values()[k] - 0.5 * (1.0 - e)).abs() < 1e-6);
        }
    }

    #[test]
    fn uniform_state_is_stationary() {
        let net = build_topology(Topology::ScaleFree { m_attach: 2 }, 10, RandomSource::new(1, 0)).unwrap();
        let out = simulate_network_diffusion(&net, &[0.7; 10], TimeGrid::new(0.0, 0.1, 50).unwrap()).unwrap();
        for node in &out.nodes {
            assert!(node.values().iter().all(|&v| (v - 0.7).abs() < 1e-14));
        }
    }

    #[test]
    fn fiedler_small_graphs() {
        let two = MycoNetwork::from_pairs(2, &[(0, 1)], 1.0).unwrap();
        assert!((fiedler_latency(&two).unwrap().lambda_2 - 2.0).abs() < 1e-12);
        let k3 = MycoNetwork::from_pairs(3, &[(0, 1), (1, 2), (0, 2)], 0.5).unwrap();
        let f = fiedler_latency(&k3).unwrap();
        assert!((f.lambda_2 - 3.0).abs() < 1e-12);
        assert!((f.t_mix - 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn edge_list_round_trip() {
        let net = build_topology(Topology::Random { p_edge: 0.5 }, 7, RandomSource::new(4, 0))
            .unwrap()
            .with_k_scale(2.5)
            .unwrap();
        let text = net.to_edge_list();
        assert_eq!(text.lines().count(), net.edges().len() + 1);
        assert_eq!(MycoNetwork::from_edge_list(&text).unwrap(), net);
        let bare = MycoNetwork::from_edge_list("0 1 1.0\n1 2 0.5\n").unwrap();
        assert_eq!(bare.n_nodes(), 3);
        assert!(MycoNetwork::from_edge_list("0 1\n").is_err());
    }

    #[test]
    fn end_to_end_basics() {
        let net = MycoNetwork::from_pairs(3, &[(0, 1), (1, 2)], 1.0).unwrap();
        let grid = TimeGrid::new(0.0, 0.05, 400).unwrap();
        let zero = cmn_end_to_end(&TimeSeries::zeros(grid, Unit::Concentration), &net, 0, 2, &ifc()).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let strong = TimeSeries::constant(grid, 1e3, Unit::Concentration).unwrap();
        let out = cmn_end_to_end(&strong, &net, 0, 2, &ifc()).unwrap();
        assert!(out.values().iter().all(|&v| v <= ifc().v_max_f));
        assert!(cmn_end_to_end(&strong, &net, 1, 1, &ifc()).is_err());
    }

    #[test]
    fn latency_regimes() {
        let diff = diffusive_k(CYTOSOL_DIFFUSIVITY, DEFAULT_EDGE_LENGTH);
        let flow = flow_assisted_k(HYPHAL_FLOW_SPEED, DEFAULT_EDGE_LENGTH);
        assert!((diff - 1e-6).abs() < 1e-20);
        assert!(flow > 100.0 * diff);
    }
}
