//! Scenario files: TOML with one table per pipeline stage.
//!
//! ```toml
//! name = "air-csk-demo"
//! modality = "air"
//! seed = 7
//!
//! [transmitter]
//! levels = [0.0, 1e-6]
//!
//! [channel]
//! diffusivity = 0.05
//! wind = [0.5, 0.0, 0.0]
//!
//! [link]
//! symbol_period = 20.0
//! ```
//!
//! Every key is checked against the modality's schema before any value is
//! interpreted; misspelt keys are reported with the closest valid name.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::acoustic::{AcousticMedium, MSChannelParams, VesselParams};
use crate::channel_air::AirChannelParams;
use crate::channel_soil::SoilParams;
use crate::electrical::{APParams, Environment, SoilProfile};
use crate::error::Result;
use crate::mycorrhizal::{InterfaceParams, Topology};
use crate::receiver::{UptakeLaw, UptakeParams};
use crate::transmitter::{validate_ratio_table, SymbolFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Air,
    Soil,
    Myco,
    Electrical,
    Acoustic,
}

impl Modality {
    pub const ALL: [Modality; 5] = [
        Modality::Air,
        Modality::Soil,
        Modality::Myco,
        Modality::Electrical,
        Modality::Acoustic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Modality::Air => "air",
            Modality::Soil => "soil",
            Modality::Myco => "myco",
            Modality::Electrical => "electrical",
            Modality::Acoustic => "acoustic",
        }
    }

    fn is_chemical(self) -> bool {
        matches!(self, Modality::Air | Modality::Soil | Modality::Myco)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    Csk,
    Rsk,
    Events,
}

// ---- transmitter blocks -------------------------------------------------

/// Airborne or soilborne chemical emitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChemicalTx {
    /// CSK emission flux per symbol (mol/s), strictly increasing.
    pub levels: Vec<f64>,
    /// RSK species fractions, one row per symbol.
    pub ratio_table: Option<Vec<Vec<f64>>>,
    /// RSK total flux (mol/s).
    pub total_flux: f64,
    /// Exponential release time constant (s); rectangular pulses when unset.
    pub pulse_tau: Option<f64>,
}

impl Default for ChemicalTx {
    fn default() -> Self {
        ChemicalTx {
            levels: vec![0.0, 1e-6],
            ratio_table: None,
            total_flux: 1e-6,
            pulse_tau: None,
        }
    }
}

/// Root exudation into a mycorrhizal network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MycoTx {
    /// Root concentration per symbol (mol/m³), strictly increasing.
    pub levels: Vec<f64>,
    pub v_max_p: f64,
    pub k_m_p: f64,
}

impl Default for MycoTx {
    fn default() -> Self {
        MycoTx {
            levels: vec![0.0, 1.0],
            v_max_p: 1e-3,
            k_m_p: 0.5,
        }
    }
}

/// Action-potential transmitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectricalTx {
    pub threshold: f64,
    pub amplitude: f64,
    pub duration: f64,
    pub refractory: f64,
    pub speed: f64,
    pub decay_tau: f64,
    pub jitter: f64,
    /// Stimulus level applied for each requested spike.
    pub stimulus: f64,
    /// Interval between spikes within one symbol (s); 1.1 × refractory when unset.
    pub spike_spacing: Option<f64>,
}

impl Default for ElectricalTx {
    fn default() -> Self {
        let ap = APParams::default();
        ElectricalTx {
            threshold: ap.threshold,
            amplitude: ap.amplitude,
            duration: ap.duration,
            refractory: ap.refractory,
            speed: ap.speed,
            decay_tau: ap.decay_tau,
            jitter: ap.jitter,
            stimulus: 2.0 * ap.threshold,
            spike_spacing: None,
        }
    }
}

impl ElectricalTx {
    pub fn ap_params(&self) -> APParams {
        APParams {
            threshold: self.threshold,
            amplitude: self.amplitude,
            duration: self.duration,
            refractory: self.refractory,
            speed: self.speed,
            decay_tau: self.decay_tau,
            jitter: self.jitter,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spike_spacing.unwrap_or(1.1 * self.refractory)
    }
}

/// Cavitation click emitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcousticTx {
    pub v_l: f64,
    pub l_vessel: f64,
    pub r_vessel: f64,
    pub rho_l: f64,
    pub eta_l: f64,
    /// Click pressure amplitude at the reference distance (Pa).
    pub amplitude: f64,
    /// Interval between clicks within one symbol (s); 10 τ_s when unset.
    pub click_spacing: Option<f64>,
}

impl Default for AcousticTx {
    fn default() -> Self {
        let v = VesselParams::default();
        AcousticTx {
            v_l: v.v_l,
            l_vessel: v.l_vessel,
            r_vessel: v.r_vessel,
            rho_l: v.rho_l,
            eta_l: v.eta_l,
            amplitude: 1.0,
            click_spacing: None,
        }
    }
}

impl AcousticTx {
    pub fn vessel(&self) -> VesselParams {
        VesselParams {
            v_l: self.v_l,
            l_vessel: self.l_vessel,
            r_vessel: self.r_vessel,
            rho_l: self.rho_l,
            eta_l: self.eta_l,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.click_spacing
            .unwrap_or_else(|| 10.0 * crate::acoustic::damping_time(&self.vessel()))
    }
}

// ---- channel blocks -----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirChannel {
    pub diffusivity: f64,
    pub wind: [f64; 3],
    pub loss_rate: f64,
    /// Receiver distance along the x axis (m).
    pub distance: f64,
}

impl Default for AirChannel {
    fn default() -> Self {
        AirChannel {
            diffusivity: 0.05,
            wind: [0.5, 0.0, 0.0],
            loss_rate: 0.0,
            distance: 1.0,
        }
    }
}

impl AirChannel {
    pub fn params(&self) -> AirChannelParams {
        AirChannelParams {
            mass: 1.0,
            diffusivity: self.diffusivity,
            wind: self.wind,
            loss_rate: self.loss_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SoilSolver {
    /// Retarded free-space Green's function.
    Analytic,
    /// One-dimensional explicit finite differences.
    Fd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoilChannel {
    pub theta_a: f64,
    pub theta_w: f64,
    pub d_eff: f64,
    pub velocity: f64,
    pub k_d: f64,
    pub k_h: f64,
    pub retardation: f64,
    pub distance: f64,
    pub solver: SoilSolver,
    /// Finite-difference cells over `domain_length`.
    pub n_cells: usize,
    /// Finite-difference domain (m); twice the distance when unset.
    pub domain_length: Option<f64>,
}

impl Default for SoilChannel {
    fn default() -> Self {
        let p = SoilParams::default();
        SoilChannel {
            theta_a: p.theta_a,
            theta_w: p.theta_w,
            d_eff: 1e-6,
            velocity: p.velocity,
            k_d: p.k_d,
            k_h: p.k_h,
            retardation: p.retardation,
            distance: 0.02,
            solver: SoilSolver::Analytic,
            n_cells: 80,
            domain_length: None,
        }
    }
}

impl SoilChannel {
    pub fn params(&self) -> SoilParams {
        SoilParams {
            theta_a: self.theta_a,
            theta_w: self.theta_w,
            d_eff: self.d_eff,
            velocity: self.velocity,
            k_d: self.k_d,
            k_h: self.k_h,
            retardation: self.retardation,
        }
    }

    pub fn domain(&self) -> f64 {
        self.domain_length.unwrap_or(2.0 * self.distance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Regular,
    Random,
    ScaleFree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MycoChannel {
    pub topology: TopologyKind,
    pub n_nodes: usize,
    pub degree: usize,
    pub p_edge: f64,
    pub m_attach: usize,
    /// Hyphal conductance scale `K` (1/s).
    pub k_scale: f64,
    pub tx_node: usize,
    /// Receiving node; the last node when unset.
    pub rx_node: Option<usize>,
    pub node_volume: f64,
    /// Edge-list file (`i j conductance` lines); overrides the generator.
    pub edge_list: Option<PathBuf>,
}

impl Default for MycoChannel {
    fn default() -> Self {
        MycoChannel {
            topology: TopologyKind::Regular,
            n_nodes: 8,
            degree: 2,
            p_edge: 0.3,
            m_attach: 2,
            k_scale: crate::mycorrhizal::flow_assisted_k(
                crate::mycorrhizal::HYPHAL_FLOW_SPEED,
                crate::mycorrhizal::DEFAULT_EDGE_LENGTH,
            ),
            tx_node: 0,
            rx_node: None,
            node_volume: 1.0,
            edge_list: None,
        }
    }
}

impl MycoChannel {
    pub fn topology(&self) -> Topology {
        match self.topology {
            TopologyKind::Regular => Topology::Regular { degree: self.degree },
            TopologyKind::Random => Topology::Random { p_edge: self.p_edge },
            TopologyKind::ScaleFree => Topology::ScaleFree {
                m_attach: self.m_attach,
            },
        }
    }

    pub fn rx(&self) -> usize {
        self.rx_node.unwrap_or(self.n_nodes.saturating_sub(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectricalChannel {
    pub distance: f64,
    pub gain_multiplier: f64,
    pub speed_multiplier: f64,
    /// Inter-plant soil conduction scale (m); no soil hop when unset.
    pub soil_length_scale: Option<f64>,
    pub soil_profile: SoilProfile,
}

impl Default for ElectricalChannel {
    fn default() -> Self {
        ElectricalChannel {
            distance: 0.1,
            gain_multiplier: 1.0,
            speed_multiplier: 1.0,
            soil_length_scale: None,
            soil_profile: SoilProfile::Exponential,
        }
    }
}

impl ElectricalChannel {
    pub fn environment(&self) -> Environment {
        Environment {
            gain: self.gain_multiplier,
            speed: self.speed_multiplier,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcousticChannel {
    pub c_air: f64,
    pub alpha_db_per_m: f64,
    pub r_ref: f64,
    pub distance: f64,
}

impl Default for AcousticChannel {
    fn default() -> Self {
        let m = AcousticMedium::default();
        AcousticChannel {
            c_air: m.c_air,
            alpha_db_per_m: m.alpha_db_per_m,
            r_ref: m.r_ref,
            distance: 0.1,
        }
    }
}

impl AcousticChannel {
    pub fn medium(&self) -> AcousticMedium {
        AcousticMedium {
            c_air: self.c_air,
            alpha_db_per_m: self.alpha_db_per_m,
            r_ref: self.r_ref,
        }
    }
}

// ---- receiver blocks ----------------------------------------------------

/// Optional uptake stage for chemical links; omitted when the table is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UptakeRx {
    pub law: UptakeLaw,
    pub k_a_recv: f64,
    pub c_int: f64,
    pub l_char: f64,
    pub d_medium: f64,
    pub area: f64,
    pub j_max: f64,
    pub k_m: f64,
    /// Internal volume receiving the absorbed amount (m³).
    pub volume: f64,
}

impl Default for UptakeRx {
    fn default() -> Self {
        let p = UptakeParams::default();
        UptakeRx {
            law: UptakeLaw::Robin,
            k_a_recv: p.k_a_recv,
            c_int: p.c_int,
            l_char: p.l_char,
            d_medium: p.d_medium,
            area: p.area,
            j_max: p.j_max,
            k_m: p.k_m,
            volume: 1e-6,
        }
    }
}

impl UptakeRx {
    pub fn params(&self) -> UptakeParams {
        UptakeParams {
            k_a_recv: self.k_a_recv,
            c_int: self.c_int,
            l_char: self.l_char,
            d_medium: self.d_medium,
            area: self.area,
            j_max: self.j_max,
            k_m: self.k_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MycoRx {
    pub v_max_f: f64,
    pub k_m_f: f64,
}

impl Default for MycoRx {
    fn default() -> Self {
        MycoRx {
            v_max_f: 1e-3,
            k_m_f: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectricalRx {
    /// Detection level as a fraction of the expected received amplitude.
    pub detect_fraction: f64,
}

impl Default for ElectricalRx {
    fn default() -> Self {
        ElectricalRx { detect_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcousticRx {
    /// Click detection level (Pa); half the expected received peak when unset.
    pub threshold: Option<f64>,
    /// Re-trigger suppression (s); three damping times when unset.
    pub dead_time: Option<f64>,
    pub dg_over_kt: f64,
    pub coupling: f64,
}

impl Default for AcousticRx {
    fn default() -> Self {
        AcousticRx {
            threshold: None,
            dead_time: None,
            dg_over_kt: 5.0,
            coupling: 1.0,
        }
    }
}

impl AcousticRx {
    pub fn ms_params(&self) -> MSChannelParams {
        MSChannelParams {
            dg_over_kt: self.dg_over_kt,
            coupling: self.coupling,
        }
    }
}

// ---- link block ---------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    /// Defaults to CSK for chemical links and event counting otherwise.
    pub modulation: Option<Modulation>,
    /// Explicit symbol sequence; drawn from the seed when unset.
    pub symbols: Option<Vec<usize>>,
    pub n_symbols: usize,
    pub alphabet_size: usize,
    pub symbol_period: f64,
    /// Sampling step; symbol_period / 40 when unset.
    pub dt: Option<f64>,
    /// Monte Carlo trials; 200 when noise is configured, otherwise a single
    /// deterministic run.
    pub trials: Option<usize>,
    /// Multiplicative turbulence noise level on the received signal.
    pub sigma_rel: f64,
    /// Turbulence correlation time (s).
    pub tau_corr: f64,
    /// Additive white-noise SNR for acoustic links (dB); noiseless when unset.
    pub snr_db: Option<f64>,
    /// CSK decision thresholds; calibrated from isolated symbols when unset.
    pub thresholds: Option<Vec<f64>>,
    pub window_offset: f64,
    pub window_width: Option<f64>,
    pub baseline: f64,
    /// Events per symbol; `0, 1, ..` when unset.
    pub counts: Option<Vec<usize>>,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            modulation: None,
            symbols: None,
            n_symbols: 16,
            alphabet_size: 2,
            symbol_period: 60.0,
            dt: None,
            trials: None,
            sigma_rel: 0.0,
            tau_corr: 5.0,
            snr_db: None,
            thresholds: None,
            window_offset: 0.0,
            window_width: None,
            baseline: 0.0,
            counts: None,
        }
    }
}

pub const DEFAULT_NOISY_TRIALS: usize = 200;

impl LinkConfig {
    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(self.symbol_period / 40.0)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.counts
            .clone()
            .unwrap_or_else(|| (0..self.alphabet_size).collect())
    }

    pub fn is_noisy(&self, modality: Modality, tx: &TransmitterConfig) -> bool {
        match modality {
            Modality::Acoustic => self.snr_db.is_some(),
            Modality::Electrical => matches!(tx, TransmitterConfig::Electrical(t) if t.jitter > 0.0),
            _ => self.sigma_rel > 0.0,
        }
    }
}

// ---- whole scenario -----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransmitterConfig {
    Chemical(ChemicalTx),
    Myco(MycoTx),
    Electrical(ElectricalTx),
    Acoustic(AcousticTx),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelConfig {
    Air(AirChannel),
    Soil(SoilChannel),
    Myco(MycoChannel),
    Electrical(ElectricalChannel),
    Acoustic(AcousticChannel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReceiverConfig {
    Uptake(Option<UptakeRx>),
    Myco(MycoRx),
    Electrical(ElectricalRx),
    Acoustic(AcousticRx),
}

/// Fully validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub modality: Modality,
    pub seed: u64,
    /// Output directory; `out/<name>` when unset.
    pub output: Option<PathBuf>,
    pub transmitter: TransmitterConfig,
    pub channel: ChannelConfig,
    pub receiver: ReceiverConfig,
    pub link: LinkConfig,
    /// Directory of the scenario file, for relative paths inside it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// One problem found while loading a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every problem found in a scenario file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

impl ConfigErrors {
    pub fn messages(&self) -> Vec<String> {
        self.0.iter().map(|i| i.to_string()).collect()
    }
}

const TOP_KEYS: &[&str] = &["name", "modality", "seed", "output", "transmitter", "channel", "receiver", "link"];

const CHEMICAL_TX_KEYS: &[&str] = &["levels", "ratio_table", "total_flux", "pulse_tau"];
const MYCO_TX_KEYS: &[&str] = &["levels", "v_max_p", "k_m_p"];
const ELECTRICAL_TX_KEYS: &[&str] = &[
    "threshold",
    "amplitude",
    "duration",
    "refractory",
    "speed",
    "decay_tau",
    "jitter",
    "stimulus",
    "spike_spacing",
];
const ACOUSTIC_TX_KEYS: &[&str] = &["v_l", "l_vessel", "r_vessel", "rho_l", "eta_l", "amplitude", "click_spacing"];

const AIR_CHANNEL_KEYS: &[&str] = &["diffusivity", "wind", "loss_rate", "distance"];
const SOIL_CHANNEL_KEYS: &[&str] = &[
    "theta_a",
    "theta_w",
    "d_eff",
    "velocity",
    "k_d",
    "k_h",
    "retardation",
    "distance",
    "solver",
    "n_cells",
    "domain_length",
];
const MYCO_CHANNEL_KEYS: &[&str] = &[
    "topology",
    "n_nodes",
    "degree",
    "p_edge",
    "m_attach",
    "k_scale",
    "tx_node",
    "rx_node",
    "node_volume",
    "edge_list",
];
const ELECTRICAL_CHANNEL_KEYS: &[&str] = &[
    "distance",
    "gain_multiplier",
    "speed_multiplier",
    "soil_length_scale",
    "soil_profile",
];
const ACOUSTIC_CHANNEL_KEYS: &[&str] = &["c_air", "alpha_db_per_m", "r_ref", "distance"];

const UPTAKE_RX_KEYS: &[&str] = &["law", "k_a_recv", "c_int", "l_char", "d_medium", "area", "j_max", "k_m", "volume"];
const MYCO_RX_KEYS: &[&str] = &["v_max_f", "k_m_f"];
const ELECTRICAL_RX_KEYS: &[&str] = &["detect_fraction"];
const ACOUSTIC_RX_KEYS: &[&str] = &["threshold", "dead_time", "dg_over_kt", "coupling"];

const LINK_COMMON_KEYS: &[&str] = &["modulation", "symbols", "n_symbols", "alphabet_size", "symbol_period", "dt", "trials"];
const LINK_CHEMICAL_KEYS: &[&str] = &["sigma_rel", "tau_corr", "thresholds", "window_offset", "window_width", "baseline"];
const LINK_EVENT_KEYS: &[&str] = &["counts"];
const LINK_ACOUSTIC_KEYS: &[&str] = &["snr_db"];

fn section_keys(modality: Modality, section: &str) -> Vec<&'static str> {
    use Modality::*;
    let mut keys: Vec<&'static str> = match (section, modality) {
        ("transmitter", Air | Soil) => CHEMICAL_TX_KEYS.to_vec(),
        ("transmitter", Myco) => MYCO_TX_KEYS.to_vec(),
        ("transmitter", Electrical) => ELECTRICAL_TX_KEYS.to_vec(),
        ("transmitter", Acoustic) => ACOUSTIC_TX_KEYS.to_vec(),
        ("channel", Air) => AIR_CHANNEL_KEYS.to_vec(),
        ("channel", Soil) => SOIL_CHANNEL_KEYS.to_vec(),
        ("channel", Myco) => MYCO_CHANNEL_KEYS.to_vec(),
        ("channel", Electrical) => ELECTRICAL_CHANNEL_KEYS.to_vec(),
        ("channel", Acoustic) => ACOUSTIC_CHANNEL_KEYS.to_vec(),
        ("receiver", Air | Soil) => UPTAKE_RX_KEYS.to_vec(),
        ("receiver", Myco) => MYCO_RX_KEYS.to_vec(),
        ("receiver", Electrical) => ELECTRICAL_RX_KEYS.to_vec(),
        ("receiver", Acoustic) => ACOUSTIC_RX_KEYS.to_vec(),
        ("link", _) => LINK_COMMON_KEYS.to_vec(),
        _ => Vec::new(),
    };
    if section == "link" {
        if modality.is_chemical() {
            keys.extend_from_slice(LINK_CHEMICAL_KEYS);
        } else {
            keys.extend_from_slice(LINK_EVENT_KEYS);
        }
        if modality == Acoustic {
            keys.extend_from_slice(LINK_ACOUSTIC_KEYS);
        }
    }
    keys
}

fn suggestion(key: &str, valid: &[&'static str]) -> Option<&'static str> {
    valid
        .iter()
        .map(|v| (strsim::jaro_winkler(key, v), *v))
        .filter(|(score, _)| *score >= 0.8)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, v)| v)
}

/// First line defining `key` inside `[section]` (or at top level).
fn locate(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = Some(header.trim().to_string());
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        let lhs = line.split('=').next().unwrap_or("").trim().trim_matches('"');
        if line.contains('=') && lhs == key {
            return Some(i + 1);
        }
    }
    None
}

/// Line number from a toml error message of the form "... line N, column M".
fn line_from_toml(err: &toml::de::Error, text: &str) -> Option<usize> {
    let span = err.span()?;
    Some(text[..span.start.min(text.len())].matches('\n').count() + 1)
}

struct Loader<'a> {
    text: &'a str,
    issues: Vec<ConfigIssue>,
}

impl Loader<'_> {
    fn push(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            line,
            message: message.into(),
        });
    }

    fn check_keys(&mut self, table: &toml::Table, section: Option<&str>, valid: &[&'static str], context: &str) {
        for key in table.keys() {
            if valid.contains(&key.as_str()) {
                continue;
            }
            let line = locate(self.text, section, key);
            let hint = match suggestion(key, valid) {
                Some(s) => format!("; did you mean `{s}`?"),
                None => String::new(),
            };
            let scope = section.map_or(String::new(), |s| format!("[{s}] "));
            self.push(line, format!("unknown key {scope}`{key}` for {context}{hint}"));
        }
    }

    fn section<T: DeserializeOwned + Default>(&mut self, table: &toml::Table, name: &str) -> Option<T> {
        match table.get(name) {
            None => Some(T::default()),
            Some(toml::Value::Table(t)) => match toml::Value::Table(t.clone()).try_into::<T>() {
                Ok(v) => Some(v),
                Err(e) => {
                    let msg = e.message().to_string();
                    let line = first_backticked(&msg).and_then(|k| locate(self.text, Some(name), k));
                    self.push(line, format!("[{name}]: {msg}"));
                    None
                }
            },
            Some(_) => {
                self.push(locate(self.text, None, name), format!("`{name}` must be a table"));
                None
            }
        }
    }

    fn check(&mut self, section: &str, key: Option<&str>, r: Result<()>) {
        if let Err(e) = r {
            let line = key.and_then(|k| locate(self.text, Some(section), k));
            self.push(line, format!("[{section}] {e}"));
        }
    }
}

fn first_backticked(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

/// Extracts the parameter name from an `InvalidParameter` error.
fn param_name(r: &Result<()>) -> Option<&'static str> {
    match r {
        Err(crate::error::Error::InvalidParameter { name, .. }) => Some(name),
        _ => None,
    }
}

macro_rules! check_param {
    ($loader:expr, $section:expr, $r:expr) => {{
        let r = $r;
        let key = param_name(&r);
        $loader.check($section, key, r);
    }};
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> std::result::Result<ScenarioConfig, ConfigErrors> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigErrors(vec![ConfigIssue {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        }])
    })?;
    let fallback_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let mut cfg = parse_scenario(&text, &fallback_name)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(cfg)
}

/// Parses and validates scenario text; `fallback_name` is used when the file
/// has no `name` key.
pub fn parse_scenario(text: &str, fallback_name: &str) -> std::result::Result<ScenarioConfig, ConfigErrors> {
    let table: toml::Table = toml::from_str(text).map_err(|e| {
        ConfigErrors(vec![ConfigIssue {
            line: line_from_toml(&e, text),
            message: format!("parse error: {}", e.message()),
        }])
    })?;
    let mut ld = Loader {
        text,
        issues: Vec::new(),
    };
    ld.check_keys(&table, None, TOP_KEYS, "a scenario");

    let modality = match table.get("modality") {
        None => {
            ld.push(None, "missing key `modality` (one of air, soil, myco, electrical, acoustic)");
            None
        }
        Some(v) => match v.clone().try_into::<Modality>() {
            Ok(m) => Some(m),
            Err(_) => {
                ld.push(
                    locate(text, None, "modality"),
                    format!("`modality` must be one of air, soil, myco, electrical, acoustic; got {v}"),
                );
                None
            }
        },
    };
    let name = match table.get("name") {
        None => Some(fallback_name.to_string()),
        Some(toml::Value::String(s)) if !s.is_empty() => Some(s.clone()),
        Some(_) => {
            ld.push(locate(text, None, "name"), "`name` must be a non-empty string");
            None
        }
    };
    let seed = match table.get("seed") {
        None => Some(0),
        Some(toml::Value::Integer(i)) if *i >= 0 => Some(*i as u64),
        Some(_) => {
            ld.push(locate(text, None, "seed"), "`seed` must be a non-negative integer");
            None
        }
    };
    let output = match table.get("output") {
        None => Some(None),
        Some(toml::Value::String(s)) => Some(Some(PathBuf::from(s))),
        Some(_) => {
            ld.push(locate(text, None, "output"), "`output` must be a path string");
            None
        }
    };
    let Some(modality) = modality else {
        return Err(ConfigErrors(ld.issues));
    };

    for section in ["transmitter", "channel", "receiver", "link"] {
        if let Some(toml::Value::Table(t)) = table.get(section) {
            let keys = section_keys(modality, section);
            ld.check_keys(t, Some(section), &keys, &format!("modality {}", modality.name()));
        }
    }
    if !ld.issues.is_empty() {
        return Err(ConfigErrors(ld.issues));
    }

    let transmitter = match modality {
        Modality::Air | Modality::Soil => ld.section::<ChemicalTx>(&table, "transmitter").map(TransmitterConfig::Chemical),
        Modality::Myco => ld.section::<MycoTx>(&table, "transmitter").map(TransmitterConfig::Myco),
        Modality::Electrical => ld.section::<ElectricalTx>(&table, "transmitter").map(TransmitterConfig::Electrical),
        Modality::Acoustic => ld.section::<AcousticTx>(&table, "transmitter").map(TransmitterConfig::Acoustic),
    };
    let channel = match modality {
        Modality::Air => ld.section::<AirChannel>(&table, "channel").map(ChannelConfig::Air),
        Modality::Soil => ld.section::<SoilChannel>(&table, "channel").map(ChannelConfig::Soil),
        Modality::Myco => ld.section::<MycoChannel>(&table, "channel").map(ChannelConfig::Myco),
        Modality::Electrical => ld.section::<ElectricalChannel>(&table, "channel").map(ChannelConfig::Electrical),
        Modality::Acoustic => ld.section::<AcousticChannel>(&table, "channel").map(ChannelConfig::Acoustic),
    };
    let receiver = match modality {
        Modality::Air | Modality::Soil => {
            if table.contains_key("receiver") {
                ld.section::<UptakeRx>(&table, "receiver").map(|r| ReceiverConfig::Uptake(Some(r)))
            } else {
                Some(ReceiverConfig::Uptake(None))
            }
        }
        Modality::Myco => ld.section::<MycoRx>(&table, "receiver").map(ReceiverConfig::Myco),
        Modality::Electrical => ld.section::<ElectricalRx>(&table, "receiver").map(ReceiverConfig::Electrical),
        Modality::Acoustic => ld.section::<AcousticRx>(&table, "receiver").map(ReceiverConfig::Acoustic),
    };
    let link = ld.section::<LinkConfig>(&table, "link");

    let (Some(name), Some(seed), Some(output), Some(transmitter), Some(channel), Some(receiver), Some(link)) =
        (name, seed, output, transmitter, channel, receiver, link)
    else {
        return Err(ConfigErrors(ld.issues));
    };
    let cfg = ScenarioConfig {
        name,
        modality,
        seed,
        output,
        transmitter,
        channel,
        receiver,
        link,
        base_dir: PathBuf::new(),
    };
    validate(&cfg, &mut ld);
    if ld.issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(ld.issues))
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn validate(cfg: &ScenarioConfig, ld: &mut Loader<'_>) {
    let link = &cfg.link;
    let modality = cfg.modality;
    let modulation = cfg.modulation();
    match (modality, modulation) {
        (Modality::Air | Modality::Soil, Modulation::Csk | Modulation::Rsk)
        | (Modality::Myco, Modulation::Csk)
        | (Modality::Electrical | Modality::Acoustic, Modulation::Events) => {}
        (m, md) => ld.push(
            locate(ld.text, Some("link"), "modulation"),
            format!("modulation {md:?} is not available for modality {}", m.name()),
        ),
    }

    // frame
    if link.symbol_period <= 0.0 || !link.symbol_period.is_finite() {
        ld.push(locate(ld.text, Some("link"), "symbol_period"), "[link] `symbol_period` must be positive");
    }
    let dt = link.dt();
    if !(dt > 0.0 && dt.is_finite()) {
        ld.push(locate(ld.text, Some("link"), "dt"), "[link] `dt` must be positive");
    } else if link.symbol_period > 0.0 && dt > link.symbol_period {
        ld.push(locate(ld.text, Some("link"), "dt"), "[link] `dt` must not exceed the symbol period");
    }
    if link.alphabet_size < 2 {
        ld.push(locate(ld.text, Some("link"), "alphabet_size"), "[link] `alphabet_size` must be at least 2");
    }
    match &link.symbols {
        Some(s) => {
            if let Err(e) = SymbolFrame::new(s.clone(), link.symbol_period.max(f64::MIN_POSITIVE), link.alphabet_size.max(2)) {
                ld.push(locate(ld.text, Some("link"), "symbols"), format!("[link] {e}"));
            }
        }
        None if link.n_symbols == 0 => {
            ld.push(locate(ld.text, Some("link"), "n_symbols"), "[link] `n_symbols` must be positive");
        }
        None => {}
    }
    if let Some(t) = link.trials {
        if t != 0 && t < crate::linkstats::MIN_TRIALS {
            ld.push(
                locate(ld.text, Some("link"), "trials"),
                format!("[link] `trials` must be 0 or at least {}", crate::linkstats::MIN_TRIALS),
            );
        }
    }
    if !(link.sigma_rel >= 0.0) {
        ld.push(locate(ld.text, Some("link"), "sigma_rel"), "[link] `sigma_rel` must be non-negative");
    }
    if !(link.tau_corr > 0.0) {
        ld.push(locate(ld.text, Some("link"), "tau_corr"), "[link] `tau_corr` must be positive");
    }
    if let Some(snr) = link.snr_db {
        if !snr.is_finite() {
            ld.push(locate(ld.text, Some("link"), "snr_db"), "[link] `snr_db` must be finite");
        }
    }
    if let Some(th) = &link.thresholds {
        if th.len() + 1 != link.alphabet_size || !strictly_increasing(th) {
            ld.push(
                locate(ld.text, Some("link"), "thresholds"),
                format!("[link] `thresholds` must be {} strictly increasing values", link.alphabet_size.saturating_sub(1)),
            );
        }
    }
    if !(link.window_offset >= 0.0 && link.window_offset < link.symbol_period) {
        ld.push(
            locate(ld.text, Some("link"), "window_offset"),
            "[link] `window_offset` must lie within the symbol period",
        );
    }
    if let Some(w) = link.window_width {
        if !(w > 0.0) || link.window_offset + w > link.symbol_period * (1.0 + 1e-9) {
            ld.push(
                locate(ld.text, Some("link"), "window_width"),
                "[link] `window_width` must be positive and end within the symbol period",
            );
        }
    }
    let counts = link.counts();
    if modulation == Modulation::Events {
        let distinct: BTreeSet<usize> = counts.iter().copied().collect();
        if counts.len() != link.alphabet_size || distinct.len() != counts.len() {
            ld.push(
                locate(ld.text, Some("link"), "counts"),
                format!("[link] `counts` must hold {} distinct event counts", link.alphabet_size),
            );
        }
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);

    match &cfg.transmitter {
        TransmitterConfig::Chemical(tx) => {
            if modulation == Modulation::Csk {
                if tx.levels.len() != link.alphabet_size {
                    ld.push(
                        locate(ld.text, Some("transmitter"), "levels"),
                        format!("[transmitter] `levels` needs {} entries", link.alphabet_size),
                    );
                }
                if !strictly_increasing(&tx.levels) || tx.levels.iter().any(|&l| l < 0.0) {
                    ld.push(
                        locate(ld.text, Some("transmitter"), "levels"),
                        "[transmitter] `levels` must be non-negative and strictly increasing",
                    );
                }
            }
            if modulation == Modulation::Rsk {
                match &tx.ratio_table {
                    None => ld.push(None, "[transmitter] RSK needs `ratio_table`"),
                    Some(table) => {
                        let r = validate_ratio_table(table, link.alphabet_size);
                        ld.check("transmitter", Some("ratio_table"), r.clone());
                        if r.is_ok() && table[0].len() < 2 {
                            ld.push(
                                locate(ld.text, Some("transmitter"), "ratio_table"),
                                "[transmitter] RSK needs at least two species",
                            );
                        }
                    }
                }
                if !(tx.total_flux > 0.0) {
                    ld.push(locate(ld.text, Some("transmitter"), "total_flux"), "[transmitter] `total_flux` must be positive");
                }
            }
            if let Some(tau) = tx.pulse_tau {
                if !(tau > 0.0) {
                    ld.push(locate(ld.text, Some("transmitter"), "pulse_tau"), "[transmitter] `pulse_tau` must be positive");
                }
            }
        }
        TransmitterConfig::Myco(tx) => {
            if tx.levels.len() != link.alphabet_size || !strictly_increasing(&tx.levels) || tx.levels.iter().any(|&l| l < 0.0) {
                ld.push(
                    locate(ld.text, Some("transmitter"), "levels"),
                    format!("[transmitter] `levels` needs {} non-negative, strictly increasing entries", link.alphabet_size),
                );
            }
            if let ReceiverConfig::Myco(rx) = &cfg.receiver {
                let node_volume = match &cfg.channel {
                    ChannelConfig::Myco(c) => c.node_volume,
                    _ => 1.0,
                };
                let ifc = InterfaceParams {
                    v_max_p: tx.v_max_p,
                    k_m_p: tx.k_m_p,
                    v_max_f: rx.v_max_f,
                    k_m_f: rx.k_m_f,
                    node_volume,
                };
                let r = ifc.validate();
                let section = match param_name(&r) {
                    Some("v_max_p" | "k_m_p") => "transmitter",
                    Some("node_volume") => "channel",
                    _ => "receiver",
                };
                check_param!(ld, section, r);
            }
        }
        TransmitterConfig::Electrical(tx) => {
            check_param!(ld, "transmitter", tx.ap_params().validate());
            if !(tx.stimulus >= tx.threshold) {
                ld.push(
                    locate(ld.text, Some("transmitter"), "stimulus"),
                    "[transmitter] `stimulus` must reach `threshold`",
                );
            }
            let spacing = tx.spacing();
            if !(spacing >= tx.refractory) {
                ld.push(
                    locate(ld.text, Some("transmitter"), "spike_spacing"),
                    "[transmitter] `spike_spacing` must be at least the refractory period",
                );
            }
            if max_count > 0 && (max_count - 1) as f64 * spacing + tx.refractory > link.symbol_period {
                ld.push(
                    locate(ld.text, Some("link"), "symbol_period"),
                    format!(
                        "[link] symbol period {} s cannot hold {max_count} spikes spaced {spacing} s plus one refractory period",
                        link.symbol_period
                    ),
                );
            }
        }
        TransmitterConfig::Acoustic(tx) => {
            let vessel = tx.vessel();
            check_param!(ld, "transmitter", vessel.validate());
            if !(tx.amplitude > 0.0) {
                ld.push(locate(ld.text, Some("transmitter"), "amplitude"), "[transmitter] `amplitude` must be positive");
            }
            if vessel.validate().is_ok() {
                let f1 = vessel.fundamental();
                if dt > 1.0 / (10.0 * f1) {
                    ld.push(
                        locate(ld.text, Some("link"), "dt"),
                        format!("[link] `dt` must be at most {} s to resolve the {f1} Hz click", 1.0 / (10.0 * f1)),
                    );
                }
                let dead = match &cfg.receiver {
                    ReceiverConfig::Acoustic(rx) => rx.dead_time.unwrap_or_else(|| crate::acoustic::default_dead_time(&vessel)),
                    _ => 0.0,
                };
                let spacing = tx.spacing();
                if !(spacing > dead) {
                    ld.push(
                        locate(ld.text, Some("transmitter"), "click_spacing"),
                        format!("[transmitter] `click_spacing` must exceed the detector dead time {dead} s"),
                    );
                }
                if max_count > 0 && (max_count - 1) as f64 * spacing + dead >= link.symbol_period {
                    ld.push(
                        locate(ld.text, Some("link"), "symbol_period"),
                        format!("[link] symbol period cannot hold {max_count} clicks spaced {spacing} s"),
                    );
                }
            }
        }
    }

    match &cfg.channel {
        ChannelConfig::Air(c) => {
            check_param!(ld, "channel", c.params().validate());
            if !(c.distance > 0.0) {
                ld.push(locate(ld.text, Some("channel"), "distance"), "[channel] `distance` must be positive");
            }
        }
        ChannelConfig::Soil(c) => {
            check_param!(ld, "channel", c.params().validate());
            if !(c.distance > 0.0) {
                ld.push(locate(ld.text, Some("channel"), "distance"), "[channel] `distance` must be positive");
            }
            if c.solver == SoilSolver::Fd {
                if c.n_cells < 8 {
                    ld.push(locate(ld.text, Some("channel"), "n_cells"), "[channel] `n_cells` must be at least 8");
                }
                if !(c.domain() > c.distance) {
                    ld.push(
                        locate(ld.text, Some("channel"), "domain_length"),
                        "[channel] `domain_length` must exceed the receiver distance",
                    );
                }
                if c.params().validate().is_ok() && c.n_cells >= 8 {
                    let max_dt = crate::channel_soil::max_stable_dt(&c.params(), c.domain() / c.n_cells as f64);
                    if dt > max_dt {
                        ld.push(
                            locate(ld.text, Some("link"), "dt"),
                            format!("[link] `dt` = {dt} s exceeds the finite-difference stability limit {max_dt} s"),
                        );
                    }
                }
            }
        }
        ChannelConfig::Myco(c) => {
            if c.edge_list.is_none() && c.n_nodes < 2 {
                ld.push(locate(ld.text, Some("channel"), "n_nodes"), "[channel] `n_nodes` must be at least 2");
            }
            if !(c.k_scale > 0.0) {
                ld.push(locate(ld.text, Some("channel"), "k_scale"), "[channel] `k_scale` must be positive");
            }
            if c.edge_list.is_none() && (c.tx_node >= c.n_nodes || c.rx() >= c.n_nodes || c.tx_node == c.rx()) {
                ld.push(
                    locate(ld.text, Some("channel"), "rx_node"),
                    "[channel] `tx_node` and `rx_node` must be distinct nodes of the network",
                );
            }
        }
        ChannelConfig::Electrical(c) => {
            if !(c.distance >= 0.0) {
                ld.push(locate(ld.text, Some("channel"), "distance"), "[channel] `distance` must be non-negative");
            }
            if !(c.gain_multiplier > 0.0 && c.speed_multiplier > 0.0) {
                ld.push(None, "[channel] environment multipliers must be positive");
            }
            if let Some(l) = c.soil_length_scale {
                if !(l > 0.0) {
                    ld.push(
                        locate(ld.text, Some("channel"), "soil_length_scale"),
                        "[channel] `soil_length_scale` must be positive",
                    );
                }
            }
        }
        ChannelConfig::Acoustic(c) => {
            check_param!(ld, "channel", c.medium().validate());
            if !(c.distance >= c.r_ref) {
                ld.push(
                    locate(ld.text, Some("channel"), "distance"),
                    "[channel] `distance` must be at least the reference distance `r_ref`",
                );
            }
        }
    }

    match &cfg.receiver {
        ReceiverConfig::Uptake(Some(rx)) => {
            check_param!(ld, "receiver", rx.params().validate());
            if !(rx.volume > 0.0) {
                ld.push(locate(ld.text, Some("receiver"), "volume"), "[receiver] `volume` must be positive");
            }
        }
        ReceiverConfig::Electrical(rx) => {
            if !(rx.detect_fraction > 0.0 && rx.detect_fraction < 1.0) {
                ld.push(
                    locate(ld.text, Some("receiver"), "detect_fraction"),
                    "[receiver] `detect_fraction` must lie in (0, 1)",
                );
            }
        }
        ReceiverConfig::Acoustic(rx) => {
            check_param!(ld, "receiver", rx.ms_params().validate());
            if let Some(t) = rx.threshold {
                if !(t > 0.0) {
                    ld.push(locate(ld.text, Some("receiver"), "threshold"), "[receiver] `threshold` must be positive");
                }
            }
            if let Some(d) = rx.dead_time {
                if !(d >= 0.0) {
                    ld.push(locate(ld.text, Some("receiver"), "dead_time"), "[receiver] `dead_time` must be non-negative");
                }
            }
        }
        ReceiverConfig::Uptake(None) | ReceiverConfig::Myco(_) => {}
    }
}

impl ScenarioConfig {
    pub fn modulation(&self) -> Modulation {
        self.link.modulation.unwrap_or(if self.modality.is_chemical() {
            Modulation::Csk
        } else {
            Modulation::Events
        })
    }

    /// Monte Carlo trial count after defaults; zero means a single
    /// deterministic run.
    pub fn trials(&self) -> usize {
        match self.link.trials {
            Some(t) => t,
            None if self.link.is_noisy(self.modality, &self.transmitter) => DEFAULT_NOISY_TRIALS,
            None => 0,
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(&self.name))
    }

    /// SHA-256 of the effective configuration (after defaults and overrides).
    /// The output location does not affect results and is left out.
    pub fn config_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(&ScenarioConfig {
            output: None,
            ..self.clone()
        })
        .expect("config serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        parse_scenario(text, "t").unwrap_err().messages()
    }

    #[test]
    fn minimal_air_scenario() {
        let cfg = parse_scenario("modality = \"air\"\n", "mini").unwrap();
        assert_eq!(cfg.name, "mini");
        assert_eq!(cfg.modulation(), Modulation::Csk);
        assert_eq!(cfg.trials(), 0);
        assert_eq!(cfg.channel, ChannelConfig::Air(AirChannel::default()));
        assert_eq!(cfg.receiver, ReceiverConfig::Uptake(None));
    }

    #[test]
    fn negative_diffusivity_names_field() {
        let e = errors("modality = \"air\"\n[channel]\ndiffusivity = -1.0\n");
        assert_eq!(e.len(), 1);
        assert!(e[0].contains("diffusivity"), "{e:?}");
        assert!(e[0].starts_with("line 3"), "{e:?}");
    }

    #[test]
    fn unknown_key_suggests() {
        let e = errors("modality = \"air\"\n[channel]\nwindz = [1.0, 0.0, 0.0]\n");
        assert!(e[0].contains("`windz`") && e[0].contains("did you mean `wind`"), "{e:?}");
        assert!(e[0].starts_with("line 3"));
    }

    #[test]
    fn collects_every_error() {
        let text = "modality = \"air\"\n[channel]\ndiffusivity = -1.0\ndistance = -2.0\n[link]\nsymbol_period = -1.0\n";
        let e = errors(text);
        assert!(e.len() >= 3, "{e:?}");
        let e = errors("modality = \"soil\"\nbogus = 1\n[link]\nsnr_db = 3.0\n");
        assert_eq!(e.len(), 2, "{e:?}");
    }

    #[test]
    fn parse_error_has_line() {
        let e = errors("modality = \"air\"\n[channel\n");
        assert!(e[0].starts_with("line 2"), "{e:?}");
    }

    #[test]
    fn modality_specific_keys() {
        let e = errors("modality = \"acoustic\"\n[channel]\ndiffusivity = 1.0\n");
        assert!(e[0].contains("modality acoustic"));
        assert!(errors("modality = \"plasma\"\n")[0].contains("modality"));
        assert!(errors("modality = \"myco\"\n[link]\nmodulation = \"rsk\"\n")[0].contains("not available"));
    }

    #[test]
    fn type_errors_are_reported() {
        let e = errors("modality = \"air\"\n[channel]\ndistance = \"far\"\n");
        assert!(e[0].contains("[channel]"), "{e:?}");
    }

    #[test]
    fn hash_tracks_effective_config() {
        let a = parse_scenario("modality = \"air\"\nseed = 1\n", "x").unwrap();
        let b = parse_scenario("modality = \"air\"\nseed = 2\n", "x").unwrap();
        let c = parse_scenario("modality = \"air\"\nseed = 1\n[link]\nn_symbols = 16\n", "x").unwrap();
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash(), c.config_hash());
        assert_eq!(a.config_hash().len(), 64);
    }

    #[test]
    fn schema_lists_cover_struct_fields() {
        fn keys<T: Serialize>(v: &T) -> Vec<String> {
            match toml::Value::try_from(v).unwrap() {
                toml::Value::Table(t) => t.keys().cloned().collect(),
                _ => unreachable!(),
            }
        }
        let check = |found: Vec<String>, list: &[&str]| {
            for k in found {
                assert!(list.contains(&k.as_str()), "{k} missing from schema");
            }
        };
        check(keys(&ChemicalTx::default()), CHEMICAL_TX_KEYS);
        check(keys(&MycoTx::default()), MYCO_TX_KEYS);
        check(keys(&ElectricalTx::default()), ELECTRICAL_TX_KEYS);
        check(keys(&AcousticTx::default()), ACOUSTIC_TX_KEYS);
        check(keys(&AirChannel::default()), AIR_CHANNEL_KEYS);
        check(keys(&SoilChannel::default()), SOIL_CHANNEL_KEYS);
        check(keys(&MycoChannel::default()), MYCO_CHANNEL_KEYS);
        check(keys(&ElectricalChannel::default()), ELECTRICAL_CHANNEL_KEYS);
        check(keys(&AcousticChannel::default()), ACOUSTIC_CHANNEL_KEYS);
        check(keys(&UptakeRx::default()), UPTAKE_RX_KEYS);
        check(keys(&MycoRx::default()), MYCO_RX_KEYS);
        check(keys(&ElectricalRx::default()), ELECTRICAL_RX_KEYS);
        check(keys(&AcousticRx::default()), ACOUSTIC_RX_KEYS);
        let all_link: Vec<&str> = [LINK_COMMON_KEYS, LINK_CHEMICAL_KEYS, LINK_EVENT_KEYS, LINK_ACOUSTIC_KEYS].concat();
        check(keys(&LinkConfig::default()), &all_link);
    }
}
