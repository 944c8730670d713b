//! End-to-end link pipelines assembled from a validated scenario.
//!
//! A [`Pipeline`] precomputes everything that does not depend on noise (the
//! symbol frame, emissions, noiseless channel outputs, calibrated decision
//! thresholds); [`Pipeline::trial`] then only draws one noise realisation
//! and detects. Trial `i` of a Monte Carlo run uses stream `i` of the
//! scenario seed; the random symbol sequence uses the reserved stream
//! [`SYMBOL_STREAM`].

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::{json, Value};

use super::config::*;
use crate::acoustic::{self, VesselParams};
use crate::channel_air::{self, add_turbulence_noise, ChannelResponse, Medium, ObservationPoint};
use crate::channel_soil::{self, Breakthrough};
use crate::electrical::{self, APParams};
use crate::error::{Error, Result};
use crate::linkstats::{
    self, detect_csk_with, detect_events, detect_rsk_with, isi_metrics, DetectionResult, DetectorOptions,
    MonteCarlo,
};
use crate::mycorrhizal::{self, InterfaceParams, MycoNetwork};
use crate::numerics::{add_white_noise, RandomSource, TimeGrid, TimeSeries, Unit};
use crate::receiver::accumulate_internal;
use crate::transmitter::{modulate_csk, modulate_rsk, PulseShape, SymbolFrame};

/// Stream reserved for drawing the random symbol sequence.
pub const SYMBOL_STREAM: u64 = u64::MAX;

type Metrics = BTreeMap<String, Value>;

/// Named series written by the runner, in output order.
pub type NamedSeries = Vec<(String, TimeSeries)>;

enum Decoder {
    Csk { thresholds: Vec<f64> },
    Rsk { table: Vec<Vec<f64>> },
}

struct ChemicalLink {
    decoder: Decoder,
    opts: DetectorOptions,
    clean: Vec<ChannelResponse>,
    sigma_rel: f64,
    tau_corr: f64,
}

struct ElectricalLink {
    stimulus: TimeSeries,
    ap: APParams,
    delay: f64,
    gain: f64,
    level: f64,
    counts: Vec<usize>,
}

struct AcousticLink {
    clean: TimeSeries,
    delay: f64,
    sigma: f64,
    threshold: f64,
    dead_time: f64,
    counts: Vec<usize>,
}

enum Kind {
    Chemical(ChemicalLink),
    Electrical(ElectricalLink),
    Acoustic(AcousticLink),
}

/// One realisation of the link.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub detection: DetectionResult,
    /// Received signal(s) after noise.
    pub received: Vec<TimeSeries>,
    /// Detected event times, for event-counting links.
    pub events: Option<Vec<f64>>,
}

pub struct Pipeline {
    frame: SymbolFrame,
    kind: Kind,
    noisy: bool,
    /// Noiseless, noise-independent series (emission, channel, ...).
    pub series: NamedSeries,
    /// Noise-independent metrics (ISI, latency, dose, ...).
    pub metrics: BTreeMap<String, Value>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at(name))
}

/// Symbol sequence from the configuration or drawn from the seed.
pub fn frame_for(cfg: &ScenarioConfig) -> Result<SymbolFrame> {
    let link = &cfg.link;
    let symbols = match &link.symbols {
        Some(s) => s.clone(),
        None => {
            let mut r = RandomSource::new(cfg.seed, SYMBOL_STREAM).rng();
            (0..link.n_symbols).map(|_| r.random_range(0..link.alphabet_size)).collect()
        }
    };
    SymbolFrame::new(symbols, link.symbol_period, link.alphabet_size)
}

fn name_species(base: &str, n: usize, j: usize) -> String {
    if n == 1 {
        base.to_string()
    } else {
        format!("{base}_{j}")
    }
}

fn resp_metric(m: &mut Metrics, prefix: &str, value: f64) {
    m.insert(prefix.to_string(), json!(value));
}

impl Pipeline {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let frame = stage("frame", frame_for(cfg))?;
        let noisy = cfg.link.is_noisy(cfg.modality, &cfg.transmitter);
        let mut series = NamedSeries::new();
        let mut metrics = Metrics::new();
        let kind = match (&cfg.transmitter, &cfg.channel) {
            (TransmitterConfig::Chemical(tx), ChannelConfig::Air(ch)) => {
                Kind::Chemical(chemical_link(cfg, &frame, tx, Chem::Air(ch), &mut series, &mut metrics)?)
            }
            (TransmitterConfig::Chemical(tx), ChannelConfig::Soil(ch)) => {
                Kind::Chemical(chemical_link(cfg, &frame, tx, Chem::Soil(ch), &mut series, &mut metrics)?)
            }
            (TransmitterConfig::Myco(tx), ChannelConfig::Myco(ch)) => {
                Kind::Chemical(myco_link(cfg, &frame, tx, ch, &mut series, &mut metrics)?)
            }
            (TransmitterConfig::Electrical(tx), ChannelConfig::Electrical(ch)) => {
                Kind::Electrical(electrical_link(cfg, &frame, tx, ch, &mut series, &mut metrics)?)
            }
            (TransmitterConfig::Acoustic(tx), ChannelConfig::Acoustic(ch)) => {
                Kind::Acoustic(acoustic_link(cfg, &frame, tx, ch, &mut series, &mut metrics)?)
            }
            _ => return Err(Error::Domain("transmitter and channel blocks belong to different modalities".into())),
        };
        Ok(Pipeline {
            frame,
            kind,
            noisy,
            series,
            metrics,
        })
    }

    pub fn frame(&self) -> &SymbolFrame {
        &self.frame
    }

    pub fn is_noisy(&self) -> bool {
        self.noisy
    }

    /// Detection without any noise.
    pub fn noiseless(&self) -> Result<TrialOutcome> {
        self.run(None)
    }

    /// One noisy realisation.
    pub fn trial(&self, rng: RandomSource) -> Result<TrialOutcome> {
        self.run(Some(rng))
    }

    fn run(&self, rng: Option<RandomSource>) -> Result<TrialOutcome> {
        match &self.kind {
            Kind::Chemical(link) => {
                let received: Vec<ChannelResponse> = match rng {
                    Some(src) if link.sigma_rel > 0.0 => {
                        let mut r = src.rng();
                        link.clean
                            .iter()
                            .enumerate()
                            .map(|(j, c)| {
                                let sub = RandomSource::new(r.random(), j as u64);
                                add_turbulence_noise(c, link.sigma_rel, link.tau_corr, sub)
                            })
                            .collect::<Result<_>>()
                            .map_err(|e| e.at("noise"))?
                    }
                    _ => link.clean.clone(),
                };
                let detection = stage(
                    "detection",
                    match &link.decoder {
                        Decoder::Csk { thresholds } => detect_csk_with(&received[0], &self.frame, thresholds, &link.opts),
                        Decoder::Rsk { table } => detect_rsk_with(&received, &self.frame, table, &link.opts),
                    },
                )?;
                Ok(TrialOutcome {
                    detection,
                    received: received.into_iter().map(|r| r.series).collect(),
                    events: None,
                })
            }
            Kind::Electrical(link) => {
                let train = stage("transmitter", electrical::generate_ap_train(&link.stimulus, &link.ap, rng))?;
                let received = train.waveform.scale(link.gain)?.shifted(link.delay);
                let events: Vec<f64> = upward_crossings(&received, link.level)
                    .into_iter()
                    .map(|t| t - link.delay)
                    .collect();
                let detection = stage("detection", detect_events(&events, &self.frame, &link.counts))?;
                Ok(TrialOutcome {
                    detection,
                    received: vec![received],
                    events: Some(events),
                })
            }
            Kind::Acoustic(link) => {
                let received = match rng {
                    Some(src) if link.sigma > 0.0 => stage("noise", add_white_noise(&link.clean, link.sigma, src))?,
                    _ => link.clean.clone(),
                };
                let events: Vec<f64> = stage("detection", acoustic::detect_clicks(&received, link.threshold, link.dead_time))?
                    .into_iter()
                    .map(|t| t - link.delay)
                    .collect();
                let detection = stage("detection", detect_events(&events, &self.frame, &link.counts))?;
                Ok(TrialOutcome {
                    detection,
                    received: vec![received],
                    events: Some(events),
                })
            }
        }
    }

    /// Seeded Monte Carlo SER over `n_trials` noisy realisations.
    pub fn monte_carlo(&self, n_trials: usize, seed: u64) -> Result<MonteCarlo> {
        linkstats::monte_carlo_ser(n_trials, RandomSource::new(seed, 0), |_, rng| {
            self.trial(rng).map(|o| o.detection.ser)
        })
    }
}

/// Times at which `s` rises to `level` from below.
fn upward_crossings(s: &TimeSeries, level: f64) -> Vec<f64> {
    let v = s.values();
    (0..v.len())
        .filter(|&k| v[k] >= level && (k == 0 || v[k - 1] < level))
        .map(|k| s.time(k))
        .collect()
}

enum Chem<'a> {
    Air(&'a AirChannel),
    Soil(&'a SoilChannel),
}

impl Chem<'_> {
    fn propagate(&self, flux: &TimeSeries) -> Result<ChannelResponse> {
        match self {
            Chem::Air(ch) => channel_air::propagate_continuous(flux, &ch.params(), &ObservationPoint::on_axis(ch.distance)),
            Chem::Soil(ch) => match ch.solver {
                SoilSolver::Analytic => channel_soil::propagate_continuous(flux, &ch.params(), ch.distance),
                SoilSolver::Fd => {
                    let cells = channel_soil::solve_dual_phase_1d(&ch.params(), flux, ch.domain(), ch.n_cells)?;
                    let dx = ch.domain() / ch.n_cells as f64;
                    let i = ((ch.distance / dx - 0.5).round().max(0.0) as usize).min(ch.n_cells - 1);
                    Ok(cells.into_iter().nth(i).expect("cell index in range"))
                }
            },
        }
    }

    /// Response to a unit impulse released at `t = 0`, sampled from `dt`.
    fn impulse(&self, dt: f64, n: usize) -> Result<ChannelResponse> {
        let grid = TimeGrid::new(dt, dt, n)?;
        match self {
            Chem::Air(ch) => channel_air::impulse_response(&ch.params(), &ObservationPoint::on_axis(ch.distance), grid),
            Chem::Soil(ch) => match ch.solver {
                SoilSolver::Analytic => channel_soil::effective_impulse_response(&ch.params(), ch.distance, 1.0, grid),
                SoilSolver::Fd => {
                    let pulse = TimeSeries::impulse(TimeGrid::new(0.0, dt, n)?, 1.0, Unit::ArealFlux)?;
                    self.propagate(&pulse)
                }
            },
        }
    }
}

fn shape(tx: &ChemicalTx) -> PulseShape {
    match tx.pulse_tau {
        Some(tau_rel) => PulseShape::Exp { tau_rel },
        None => PulseShape::Rect,
    }
}

fn detector_options(link: &LinkConfig) -> DetectorOptions {
    DetectorOptions {
        window_offset: link.window_offset,
        window_width: link.window_width,
        baseline: link.baseline,
        ..DetectorOptions::default()
    }
}

/// Thresholds halfway between the statistics each level produces when sent
/// alone, i.e. free of intersymbol interference.
fn calibrate_thresholds(
    n_levels: usize,
    period: f64,
    opts: &DetectorOptions,
    mut respond: impl FnMut(&SymbolFrame) -> Result<ChannelResponse>,
) -> Result<Vec<f64>> {
    let mut stats = Vec::with_capacity(n_levels);
    for s in 0..n_levels {
        let single = SymbolFrame::new(vec![s], period, n_levels)?;
        let r = respond(&single)?;
        stats.push(linkstats::symbol_statistics(&r.series, &single, opts)?[0]);
    }
    if !stats.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain(format!(
            "isolated-symbol statistics {stats:?} are not increasing; set [link] thresholds explicitly"
        )));
    }
    Ok(stats.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
}

fn chemical_link(
    cfg: &ScenarioConfig,
    frame: &SymbolFrame,
    tx: &ChemicalTx,
    chem: Chem<'_>,
    series: &mut NamedSeries,
    metrics: &mut Metrics,
) -> Result<ChemicalLink> {
    let link = &cfg.link;
    let dt = link.dt();
    let opts = detector_options(link);
    let emissions: Vec<TimeSeries> = match cfg.modulation() {
        Modulation::Rsk => {
            let table = tx.ratio_table.as_ref().expect("validated RSK table");
            stage("transmitter", modulate_rsk(frame, table, tx.total_flux, dt))?
        }
        _ => vec![stage("transmitter", modulate_csk(frame, &tx.levels, shape(tx), dt))?],
    };
    let emissions: Vec<TimeSeries> = match chem {
        Chem::Soil(ch) if ch.solver == SoilSolver::Fd => emissions.into_iter().map(|e| e.with_unit(Unit::ArealFlux)).collect(),
        _ => emissions,
    };
    let clean: Vec<ChannelResponse> =
        stage("channel", emissions.iter().map(|e| chem.propagate(e)).collect::<Result<_>>())?;

    let decoder = match cfg.modulation() {
        Modulation::Rsk => Decoder::Rsk {
            table: tx.ratio_table.clone().expect("validated RSK table"),
        },
        _ => Decoder::Csk {
            thresholds: match &link.thresholds {
                Some(t) => t.clone(),
                None => stage(
                    "calibration",
                    calibrate_thresholds(tx.levels.len(), frame.symbol_period(), &opts, |single| {
                        let mut e = modulate_csk(single, &tx.levels, shape(tx), dt)?;
                        if let Chem::Soil(ch) = &chem {
                            if ch.solver == SoilSolver::Fd {
                                e = e.with_unit(Unit::ArealFlux);
                            }
                        }
                        chem.propagate(&e)
                    }),
                )?,
            },
        },
    };
    if let Decoder::Csk { thresholds } = &decoder {
        metrics.insert("thresholds".into(), json!(thresholds));
    }

    // channel memory from the impulse response over the frame duration
    let n = emissions[0].len().max(2);
    let h = stage("metrics", chem.impulse(dt, n))?;
    if h.values().iter().any(|&v| v > 0.0) {
        let isi = stage("metrics", isi_metrics(&h, frame.symbol_period()))?;
        resp_metric(metrics, "isi_ratio", isi.isi_ratio);
        resp_metric(metrics, "delay_spread_s", isi.delay_spread_s);
        let ds = stage("metrics", channel_air::delay_spread_metrics(&h, 0.95))?;
        resp_metric(metrics, "t_peak_s", ds.t_peak);
        // the power-law tail only exists in calm, loss-free air
        if let Chem::Air(ch) = chem {
            if ch.wind == [0.0; 3] && ch.loss_rate == 0.0 {
                resp_metric(metrics, "tail_exponent", ds.tail_exponent);
            }
        }
        if let Chem::Soil(_) = chem {
            let (_, peak) = h.series.argmax();
            match stage("metrics", channel_soil::breakthrough_curve(&h, 0.01 * peak))? {
                Breakthrough::Arrived { t_arrival, .. } => resp_metric(metrics, "t_arrival_s", t_arrival),
                Breakthrough::NoBreakthrough { .. } => {
                    metrics.insert("t_arrival_s".into(), Value::Null);
                }
            }
            resp_metric(metrics, "persistence_s", channel_soil::persistence(&h, 0.1));
        }
    } else {
        metrics.insert("isi_ratio".into(), Value::Null);
    }
    series.push(("impulse_response".into(), h.series.clone()));

    if let ReceiverConfig::Uptake(Some(rx)) = &cfg.receiver {
        let mut dose = 0.0;
        for (j, c) in clean.iter().enumerate() {
            let acc = stage("receiver", accumulate_internal(c, &rx.params(), rx.law, rx.volume))?;
            dose += acc.dose;
            series.push((name_species("c_int", clean.len(), j), acc.c_int));
        }
        resp_metric(metrics, "dose_mol", dose);
    }

    for (j, e) in emissions.into_iter().enumerate() {
        series.push((name_species("emission", clean.len(), j), e));
    }
    for (j, c) in clean.iter().enumerate() {
        series.push((name_species("channel", clean.len(), j), c.series.clone()));
    }
    Ok(ChemicalLink {
        decoder,
        opts,
        clean,
        sigma_rel: link.sigma_rel,
        tau_corr: link.tau_corr,
    })
}

fn myco_network(cfg: &ScenarioConfig, ch: &MycoChannel) -> Result<MycoNetwork> {
    match &ch.edge_list {
        Some(path) => {
            let path = cfg.base_dir.join(path);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            MycoNetwork::from_edge_list(&text)?.with_k_scale(ch.k_scale)
        }
        None => mycorrhizal::build_topology(ch.topology(), ch.n_nodes, RandomSource::new(cfg.seed, SYMBOL_STREAM - 1))?
            .with_k_scale(ch.k_scale),
    }
}

fn myco_link(
    cfg: &ScenarioConfig,
    frame: &SymbolFrame,
    tx: &MycoTx,
    ch: &MycoChannel,
    series: &mut NamedSeries,
    metrics: &mut Metrics,
) -> Result<ChemicalLink> {
    let link = &cfg.link;
    let dt = link.dt();
    // the network only redistributes what it receives, so the received flux
    // integrates the transmission and each symbol shows up as a rise
    let opts = DetectorOptions {
        statistic: linkstats::Statistic::Increment,
        ..detector_options(link)
    };
    let ReceiverConfig::Myco(rx) = &cfg.receiver else {
        unreachable!("myco receiver");
    };
    let ifc = InterfaceParams {
        v_max_p: tx.v_max_p,
        k_m_p: tx.k_m_p,
        v_max_f: rx.v_max_f,
        k_m_f: rx.k_m_f,
        node_volume: ch.node_volume,
    };
    let net = stage("channel", myco_network(cfg, ch))?;
    let rx_node = ch.rx();
    if ch.tx_node >= net.n_nodes() || rx_node >= net.n_nodes() || ch.tx_node == rx_node {
        return Err(Error::param("rx_node", "tx and rx must be distinct nodes of the network").at("channel"));
    }
    match mycorrhizal::fiedler_latency(&net) {
        Ok(f) => {
            resp_metric(metrics, "lambda_2", f.lambda_2);
            resp_metric(metrics, "t_mix_s", f.t_mix);
        }
        Err(_) => {
            metrics.insert("lambda_2".into(), json!(0.0));
            metrics.insert("t_mix_s".into(), Value::Null);
        }
    }
    metrics.insert("n_edges".into(), json!(net.edges().len()));

    let respond = |f: &SymbolFrame| -> Result<ChannelResponse> {
        let c_root = modulate_csk(f, &tx.levels, PulseShape::Rect, dt)?.with_unit(Unit::Concentration);
        let out = mycorrhizal::cmn_end_to_end(&c_root, &net, ch.tx_node, rx_node, &ifc)?;
        Ok(ChannelResponse::new(out, 0.0, Medium::Network))
    };
    let c_root = stage("transmitter", modulate_csk(frame, &tx.levels, PulseShape::Rect, dt))?.with_unit(Unit::Concentration);
    let clean = stage("channel", respond(frame))?;
    let thresholds = match &link.thresholds {
        Some(t) => t.clone(),
        None => stage("calibration", calibrate_thresholds(tx.levels.len(), frame.symbol_period(), &opts, respond))?,
    };
    metrics.insert("thresholds".into(), json!(thresholds));
    series.push(("emission".into(), c_root));
    series.push(("channel".into(), clean.series.clone()));
    Ok(ChemicalLink {
        decoder: Decoder::Csk { thresholds },
        opts,
        clean: vec![clean],
        sigma_rel: link.sigma_rel,
        tau_corr: link.tau_corr,
    })
}

/// Pulse/click onsets: `counts[s]` events at `i·T + j·spacing`.
fn event_onsets(frame: &SymbolFrame, counts: &[usize], spacing: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, &s) in frame.symbols().iter().enumerate() {
        for j in 0..counts[s] {
            out.push(i as f64 * frame.symbol_period() + j as f64 * spacing);
        }
    }
    out
}

fn electrical_link(
    cfg: &ScenarioConfig,
    frame: &SymbolFrame,
    tx: &ElectricalTx,
    ch: &ElectricalChannel,
    series: &mut NamedSeries,
    metrics: &mut Metrics,
) -> Result<ElectricalLink> {
    let link = &cfg.link;
    let ReceiverConfig::Electrical(rx) = &cfg.receiver else {
        unreachable!("electrical receiver");
    };
    let counts = link.counts();
    let grid = stage("frame", frame.grid(link.dt()))?;
    let onsets = event_onsets(frame, &counts, tx.spacing());
    let width = tx.duration.max(grid.dt);
    let stimulus = TimeSeries::from_fn(grid, Unit::Dimensionless, |t| {
        if onsets.iter().any(|&o| t >= o - 1e-9 * grid.dt && t < o + width) {
            tx.stimulus
        } else {
            0.0
        }
    })?;
    let env = ch.environment();
    let ap = stage("channel", env.apply_ap(&tx.ap_params()))?;
    let soil = match ch.soil_length_scale {
        Some(l) => stage("channel", electrical::soil_attenuation(ch.distance, l, ch.soil_profile))?,
        None => 1.0,
    };
    // the environment gain is already in `ap.amplitude`
    let gain = soil;
    let delay = ap.arrival_delay(ch.distance);
    let level = rx.detect_fraction * ap.amplitude * gain;

    let clean = stage("transmitter", electrical::generate_ap_train(&stimulus, &ap, None))?;
    let received = clean.waveform.scale(gain)?.shifted(delay);
    let class = electrical::classify_signal(&received, &electrical::ClassifierConfig::default());
    metrics.insert("signal_class".into(), json!(class));
    resp_metric(metrics, "speed_cm_per_min", ap.speed_cm_per_min());
    resp_metric(metrics, "arrival_delay_s", delay);
    resp_metric(metrics, "received_amplitude_v", ap.amplitude * gain);
    metrics.insert("n_spikes".into(), json!(clean.spike_times.len()));

    series.push(("stimulus".into(), stimulus.clone()));
    series.push(("emission".into(), clean.waveform));
    series.push(("channel".into(), received));
    Ok(ElectricalLink {
        stimulus,
        ap,
        delay,
        gain,
        level,
        counts,
    })
}

fn acoustic_link(
    cfg: &ScenarioConfig,
    frame: &SymbolFrame,
    tx: &AcousticTx,
    ch: &AcousticChannel,
    series: &mut NamedSeries,
    metrics: &mut Metrics,
) -> Result<AcousticLink> {
    let link = &cfg.link;
    let ReceiverConfig::Acoustic(rx) = &cfg.receiver else {
        unreachable!("acoustic receiver");
    };
    let vessel: VesselParams = tx.vessel();
    let counts = link.counts();
    let grid = stage("frame", frame.grid(link.dt()))?;
    let onsets = event_onsets(frame, &counts, tx.spacing());
    let emitted = stage("transmitter", acoustic::click_train(&vessel, tx.amplitude, &onsets, grid))?;
    let medium = ch.medium();
    let clean = stage("channel", acoustic::propagate_air_acoustic(&emitted, &medium, ch.distance))?;
    let delay = ch.distance / medium.c_air;
    let peak = tx.amplitude * medium.gain(ch.distance);
    let threshold = rx.threshold.unwrap_or(0.5 * peak);
    let dead_time = rx.dead_time.unwrap_or_else(|| acoustic::default_dead_time(&vessel));
    let sigma = match link.snr_db {
        Some(snr) => {
            let power = clean.values().iter().map(|x| x * x).sum::<f64>() / clean.len() as f64;
            (power / 10f64.powf(snr / 10.0)).sqrt()
        }
        None => 0.0,
    };
    resp_metric(metrics, "f1_hz", vessel.fundamental());
    resp_metric(metrics, "tau_s", acoustic::damping_time(&vessel));
    resp_metric(metrics, "arrival_delay_s", delay);
    resp_metric(metrics, "received_peak_pa", peak);
    resp_metric(metrics, "p_open_at_peak", acoustic::ms_channel_open_prob(peak, &rx.ms_params()));
    resp_metric(metrics, "threshold_pa", threshold);
    resp_metric(metrics, "dead_time_s", dead_time);
    metrics.insert("n_clicks".into(), json!(onsets.len()));

    series.push(("emission".into(), emitted));
    series.push(("channel".into(), clean.clone()));
    Ok(AcousticLink {
        clean,
        delay,
        sigma,
        threshold,
        dead_time,
        counts,
    })
}
