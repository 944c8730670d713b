//! # phytolink
//!
//! Desk-scale simulator of plant-to-plant communication links. Each modality
//! is modelled as transmitter → channel → receiver, and a shared link layer
//! turns the received signals into symbol decisions and error rates.
//!
//! | module | modality |
//! |--------|----------|
//! | [`transmitter`] | leaf/root emission models, CSK and RSK modulators |
//! | [`channel_air`] | aboveground advection–diffusion–reaction channel |
//! | [`channel_soil`] | belowground porous-media channel and breakthrough curves |
//! | [`receiver`] | Robin and saturating uptake, internal accumulation |
//! | [`mycorrhizal`] | fungal network links on graph Laplacians |
//! | [`electrical`] | cable equation, action and variation potentials |
//! | [`acoustic`] | cavitation clicks, ultrasonic propagation, MS channels |
//! | [`linkstats`] | detection, ISI metrics, SNR and Monte Carlo SER |
//! | [`scenario`] | TOML scenario runner with CSV/JSON export |
//!
//! Shared signal plumbing lives in [`numerics`].

pub mod acoustic;
pub mod channel_air;
pub mod channel_soil;
pub mod electrical;
pub mod error;
pub mod linkstats;
pub mod mycorrhizal;
pub mod numerics;
pub mod receiver;
pub mod scenario;
pub mod transmitter;

pub use channel_air::{ChannelResponse, Medium};
pub use error::{Error, Result};
pub use numerics::{RandomSource, TimeGrid, TimeSeries, Unit};
pub use transmitter::{EmissionProfile, SymbolFrame};
