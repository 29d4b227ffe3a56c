//! Models of multi-channel fiber-loop photon-counting detectors.
//!
//! A fiber-loop detector converts one light pulse into a time sequence of
//! output channels, each read by a binary click/no-click detector, making it
//! equivalent to a splitter tree feeding an array of binary detectors. This
//! crate builds the exact outcome-probability model of such a device over a
//! truncated Fock basis and everything needed to use it:
//!
//! - [`fock`]: truncated photon-number distributions and the Poisson
//!   transform of classical intensity-fluctuation laws;
//! - [`detector`]: channel efficiencies, click/coincidence response
//!   matrices, and the ideal-counter reference model;
//! - [`simulate`]: Monte Carlo click histograms with per-photon routing,
//!   reproducible under any parallel schedule;
//! - [`fisher`]: Fisher information, Cramér-Rao information bounds, and the
//!   equivalent ideal-detector efficiency;
//! - [`reconstruct`]: maximum-likelihood inversion of event frequencies by
//!   multiplicative Expectation-Maximization;
//! - [`calibrate`]: channel-efficiency estimation from Poissonian reference
//!   pulses and splitter-transmission factorization.

pub mod calibrate;
pub mod detector;
pub mod error;
pub mod fisher;
pub mod fock;
pub mod quad;
pub mod reconstruct;
pub mod simulate;
pub mod solve;

mod fmt;

pub use calibrate::{estimate_efficiencies, infer_transmissions, CalibrationRecord};
pub use detector::{
    ideal_detector_probs, no_coincidence_probs, outcome_probs, response_matrix,
    response_matrix_from_efficiencies, two_channel_probs, zero_arbitrary_prob, ChannelOutcome,
    DetectorConfig, OutcomePattern, ResponseMatrix,
};
pub use error::{Error, Result};
pub use fisher::{
    cr_information, equivalent_efficiency, fisher_matrix, fisher_report, loop_information,
    EquivalentEfficiency, FisherMatrix, FisherReport,
};
pub use fock::{
    hs_distance, poisson_transform, truncated_state, IntensityLaw, PhotonDistribution,
    TransformedDistribution,
};
pub use reconstruct::{em_reconstruct, em_step, kl_divergence, EmOptions, EmResult};
pub use simulate::{sample_events, EventHistogram};
