//! Outcome-probability model of an s-channel fiber-loop detector.
//!
//! The device is equivalent to a splitter tree feeding one binary detector
//! per output channel. Photons are routed independently, so the probability
//! that one input photon produces a click in channel `l` is a single number
//! `eta_l` (splitter weight x loop survival x detector efficiency). All
//! click/coincidence statistics over a truncated Fock basis follow from the
//! zero-arbitrary probabilities `(1 - sum of masked eta)^n` combined by
//! inclusion-exclusion, collected in a column-stochastic response matrix.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::PhotonDistribution;

/// Resource guard on the 2^s outcome count.
pub const MAX_CHANNELS: usize = 16;

/// Slack allowed when validating efficiency sums and column stochasticity.
const SUM_TOL: f64 = 1e-9;

/// Physical description of the detector: splitter transmissions of the
/// substituting scheme, per-channel binary-detector efficiencies, and an
/// optional per-round-trip loop survival factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetectorConfig")]
pub struct DetectorConfig {
    channels: usize,
    transmissions: Vec<f64>,
    detector_efficiencies: Vec<f64>,
    loop_transmission: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetectorConfig {
    channels: usize,
    #[serde(default)]
    transmissions: Vec<f64>,
    detector_efficiencies: Vec<f64>,
    #[serde(default = "default_loop_transmission")]
    loop_transmission: f64,
}

fn default_loop_transmission() -> f64 {
    1.0
}

impl TryFrom<RawDetectorConfig> for DetectorConfig {
    type Error = Error;

    fn try_from(raw: RawDetectorConfig) -> Result<Self> {
        DetectorConfig::new(
            raw.channels,
            raw.transmissions,
            raw.detector_efficiencies,
            raw.loop_transmission,
        )
    }
}

impl DetectorConfig {
    pub fn new(
        channels: usize,
        transmissions: Vec<f64>,
        detector_efficiencies: Vec<f64>,
        loop_transmission: f64,
    ) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidParameter(
                "detector needs at least one output channel".into(),
            ));
        }
        if channels > MAX_CHANNELS {
            return Err(Error::TooManyChannels {
                channels,
                max: MAX_CHANNELS,
            });
        }
        if transmissions.len() != channels - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} transmissions supplied, expected {} for {} channels",
                transmissions.len(),
                channels - 1,
                channels
            )));
        }
        if detector_efficiencies.len() != channels {
            return Err(Error::DimensionMismatch(format!(
                "{} detector efficiencies supplied, expected {}",
                detector_efficiencies.len(),
                channels
            )));
        }
        for (i, &t) in transmissions.iter().enumerate() {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidParameter(format!(
                    "transmission {} is {t}, must lie in [0, 1]",
                    i + 1
                )));
            }
        }
        for (i, &e) in detector_efficiencies.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidParameter(format!(
                    "detector efficiency {} is {e}, must lie in [0, 1]",
                    i + 1
                )));
            }
        }
        if loop_transmission.is_nan() || loop_transmission <= 0.0 || loop_transmission > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "loop transmission is {loop_transmission}, must lie in (0, 1]"
            )));
        }
        Ok(Self {
            channels,
            transmissions,
            detector_efficiencies,
            loop_transmission,
        })
    }

    /// Lossless detector splitting the pulse equally over `channels` outputs,
    /// each read by a binary detector of the given efficiency.
    pub fn balanced(channels: usize, detector_efficiency: f64) -> Result<Self> {
        let transmissions: Vec<f64> = (0..channels.saturating_sub(1))
            .map(|l| 1.0 / (channels - l) as f64)
            .collect();
        Self::new(
            channels,
            transmissions,
            vec![detector_efficiency; channels],
            1.0,
        )
    }

    /// Same geometry with every binary detector replaced by one of the given
    /// efficiency.
    pub fn with_uniform_detector_efficiency(&self, efficiency: f64) -> Result<Self> {
        Self::new(
            self.channels,
            self.transmissions.clone(),
            vec![efficiency; self.channels],
            self.loop_transmission,
        )
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn transmissions(&self) -> &[f64] {
        &self.transmissions
    }

    pub fn detector_efficiencies(&self) -> &[f64] {
        &self.detector_efficiencies
    }

    pub fn loop_transmission(&self) -> f64 {
        self.loop_transmission
    }

    /// Probability that one input photon reaches each output channel of the
    /// splitter tree (before loop loss and detection).
    pub fn splitter_weights(&self) -> Vec<f64> {
        let mut weights = Vec::with_capacity(self.channels);
        let mut remaining = 1.0;
        for &t in &self.transmissions {
            weights.push(remaining * t);
            remaining *= 1.0 - t;
        }
        weights.push(remaining);
        weights
    }

    /// Probability that one input photon produces a click in each channel:
    /// splitter weight x loop survival^(l-1) x detector efficiency.
    ///
    /// The sum over channels never exceeds one.
    pub fn channel_efficiencies(&self) -> Vec<f64> {
        self.splitter_weights()
            .iter()
            .zip(&self.detector_efficiencies)
            .enumerate()
            .map(|(l, (q, d))| q * d * self.loop_transmission.powi(l as i32))
            .collect()
    }
}

/// Per-channel record of one detection event: click, no click, or "don't
/// care" (arbitrary).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelOutcome {
    NoClick,
    Click,
    Arbitrary,
}

/// An s-symbol pattern over {0, 1, arbitrary}; channel 1 is the leftmost
/// symbol (first-exit channel in time order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomePattern {
    symbols: Vec<ChannelOutcome>,
}

impl OutcomePattern {
    pub fn new(symbols: Vec<ChannelOutcome>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter(
                "outcome pattern needs at least one channel".into(),
            ));
        }
        Ok(Self { symbols })
    }

    /// Decodes a definite (no-arbitrary) pattern from an outcome index; bit
    /// `l` of the index is the click flag of channel `l + 1`.
    pub fn from_index(index: usize, channels: usize) -> Self {
        let symbols = (0..channels)
            .map(|l| {
                if index >> l & 1 == 1 {
                    ChannelOutcome::Click
                } else {
                    ChannelOutcome::NoClick
                }
            })
            .collect();
        Self { symbols }
    }

    pub fn channels(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[ChannelOutcome] {
        &self.symbols
    }

    /// Outcome index of a definite pattern; `None` if any symbol is
    /// arbitrary.
    pub fn index(&self) -> Option<usize> {
        let mut index = 0;
        for (l, s) in self.symbols.iter().enumerate() {
            match s {
                ChannelOutcome::Click => index |= 1 << l,
                ChannelOutcome::NoClick => {}
                ChannelOutcome::Arbitrary => return None,
            }
        }
        Some(index)
    }
}

impl std::str::FromStr for OutcomePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(ChannelOutcome::NoClick),
                '1' => Ok(ChannelOutcome::Click),
                '∀' | '*' => Ok(ChannelOutcome::Arbitrary),
                other => Err(Error::Parse(format!(
                    "invalid outcome symbol {other:?}, expected 0, 1, or ∀"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }
}

impl fmt::Display for OutcomePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            let c = match s {
                ChannelOutcome::NoClick => '0',
                ChannelOutcome::Click => '1',
                ChannelOutcome::Arbitrary => '∀',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Renders outcome index `j` as its s-character click bitstring.
pub fn outcome_bitstring(index: usize, channels: usize) -> String {
    (0..channels)
        .map(|l| if index >> l & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn validate_efficiencies(etas: &[f64]) -> Result<()> {
    if etas.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one channel efficiency required".into(),
        ));
    }
    for (l, &e) in etas.iter().enumerate() {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::InvalidParameter(format!(
                "channel efficiency {} is {e}, must lie in [0, 1]",
                l + 1
            )));
        }
    }
    let total: f64 = etas.iter().sum();
    if total > 1.0 + SUM_TOL {
        return Err(Error::InvalidParameter(format!(
            "channel efficiencies sum to {total}, exceeding 1"
        )));
    }
    Ok(())
}

/// Probability of detecting nothing in the pattern's `0` channels while
/// ignoring its arbitrary channels: `sum_k (1 - sum of masked eta)^k rho_k`.
///
/// Patterns containing a click symbol are rejected; this building block only
/// handles zero-arbitrary events.
pub fn zero_arbitrary_prob(
    pattern: &OutcomePattern,
    rho: &PhotonDistribution,
    efficiencies: &[f64],
) -> Result<f64> {
    if pattern.channels() != efficiencies.len() {
        return Err(Error::DimensionMismatch(format!(
            "pattern has {} channels but {} efficiencies were supplied",
            pattern.channels(),
            efficiencies.len()
        )));
    }
    if let Some(channel) = pattern
        .symbols()
        .iter()
        .position(|s| *s == ChannelOutcome::Click)
    {
        return Err(Error::ClickInPattern {
            channel: channel + 1,
        });
    }
    validate_efficiencies(efficiencies)?;
    let masked: f64 = pattern
        .symbols()
        .iter()
        .zip(efficiencies)
        .filter(|(s, _)| **s == ChannelOutcome::NoClick)
        .map(|(_, &e)| e)
        .sum();
    let base = (1.0 - masked).max(0.0);
    let mut power = 1.0;
    let mut total = 0.0;
    for &p in rho.probs() {
        total += power * p;
        power *= base;
    }
    Ok(total)
}

/// Column-stochastic map from Fock occupation to outcome-pattern
/// probabilities: entry `(j, i)` is the probability of click pattern `j`
/// given exactly `i` input photons.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    matrix: DMatrix<f64>,
    channels: usize,
    cutoff: usize,
}

impl ResponseMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn outcomes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, outcome: usize, fock: usize) -> f64 {
        self.matrix[(outcome, fock)]
    }

    /// CSV rendering: header row of Fock indices, first column of outcome
    /// bitstrings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome");
        for i in 0..=self.cutoff {
            out.push_str(&format!(",{i}"));
        }
        out.push('\n');
        for j in 0..self.outcomes() {
            out.push_str(&outcome_bitstring(j, self.channels));
            for i in 0..=self.cutoff {
                out.push(',');
                out.push_str(&crate::fmt::float(self.matrix[(j, i)]));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the response matrix of a detector configuration over Fock states
/// `0..=cutoff`.
pub fn response_matrix(config: &DetectorConfig, cutoff: usize) -> Result<ResponseMatrix> {
    response_matrix_from_efficiencies(&config.channel_efficiencies(), cutoff)
}

/// Builds the response matrix directly from per-channel click probabilities.
///
/// Each entry comes from inclusion-exclusion over the subsets of the
/// pattern's click positions applied to zero-arbitrary probabilities, which
/// reproduces the recursive coincidence construction exactly. Columns are
/// renormalized to absorb rounding, keeping them stochastic to 1e-15.
pub fn response_matrix_from_efficiencies(etas: &[f64], cutoff: usize) -> Result<ResponseMatrix> {
    validate_efficiencies(etas)?;
    let channels = etas.len();
    if channels > MAX_CHANNELS {
        return Err(Error::TooManyChannels {
            channels,
            max: MAX_CHANNELS,
        });
    }
    let rows = 1usize << channels;
    let cols = cutoff + 1;

    // Sum of efficiencies over every channel mask.
    let mut mask_sum = vec![0.0f64; rows];
    for mask in 1..rows {
        let lowest = mask.trailing_zeros() as usize;
        mask_sum[mask] = mask_sum[mask & (mask - 1)] + etas[lowest];
    }
    let total = mask_sum[rows - 1];

    let mut matrix = DMatrix::<f64>::zeros(rows, cols);
    for ones in 0..rows {
        let click_count = ones.count_ones();
        // Enumerate subsets B of the click positions; the pattern "arbitrary
        // on B, zero elsewhere" has no-click weight 1 - (total - sum over B).
        let mut subset = ones;
        loop {
            let sign = if (click_count - subset.count_ones()) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let base = (1.0 - (total - mask_sum[subset])).max(0.0);
            let mut power = 1.0;
            for i in 0..cols {
                matrix[(ones, i)] += sign * power;
                power *= base;
            }
            if subset == 0 {
                break;
            }
            subset = (subset - 1) & ones;
        }
    }

    for i in 0..cols {
        let mut column = matrix.column_mut(i);
        for v in column.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        let sum: f64 = column.iter().sum();
        debug_assert!(
            (sum - 1.0).abs() < SUM_TOL,
            "column {i} sums to {sum} before renormalization"
        );
        column /= sum;
    }

    Ok(ResponseMatrix {
        matrix,
        channels,
        cutoff,
    })
}

/// Outcome probabilities `p = C rho` for a pulse with the given statistics.
pub fn outcome_probs(response: &ResponseMatrix, rho: &PhotonDistribution) -> Result<Vec<f64>> {
    if response.cutoff() != rho.cutoff() {
        return Err(Error::CutoffMismatch {
            left: response.cutoff(),
            right: rho.cutoff(),
        });
    }
    let p = response.matrix() * DMatrix::from_column_slice(rho.probs().len(), 1, rho.probs());
    Ok(p.iter().map(|&v| v.max(0.0)).collect())
}

/// Closed-form probabilities of the four outcomes of a two-channel detector
/// with detector efficiencies `eta1`, `eta2` and splitting ratio `t`,
/// returned in index order `(p00, p10, p01, p11)`.
pub fn two_channel_probs(
    rho: &PhotonDistribution,
    eta1: f64,
    eta2: f64,
    t: f64,
) -> Result<[f64; 4]> {
    for (name, v) in [("eta1", eta1), ("eta2", eta2), ("transmission", t)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "{name} is {v}, must lie in [0, 1]"
            )));
        }
    }
    let a = eta1 * t;
    let b = eta2 * (1.0 - t);
    if a + b > 1.0 + SUM_TOL {
        return Err(Error::InvalidParameter(format!(
            "combined channel efficiency {} exceeds 1",
            a + b
        )));
    }
    let mut p00 = 0.0;
    let mut quiet_second = 0.0; // no click in channel 2, channel 1 arbitrary
    let mut quiet_first = 0.0;
    let (mut pw_both, mut pw_b, mut pw_a) = (1.0, 1.0, 1.0);
    for &p in rho.probs() {
        p00 += pw_both * p;
        quiet_second += pw_b * p;
        quiet_first += pw_a * p;
        pw_both *= 1.0 - a - b;
        pw_b *= 1.0 - b;
        pw_a *= 1.0 - a;
    }
    let p10 = (quiet_second - p00).max(0.0);
    let p01 = (quiet_first - p00).max(0.0);
    let p11 = (1.0 - p00 - p10 - p01).max(0.0);
    Ok([p00, p10, p01, p11])
}

/// Response matrix of the ideal photon counter of the given quantum
/// efficiency: column `m` is the binomial smear of `m` input photons.
pub fn ideal_response_matrix(efficiency: f64, cutoff: usize) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::InvalidParameter(format!(
            "detector efficiency is {efficiency}, must lie in [0, 1]"
        )));
    }
    let dim = cutoff + 1;
    let mut matrix = DMatrix::zeros(dim, dim);
    for m in 0..dim {
        if efficiency == 1.0 {
            matrix[(m, m)] = 1.0;
            continue;
        }
        // Binomial(m, efficiency) via the pmf recurrence.
        let mut p = (1.0 - efficiency).powi(m as i32);
        for n in 0..=m {
            matrix[(n, m)] = p;
            if n < m {
                p *= (m - n) as f64 / (n + 1) as f64 * efficiency / (1.0 - efficiency);
            }
        }
    }
    Ok(matrix)
}

/// Count distribution of the ideal photon counter: Bernoulli smearing of the
/// input statistics.
pub fn ideal_detector_probs(rho: &PhotonDistribution, efficiency: f64) -> Result<Vec<f64>> {
    let matrix = ideal_response_matrix(efficiency, rho.cutoff())?;
    let p = matrix * DMatrix::from_column_slice(rho.probs().len(), 1, rho.probs());
    Ok(p.iter().copied().collect())
}

/// Per-channel zero-detection probabilities when coincidences are ignored
/// and each channel is treated as an independent binary detector.
pub fn no_coincidence_probs(rho: &PhotonDistribution, efficiencies: &[f64]) -> Result<Vec<f64>> {
    validate_efficiencies(efficiencies)?;
    Ok(efficiencies
        .iter()
        .map(|&eta| {
            let mut power = 1.0;
            let mut total = 0.0;
            for &p in rho.probs() {
                total += power * p;
                power *= 1.0 - eta;
            }
            total
        })
        .collect())
}
