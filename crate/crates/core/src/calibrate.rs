//! Calibration of channel efficiencies from Poissonian reference pulses.
//!
//! Coherent pulses of known mean intensity make every channel's zero-count
//! probability a closed form, `p'_l = exp(-mu eta_l)`, so the channel
//! efficiencies follow by direct inversion of the per-channel marginals; no
//! coincidence information is needed. Given assumed binary-detector
//! efficiencies and loop survival, the splitter transmissions of the
//! substituting scheme then come from inverting the splitter-tree product.

use crate::error::{Error, Result};
use crate::fmt;
use crate::simulate::EventHistogram;

/// Inversions landing in (1, 1 + slack] are clamped to 1 and flagged;
/// anything larger is treated as an inconsistent calibration.
pub const CLAMP_SLACK: f64 = 0.05;

/// Channel efficiencies estimated from zero-count frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyEstimate {
    pub efficiencies: Vec<f64>,
    /// Per channel, set when the raw inversion exceeded one and was clamped.
    pub clamped: Vec<bool>,
}

/// Inverts the Poisson zero-count law `p'_l = exp(-mu eta_l)` channel by
/// channel.
pub fn estimate_efficiencies(
    zero_count_freqs: &[f64],
    source_mean: f64,
) -> Result<EfficiencyEstimate> {
    if source_mean.is_nan() || source_mean <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "calibration source mean is {source_mean}, must be positive"
        )));
    }
    let mut efficiencies = Vec::with_capacity(zero_count_freqs.len());
    let mut clamped = Vec::with_capacity(zero_count_freqs.len());
    for (l, &freq) in zero_count_freqs.iter().enumerate() {
        if freq.is_nan() || freq <= 0.0 {
            return Err(Error::UnresolvableCalibration { channel: l + 1 });
        }
        if freq > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "zero-count frequency of channel {} is {freq}, must lie in (0, 1]",
                l + 1
            )));
        }
        let raw = -freq.ln() / source_mean;
        if raw > 1.0 + CLAMP_SLACK {
            return Err(Error::InconsistentCalibration {
                channel: l + 1,
                value: raw,
            });
        }
        clamped.push(raw > 1.0);
        efficiencies.push(raw.min(1.0));
    }
    Ok(EfficiencyEstimate {
        efficiencies,
        clamped,
    })
}

/// Recovers splitter transmissions from channel efficiencies, given the
/// binary-detector efficiencies and the loop survival factor.
///
/// Exact inverse of the channel-efficiency composition: the first `s - 1`
/// channels determine the `s - 1` transmissions triangularly.
pub fn infer_transmissions(
    efficiencies: &[f64],
    detector_efficiencies: &[f64],
    loop_transmission: f64,
) -> Result<Vec<f64>> {
    if efficiencies.len() != detector_efficiencies.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} channel efficiencies vs {} detector efficiencies",
            efficiencies.len(),
            detector_efficiencies.len()
        )));
    }
    if loop_transmission.is_nan() || loop_transmission <= 0.0 || loop_transmission > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "loop transmission is {loop_transmission}, must lie in (0, 1]"
        )));
    }
    let channels = efficiencies.len();
    let mut transmissions = Vec::with_capacity(channels.saturating_sub(1));
    let mut remaining = 1.0f64;
    for l in 0..channels.saturating_sub(1) {
        let d = detector_efficiencies[l];
        if d.is_nan() || d <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "detector efficiency of channel {} must be positive to factorize",
                l + 1
            )));
        }
        let weight = efficiencies[l] / (d * loop_transmission.powi(l as i32));
        if remaining <= 0.0 {
            return Err(Error::InconsistentTransmission {
                channel: l + 1,
                value: f64::INFINITY,
            });
        }
        let t = weight / remaining;
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            return Err(Error::InconsistentTransmission {
                channel: l + 1,
                value: t,
            });
        }
        let t = t.clamp(0.0, 1.0);
        transmissions.push(t);
        remaining *= 1.0 - t;
    }
    Ok(transmissions)
}

/// Calibration result: the product-level channel efficiencies, plus the
/// factorized splitter geometry when detector assumptions are supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRecord {
    pub channel_efficiencies: Vec<f64>,
    pub clamped: Vec<bool>,
    pub source_mean: f64,
    pub pulses: u64,
    /// Transmissions implied by the assumed detector efficiencies, when
    /// factorization was requested.
    pub implied_transmissions: Option<Vec<f64>>,
    pub assumed_detector_efficiencies: Option<Vec<f64>>,
    pub loop_transmission: f64,
}

impl CalibrationRecord {
    /// Estimates channel efficiencies from the zero-count marginals of a
    /// calibration histogram taken with Poissonian light of known mean.
    pub fn from_histogram(hist: &EventHistogram, source_mean: f64) -> Result<Self> {
        let estimate = estimate_efficiencies(&hist.zero_count_frequencies(), source_mean)?;
        Ok(Self {
            channel_efficiencies: estimate.efficiencies,
            clamped: estimate.clamped,
            source_mean,
            pulses: hist.pulses(),
            implied_transmissions: None,
            assumed_detector_efficiencies: None,
            loop_transmission: 1.0,
        })
    }

    /// Factorizes the channel efficiencies into splitter transmissions under
    /// assumed binary-detector efficiencies and loop survival.
    pub fn with_factorization(
        mut self,
        detector_efficiencies: &[f64],
        loop_transmission: f64,
    ) -> Result<Self> {
        let transmissions = infer_transmissions(
            &self.channel_efficiencies,
            detector_efficiencies,
            loop_transmission,
        )?;
        self.implied_transmissions = Some(transmissions);
        self.assumed_detector_efficiencies = Some(detector_efficiencies.to_vec());
        self.loop_transmission = loop_transmission;
        Ok(self)
    }

    /// Structured text record; the factorization section doubles as a
    /// detector-config fragment.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("source_mean = {}\n", fmt::float(self.source_mean)));
        out.push_str(&format!("pulses = {}\n", self.pulses));
        out.push_str(&format!(
            "channel_efficiencies = {}\n",
            fmt::float_list(&self.channel_efficiencies)
        ));
        let clamped: Vec<String> = self.clamped.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("clamped = [{}]\n", clamped.join(", ")));
        if let (Some(transmissions), Some(detectors)) = (
            &self.implied_transmissions,
            &self.assumed_detector_efficiencies,
        ) {
            out.push_str("\n[factorization]\n");
            out.push_str(&format!("channels = {}\n", detectors.len()));
            out.push_str(&format!(
                "transmissions = {}\n",
                fmt::float_list(transmissions)
            ));
            out.push_str(&format!(
                "detector_efficiencies = {}\n",
                fmt::float_list(detectors)
            ));
            out.push_str(&format!(
                "loop_transmission = {}\n",
                fmt::float(self.loop_transmission)
            ));
        }
        out
    }
}
