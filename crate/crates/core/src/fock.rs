//! Truncated photon-number distributions and the classical intensity laws
//! that generate them.
//!
//! A pulse whose intensity fluctuates according to a classical law `P(I)`
//! carries photon statistics given by the Poisson transform
//! `rho_n = integral I^n/n! exp(-I) P(I) dI`. The four laws supported here
//! (stable, two-component, uniform, exponential amplitude) all admit closed
//! forms; an adaptive-quadrature route is kept alongside as an independent
//! cross-check for the continuous laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson_panels;

/// Slack allowed on probability-vector normalization.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default truncation-tail threshold above which a transform is flagged.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-6;

/// Absolute quadrature tolerance per photon-number component.
const QUAD_TOL: f64 = 1e-12;

/// Probability vector over photon numbers `0..=cutoff`.
///
/// Entries are the diagonal density-matrix elements of the pulse. The vector
/// is nonnegative and sums to one within [`NORMALIZATION_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
}

impl PhotonDistribution {
    /// Builds a distribution from an already-normalized probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter(
                "photon distribution needs at least the vacuum component".into(),
            ));
        }
        for (n, &p) in probs.iter().enumerate() {
            if p.is_nan() || p < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "photon probability for n={n} is {p}, must be nonnegative"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "photon probabilities sum to {sum}, expected 1 within {NORMALIZATION_TOL:e}"
            )));
        }
        let mut probs = probs;
        // Absorb the residual rounding so downstream sums start from the best
        // representable normalization.
        for p in &mut probs {
            *p /= sum;
        }
        Ok(Self { probs })
    }

    /// Builds a distribution from nonnegative weights, rescaling them to sum
    /// to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter(
                "photon distribution needs at least the vacuum component".into(),
            ));
        }
        for (n, &w) in weights.iter().enumerate() {
            if w.is_nan() || w < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "photon weight for n={n} is {w}, must be nonnegative"
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::InvalidParameter(
                "photon weights sum to zero; nothing to normalize".into(),
            ));
        }
        let mut probs = weights;
        for p in &mut probs {
            *p /= sum;
        }
        Ok(Self { probs })
    }

    /// All probability on the zero-photon component.
    pub fn vacuum(cutoff: usize) -> Self {
        let mut probs = vec![0.0; cutoff + 1];
        probs[0] = 1.0;
        Self { probs }
    }

    /// Point mass on exactly `n` photons.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InvalidParameter(format!(
                "Fock component {n} exceeds cutoff {cutoff}"
            )));
        }
        let mut probs = vec![0.0; cutoff + 1];
        probs[n] = 1.0;
        Ok(Self { probs })
    }

    /// Poisson statistics of the given mean, truncated and renormalized.
    pub fn poisson(mean: f64, cutoff: usize) -> Result<Self> {
        let law = IntensityLaw::Delta { intensity: mean };
        Ok(poisson_transform(&law, cutoff)?.distribution)
    }

    pub fn cutoff(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Mean photon number of the truncated distribution.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, &p)| n as f64 * p)
            .sum()
    }
}

/// Classical intensity-fluctuation law, in mean photons per pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IntensityLaw {
    /// Stable amplitude: every pulse carries the same intensity.
    Delta { intensity: f64 },
    /// Two-component amplitude: `first` with probability `weight`, otherwise
    /// `second`.
    TwoDelta {
        first: f64,
        second: f64,
        #[serde(default = "default_two_delta_weight")]
        weight: f64,
    },
    /// Intensity uniform over `[center - half_width, center + half_width]`.
    Uniform { center: f64, half_width: f64 },
    /// Exponentially distributed intensity with the given mean.
    Exponential { mean: f64 },
}

fn default_two_delta_weight() -> f64 {
    0.5
}

impl IntensityLaw {
    pub fn validate(&self) -> Result<()> {
        let valid = |v: f64| v.is_finite() && v >= 0.0;
        let reject = |what: &str, v: f64| {
            Err(Error::InvalidParameter(format!(
                "intensity law {what} is {v}, must be finite and nonnegative"
            )))
        };
        match *self {
            IntensityLaw::Delta { intensity } => {
                if !valid(intensity) {
                    return reject("intensity", intensity);
                }
            }
            IntensityLaw::TwoDelta {
                first,
                second,
                weight,
            } => {
                if !valid(first) {
                    return reject("first intensity", first);
                }
                if !valid(second) {
                    return reject("second intensity", second);
                }
                if !(0.0..=1.0).contains(&weight) {
                    return Err(Error::InvalidParameter(format!(
                        "two-delta weight is {weight}, must lie in [0, 1]"
                    )));
                }
            }
            IntensityLaw::Uniform { center, half_width } => {
                if !valid(center) {
                    return reject("center intensity", center);
                }
                if !valid(half_width) {
                    return reject("half-width", half_width);
                }
                if center - half_width < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "uniform law extends to negative intensity ({} - {})",
                        center, half_width
                    )));
                }
            }
            IntensityLaw::Exponential { mean } => {
                if !valid(mean) {
                    return reject("mean intensity", mean);
                }
            }
        }
        Ok(())
    }
}

/// Result of a Poisson transform over a truncated photon-number support.
#[derive(Debug, Clone)]
pub struct TransformedDistribution {
    /// Renormalized distribution over `0..=cutoff`.
    pub distribution: PhotonDistribution,
    /// Probability mass discarded by the truncation.
    pub tail_mass: f64,
    /// Set when the discarded mass exceeds the configured threshold.
    pub tail_warning: bool,
}

/// Maps an intensity law to photon statistics via the Poisson transform,
/// using the closed form of each law.
///
/// The result is renormalized over `0..=cutoff`; the discarded tail mass is
/// reported alongside and flagged when it exceeds [`DEFAULT_TAIL_THRESHOLD`].
pub fn poisson_transform(law: &IntensityLaw, cutoff: usize) -> Result<TransformedDistribution> {
    poisson_transform_with_threshold(law, cutoff, DEFAULT_TAIL_THRESHOLD)
}

/// Same as [`poisson_transform`] with an explicit tail-warning threshold.
pub fn poisson_transform_with_threshold(
    law: &IntensityLaw,
    cutoff: usize,
    tail_threshold: f64,
) -> Result<TransformedDistribution> {
    law.validate()?;
    let raw: Vec<f64> = (0..=cutoff).map(|n| raw_component(law, n)).collect();
    finish_transform(raw, tail_threshold)
}

/// Quadrature route of the Poisson transform for laws with a continuous
/// density (uniform and exponential). Kept independent of the closed forms so
/// the two can cross-check each other.
pub fn poisson_transform_quadrature(
    law: &IntensityLaw,
    cutoff: usize,
) -> Result<TransformedDistribution> {
    law.validate()?;
    let raw: Vec<f64> = match *law {
        IntensityLaw::Uniform { center, half_width } => {
            if half_width == 0.0 {
                return poisson_transform(&IntensityLaw::Delta { intensity: center }, cutoff);
            }
            let lo = center - half_width;
            let hi = center + half_width;
            let density = 1.0 / (2.0 * half_width);
            (0..=cutoff)
                .map(|n| {
                    adaptive_simpson_panels(&|i| poisson_pmf(n, i) * density, lo, hi, QUAD_TOL, 16)
                })
                .collect()
        }
        IntensityLaw::Exponential { mean } => {
            if mean == 0.0 {
                return poisson_transform(&IntensityLaw::Delta { intensity: 0.0 }, cutoff);
            }
            // The integrand is bounded by exp(-I/mean)/mean, so the tail
            // beyond `upper` contributes less than exp(-upper/mean).
            let upper = 35.0 * mean.max(1.0) + 3.0 * cutoff as f64 + 50.0;
            (0..=cutoff)
                .map(|n| {
                    adaptive_simpson_panels(
                        &|i| poisson_pmf(n, i) * (-i / mean).exp() / mean,
                        0.0,
                        upper,
                        QUAD_TOL,
                        64,
                    )
                })
                .collect()
        }
        IntensityLaw::Delta { .. } | IntensityLaw::TwoDelta { .. } => {
            return Err(Error::InvalidParameter(
                "quadrature route requires a continuous intensity density".into(),
            ))
        }
    };
    finish_transform(raw, DEFAULT_TAIL_THRESHOLD)
}

fn finish_transform(mut raw: Vec<f64>, tail_threshold: f64) -> Result<TransformedDistribution> {
    // Cancellation in CDF differences and quadrature can leave components a
    // few ulps below zero.
    for v in &mut raw {
        if *v < 0.0 && *v > -NORMALIZATION_TOL {
            *v = 0.0;
        }
    }
    let kept: f64 = raw.iter().sum();
    let tail_mass = (1.0 - kept).max(0.0);
    let distribution = PhotonDistribution::normalized(raw)?;
    Ok(TransformedDistribution {
        distribution,
        tail_mass,
        tail_warning: tail_mass > tail_threshold,
    })
}

fn raw_component(law: &IntensityLaw, n: usize) -> f64 {
    match *law {
        IntensityLaw::Delta { intensity } => poisson_pmf(n, intensity),
        IntensityLaw::TwoDelta {
            first,
            second,
            weight,
        } => weight * poisson_pmf(n, first) + (1.0 - weight) * poisson_pmf(n, second),
        IntensityLaw::Uniform { center, half_width } => {
            if half_width == 0.0 {
                return poisson_pmf(n, center);
            }
            // integral of I^n e^-I / n! over [lo, hi] equals the difference
            // of regularized incomplete gammas, which for integer order is a
            // difference of Poisson CDFs.
            let lo = center - half_width;
            let hi = center + half_width;
            (poisson_cdf(n, lo) - poisson_cdf(n, hi)) / (2.0 * half_width)
        }
        IntensityLaw::Exponential { mean } => bose_einstein_pmf(n, mean),
    }
}

/// Poisson probability of `n` events at the given mean.
pub fn poisson_pmf(n: usize, mean: f64) -> f64 {
    debug_assert!(mean >= 0.0);
    let mut p = (-mean).exp();
    for k in 1..=n {
        p *= mean / k as f64;
    }
    p
}

/// Probability of at most `n` Poisson events at the given mean.
pub fn poisson_cdf(n: usize, mean: f64) -> f64 {
    let mut term = (-mean).exp();
    let mut sum = term;
    for k in 1..=n {
        term *= mean / k as f64;
        sum += term;
    }
    sum.min(1.0)
}

/// Photon statistics of exponentially fluctuating intensity:
/// `mean^n / (1 + mean)^(n+1)`.
pub fn bose_einstein_pmf(n: usize, mean: f64) -> f64 {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ratio = mean / (1.0 + mean);
    ratio.powi(n as i32) / (1.0 + mean)
}

/// Sum of squared component differences between two distributions of equal
/// cutoff (the Hilbert-Schmidt distance for Fock-diagonal states).
pub fn hs_distance(a: &PhotonDistribution, b: &PhotonDistribution) -> Result<f64> {
    if a.cutoff() != b.cutoff() {
        return Err(Error::CutoffMismatch {
            left: a.cutoff(),
            right: b.cutoff(),
        });
    }
    Ok(a.probs
        .iter()
        .zip(&b.probs)
        .map(|(x, y)| (x - y) * (x - y))
        .sum())
}

/// Pulse carrying at most two photons: `(1 - rho1 - rho2, rho1, rho2)`.
pub fn truncated_state(rho1: f64, rho2: f64) -> Result<PhotonDistribution> {
    if rho1.is_nan() || rho2.is_nan() || rho1 < 0.0 || rho2 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "truncated-state weights ({rho1}, {rho2}) must be nonnegative"
        )));
    }
    if rho1 + rho2 > 1.0 + NORMALIZATION_TOL {
        return Err(Error::InvalidParameter(format!(
            "truncated-state weights sum to {}, exceeding 1",
            rho1 + rho2
        )));
    }
    let vacuum = (1.0 - (rho1 + rho2)).max(0.0);
    PhotonDistribution::new(vec![vacuum, rho1, rho2])
}
