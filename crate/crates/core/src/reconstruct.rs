//! Maximum-likelihood reconstruction of photon statistics from event
//! frequencies.
//!
//! The outcome model `p = C rho` with nonnegative `rho` is a linear-positive
//! inverse problem; the multiplicative Expectation-Maximization update
//! `rho_k <- rho_k sum_j f_j c_jk / p_j` increases the multinomial
//! log-likelihood `sum_j f_j log p_j` monotonically and converges to the
//! maximum-likelihood state, equivalently the minimizer of the
//! Kullback-Leibler divergence from data to model. Column stochasticity of
//! `C` keeps every iterate normalized; zero components stay zero, so the
//! default start is strictly positive.

use crate::detector::ResponseMatrix;
use crate::error::{Error, Result};
use crate::fmt;
use crate::fock::PhotonDistribution;

/// Stopping and budget parameters of the EM iteration.
#[derive(Debug, Clone, Copy)]
pub struct EmOptions {
    /// Iteration budget.
    pub max_iter: usize,
    /// Stop once the per-iteration likelihood increase falls below this
    /// threshold (nats).
    pub tol: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            tol: 1e-10,
        }
    }
}

/// Outcome of an EM run.
#[derive(Debug, Clone)]
pub struct EmResult {
    pub estimate: PhotonDistribution,
    /// Number of EM steps performed.
    pub iterations: usize,
    /// Kullback-Leibler divergence from data to the fitted model (nats).
    pub final_divergence: f64,
    pub converged: bool,
    /// Log-likelihood after every iterate, starting with the initial state.
    pub likelihood_trace: Vec<f64>,
}

impl EmResult {
    /// Structured text report of the reconstruction.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("converged = {}\n", self.converged));
        out.push_str(&format!("iterations = {}\n", self.iterations));
        out.push_str(&format!(
            "final_divergence = {}\n",
            fmt::float(self.final_divergence)
        ));
        out.push_str(&format!("cutoff = {}\n", self.estimate.cutoff()));
        out.push_str(&format!(
            "estimate = {}\n",
            fmt::float_list(self.estimate.probs())
        ));
        out
    }

    /// CSV of the likelihood trace, one row per iterate.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,log_likelihood\n");
        for (i, ll) in self.likelihood_trace.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", fmt::float(*ll)));
        }
        out
    }
}

/// Kullback-Leibler divergence `sum_j f_j log(f_j / p_j)` in nats.
///
/// Zero-frequency terms contribute nothing; a zero model probability under
/// observed frequency makes the divergence infinite, which is returned as
/// the flag value rather than an error.
pub fn kl_divergence(frequencies: &[f64], probs: &[f64]) -> Result<f64> {
    if frequencies.len() != probs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} frequencies vs {} probabilities",
            frequencies.len(),
            probs.len()
        )));
    }
    let sum: f64 = frequencies.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "frequencies sum to {sum}, expected 1"
        )));
    }
    let mut divergence = 0.0;
    for (&f, &p) in frequencies.iter().zip(probs) {
        if f <= 0.0 {
            continue;
        }
        if p <= 0.0 {
            return Ok(f64::INFINITY);
        }
        divergence += f * (f / p).ln();
    }
    Ok(divergence.max(0.0))
}

fn validate_frequencies(c: &ResponseMatrix, frequencies: &[f64]) -> Result<()> {
    if frequencies.len() != c.outcomes() {
        return Err(Error::DimensionMismatch(format!(
            "{} frequencies supplied for {} outcomes",
            frequencies.len(),
            c.outcomes()
        )));
    }
    for (j, &f) in frequencies.iter().enumerate() {
        if f.is_nan() || f < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "frequency of outcome {j} is {f}, must be nonnegative"
            )));
        }
    }
    Ok(())
}

fn model_probs(c: &ResponseMatrix, rho: &PhotonDistribution) -> Vec<f64> {
    let m = c.matrix();
    (0..m.nrows())
        .map(|j| {
            rho.probs()
                .iter()
                .enumerate()
                .map(|(i, &r)| m[(j, i)] * r)
                .sum()
        })
        .collect()
}

/// One multiplicative EM update.
///
/// Column stochasticity of the response matrix makes the update
/// normalization-preserving up to rounding, which is absorbed by an explicit
/// renormalization. Zero components of `rho` are fixed points of the update.
pub fn em_step(
    rho: &PhotonDistribution,
    c: &ResponseMatrix,
    frequencies: &[f64],
) -> Result<PhotonDistribution> {
    if rho.cutoff() != c.cutoff() {
        return Err(Error::CutoffMismatch {
            left: rho.cutoff(),
            right: c.cutoff(),
        });
    }
    validate_frequencies(c, frequencies)?;
    let probs = model_probs(c, rho);
    for (j, (&f, &p)) in frequencies.iter().zip(&probs).enumerate() {
        if f > 0.0 && p <= 0.0 {
            return Err(Error::SupportViolation {
                outcome: j,
                frequency: f,
            });
        }
    }
    let m = c.matrix();
    let next: Vec<f64> = rho
        .probs()
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            if r == 0.0 {
                return 0.0;
            }
            let gain: f64 = frequencies
                .iter()
                .zip(&probs)
                .enumerate()
                .filter(|(_, (&f, _))| f > 0.0)
                .map(|(j, (&f, &p))| f * m[(j, k)] / p)
                .sum();
            r * gain
        })
        .collect();
    debug_assert!((next.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    PhotonDistribution::normalized(next)
}

fn log_likelihood(c: &ResponseMatrix, rho: &PhotonDistribution, frequencies: &[f64]) -> f64 {
    model_probs(c, rho)
        .iter()
        .zip(frequencies)
        .filter(|(_, &f)| f > 0.0)
        .map(|(&p, &f)| f * p.ln())
        .sum()
}

/// Iterates [`em_step`] from a strictly positive start until the likelihood
/// gain per iteration drops below `options.tol` or the budget runs out.
///
/// Exhausting the budget is not an error: the result carries
/// `converged = false` together with the full likelihood trace.
pub fn em_reconstruct(
    c: &ResponseMatrix,
    frequencies: &[f64],
    init: Option<&PhotonDistribution>,
    options: &EmOptions,
) -> Result<EmResult> {
    let uniform;
    let start = match init {
        Some(rho) => rho,
        None => {
            uniform = PhotonDistribution::normalized(vec![1.0; c.cutoff() + 1])?;
            &uniform
        }
    };
    if start.probs().iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidParameter(
            "EM start must be strictly positive; zero components can never recover".into(),
        ));
    }

    let mut rho = start.clone();
    let mut trace = vec![log_likelihood(c, &rho, frequencies)];
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..options.max_iter {
        rho = em_step(&rho, c, frequencies)?;
        iterations += 1;
        let ll = log_likelihood(c, &rho, frequencies);
        let gain = ll - trace[trace.len() - 1];
        trace.push(ll);
        if gain < options.tol {
            converged = true;
            break;
        }
    }

    let final_divergence = kl_divergence(frequencies, &model_probs(c, &rho))?;
    Ok(EmResult {
        estimate: rho,
        iterations,
        final_divergence,
        converged,
        likelihood_trace: trace,
    })
}
