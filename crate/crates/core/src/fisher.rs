//! Fisher information of click-statistics measurements, the Cramér-Rao
//! information bound, and the equivalent ideal-detector efficiency.
//!
//! The photon-number components `rho_1..rho_K` are the free parameters;
//! `rho_0` is eliminated by normalization, so every outcome derivative is
//! `c_jk - c_j0`. The matrix returned here is per trial: all dependence on
//! the pulse count enters through [`cr_information`].

use nalgebra::{DMatrix, DVector};

use crate::detector::{ideal_response_matrix, response_matrix, DetectorConfig};
use crate::error::{Error, Result};
use crate::fmt;
use crate::fock::PhotonDistribution;
use crate::solve::bisect;

/// Condition number above which the Fisher matrix is reported as
/// non-invertible.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Outcome probabilities below this floor are excluded from the information
/// sums.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Absolute tolerance of the equivalent-efficiency root search.
pub const ROOT_TOL: f64 = 1e-6;

/// Per-trial Fisher matrix over the free photon-number components.
///
/// Outcomes with probability below [`PROBABILITY_FLOOR`] are skipped; if such
/// an outcome carries a nonzero derivative the matrix formally diverges
/// there, so the outcome is recorded in `boundary_outcomes` and the returned
/// matrix covers the reduced support only.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    matrix: DMatrix<f64>,
    free: Vec<usize>,
    boundary_outcomes: Vec<usize>,
}

impl FisherMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn free_params(&self) -> &[usize] {
        &self.free
    }

    pub fn boundary_outcomes(&self) -> &[usize] {
        &self.boundary_outcomes
    }

    /// True when a zero-probability outcome with nonzero derivative was
    /// excluded (state on the boundary of the simplex).
    pub fn is_boundary_flagged(&self) -> bool {
        !self.boundary_outcomes.is_empty()
    }
}

/// Computes the per-trial Fisher matrix of a linear outcome model.
///
/// `model` maps Fock occupation to outcome probabilities (rows = outcomes,
/// columns = photon numbers `0..=K`); `free` lists the photon-number indices
/// treated as free parameters and must not contain 0.
pub fn fisher_matrix(
    model: &DMatrix<f64>,
    rho: &PhotonDistribution,
    free: &[usize],
) -> Result<FisherMatrix> {
    let cutoff = rho.cutoff();
    if model.ncols() != cutoff + 1 {
        return Err(Error::DimensionMismatch(format!(
            "model has {} Fock columns but the state has cutoff {}",
            model.ncols(),
            cutoff
        )));
    }
    if free.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one free photon-number component required".into(),
        ));
    }
    let mut seen = vec![false; cutoff + 1];
    for &k in free {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "component 0 is fixed by normalization and cannot be free".into(),
            ));
        }
        if k > cutoff {
            return Err(Error::InvalidParameter(format!(
                "free component {k} exceeds cutoff {cutoff}"
            )));
        }
        if seen[k] {
            return Err(Error::InvalidParameter(format!(
                "free component {k} listed twice"
            )));
        }
        seen[k] = true;
    }

    let probs = model * DVector::from_column_slice(rho.probs());
    let dim = free.len();
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut boundary = Vec::new();
    let mut derivative = vec![0.0; dim];

    for j in 0..model.nrows() {
        for (slot, &k) in free.iter().enumerate() {
            derivative[slot] = model[(j, k)] - model[(j, 0)];
        }
        let p = probs[j];
        if p < PROBABILITY_FLOOR {
            if derivative.iter().any(|&d| d != 0.0) {
                boundary.push(j);
            }
            continue;
        }
        for k in 0..dim {
            for l in k..dim {
                let term = derivative[k] * derivative[l] / p;
                matrix[(k, l)] += term;
                if l != k {
                    matrix[(l, k)] += term;
                }
            }
        }
    }

    Ok(FisherMatrix {
        matrix,
        free: free.to_vec(),
        boundary_outcomes: boundary,
    })
}

fn eigenvalues(fisher: &FisherMatrix) -> Vec<f64> {
    fisher
        .matrix
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Ratio of extreme eigenvalues; infinite when the matrix is singular.
pub fn condition_number(fisher: &FisherMatrix) -> f64 {
    let eig = eigenvalues(fisher);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Cramér-Rao information bound `1 / (N tr F^-1)` for `pulses` trials of the
/// per-trial Fisher matrix.
pub fn cr_information(fisher: &FisherMatrix, pulses: u64) -> Result<f64> {
    if pulses == 0 {
        return Err(Error::InvalidParameter(
            "information requires at least one pulse".into(),
        ));
    }
    let eig = eigenvalues(fisher);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if min <= 0.0 || condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition });
    }
    let trace_inverse: f64 = eig.iter().map(|&l| 1.0 / l).sum();
    Ok(1.0 / (pulses as f64 * trace_inverse))
}

fn validate_truncated_pair(rho1: f64, rho2: f64) -> Result<()> {
    if rho1.is_nan() || rho2.is_nan() || rho1 < 0.0 || rho2 < 0.0 || rho1 + rho2 > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "({rho1}, {rho2}) is not a valid one/two-photon weight pair"
        )));
    }
    if rho1 == 0.0 && rho2 == 0.0 {
        return Err(Error::InvalidParameter(
            "vacuum pulses carry no estimable parameters".into(),
        ));
    }
    Ok(())
}

fn validate_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!(
            "{name} is {v}, must lie in [0, 1]"
        )));
    }
    Ok(())
}

/// Leading-order per-pulse information of the two-channel loop detector with
/// equal binary-detector efficiencies `eta` and splitting ratio
/// `transmission`: `2 tau eta^2 / (5 rho2)` for two-photon content, falling
/// back to `2 eta / rho1 + 2 (1 - tau) eta^2` when `rho2 = 0`.
pub fn loop_info_approx(rho1: f64, rho2: f64, eta: f64, transmission: f64) -> Result<f64> {
    validate_truncated_pair(rho1, rho2)?;
    validate_unit("eta", eta)?;
    validate_unit("transmission", transmission)?;
    let tau = transmission * (1.0 - transmission);
    if rho2 > 0.0 {
        Ok(2.0 * tau * eta * eta / (5.0 * rho2))
    } else {
        Ok(2.0 * eta / rho1 + 2.0 * (1.0 - tau) * eta * eta)
    }
}

/// Leading-order per-pulse information of the ideal counter of efficiency
/// `efficiency`: `efficiency^2 / (5 rho2)`, or `2 efficiency / rho1` when
/// `rho2 = 0`.
pub fn ideal_info_approx(rho1: f64, rho2: f64, efficiency: f64) -> Result<f64> {
    validate_truncated_pair(rho1, rho2)?;
    validate_unit("efficiency", efficiency)?;
    if rho2 > 0.0 {
        Ok(efficiency * efficiency / (5.0 * rho2))
    } else {
        Ok(2.0 * efficiency / rho1)
    }
}

/// Quantum efficiency of the ideal counter matching the detector's exact
/// per-pulse information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentEfficiency {
    pub value: f64,
    /// Set when the detector informs at least as well as the perfect counter
    /// (the root saturates at efficiency one).
    pub saturated: bool,
}

/// Exact per-pulse information of the detector for the given state, over
/// free components `1..=K`.
pub fn loop_information(config: &DetectorConfig, rho: &PhotonDistribution) -> Result<f64> {
    let free = all_free(rho)?;
    let model = response_matrix(config, rho.cutoff())?;
    let fisher = fisher_matrix(model.matrix(), rho, &free)?;
    cr_information(&fisher, 1)
}

fn all_free(rho: &PhotonDistribution) -> Result<Vec<usize>> {
    if rho.cutoff() == 0 {
        return Err(Error::InvalidParameter(
            "vacuum-only states carry no estimable parameters".into(),
        ));
    }
    Ok((1..=rho.cutoff()).collect())
}

fn ideal_information(efficiency: f64, rho: &PhotonDistribution, free: &[usize]) -> Option<f64> {
    let model = ideal_response_matrix(efficiency, rho.cutoff()).ok()?;
    let fisher = fisher_matrix(&model, rho, free).ok()?;
    cr_information(&fisher, 1).ok()
}

/// Solves for the ideal-counter efficiency whose information matches the
/// detector's, by bracketed bisection to absolute tolerance [`ROOT_TOL`].
///
/// Returns efficiency one with the saturation flag when even the perfect
/// counter informs less than the detector (cannot happen away from rounding
/// edges, since the perfect counter majorizes every click measurement).
pub fn equivalent_efficiency(
    config: &DetectorConfig,
    rho: &PhotonDistribution,
) -> Result<EquivalentEfficiency> {
    let free = all_free(rho)?;
    let target = loop_information(config, rho)?;
    if target.is_nan() || target <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "detector information {target} is not positive"
        )));
    }
    let upper = ideal_information(1.0, rho, &free).ok_or(Error::RootNotBracketed {
        lower: 0.0,
        upper: f64::NAN,
        target,
    })?;
    if target > upper {
        return Ok(EquivalentEfficiency {
            value: 1.0,
            saturated: true,
        });
    }
    let value = bisect(
        |eff| match ideal_information(eff, rho, &free) {
            Some(info) => info - target,
            None => f64::NEG_INFINITY,
        },
        0.0,
        1.0,
        ROOT_TOL,
    );
    Ok(EquivalentEfficiency {
        value,
        saturated: false,
    })
}

/// One row of an equivalent-efficiency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub detector_efficiency: f64,
    pub equivalent_efficiency: f64,
    pub saturated: bool,
}

/// Sweeps the binary-detector efficiency over the given grid, keeping the
/// splitter geometry and loop loss of `config`.
pub fn equivalent_efficiency_sweep(
    config: &DetectorConfig,
    rho: &PhotonDistribution,
    efficiencies: &[f64],
) -> Result<Vec<SweepPoint>> {
    efficiencies
        .iter()
        .map(|&eff| {
            let swept = config.with_uniform_detector_efficiency(eff)?;
            let eq = equivalent_efficiency(&swept, rho)?;
            Ok(SweepPoint {
                detector_efficiency: eff,
                equivalent_efficiency: eq.value,
                saturated: eq.saturated,
            })
        })
        .collect()
}

/// CSV rendering of a sweep: one `eta,eta_eq` row per grid point.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("eta,eta_eq\n");
    for p in points {
        out.push_str(&fmt::float(p.detector_efficiency));
        out.push(',');
        out.push_str(&fmt::float(p.equivalent_efficiency));
        out.push('\n');
    }
    out
}

/// Fisher analysis of one (detector, state) pair.
#[derive(Debug, Clone)]
pub struct FisherReport {
    pub fisher: FisherMatrix,
    /// Per-pulse Cramér-Rao information.
    pub information: f64,
    pub condition: f64,
    pub equivalent_efficiency: Option<EquivalentEfficiency>,
}

/// Runs the full Fisher analysis for a detector and input state.
pub fn fisher_report(
    config: &DetectorConfig,
    rho: &PhotonDistribution,
    with_equivalent: bool,
) -> Result<FisherReport> {
    let free = all_free(rho)?;
    let model = response_matrix(config, rho.cutoff())?;
    let fisher = fisher_matrix(model.matrix(), rho, &free)?;
    let information = cr_information(&fisher, 1)?;
    let condition = condition_number(&fisher);
    let equivalent = if with_equivalent {
        Some(equivalent_efficiency(config, rho)?)
    } else {
        None
    };
    Ok(FisherReport {
        fisher,
        information,
        condition,
        equivalent_efficiency: equivalent,
    })
}

impl FisherReport {
    /// Structured text record: information, condition, flags, matrix rows.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("information = {}\n", fmt::float(self.information)));
        out.push_str(&format!("condition = {}\n", fmt::float(self.condition)));
        let free: Vec<String> = self
            .fisher
            .free_params()
            .iter()
            .map(|k| k.to_string())
            .collect();
        out.push_str(&format!("free_params = [{}]\n", free.join(", ")));
        let boundary: Vec<String> = self
            .fisher
            .boundary_outcomes()
            .iter()
            .map(|j| j.to_string())
            .collect();
        out.push_str(&format!("boundary_outcomes = [{}]\n", boundary.join(", ")));
        if let Some(eq) = self.equivalent_efficiency {
            out.push_str(&format!(
                "equivalent_efficiency = {}\n",
                fmt::float(eq.value)
            ));
            out.push_str(&format!("saturated = {}\n", eq.saturated));
        }
        let m = self.fisher.matrix();
        let rows: Vec<String> = (0..m.nrows())
            .map(|r| {
                let row: Vec<f64> = (0..m.ncols()).map(|c| m[(r, c)]).collect();
                fmt::float_list(&row)
            })
            .collect();
        out.push_str(&format!("fisher = [{}]\n", rows.join(", ")));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{response_matrix_from_efficiencies, two_channel_probs};
    use crate::fock::{truncated_state, PhotonDistribution};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn perfect_counter_fisher_matrix_is_diagonal_plus_vacuum() {
        let rho = PhotonDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let identity = DMatrix::identity(3, 3);
        let f = fisher_matrix(&identity, &rho, &[1, 2]).unwrap();
        let m = f.matrix();
        assert!((m[(0, 0)] - (1.0 / 0.3 + 1.0 / 0.5)).abs() < 1e-12);
        assert!((m[(1, 1)] - (1.0 / 0.2 + 1.0 / 0.5)).abs() < 1e-12);
        assert!((m[(0, 1)] - 1.0 / 0.5).abs() < 1e-12);
        assert!((m[(0, 1)] - m[(1, 0)]).abs() == 0.0);
        assert!(!f.is_boundary_flagged());
    }

    #[test]
    fn free_list_validation() {
        let rho = PhotonDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let identity = DMatrix::identity(3, 3);
        assert!(fisher_matrix(&identity, &rho, &[]).is_err());
        assert!(fisher_matrix(&identity, &rho, &[0, 1]).is_err());
        assert!(fisher_matrix(&identity, &rho, &[1, 1]).is_err());
        assert!(fisher_matrix(&identity, &rho, &[3]).is_err());
    }

    #[test]
    fn boundary_state_is_flagged_and_reduced() {
        // No two-photon content: the coincidence outcome has zero probability
        // but responds to rho_2.
        let rho = truncated_state(0.5, 0.0).unwrap();
        let c = response_matrix_from_efficiencies(&[0.15, 0.15], 2).unwrap();
        let f = fisher_matrix(c.matrix(), &rho, &[1, 2]).unwrap();
        assert_eq!(f.boundary_outcomes(), &[3]);
        assert!(f.is_boundary_flagged());
        // The reduced matrix is still invertible.
        assert!(cr_information(&f, 1).is_ok());
    }

    #[test]
    fn cr_information_closed_forms() {
        let f = FisherMatrix {
            matrix: DMatrix::identity(2, 2),
            free: vec![1, 2],
            boundary_outcomes: vec![],
        };
        assert!((cr_information(&f, 1).unwrap() - 0.5).abs() < 1e-15);

        let diag = FisherMatrix {
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 6.0])),
            free: vec![1, 2],
            boundary_outcomes: vec![],
        };
        assert!((cr_information(&diag, 1).unwrap() - 2.0).abs() < 1e-12);

        // Information carries the explicit 1/N dependence.
        let once = cr_information(&diag, 1).unwrap();
        let twice = cr_information(&diag, 2).unwrap();
        assert!((twice - once / 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_fisher_matrix_reports_condition() {
        let f = FisherMatrix {
            matrix: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            free: vec![1, 2],
            boundary_outcomes: vec![],
        };
        match cr_information(&f, 1) {
            Err(Error::IllConditioned { condition }) => assert!(condition > CONDITION_LIMIT),
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
    }

    #[test]
    fn closed_form_route_matches_response_route() {
        // Build the two-channel model from the closed-form probabilities of
        // the Fock basis states and compare Fisher matrices entrywise.
        let rho = truncated_state(0.7, 0.2).unwrap();
        let (eta1, eta2, t) = (0.55, 0.4, 0.3);
        let mut closed = DMatrix::zeros(4, 3);
        for i in 0..=2 {
            let basis = PhotonDistribution::fock(i, 2).unwrap();
            let p = two_channel_probs(&basis, eta1, eta2, t).unwrap();
            for j in 0..4 {
                closed[(j, i)] = p[j];
            }
        }
        let matrix =
            response_matrix_from_efficiencies(&[eta1 * t, eta2 * (1.0 - t)], 2).unwrap();
        let f_closed = fisher_matrix(&closed, &rho, &[1, 2]).unwrap();
        let f_matrix = fisher_matrix(matrix.matrix(), &rho, &[1, 2]).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert!(
                    (f_closed.matrix()[(k, l)] - f_matrix.matrix()[(k, l)]).abs() < 1e-12
                );
            }
        }
    }

    /// Central-difference evaluation of the expectation form
    /// `F_kl = sum_j p_j (d log p_j / d rho_k)(d log p_j / d rho_l)`.
    fn finite_difference_fisher(
        model: &DMatrix<f64>,
        rho: &PhotonDistribution,
        free: &[usize],
        step: f64,
    ) -> DMatrix<f64> {
        let probs = |probs: &[f64]| -> Vec<f64> {
            let v = nalgebra::DVector::from_column_slice(probs);
            (model * v).iter().copied().collect()
        };
        let base = probs(rho.probs());
        let mut grads = Vec::new();
        for &k in free {
            let mut plus = rho.probs().to_vec();
            plus[k] += step;
            plus[0] -= step;
            let mut minus = rho.probs().to_vec();
            minus[k] -= step;
            minus[0] += step;
            let (pp, pm) = (probs(&plus), probs(&minus));
            let grad: Vec<f64> = pp
                .iter()
                .zip(&pm)
                .map(|(a, b)| (a.ln() - b.ln()) / (2.0 * step))
                .collect();
            grads.push(grad);
        }
        DMatrix::from_fn(free.len(), free.len(), |k, l| {
            base.iter()
                .enumerate()
                .map(|(j, &p)| p * grads[k][j] * grads[l][j])
                .sum()
        })
    }

    #[test]
    fn matches_finite_difference_log_likelihood_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..10 {
            let weights: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 0.05).collect();
            let rho = PhotonDistribution::normalized(weights).unwrap();
            let etas = [
                rng.random::<f64>() * 0.4 + 0.05,
                rng.random::<f64>() * 0.4 + 0.05,
            ];
            let c = response_matrix_from_efficiencies(&etas, 3).unwrap();
            let free = [1, 2, 3];
            let f = fisher_matrix(c.matrix(), &rho, &free).unwrap();
            let fd = finite_difference_fisher(c.matrix(), &rho, &free, 1e-5);
            for k in 0..3 {
                for l in 0..3 {
                    let want = fd[(k, l)];
                    let got = f.matrix()[(k, l)];
                    assert!(
                        (got - want).abs() <= 1e-6 * want.abs().max(1e-3),
                        "entry ({k},{l}): {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn approximation_examples() {
        assert!((loop_info_approx(0.8, 0.1, 0.1, 0.5).unwrap() - 0.01).abs() < 1e-15);
        assert!((loop_info_approx(0.5, 0.0, 0.1, 0.5).unwrap() - 0.415).abs() < 1e-15);
        assert_eq!(loop_info_approx(0.8, 0.1, 0.1, 0.0).unwrap(), 0.0);
        assert_eq!(loop_info_approx(0.8, 0.1, 0.1, 1.0).unwrap(), 0.0);

        assert!((ideal_info_approx(0.8, 0.1, 0.1).unwrap() - 0.02).abs() < 1e-15);
        assert!((ideal_info_approx(0.5, 0.0, 0.1).unwrap() - 0.4).abs() < 1e-15);

        // With no two-photon content the loop and ideal detectors agree at
        // leading order in the efficiency.
        let eta = 1e-4;
        let loop_info = loop_info_approx(0.5, 0.0, eta, 0.5).unwrap();
        let ideal_info = ideal_info_approx(0.5, 0.0, eta).unwrap();
        assert!((loop_info - ideal_info).abs() <= 2.0 * eta * eta);

        assert!(loop_info_approx(0.9, 0.3, 0.1, 0.5).is_err());
        assert!(loop_info_approx(0.0, 0.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn three_channel_equivalent_efficiency_near_scaling_law() {
        let rho = truncated_state(0.9, 0.1).unwrap();
        let cfg = DetectorConfig::balanced(3, 0.6).unwrap();
        let eq = equivalent_efficiency(&cfg, &rho).unwrap();
        assert!(!eq.saturated);
        // Three channels resolve coincidences better than two, so the exact
        // value sits above eta/sqrt(2); it stays within the plotted band.
        let scaling = 0.6 / 2f64.sqrt();
        assert!(
            eq.value > scaling && eq.value < 0.6,
            "eta_eq = {}",
            eq.value
        );
    }

    #[test]
    fn poissonian_equivalent_efficiency_of_lossy_detector() {
        // Loss-dominated three-channel run on Poissonian light: the device
        // performs like an ideal counter of roughly a quarter efficiency.
        let rho = PhotonDistribution::poisson(0.6, 3).unwrap();
        let cfg = DetectorConfig::new(
            3,
            vec![1.0 / 3.0, 0.5],
            vec![0.6, 0.6, 0.6],
            0.7,
        )
        .unwrap();
        let eq = equivalent_efficiency(&cfg, &rho).unwrap();
        assert!(
            (0.15..=0.35).contains(&eq.value),
            "eta_eq = {}",
            eq.value
        );
    }

    #[test]
    fn lossless_single_channel_unit_detector_is_ideal_for_one_photon() {
        // A perfect binary detector cannot be told apart from the perfect
        // counter when at most one photon arrives.
        let rho = PhotonDistribution::new(vec![0.6, 0.4]).unwrap();
        let cfg = DetectorConfig::new(1, vec![], vec![1.0], 1.0).unwrap();
        let eq = equivalent_efficiency(&cfg, &rho).unwrap();
        assert!((eq.value - 1.0).abs() < 1e-5, "eta_eq = {}", eq.value);
    }

    #[test]
    fn sweep_produces_plot_ready_csv() {
        let rho = truncated_state(0.9, 0.1).unwrap();
        let cfg = DetectorConfig::balanced(2, 0.5).unwrap();
        let points =
            equivalent_efficiency_sweep(&cfg, &rho, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(points.len(), 3);
        assert!(points.windows(2).all(|w| {
            w[0].equivalent_efficiency < w[1].equivalent_efficiency
        }));
        let csv = sweep_csv(&points);
        assert!(csv.starts_with("eta,eta_eq\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn report_renders_all_fields() {
        let rho = truncated_state(0.7, 0.2).unwrap();
        let cfg = DetectorConfig::balanced(2, 0.6).unwrap();
        let report = fisher_report(&cfg, &rho, true).unwrap();
        let text = report.render();
        assert!(text.contains("information = "));
        assert!(text.contains("free_params = [1, 2]"));
        assert!(text.contains("equivalent_efficiency = "));
        assert!(text.contains("fisher = [["));
    }
}
