//! Cross-module round trips: simulate -> calibrate -> reconstruct -> assess.

use fiberloop_core::calibrate::CalibrationRecord;
use fiberloop_core::detector::{response_matrix, DetectorConfig};
use fiberloop_core::fisher::{equivalent_efficiency, fisher_report};
use fiberloop_core::fock::{hs_distance, PhotonDistribution};
use fiberloop_core::reconstruct::{em_reconstruct, EmOptions};
use fiberloop_core::simulate::{sample_events, EventHistogram};

#[test]
fn em_estimate_is_consistent_in_the_pulse_count() {
    let config = DetectorConfig::balanced(2, 0.6).unwrap();
    let rho_star = PhotonDistribution::new(vec![0.7, 0.2, 0.1]).unwrap();
    let matrix = response_matrix(&config, 2).unwrap();

    let mut medians = Vec::new();
    for (scale, pulses) in [1_000u64, 10_000, 100_000, 1_000_000]
        .into_iter()
        .enumerate()
    {
        let mut distances: Vec<f64> = (0..20u64)
            .map(|seed| {
                let hist = sample_events(
                    &rho_star,
                    &config,
                    pulses,
                    (scale as u64 + 1) * 100_000 + seed * 7919,
                )
                .unwrap();
                let result =
                    em_reconstruct(&matrix, &hist.frequencies(), None, &EmOptions::default())
                        .unwrap();
                hs_distance(&result.estimate, &rho_star).unwrap()
            })
            .collect();
        distances.sort_by(f64::total_cmp);
        medians.push(0.5 * (distances[9] + distances[10]));
    }
    for w in medians.windows(2) {
        assert!(
            w[1] < w[0],
            "median error did not shrink with more pulses: {medians:?}"
        );
    }
}

#[test]
fn end_to_end_library_pipeline() {
    // A plausible bench setup: three channels, lossy loop, 60 % detectors.
    let config = DetectorConfig::new(3, vec![0.4, 0.5], vec![0.6, 0.6, 0.6], 0.9).unwrap();
    let cutoff = 3;
    let source_mean = 0.6;
    let rho_star = PhotonDistribution::poisson(source_mean, cutoff).unwrap();

    // Acquire data and pass it through the CSV interchange format.
    let hist = sample_events(&rho_star, &config, 80_000, 42).unwrap();
    let hist = EventHistogram::from_csv(&hist.to_csv()).unwrap();

    // Calibration on a separate Poissonian run at a brighter working point.
    let calib_hist = sample_events(
        &PhotonDistribution::poisson(1.0, 30).unwrap(),
        &config,
        100_000,
        43,
    )
    .unwrap();
    let record = CalibrationRecord::from_histogram(&calib_hist, 1.0)
        .unwrap()
        .with_factorization(config.detector_efficiencies(), config.loop_transmission())
        .unwrap();
    let implied = record.implied_transmissions.as_ref().unwrap();
    for (got, want) in implied.iter().zip(config.transmissions()) {
        assert!((got - want).abs() < 0.02, "{got} vs {want}");
    }

    // Reconstruct the source statistics from the measured frequencies.
    let matrix = response_matrix(&config, cutoff).unwrap();
    let result = em_reconstruct(&matrix, &hist.frequencies(), None, &EmOptions::default()).unwrap();
    assert!(result.converged);
    assert!(hs_distance(&result.estimate, &rho_star).unwrap() < 1e-3);

    // Fisher assessment of the same setup.
    let report = fisher_report(&config, &rho_star, true).unwrap();
    assert!(report.information > 0.0);
    let eq = report.equivalent_efficiency.unwrap();
    assert!(eq.value > 0.0 && eq.value < 0.6);
    let eq_again = equivalent_efficiency(&config, &rho_star).unwrap();
    assert_eq!(eq.value, eq_again.value);
}
