//! Shared fixtures for the benchmark targets.

use fiberloop_core::detector::DetectorConfig;
use fiberloop_core::fock::PhotonDistribution;

/// Three balanced channels read by commercial-grade binary detectors.
pub fn bench_detector() -> DetectorConfig {
    DetectorConfig::balanced(3, 0.6).unwrap()
}

/// Faint Poissonian source truncated to the detector default cutoff.
pub fn bench_source(cutoff: usize) -> PhotonDistribution {
    PhotonDistribution::poisson(0.6, cutoff).unwrap()
}
