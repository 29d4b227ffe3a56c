//! Monte Carlo generation of detection-event histograms.
//!
//! Sampling routes every photon individually through the splitter tree and
//! applies detection losses per channel, rather than drawing from the
//! analytic outcome probabilities. The simulator and the response-matrix
//! model are therefore independent implementations that can cross-validate
//! each other.
//!
//! Pulses are processed in fixed-size chunks, each owning a random stream
//! derived from the master seed and the chunk index. The merged histogram is
//! identical for any parallel schedule or worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::detector::{outcome_bitstring, DetectorConfig, MAX_CHANNELS};
use crate::error::{Error, Result};
use crate::fock::PhotonDistribution;

/// Pulses per random stream; the histogram is invariant to how chunks are
/// scheduled over threads.
pub const CHUNK_PULSES: u64 = 1 << 14;

/// Counts per s-bit outcome pattern accumulated over N pulses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventHistogram {
    counts: Vec<u64>,
    pulses: u64,
    channels: usize,
    seed: Option<u64>,
}

impl EventHistogram {
    pub fn new(counts: Vec<u64>, channels: usize, seed: Option<u64>) -> Result<Self> {
        if channels == 0 || channels > MAX_CHANNELS {
            return Err(Error::InvalidParameter(format!(
                "histogram channel count {channels} outside 1..={MAX_CHANNELS}"
            )));
        }
        if counts.len() != 1 << channels {
            return Err(Error::DimensionMismatch(format!(
                "{} outcome counts supplied, expected {}",
                counts.len(),
                1 << channels
            )));
        }
        let pulses = counts.iter().sum();
        Ok(Self {
            counts,
            pulses,
            channels,
            seed,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn pulses(&self) -> u64 {
        self.pulses
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Relative outcome frequencies `counts / pulses`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.pulses.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Per-channel fraction of pulses with no click in that channel,
    /// ignoring all other channels. This is the calibration observable.
    pub fn zero_count_frequencies(&self) -> Vec<f64> {
        let n = self.pulses.max(1) as f64;
        (0..self.channels)
            .map(|l| {
                let quiet: u64 = self
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j >> l & 1 == 0)
                    .map(|(_, &c)| c)
                    .sum();
                quiet as f64 / n
            })
            .collect()
    }

    /// Combines two histograms taken with the same channel count.
    pub fn merge(&self, other: &EventHistogram) -> Result<EventHistogram> {
        if self.channels != other.channels {
            return Err(Error::DimensionMismatch(format!(
                "cannot merge histograms with {} and {} channels",
                self.channels, other.channels
            )));
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        EventHistogram::new(counts, self.channels, None)
    }

    /// CSV rendering: `bitstring,count` lines under a comment header that
    /// records the pulse count, channel count, and seed.
    pub fn to_csv(&self) -> String {
        let seed = match self.seed {
            Some(s) => s.to_string(),
            None => "none".to_string(),
        };
        let mut out = format!(
            "# pulses={} channels={} seed={}\n",
            self.pulses, self.channels, seed
        );
        for (j, &c) in self.counts.iter().enumerate() {
            out.push_str(&outcome_bitstring(j, self.channels));
            out.push(',');
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut header_pulses: Option<u64> = None;
        let mut header_channels: Option<usize> = None;
        let mut seed: Option<u64> = None;
        let mut rows: Vec<(String, u64)> = Vec::new();

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                for token in comment.split_whitespace() {
                    let Some((key, value)) = token.split_once('=') else {
                        continue;
                    };
                    match key {
                        "pulses" => {
                            header_pulses = Some(value.parse().map_err(|_| {
                                Error::Parse(format!("bad pulse count {value:?}"))
                            })?)
                        }
                        "channels" => {
                            header_channels = Some(value.parse().map_err(|_| {
                                Error::Parse(format!("bad channel count {value:?}"))
                            })?)
                        }
                        "seed" if value != "none" => {
                            seed = Some(value.parse().map_err(|_| {
                                Error::Parse(format!("bad seed {value:?}"))
                            })?)
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let (bits, count) = line.split_once(',').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `bitstring,count`", lineno + 1))
            })?;
            let count: u64 = count.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: bad count {count:?}", lineno + 1))
            })?;
            rows.push((bits.trim().to_string(), count));
        }

        if rows.is_empty() {
            return Err(Error::Parse("histogram contains no data rows".into()));
        }
        let channels = header_channels.unwrap_or(rows[0].0.len());
        if channels == 0 || channels > MAX_CHANNELS {
            return Err(Error::Parse(format!(
                "histogram channel count {channels} outside 1..={MAX_CHANNELS}"
            )));
        }
        let mut counts = vec![0u64; 1 << channels];
        let mut seen = vec![false; 1 << channels];
        for (bits, count) in rows {
            if bits.len() != channels {
                return Err(Error::Parse(format!(
                    "outcome {bits:?} has {} symbols, expected {channels}",
                    bits.len()
                )));
            }
            let mut index = 0usize;
            for (l, c) in bits.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => index |= 1 << l,
                    other => {
                        return Err(Error::Parse(format!(
                            "outcome {bits:?} contains invalid symbol {other:?}"
                        )))
                    }
                }
            }
            if seen[index] {
                return Err(Error::Parse(format!("duplicate outcome {bits:?}")));
            }
            seen[index] = true;
            counts[index] = count;
        }
        let hist = EventHistogram::new(counts, channels, seed)?;
        if let Some(p) = header_pulses {
            if p != hist.pulses {
                return Err(Error::Parse(format!(
                    "header records {p} pulses but counts sum to {}",
                    hist.pulses
                )));
            }
        }
        Ok(hist)
    }
}

/// Draws `pulses` independent pulses through the detector and tallies the
/// click patterns. Deterministic for a given seed, independent of thread
/// scheduling.
pub fn sample_events(
    rho: &PhotonDistribution,
    config: &DetectorConfig,
    pulses: u64,
    seed: u64,
) -> Result<EventHistogram> {
    if pulses == 0 {
        return Err(Error::InvalidParameter(
            "at least one pulse required".into(),
        ));
    }
    let channels = config.channels();
    let photon_cum = cumulative(rho.probs());
    let route_cum = cumulative(&config.splitter_weights());
    let survival: Vec<f64> = config
        .detector_efficiencies()
        .iter()
        .enumerate()
        .map(|(l, d)| d * config.loop_transmission().powi(l as i32))
        .collect();

    let chunk_count = pulses.div_ceil(CHUNK_PULSES);
    let counts = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let chunk_pulses = CHUNK_PULSES.min(pulses - chunk * CHUNK_PULSES);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut counts = vec![0u64; 1 << channels];
            for _ in 0..chunk_pulses {
                let photons = sample_index(&photon_cum, rng.random());
                let mut pattern = 0usize;
                for _ in 0..photons {
                    let channel = sample_index(&route_cum, rng.random());
                    if rng.random::<f64>() < survival[channel] {
                        pattern |= 1 << channel;
                    }
                }
                counts[pattern] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; 1 << channels],
            |mut acc, part| {
                for (a, p) in acc.iter_mut().zip(part) {
                    *a += p;
                }
                acc
            },
        );

    EventHistogram::new(counts, channels, Some(seed))
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        cum.push(acc);
    }
    cum
}

fn sample_index(cum: &[f64], u: f64) -> usize {
    let target = u * cum[cum.len() - 1];
    cum.iter()
        .position(|&c| target < c)
        .unwrap_or(cum.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{outcome_probs, response_matrix};
    use crate::fock::PhotonDistribution;

    fn two_channel() -> DetectorConfig {
        DetectorConfig::new(2, vec![0.5], vec![0.5, 0.5], 1.0).unwrap()
    }

    #[test]
    fn vacuum_never_clicks() {
        let hist = sample_events(
            &PhotonDistribution::vacuum(2),
            &two_channel(),
            1000,
            7,
        )
        .unwrap();
        assert_eq!(hist.counts(), &[1000, 0, 0, 0]);
    }

    #[test]
    fn same_seed_reproduces_histogram() {
        let rho = PhotonDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let a = sample_events(&rho, &two_channel(), 40_000, 99).unwrap();
        let b = sample_events(&rho, &two_channel(), 40_000, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_events(&rho, &two_channel(), 40_000, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_photon_frequencies_approach_hand_values() {
        // eta1 T = eta2 (1-T) = 0.25, so outcomes follow (0.5, 0.25, 0.25, 0).
        let rho = PhotonDistribution::fock(1, 2).unwrap();
        let n = 100_000u64;
        let hist = sample_events(&rho, &two_channel(), n, 3).unwrap();
        let freq = hist.frequencies();
        for (f, want) in freq.iter().zip([0.5, 0.25, 0.25, 0.0]) {
            let sigma = (want * (1.0 - want) / n as f64).sqrt();
            assert!(
                (f - want).abs() <= 4.0 * sigma + 1e-12,
                "frequency {f} vs {want}"
            );
        }
        assert_eq!(hist.counts()[3], 0);
    }

    #[test]
    fn frequencies_are_counts_over_pulses() {
        let hist = EventHistogram::new(vec![2, 1, 1, 0], 2, None).unwrap();
        assert_eq!(hist.frequencies(), vec![0.5, 0.25, 0.25, 0.0]);
        assert_eq!(hist.pulses(), 4);
    }

    #[test]
    fn merge_is_commutative_and_pulse_weighted() {
        let rho = PhotonDistribution::new(vec![0.6, 0.4]).unwrap();
        let cfg = DetectorConfig::new(1, vec![], vec![0.7], 1.0).unwrap();
        let a = sample_events(&rho, &cfg, 30_000, 1).unwrap();
        let b = sample_events(&rho, &cfg, 10_000, 2).unwrap();
        let ab = a.merge(&b).unwrap();
        let ba = b.merge(&a).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.pulses(), 40_000);
        let expect: Vec<f64> = a
            .frequencies()
            .iter()
            .zip(b.frequencies())
            .map(|(fa, fb)| (fa * 30_000.0 + fb * 10_000.0) / 40_000.0)
            .collect();
        for (got, want) in ab.frequencies().iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn merge_rejects_mismatched_channels() {
        let a = EventHistogram::new(vec![1, 0], 1, None).unwrap();
        let b = EventHistogram::new(vec![1, 0, 0, 0], 2, None).unwrap();
        assert!(a.merge(&b).is_err());
    }

    #[test]
    fn frequencies_converge_to_response_model() {
        let rho = PhotonDistribution::new(vec![0.45, 0.35, 0.15, 0.05]).unwrap();
        let cfg = DetectorConfig::new(2, vec![0.4], vec![0.8, 0.6], 0.9).unwrap();
        let n = 1_000_000u64;
        let hist = sample_events(&rho, &cfg, n, 12).unwrap();
        let model = outcome_probs(&response_matrix(&cfg, 3).unwrap(), &rho).unwrap();
        for (f, p) in hist.frequencies().iter().zip(&model) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (f - p).abs() <= 5.0 * sigma + 1e-9,
                "frequency {f} vs model {p}"
            );
        }
    }

    #[test]
    fn zero_count_marginals_match_no_coincidence_model() {
        let rho = PhotonDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let cfg = DetectorConfig::new(2, vec![0.3], vec![0.9, 0.7], 1.0).unwrap();
        let n = 500_000u64;
        let hist = sample_events(&rho, &cfg, n, 21).unwrap();
        let model =
            crate::detector::no_coincidence_probs(&rho, &cfg.channel_efficiencies()).unwrap();
        for (f, p) in hist.zero_count_frequencies().iter().zip(&model) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() <= 5.0 * sigma);
        }
    }

    #[test]
    fn csv_round_trip_preserves_everything() {
        let rho = PhotonDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let hist = sample_events(&rho, &two_channel(), 12_345, 17).unwrap();
        let parsed = EventHistogram::from_csv(&hist.to_csv()).unwrap();
        assert_eq!(parsed, hist);

        let merged = hist.merge(&hist).unwrap();
        let parsed = EventHistogram::from_csv(&merged.to_csv()).unwrap();
        assert_eq!(parsed.seed(), None);
    }

    #[test]
    fn csv_parser_rejects_malformed_input() {
        assert!(EventHistogram::from_csv("").is_err());
        assert!(EventHistogram::from_csv("0a,5\n").is_err());
        assert!(EventHistogram::from_csv("00,5\n00,3\n").is_err());
        assert!(EventHistogram::from_csv("00,5\n010,3\n").is_err());
        assert!(EventHistogram::from_csv("# pulses=9 channels=2 seed=none\n00,5\n").is_err());
        let ok = EventHistogram::from_csv("# pulses=5 channels=2 seed=none\n00,5\n").unwrap();
        assert_eq!(ok.counts(), &[5, 0, 0, 0]);
    }

    /// Pearson chi-square statistic for homogeneity of two histograms.
    fn chi_square_homogeneity(a: &EventHistogram, b: &EventHistogram) -> f64 {
        let grand = (a.pulses() + b.pulses()) as f64;
        let mut chi2 = 0.0;
        for j in 0..a.counts().len() {
            let col = (a.counts()[j] + b.counts()[j]) as f64;
            if col == 0.0 {
                continue;
            }
            for (row_total, count) in [
                (a.pulses() as f64, a.counts()[j] as f64),
                (b.pulses() as f64, b.counts()[j] as f64),
            ] {
                let expected = row_total * col / grand;
                chi2 += (count - expected) * (count - expected) / expected;
            }
        }
        chi2
    }

    #[test]
    fn disjoint_seed_streams_are_statistically_independent() {
        // chi-square 99.9% quantile with 3 degrees of freedom (4 outcome
        // cells, homogeneity of two rows).
        const CRITICAL: f64 = 16.26623619623813;
        let rho = PhotonDistribution::new(vec![0.45, 0.35, 0.2]).unwrap();
        let a = sample_events(&rho, &two_channel(), 200_000, 1).unwrap();
        let b = sample_events(&rho, &two_channel(), 200_000, 2).unwrap();
        let chi2 = chi_square_homogeneity(&a, &b);
        assert!(
            chi2 < CRITICAL,
            "chi-square {chi2} exceeds the p=0.001 critical value"
        );
    }
}
