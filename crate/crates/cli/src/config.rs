//! Experiment manifest: a TOML document with nested sections, merged with
//! command-line flag overrides.

use std::path::{Path, PathBuf};

use fiberloop_core::detector::DetectorConfig;
use fiberloop_core::fock::{
    poisson_transform_with_threshold, IntensityLaw, PhotonDistribution, TransformedDistribution,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub detector: Option<DetectorConfig>,
    pub source: Option<SourceSpec>,
    pub pulses: Option<u64>,
    pub seed: Option<u64>,
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_em_tol")]
    pub em_tol: f64,
    #[serde(default = "default_em_max_iter")]
    pub em_max_iter: usize,
    #[serde(default = "default_tail_threshold")]
    pub tail_threshold: f64,
}

fn default_em_tol() -> f64 {
    1e-10
}

fn default_em_max_iter() -> usize {
    100_000
}

fn default_tail_threshold() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            em_tol: default_em_tol(),
            em_max_iter: default_em_max_iter(),
            tail_threshold: default_tail_threshold(),
        }
    }
}

/// Light source: either a classical intensity law (tagged by `kind`) or an
/// explicit photon-number probability vector.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SourceSpec {
    Explicit {
        probs: Vec<f64>,
    },
    Law(IntensityLaw),
}

impl RunConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = read_file(path)?;
        toml::from_str(&text).map_err(|err| {
            CliError::Config(format!("{}: {}", path.display(), one_line(&err.to_string())))
        })
    }

    pub fn detector(&self) -> Result<&DetectorConfig, CliError> {
        self.detector
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [detector] section".into()))
    }

    pub fn source(&self) -> Result<&SourceSpec, CliError> {
        self.source
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [source] section".into()))
    }

    /// Photon-number cutoff: flag, then manifest, then the detector default
    /// (every channel may click, plus a two-photon margin).
    pub fn resolve_cutoff(&self, flag: Option<usize>) -> Result<usize, CliError> {
        if let Some(k) = flag.or(self.cutoff) {
            return Ok(k);
        }
        match &self.detector {
            Some(detector) => Ok(detector.channels() + 2),
            None => Err(CliError::Config(
                "no cutoff given and no detector to derive one from".into(),
            )),
        }
    }

    /// Materializes the source as a truncated photon-number distribution.
    pub fn resolve_source(&self, cutoff: usize) -> Result<PhotonDistribution, CliError> {
        match self.source()? {
            SourceSpec::Explicit { probs } => {
                let rho = PhotonDistribution::new(probs.clone())
                    .map_err(|err| CliError::Config(err.to_string()))?;
                if rho.cutoff() != cutoff {
                    return Err(CliError::Config(format!(
                        "explicit source has cutoff {} but {} was requested",
                        rho.cutoff(),
                        cutoff
                    )));
                }
                Ok(rho)
            }
            SourceSpec::Law(law) => Ok(self.transform_law(law, cutoff)?.distribution),
        }
    }

    pub fn transform_law(
        &self,
        law: &IntensityLaw,
        cutoff: usize,
    ) -> Result<TransformedDistribution, CliError> {
        let transformed =
            poisson_transform_with_threshold(law, cutoff, self.tolerances.tail_threshold)?;
        if transformed.tail_warning {
            eprintln!(
                "warning: truncation at cutoff {cutoff} discards probability mass {:.3e}",
                transformed.tail_mass
            );
        }
        Ok(transformed)
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
