//! Subcommand implementations: resolve inputs, call the library, write
//! artifacts.

use std::path::{Path, PathBuf};

use fiberloop_core::calibrate::CalibrationRecord;
use fiberloop_core::detector::response_matrix;
use fiberloop_core::fisher::{equivalent_efficiency, equivalent_efficiency_sweep, fisher_report, sweep_csv};
use fiberloop_core::fock::PhotonDistribution;
use fiberloop_core::reconstruct::{em_reconstruct, EmOptions};
use fiberloop_core::simulate::{sample_events, EventHistogram};

use crate::config::{read_file, RunConfig, SourceSpec};
use crate::{CalibrateArgs, CliError, CommonArgs, FisherArgs, ReconstructArgs};

fn write_artifact(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_histogram(path: &Path) -> Result<EventHistogram, CliError> {
    let text = read_file(path)?;
    Ok(EventHistogram::from_csv(&text)?)
}

pub fn simulate(args: CommonArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.config.as_ref())?;
    let detector = cfg.detector()?;
    let cutoff = cfg.resolve_cutoff(args.cutoff)?;
    let rho = cfg.resolve_source(cutoff)?;
    let pulses = args
        .pulses
        .or(cfg.pulses)
        .ok_or_else(|| CliError::Config("pulse count required (--pulses)".into()))?;
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let hist = sample_events(&rho, detector, pulses, seed)?;
    write_artifact(args.out.as_ref(), &hist.to_csv())
}

pub fn reconstruct(args: ReconstructArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_ref())?;
    let detector = cfg.detector()?;
    let hist = load_histogram(&args.histogram)?;
    if hist.channels() != detector.channels() {
        return Err(CliError::Config(format!(
            "histogram records {} channels but the detector has {}",
            hist.channels(),
            detector.channels()
        )));
    }
    let cutoff = cfg.resolve_cutoff(args.common.cutoff)?;
    let matrix = response_matrix(detector, cutoff)?;
    let options = EmOptions {
        max_iter: cfg.tolerances.em_max_iter,
        tol: cfg.tolerances.em_tol,
    };
    let result = em_reconstruct(&matrix, &hist.frequencies(), None, &options)?;
    if let Some(trace_path) = &args.trace {
        std::fs::write(trace_path, result.trace_csv()).map_err(|source| CliError::Io {
            path: trace_path.clone(),
            source,
        })?;
    }
    write_artifact(args.common.out.as_ref(), &result.render())
}

pub fn fisher(args: FisherArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_ref())?;
    let detector = cfg.detector()?;
    let cutoff = cfg.resolve_cutoff(args.common.cutoff)?;
    let rho = cfg.resolve_source(cutoff)?;
    let report = fisher_report(detector, &rho, true)?;
    if let Some(spec) = &args.sweep {
        let grid = parse_sweep(spec)?;
        let points = equivalent_efficiency_sweep(detector, &rho, &grid)?;
        let csv = sweep_csv(&points);
        match &args.sweep_out {
            Some(path) => std::fs::write(path, csv).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => print!("{csv}"),
        }
    } else if args.sweep_out.is_some() {
        return Err(CliError::Config("--sweep-out requires --sweep".into()));
    }
    write_artifact(args.common.out.as_ref(), &report.render())
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("bad sweep grid {spec:?}, expected start:stop:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if count < 2 || !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || stop <= start
    {
        return Err(bad());
    }
    Ok((0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect())
}

pub fn calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_ref())?;
    let hist = load_histogram(&args.histogram)?;
    if let Some(detector) = &cfg.detector {
        if hist.channels() != detector.channels() {
            return Err(CliError::Config(format!(
                "histogram records {} channels but the detector has {}",
                hist.channels(),
                detector.channels()
            )));
        }
    }
    let mut record = CalibrationRecord::from_histogram(&hist, args.mu)?;
    if let Some(detector) = &cfg.detector {
        record = record
            .with_factorization(detector.detector_efficiencies(), detector.loop_transmission())?;
    }
    write_artifact(args.common.out.as_ref(), &record.render())
}

pub fn equiv_eff(args: CommonArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.config.as_ref())?;
    let detector = cfg.detector()?;
    let cutoff = cfg.resolve_cutoff(args.cutoff)?;
    let rho = cfg.resolve_source(cutoff)?;
    let eq = equivalent_efficiency(detector, &rho)?;
    let text = format!(
        "equivalent_efficiency = {}\nsaturated = {}\n",
        format_float(eq.value),
        eq.saturated
    );
    write_artifact(args.out.as_ref(), &text)
}

pub fn transform(args: CommonArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.config.as_ref())?;
    let law = match cfg.source()? {
        SourceSpec::Law(law) => law.clone(),
        SourceSpec::Explicit { .. } => {
            return Err(CliError::Config(
                "transform requires an intensity-law source, not explicit probabilities".into(),
            ))
        }
    };
    let cutoff = cfg.resolve_cutoff(args.cutoff)?;
    let transformed = cfg.transform_law(&law, cutoff)?;
    let text = render_distribution(&transformed.distribution, transformed.tail_mass);
    write_artifact(args.out.as_ref(), &text)
}

fn render_distribution(rho: &PhotonDistribution, tail_mass: f64) -> String {
    let mut out = format!("# tail_mass={}\n", format_float(tail_mass));
    out.push_str("n,probability\n");
    for (n, &p) in rho.probs().iter().enumerate() {
        out.push_str(&format!("{n},{}\n", format_float(p)));
    }
    out
}

fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}
