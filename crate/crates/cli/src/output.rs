use std::path::Path;

use anyhow::{Context, Result};
use fdcell_core::experiment::{ExperimentConfig, SicSweep, WeightPoint};
use fdcell_core::metrics::{empirical_cdf, median, CombinationShares, LinkClass, MetricsReport};
use fdcell_core::SchedulerMode;
use serde::Serialize;

#[derive(Serialize)]
struct CdfRow {
    throughput_bps: f64,
    cdf: f64,
}

#[derive(Serialize)]
struct ComboRow<'a> {
    combination: &'a str,
    percent: f64,
}

#[derive(Serialize)]
struct SicRow {
    sic_db: f64,
    mode: SchedulerMode,
    aggregate_throughput_bps: f64,
}

#[derive(Serialize)]
struct WeightRow {
    w_d2d: f64,
    link_class: &'static str,
    throughput_bps: f64,
    cdf: f64,
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))
}

pub fn write_cdf(path: &Path, samples: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    for (throughput_bps, cdf) in empirical_cdf(samples.to_vec()) {
        w.serialize(CdfRow { throughput_bps, cdf })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_combos(path: &Path, shares: &CombinationShares) -> Result<()> {
    let mut w = writer(path)?;
    for (class, percent) in &shares.percentages {
        w.serialize(ComboRow { combination: class.label(), percent: *percent })?;
    }
    w.serialize(ComboRow { combination: "simultaneous", percent: shares.simultaneous })?;
    w.serialize(ComboRow { combination: "with_d2d", percent: shares.d2d })?;
    w.flush()?;
    Ok(())
}

pub fn write_sic_sweep(path: &Path, sweep: &SicSweep) -> Result<()> {
    let mut w = writer(path)?;
    for (m, mode) in sweep.modes.iter().enumerate() {
        for (k, sic_db) in sweep.sic_db.iter().enumerate() {
            w.serialize(SicRow { sic_db: *sic_db, mode: *mode, aggregate_throughput_bps: sweep.throughput[m][k] })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_weight_sweep(path: &Path, points: &[WeightPoint]) -> Result<()> {
    let mut w = writer(path)?;
    for p in points {
        for (class, samples) in [
            (LinkClass::Dl, &p.dl_throughputs),
            (LinkClass::Ul, &p.ul_throughputs),
            (LinkClass::D2d, &p.d2d_throughputs),
        ] {
            for (throughput_bps, cdf) in empirical_cdf(samples.clone()) {
                w.serialize(WeightRow { w_d2d: p.w_d2d, link_class: class.name(), throughput_bps, cdf })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct Summary {
    pub aggregate_throughput_bps: f64,
    pub simultaneous_percent: f64,
    pub energy_efficiency_gb_per_j: Option<f64>,
    pub median_bps: [f64; 3],
}

impl Summary {
    pub fn from_report(r: &MetricsReport) -> Self {
        Self {
            aggregate_throughput_bps: r.aggregate_throughput,
            simultaneous_percent: r.combinations.simultaneous,
            energy_efficiency_gb_per_j: r.energy_efficiency.map(|e| e / 1e9),
            median_bps: LinkClass::ALL.map(|c| median(r.throughputs(c)).unwrap_or(0.0)),
        }
    }
}

#[derive(Serialize)]
pub struct WeightSummary {
    pub w_d2d: f64,
    pub d2d_median_bps: f64,
}

impl WeightSummary {
    pub fn from_point(p: &WeightPoint) -> Self {
        Self { w_d2d: p.w_d2d, d2d_median_bps: median(&p.d2d_throughputs).unwrap_or(0.0) }
    }
}

#[derive(Serialize)]
struct Manifest<'a, S: Serialize> {
    command: &'a str,
    version: &'a str,
    modes: &'a [SchedulerMode],
    seeds: Vec<u64>,
    config: &'a ExperimentConfig,
    outputs: &'a [String],
    results: &'a S,
}

pub fn write_manifest<S: Serialize>(
    dir: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    modes: &[SchedulerMode],
    outputs: &[String],
    results: &S,
) -> Result<()> {
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        modes,
        seeds: cfg.seeds(),
        config: cfg,
        outputs,
        results,
    };
    let path = dir.join("manifest.json");
    let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer_pretty(file, &manifest)?;
    Ok(())
}
