//! Multi-scenario experiments and parameter sweeps.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{generate_scenario, Scenario, ScenarioConfig};
use crate::metrics::{mean_aggregate_throughput, pooled_link_throughputs, LinkClass};
use crate::optimizer::OptimizerConfig;
use crate::scheduler::{run_simulation, LinkConfig, SchedulerMode, SimulationConfig, SimulationTrace};
use crate::utility::UtilityConfig;

/// Top-level experiment file. Every section and key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub utility: UtilityConfig,
    pub optimizer: OptimizerConfig,
    pub link: LinkConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub num_scenarios: usize,
    pub num_ttis: usize,
    /// seconds
    pub tti_duration: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { num_scenarios: 20, num_ttis: 2000, tti_duration: 1e-3 }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.simulation().validate()?;
        if self.run.num_scenarios == 0 {
            return Err(invalid("num_scenarios must be >= 1"));
        }
        if self.run.num_ttis == 0 {
            return Err(invalid("num_ttis must be >= 1"));
        }
        Ok(())
    }

    pub fn simulation(&self) -> SimulationConfig {
        SimulationConfig {
            utility: self.utility.clone(),
            link: self.link.clone(),
            optimizer: self.optimizer.clone(),
            tti_duration: self.run.tti_duration,
        }
    }

    /// Scenario `i` uses seed `scenario.seed + i`, so every mode sees the same drops.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.run.num_scenarios as u64).map(|i| self.scenario.seed.wrapping_add(i)).collect()
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        self.seeds().into_iter().map(|s| generate_scenario(&self.scenario, s)).collect()
    }
}

/// Runs `mode` on each scenario; traces come back in scenario order.
pub fn run_on_scenarios(
    scenarios: &[Scenario],
    mode: SchedulerMode,
    num_ttis: usize,
    cfg: &SimulationConfig,
) -> Result<Vec<SimulationTrace>> {
    scenarios.par_iter().map(|s| run_simulation(s, mode, num_ttis, cfg)).collect()
}

pub fn run_experiment(cfg: &ExperimentConfig, mode: SchedulerMode) -> Result<Vec<SimulationTrace>> {
    cfg.validate()?;
    run_on_scenarios(&cfg.scenarios()?, mode, cfg.run.num_ttis, &cfg.simulation())
}

/// Mean aggregate throughput (bits/s) per mode and SIC value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SicSweep {
    pub sic_db: Vec<f64>,
    pub modes: Vec<SchedulerMode>,
    /// `throughput[m][k]` is mode `modes[m]` at `sic_db[k]`
    pub throughput: Vec<Vec<f64>>,
}

impl SicSweep {
    pub fn series(&self, mode: SchedulerMode) -> Option<&[f64]> {
        self.modes.iter().position(|m| *m == mode).map(|i| self.throughput[i].as_slice())
    }
}

pub fn sic_sweep(cfg: &ExperimentConfig, sic_db: &[f64], modes: &[SchedulerMode]) -> Result<SicSweep> {
    sic_sweep_with(cfg, sic_db, modes, |_, _, _| {})
}

/// Like [`sic_sweep`], handing every batch of traces to `observe` before it is dropped.
pub fn sic_sweep_with<F>(
    cfg: &ExperimentConfig,
    sic_db: &[f64],
    modes: &[SchedulerMode],
    mut observe: F,
) -> Result<SicSweep>
where
    F: FnMut(f64, SchedulerMode, &[SimulationTrace]),
{
    cfg.validate()?;
    if sic_db.is_empty() || modes.is_empty() {
        return Err(invalid("sweep needs at least one SIC value and one mode"));
    }
    let base = cfg.scenarios()?;
    let sim = cfg.simulation();
    let mut throughput = vec![Vec::with_capacity(sic_db.len()); modes.len()];
    for &sic in sic_db {
        if !sic.is_finite() {
            return Err(invalid("SIC values must be finite"));
        }
        let scenarios: Vec<_> = base.iter().map(|s| s.with_sic_db(sic)).collect();
        for (m, &mode) in modes.iter().enumerate() {
            let traces = run_on_scenarios(&scenarios, mode, cfg.run.num_ttis, &sim)?;
            throughput[m].push(mean_aggregate_throughput(&traces));
            observe(sic, mode, &traces);
        }
    }
    Ok(SicSweep { sic_db: sic_db.to_vec(), modes: modes.to_vec(), throughput })
}

/// Per-link throughputs of one D2D weight setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPoint {
    pub w_d2d: f64,
    pub dl_throughputs: Vec<f64>,
    pub ul_throughputs: Vec<f64>,
    pub d2d_throughputs: Vec<f64>,
}

impl WeightPoint {
    pub fn from_traces(w_d2d: f64, traces: &[SimulationTrace]) -> Self {
        Self {
            w_d2d,
            dl_throughputs: pooled_link_throughputs(traces, LinkClass::Dl),
            ul_throughputs: pooled_link_throughputs(traces, LinkClass::Ul),
            d2d_throughputs: pooled_link_throughputs(traces, LinkClass::D2d),
        }
    }
}

/// DPA runs with `w_dl = w_ul = 1` and each D2D weight in `w_d2d`.
pub fn weight_sweep(cfg: &ExperimentConfig, w_d2d: &[f64]) -> Result<Vec<WeightPoint>> {
    cfg.validate()?;
    if w_d2d.is_empty() {
        return Err(invalid("sweep needs at least one weight"));
    }
    let scenarios = cfg.scenarios()?;
    w_d2d
        .iter()
        .map(|&w| {
            let mut sim = cfg.simulation();
            sim.utility.w_dl = 1.0;
            sim.utility.w_ul = 1.0;
            sim.utility.w_d2d = w;
            sim.validate()?;
            let traces = run_on_scenarios(&scenarios, SchedulerMode::Dpa, cfg.run.num_ttis, &sim)?;
            Ok(WeightPoint::from_traces(w, &traces))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.num_cues = 3;
        cfg.scenario.num_d2d_links = 2;
        cfg.run.num_scenarios = 2;
        cfg.run.num_ttis = 20;
        cfg
    }

    #[test]
    fn empty_toml_is_default() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = small();
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_toml_overrides() {
        let cfg = ExperimentConfig::from_toml_str("[scenario]\nsic = 85.0\n[run]\nnum_ttis = 7\n").unwrap();
        assert_eq!(cfg.scenario.sic, 85.0);
        assert_eq!(cfg.run.num_ttis, 7);
        assert_eq!(cfg.run.num_scenarios, 20);
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(matches!(ExperimentConfig::from_toml_str("[scenario]\nbogus = 1\n"), Err(Error::ConfigParse(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("[run]\nnum_ttis = 0\n"), Err(Error::InvalidConfig(_))));
        assert!(matches!(
            ExperimentConfig::from_toml_str("[scenario]\nbandwidth = -1.0\n"),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn paired_seeds() {
        let mut cfg = small();
        cfg.scenario.seed = 40;
        assert_eq!(cfg.seeds(), vec![40, 41]);
        let fpa = run_experiment(&cfg, SchedulerMode::Fpa).unwrap();
        let hd = run_experiment(&cfg, SchedulerMode::Hd).unwrap();
        for (a, b) in fpa.iter().zip(&hd) {
            assert_eq!(a.scenario.cue_positions, b.scenario.cue_positions);
            assert_eq!(a.scenario.seed, b.scenario.seed);
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let cfg = small();
        assert_eq!(run_experiment(&cfg, SchedulerMode::Dpa).unwrap(), run_experiment(&cfg, SchedulerMode::Dpa).unwrap());
    }

    #[test]
    fn sic_sweep_shape_and_observer() {
        let cfg = small();
        let mut seen = Vec::new();
        let sweep = sic_sweep_with(&cfg, &[65.0, 105.0], &[SchedulerMode::Fpa, SchedulerMode::Hd], |sic, mode, t| {
            assert_eq!(t.len(), 2);
            assert_eq!(t[0].scenario.config.sic, sic);
            seen.push((sic, mode));
        })
        .unwrap();
        assert_eq!(seen.len(), 4);
        assert_eq!(sweep.throughput.len(), 2);
        assert!(sweep.throughput.iter().all(|r| r.len() == 2));
        let hd = sweep.series(SchedulerMode::Hd).unwrap();
        assert_eq!(hd[0], hd[1]);
        assert!(sic_sweep(&cfg, &[], &[SchedulerMode::Fpa]).is_err());
    }

    #[test]
    fn weight_sweep_sizes() {
        let cfg = small();
        let pts = weight_sweep(&cfg, &[0.2, 1.0]).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].d2d_throughputs.len(), 4);
        assert_eq!(pts[0].dl_throughputs.len(), 6);
        assert!(weight_sweep(&cfg, &[-1.0]).is_err());
    }
}
