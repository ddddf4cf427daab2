//! Metrics derived from simulation traces. Every function here is a pure
//! function of the traces it is given.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{D2D, DL, UL};
use crate::scheduler::{CombinationClass, SimulationTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkClass {
    Dl,
    Ul,
    D2d,
}

impl LinkClass {
    pub const ALL: [LinkClass; 3] = [LinkClass::Dl, LinkClass::Ul, LinkClass::D2d];

    pub fn name(&self) -> &'static str {
        match self {
            LinkClass::Dl => "dl",
            LinkClass::Ul => "ul",
            LinkClass::D2d => "d2d",
        }
    }

    fn slot(&self) -> usize {
        match self {
            LinkClass::Dl => DL,
            LinkClass::Ul => UL,
            LinkClass::D2d => D2D,
        }
    }
}

/// Average throughput (bits/s) of every link of `class` over the whole trace.
pub fn link_average_throughputs(trace: &SimulationTrace, class: LinkClass) -> Vec<f64> {
    let links = match class {
        LinkClass::Dl | LinkClass::Ul => trace.scenario.num_cues(),
        LinkClass::D2d => trace.scenario.num_d2d(),
    };
    let mut sums = vec![0.0; links];
    for d in &trace.decisions {
        let link = match class {
            LinkClass::Dl => d.selection.dl,
            LinkClass::Ul => d.selection.ul,
            LinkClass::D2d => d.selection.d2d,
        };
        if let Some(i) = link {
            sums[i] += d.rates[class.slot()];
        }
    }
    let n = trace.num_ttis() as f64;
    sums.into_iter().map(|s| s / n).collect()
}

/// Per-link average throughputs of `class` pooled over all traces.
pub fn pooled_link_throughputs(traces: &[SimulationTrace], class: LinkClass) -> Vec<f64> {
    traces.iter().flat_map(|t| link_average_throughputs(t, class)).collect()
}

/// Empirical CDF `(throughput, fraction)` over every link of `class` in every trace.
pub fn throughput_cdf(traces: &[SimulationTrace], class: LinkClass) -> Vec<(f64, f64)> {
    empirical_cdf(pooled_link_throughputs(traces, class))
}

pub fn empirical_cdf(mut samples: Vec<f64>) -> Vec<(f64, f64)> {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.into_iter().enumerate().map(|(i, v)| (v, (i + 1) as f64 / n)).collect()
}

/// Smallest sample whose empirical CDF reaches `q` (0 < q <= 1).
pub fn quantile(samples: &[f64], q: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

pub fn median(samples: &[f64]) -> Option<f64> {
    quantile(samples, 0.5)
}

pub fn mean(samples: &[f64]) -> Option<f64> {
    (!samples.is_empty()).then(|| samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Share of TTIs per combination class, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationShares {
    /// In [`CombinationClass::ALL`] order.
    pub percentages: Vec<(CombinationClass, f64)>,
    /// Classes with two or more concurrent links.
    pub simultaneous: f64,
    /// Classes containing a D2D link.
    pub d2d: f64,
}

impl CombinationShares {
    pub fn get(&self, class: CombinationClass) -> f64 {
        self.percentages.iter().find(|(c, _)| *c == class).map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.percentages.iter().map(|(_, p)| p).sum()
    }
}

fn shares_from_counts(counts: [usize; 8], total: usize) -> CombinationShares {
    let pct = |c: usize| 100.0 * c as f64 / total as f64;
    let percentages: Vec<_> = CombinationClass::ALL.iter().zip(counts).map(|(&c, n)| (c, pct(n))).collect();
    let sum_where = |pred: &dyn Fn(&CombinationClass) -> bool| {
        pct(CombinationClass::ALL.iter().zip(counts).filter(|(c, _)| pred(c)).map(|(_, n)| n).sum())
    };
    CombinationShares {
        simultaneous: sum_where(&|c| c.concurrent_links() >= 2),
        d2d: sum_where(&|c| c.has_d2d()),
        percentages,
    }
}

fn class_counts(trace: &SimulationTrace, counts: &mut [usize; 8]) {
    for d in &trace.decisions {
        let idx = CombinationClass::ALL.iter().position(|c| *c == d.combination_class).unwrap();
        counts[idx] += 1;
    }
}

/// Combination-class distribution of one trace.
pub fn combination_distribution(trace: &SimulationTrace) -> CombinationShares {
    let mut counts = [0usize; 8];
    class_counts(trace, &mut counts);
    shares_from_counts(counts, trace.num_ttis())
}

/// Combination-class distribution over all TTIs of all traces.
pub fn pooled_combination_distribution(traces: &[SimulationTrace]) -> CombinationShares {
    let mut counts = [0usize; 8];
    let mut total = 0;
    for t in traces {
        class_counts(t, &mut counts);
        total += t.num_ttis();
    }
    shares_from_counts(counts, total)
}

/// Delivered bits per link class `[dl, ul, d2d]`.
pub fn delivered_bits(trace: &SimulationTrace) -> [f64; 3] {
    let mut bits = [0.0; 3];
    for d in &trace.decisions {
        for (slot, b) in bits.iter_mut().enumerate() {
            *b += d.rates[slot] * trace.tti_duration;
        }
    }
    bits
}

/// Transmit energy in joules.
pub fn transmit_energy(trace: &SimulationTrace) -> f64 {
    trace.decisions.iter().map(|d| d.powers.total() * trace.tti_duration).sum()
}

/// Delivered bits per joule of transmit energy over all traces.
pub fn energy_efficiency(traces: &[SimulationTrace]) -> Result<f64> {
    let bits: f64 = traces.iter().map(|t| delivered_bits(t).iter().sum::<f64>()).sum();
    let energy: f64 = traces.iter().map(transmit_energy).sum();
    if !(energy > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    Ok(bits / energy)
}

/// Total delivered bits over elapsed time, bits/s.
pub fn aggregate_throughput(trace: &SimulationTrace) -> f64 {
    delivered_bits(trace).iter().sum::<f64>() / (trace.num_ttis() as f64 * trace.tti_duration)
}

/// Mean of [`aggregate_throughput`] across traces.
pub fn mean_aggregate_throughput(traces: &[SimulationTrace]) -> f64 {
    traces.iter().map(aggregate_throughput).sum::<f64>() / traces.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub mode: String,
    pub seeds: Vec<u64>,
    pub sic_db: f64,
    pub w_dl: f64,
    pub w_ul: f64,
    pub w_d2d: f64,
    pub ttis: usize,
}

/// Everything reported for one batch of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub dl_throughputs: Vec<f64>,
    pub ul_throughputs: Vec<f64>,
    pub d2d_throughputs: Vec<f64>,
    pub combinations: CombinationShares,
    /// bits/s, mean over runs
    pub aggregate_throughput: f64,
    /// bits/J; `None` if no energy was spent
    pub energy_efficiency: Option<f64>,
    pub metadata: RunMetadata,
}

impl MetricsReport {
    pub fn from_traces(traces: &[SimulationTrace]) -> Self {
        assert!(!traces.is_empty(), "report needs at least one trace");
        let first = &traces[0];
        let st = &first.initial_state;
        Self {
            dl_throughputs: pooled_link_throughputs(traces, LinkClass::Dl),
            ul_throughputs: pooled_link_throughputs(traces, LinkClass::Ul),
            d2d_throughputs: pooled_link_throughputs(traces, LinkClass::D2d),
            combinations: pooled_combination_distribution(traces),
            aggregate_throughput: mean_aggregate_throughput(traces),
            energy_efficiency: energy_efficiency(traces).ok(),
            metadata: RunMetadata {
                mode: first.mode.to_string(),
                seeds: traces.iter().map(|t| t.scenario.seed).collect(),
                sic_db: first.scenario.config.sic,
                w_dl: st.w_dl.first().copied().unwrap_or(0.0),
                w_ul: st.w_ul.first().copied().unwrap_or(0.0),
                w_d2d: st.w_d2d.first().copied().unwrap_or(0.0),
                ttis: first.num_ttis(),
            },
        }
    }

    pub fn throughputs(&self, class: LinkClass) -> &[f64] {
        match class {
            LinkClass::Dl => &self.dl_throughputs,
            LinkClass::Ul => &self.ul_throughputs,
            LinkClass::D2d => &self.d2d_throughputs,
        }
    }
}
