//! Proportional-fair utility over exponentially averaged rates.
//!
//! Each link keeps an average `R = beta * R_prev + gamma * r` with `beta + gamma = 1`.
//! The global objective is `O = sum_x w_x ln R_x` over all DL, UL and D2D links,
//! and the per-TTI utility of a candidate is the part of `O^t - O^{t-1}` that
//! depends on the candidate:
//!
//! ```text
//! sum over scheduled x of  w_x [ ln(beta R_x + gamma r_x) - ln(beta R_x) ]
//! ```
//!
//! The remainder, `(sum of all w) * ln(beta)`, is the same for every candidate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Scenario;
use crate::link::{sinr_triple, slot_rates, CqiTable, PowerAllocation, Selection, D2D, DL, UL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UtilityConfig {
    pub beta: f64,
    pub gamma: f64,
    /// Initial average and floor for every link, bits/s.
    pub epsilon_rate: f64,
    pub w_dl: f64,
    pub w_ul: f64,
    pub w_d2d: f64,
}

impl Default for UtilityConfig {
    fn default() -> Self {
        Self { beta: 0.9, gamma: 0.1, epsilon_rate: 1e3, w_dl: 1.0, w_ul: 1.0, w_d2d: 1.0 }
    }
}

impl UtilityConfig {
    /// Smoothing pair from `beta`, with `gamma = 1 - beta`.
    pub fn with_beta(beta: f64) -> Self {
        Self { beta, gamma: 1.0 - beta, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0 && self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(invalid("beta and gamma must lie in (0, 1)"));
        }
        if (self.beta + self.gamma - 1.0).abs() > 1e-12 {
            return Err(invalid("beta + gamma must equal 1"));
        }
        if !(self.epsilon_rate > 0.0 && self.epsilon_rate.is_finite()) {
            return Err(invalid("epsilon_rate must be > 0"));
        }
        for (name, w) in [("w_dl", self.w_dl), ("w_ul", self.w_ul), ("w_d2d", self.w_d2d)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Per-link averages and weightages; the scheduler's only memory across TTIs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateState {
    pub avg_dl: Vec<f64>,
    pub avg_ul: Vec<f64>,
    pub avg_d2d: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon_rate: f64,
    pub w_dl: Vec<f64>,
    pub w_ul: Vec<f64>,
    pub w_d2d: Vec<f64>,
}

impl RateState {
    /// Every average starts at `epsilon_rate`; weights are uniform per link class.
    pub fn initial(num_cues: usize, num_d2d: usize, cfg: &UtilityConfig) -> Self {
        Self {
            avg_dl: vec![cfg.epsilon_rate; num_cues],
            avg_ul: vec![cfg.epsilon_rate; num_cues],
            avg_d2d: vec![cfg.epsilon_rate; num_d2d],
            beta: cfg.beta,
            gamma: cfg.gamma,
            epsilon_rate: cfg.epsilon_rate,
            w_dl: vec![cfg.w_dl; num_cues],
            w_ul: vec![cfg.w_ul; num_cues],
            w_d2d: vec![cfg.w_d2d; num_d2d],
        }
    }

    pub fn for_scenario(scenario: &Scenario, cfg: &UtilityConfig) -> Self {
        Self::initial(scenario.num_cues(), scenario.num_d2d(), cfg)
    }

    /// `(weight, average)` of each slot of a selection, `None` where empty.
    fn slot_links(&self, sel: &Selection) -> [Option<(f64, f64)>; 3] {
        [
            sel.dl.map(|d| (self.w_dl[d], self.avg_dl[d])),
            sel.ul.map(|u| (self.w_ul[u], self.avg_ul[u])),
            sel.d2d.map(|l| (self.w_d2d[l], self.avg_d2d[l])),
        ]
    }

    pub fn total_weight(&self) -> f64 {
        self.w_dl.iter().chain(&self.w_ul).chain(&self.w_d2d).sum()
    }

    /// EMA step for every link; unscheduled links see a zero rate. Averages are
    /// floored at `epsilon_rate`.
    pub fn update(&mut self, sel: &Selection, rates: [f64; 3]) {
        let (beta, gamma, eps) = (self.beta, self.gamma, self.epsilon_rate);
        let step = |avg: &mut f64, r: f64| *avg = (beta * *avg + gamma * r).max(eps);
        for (i, avg) in self.avg_dl.iter_mut().enumerate() {
            step(avg, if sel.dl == Some(i) { rates[DL] } else { 0.0 });
        }
        for (i, avg) in self.avg_ul.iter_mut().enumerate() {
            step(avg, if sel.ul == Some(i) { rates[UL] } else { 0.0 });
        }
        for (i, avg) in self.avg_d2d.iter_mut().enumerate() {
            step(avg, if sel.d2d == Some(i) { rates[D2D] } else { 0.0 });
        }
    }
}

/// Marginal utility of serving one link at `rate`.
#[inline]
pub fn slot_utility(weight: f64, beta: f64, gamma: f64, avg: f64, rate: f64) -> f64 {
    weight * ((beta * avg + gamma * rate).ln() - (beta * avg).ln())
}

/// Utility of a selection given its slot rates `[dl, ul, d2d]`.
pub fn utility_from_rates(sel: &Selection, rates: [f64; 3], state: &RateState) -> f64 {
    let mut total = 0.0;
    for (slot, link) in state.slot_links(sel).into_iter().enumerate() {
        if let Some((w, avg)) = link {
            total += slot_utility(w, state.beta, state.gamma, avg, rates[slot]);
        }
    }
    total
}

/// Per-TTI utility of scheduling `sel` at powers `p`.
pub fn utility_value(
    sel: &Selection,
    p: &PowerAllocation,
    state: &RateState,
    scenario: &Scenario,
    table: &CqiTable,
) -> f64 {
    let sinrs = sinr_triple(scenario, sel, p);
    let rates = slot_rates(sel, &sinrs, scenario.budget.bandwidth, table);
    utility_from_rates(sel, rates, state)
}

/// Functional form of [`RateState::update`].
pub fn update_average_rates(state: &RateState, sel: &Selection, rates: [f64; 3]) -> RateState {
    let mut next = state.clone();
    next.update(sel, rates);
    next
}

/// `sum_x w_x ln R_x` over every link.
pub fn objective_value(state: &RateState) -> f64 {
    let part = |w: &[f64], avg: &[f64]| w.iter().zip(avg).map(|(w, r)| w * r.ln()).sum::<f64>();
    part(&state.w_dl, &state.avg_dl) + part(&state.w_ul, &state.avg_ul) + part(&state.w_d2d, &state.avg_d2d)
}

/// `|O^t - O^{t-1} - (sum w) ln beta - utility|` for one scheduling step.
///
/// Exact up to rounding as long as no average reaches the `epsilon_rate`
/// floor during the step (`beta * R >= epsilon_rate` for every link).
pub fn verify_objective_identity(
    before: &RateState,
    sel: &Selection,
    p: &PowerAllocation,
    scenario: &Scenario,
    table: &CqiTable,
) -> f64 {
    let sinrs = sinr_triple(scenario, sel, p);
    let rates = slot_rates(sel, &sinrs, scenario.budget.bandwidth, table);
    let after = update_average_rates(before, sel, rates);
    let utility = utility_from_rates(sel, rates, before);
    (objective_value(&after) - objective_value(before) - before.total_weight() * before.beta.ln() - utility).abs()
}

/// Slot utility of every link at every CQI class for the current averages.
///
/// Built once per TTI; lets the optimizer evaluate a candidate's utility by
/// table lookup. Values equal [`utility_from_rates`] bit for bit because they
/// are computed from the same operands in the same order.
#[derive(Debug, Clone)]
pub struct ClassUtilityTable {
    classes: usize,
    dl: Vec<f64>,
    ul: Vec<f64>,
    d2d: Vec<f64>,
}

impl ClassUtilityTable {
    pub fn new(state: &RateState, table: &CqiTable, bandwidth: f64) -> Self {
        let rates: Vec<f64> = table.class_efficiencies().iter().map(|e| bandwidth * e).collect();
        let fill = |w: &[f64], avg: &[f64]| {
            w.iter()
                .zip(avg)
                .flat_map(|(&w, &a)| rates.iter().map(move |&r| slot_utility(w, state.beta, state.gamma, a, r)))
                .collect::<Vec<f64>>()
        };
        Self {
            classes: rates.len(),
            dl: fill(&state.w_dl, &state.avg_dl),
            ul: fill(&state.w_ul, &state.avg_ul),
            d2d: fill(&state.w_d2d, &state.avg_d2d),
        }
    }

    /// Rows `[dl, ul, d2d]` for a selection; empty slots get `None`.
    pub fn rows<'a>(&'a self, sel: &Selection) -> [Option<&'a [f64]>; 3] {
        let k = self.classes;
        [
            sel.dl.map(|d| &self.dl[d * k..(d + 1) * k]),
            sel.ul.map(|u| &self.ul[u * k..(u + 1) * k]),
            sel.d2d.map(|l| &self.d2d[l * k..(l + 1) * k]),
        ]
    }
}
