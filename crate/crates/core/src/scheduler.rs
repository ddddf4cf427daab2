//! Per-TTI user selection and power control, and the TTI simulation loop.
//!
//! Every TTI the scheduler enumerates all (DL CUE, UL CUE, D2DL) candidates and
//! picks the one with the highest utility:
//!
//! * FPA evaluates each candidate at peak power, no SINR floors.
//! * DPA optimizes each candidate's powers under SINR floors and skips
//!   candidates with no feasible power vector.
//! * HD is DPA restricted to candidates without simultaneous UL and DL.
//!
//! Ties go to the first candidate in enumeration order (DL index, then UL,
//! then D2D, with the empty slot last).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Scenario;
use crate::link::{
    sinr_triple, slot_rates, CqiTable, PowerAllocation, Selection, SelectionChannel, SinrTriple, D2D, DL, UL,
};
use crate::optimizer::{pattern_search_maximize, BoxBounds, Evaluation, OptimizerConfig, SinrFloors};
use crate::units::db_to_linear;
use crate::utility::{utility_from_rates, ClassUtilityTable, RateState, UtilityConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerMode {
    Fpa,
    Dpa,
    Hd,
}

impl SchedulerMode {
    pub const ALL: [SchedulerMode; 3] = [SchedulerMode::Fpa, SchedulerMode::Dpa, SchedulerMode::Hd];

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerMode::Fpa => "fpa",
            SchedulerMode::Dpa => "dpa",
            SchedulerMode::Hd => "hd",
        }
    }
}

impl std::fmt::Display for SchedulerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchedulerMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fpa" => Ok(SchedulerMode::Fpa),
            "dpa" => Ok(SchedulerMode::Dpa),
            "hd" => Ok(SchedulerMode::Hd),
            other => Err(invalid(format!("unknown scheduler mode {other:?}"))),
        }
    }
}

/// Which links transmit in a TTI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CombinationClass {
    UlDlD2d,
    UlDl,
    UlD2d,
    DlD2d,
    Ul,
    Dl,
    D2d,
    None,
}

impl CombinationClass {
    pub const ALL: [CombinationClass; 8] = [
        CombinationClass::UlDlD2d,
        CombinationClass::UlDl,
        CombinationClass::UlD2d,
        CombinationClass::DlD2d,
        CombinationClass::Ul,
        CombinationClass::Dl,
        CombinationClass::D2d,
        CombinationClass::None,
    ];

    pub fn of(sel: &Selection) -> Self {
        match (sel.ul.is_some(), sel.dl.is_some(), sel.d2d.is_some()) {
            (true, true, true) => CombinationClass::UlDlD2d,
            (true, true, false) => CombinationClass::UlDl,
            (true, false, true) => CombinationClass::UlD2d,
            (false, true, true) => CombinationClass::DlD2d,
            (true, false, false) => CombinationClass::Ul,
            (false, true, false) => CombinationClass::Dl,
            (false, false, true) => CombinationClass::D2d,
            (false, false, false) => CombinationClass::None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CombinationClass::UlDlD2d => "UL+DL+D2D",
            CombinationClass::UlDl => "UL+DL",
            CombinationClass::UlD2d => "UL+D2D",
            CombinationClass::DlD2d => "DL+D2D",
            CombinationClass::Ul => "UL",
            CombinationClass::Dl => "DL",
            CombinationClass::D2d => "D2D",
            CombinationClass::None => "NONE",
        }
    }

    pub fn concurrent_links(&self) -> usize {
        match self {
            CombinationClass::UlDlD2d => 3,
            CombinationClass::UlDl | CombinationClass::UlD2d | CombinationClass::DlD2d => 2,
            CombinationClass::Ul | CombinationClass::Dl | CombinationClass::D2d => 1,
            CombinationClass::None => 0,
        }
    }

    pub fn has_d2d(&self) -> bool {
        matches!(
            self,
            CombinationClass::UlDlD2d | CombinationClass::UlD2d | CombinationClass::DlD2d | CombinationClass::D2d
        )
    }
}

/// CQI table and SINR floors shared by every link.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub cqi_table: CqiTable,
    /// `[dl, ul, d2d]` floors in dB for DPA/HD; defaults to the lowest CQI threshold.
    pub min_sinr_db: Option<[f64; 3]>,
}

impl LinkConfig {
    pub fn floors(&self) -> SinrFloors {
        let db = self.min_sinr_db.unwrap_or([self.cqi_table.lowest_threshold_db(); 3]);
        SinrFloors { min_sinr: db.map(db_to_linear) }
    }
}

/// Everything besides the scenario that a simulation run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub utility: UtilityConfig,
    pub link: LinkConfig,
    pub optimizer: OptimizerConfig,
    /// seconds
    pub tti_duration: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            utility: UtilityConfig::default(),
            link: LinkConfig::default(),
            optimizer: OptimizerConfig::default(),
            tti_duration: 1e-3,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.utility.validate()?;
        self.optimizer.validate()?;
        if !(self.tti_duration > 0.0 && self.tti_duration.is_finite()) {
            return Err(invalid("tti_duration must be > 0"));
        }
        if let Some(db) = self.link.min_sinr_db {
            if db.iter().any(|v| !v.is_finite()) {
                return Err(invalid("min_sinr_db entries must be finite"));
            }
        }
        Ok(())
    }
}

/// The outcome of one TTI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtiDecision {
    pub selection: Selection,
    pub powers: PowerAllocation,
    pub sinrs: SinrTriple,
    /// bits/s, `[dl, ul, d2d]`, zero for empty slots.
    pub rates: [f64; 3],
    pub utility: f64,
    pub combination_class: CombinationClass,
}

impl TtiDecision {
    /// Evaluates `sel` at `powers` and records the result.
    pub fn evaluate(
        scenario: &Scenario,
        state: &RateState,
        table: &CqiTable,
        sel: Selection,
        powers: PowerAllocation,
    ) -> Self {
        let sinrs = sinr_triple(scenario, &sel, &powers);
        let rates = slot_rates(&sel, &sinrs, scenario.budget.bandwidth, table);
        Self {
            selection: sel,
            powers,
            sinrs,
            rates,
            utility: utility_from_rates(&sel, rates, state),
            combination_class: CombinationClass::of(&sel),
        }
    }

    pub fn idle() -> Self {
        Self {
            selection: Selection::EMPTY,
            powers: PowerAllocation::ZERO,
            sinrs: SinrTriple::default(),
            rates: [0.0; 3],
            utility: 0.0,
            combination_class: CombinationClass::None,
        }
    }
}

/// All candidates for a TTI, in tie-break order. Excludes the all-empty
/// selection; HD drops candidates with both DL and UL scheduled.
pub fn enumerate_selections(num_cues: usize, num_d2d: usize, mode: SchedulerMode) -> Vec<Selection> {
    let cue_slots = || (0..num_cues).map(Some).chain(std::iter::once(None));
    let mut out = Vec::new();
    for dl in cue_slots() {
        for ul in cue_slots() {
            if mode == SchedulerMode::Hd && dl.is_some() && ul.is_some() {
                continue;
            }
            for d2d in (0..num_d2d).map(Some).chain(std::iter::once(None)) {
                let sel = Selection { dl, ul, d2d };
                if sel.is_valid() && !sel.is_empty() {
                    out.push(sel);
                }
            }
        }
    }
    out
}

/// Per-scenario scheduler with the TTI-invariant work (candidate list,
/// per-candidate channel and bounds) done once.
#[derive(Debug, Clone)]
pub struct Scheduler<'a> {
    scenario: &'a Scenario,
    mode: SchedulerMode,
    cfg: &'a SimulationConfig,
    floors: SinrFloors,
    candidates: Vec<Candidate>,
}

#[derive(Debug, Clone)]
struct Candidate {
    selection: Selection,
    channel: SelectionChannel,
    bounds: BoxBounds,
    /// CQI class of each slot with no interference at peak power
    ceiling_classes: [usize; 3],
    /// With both DL and UL active: for each DL class the FBS can reach, the
    /// best UL class left after the self-interference that DL class costs.
    duplex_classes: Vec<(usize, usize)>,
}

/// Relative slack so that rounding never lets the bound fall below the objective.
const BOUND_SLACK: f64 = 1e-9;

impl Candidate {
    fn new(scenario: &Scenario, selection: Selection, table: &CqiTable) -> Self {
        let peak = scenario.budget.peak_powers();
        let channel = SelectionChannel::new(scenario, &selection);
        let ceiling_classes = channel.interference_free_sinrs(&peak).map(|s| table.class_of(s));
        let mut duplex_classes = Vec::new();
        if selection.dl.is_some() && selection.ul.is_some() {
            for k in 0..=ceiling_classes[DL] {
                let p_dl = if k == 0 { 0.0 } else { channel.min_dl_power_for(table.thresholds_linear()[k - 1]) };
                let ul = channel.uplink_ceiling(peak[UL], p_dl * (1.0 - BOUND_SLACK)) * (1.0 + BOUND_SLACK);
                duplex_classes.push((k, table.class_of(ul).min(ceiling_classes[UL])));
            }
        }
        Self {
            bounds: BoxBounds::new(peak, selection.active()).expect("peak powers are finite"),
            selection,
            channel,
            ceiling_classes,
            duplex_classes,
        }
    }

    /// No power allocation can give this candidate more utility.
    fn utility_bound(&self, utilities: &ClassUtilityTable) -> f64 {
        let [dl, ul, d2d] = utilities.rows(&self.selection);
        let mut bound = 0.0;
        match (dl, ul) {
            (Some(dl), Some(ul)) => {
                bound += self
                    .duplex_classes
                    .iter()
                    .map(|&(kd, ku)| dl[kd] + ul[ku])
                    .fold(f64::NEG_INFINITY, f64::max);
            }
            _ => {
                if let Some(dl) = dl {
                    bound += dl[self.ceiling_classes[DL]];
                }
                if let Some(ul) = ul {
                    bound += ul[self.ceiling_classes[UL]];
                }
            }
        }
        if let Some(d2d) = d2d {
            bound += d2d[self.ceiling_classes[D2D]];
        }
        bound
    }
}

impl<'a> Scheduler<'a> {
    pub fn new(scenario: &'a Scenario, mode: SchedulerMode, cfg: &'a SimulationConfig) -> Self {
        let candidates = enumerate_selections(scenario.num_cues(), scenario.num_d2d(), mode)
            .into_iter()
            .map(|selection| Candidate::new(scenario, selection, &cfg.link.cqi_table))
            .collect();
        Self { scenario, mode, cfg, floors: cfg.link.floors(), candidates }
    }

    pub fn mode(&self) -> SchedulerMode {
        self.mode
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn decide(&self, state: &RateState) -> TtiDecision {
        match self.mode {
            SchedulerMode::Fpa => self.decide_full_power(state),
            SchedulerMode::Dpa | SchedulerMode::Hd => self.decide_optimized(state),
        }
    }

    fn objective<'t>(
        &'t self,
        cand: &'t Candidate,
        utilities: &'t ClassUtilityTable,
    ) -> impl Fn(&[f64; 3]) -> Evaluation + 't {
        let rows = utilities.rows(&cand.selection);
        let table = &self.cfg.link.cqi_table;
        move |p: &[f64; 3]| {
            let sinrs = cand.channel.sinrs(p);
            let mut utility = 0.0;
            for (slot, row) in rows.iter().enumerate() {
                if let Some(row) = row {
                    utility += row[table.class_of(sinrs[slot])];
                }
            }
            Evaluation { utility, sinrs }
        }
    }

    fn decide_full_power(&self, state: &RateState) -> TtiDecision {
        let utilities = ClassUtilityTable::new(state, &self.cfg.link.cqi_table, self.scenario.budget.bandwidth);
        let mut best: Option<(usize, f64)> = None;
        for (i, cand) in self.candidates.iter().enumerate() {
            let u = self.objective(cand, &utilities)(&cand.bounds.upper).utility;
            if best.is_none_or(|(_, bu)| u > bu) {
                best = Some((i, u));
            }
        }
        match best {
            Some((i, _)) => {
                let cand = &self.candidates[i];
                let powers = PowerAllocation::from_array(cand.bounds.upper);
                TtiDecision::evaluate(self.scenario, state, &self.cfg.link.cqi_table, cand.selection, powers)
            }
            None => TtiDecision::idle(),
        }
    }

    /// Branch and bound over the candidates: searched in order of decreasing
    /// utility bound, stopping once the bound drops below the incumbent. The
    /// winner is the same as searching every candidate and keeping the first
    /// maximum in enumeration order.
    fn decide_optimized(&self, state: &RateState) -> TtiDecision {
        let utilities = ClassUtilityTable::new(state, &self.cfg.link.cqi_table, self.scenario.budget.bandwidth);
        let mut order: Vec<(f64, usize)> =
            self.candidates.iter().enumerate().map(|(i, c)| (c.utility_bound(&utilities), i)).collect();
        order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut best: Option<(usize, f64, PowerAllocation)> = None;
        for (bound, i) in order {
            if let Some((_, bu, _)) = best {
                if bound < bu {
                    break;
                }
            }
            let cand = &self.candidates[i];
            let f = self.objective(cand, &utilities);
            let r = pattern_search_maximize(&f, &cand.bounds, &self.floors, &self.cfg.optimizer);
            if !r.feasible {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bu, _)) => r.best_utility > bu || (r.best_utility == bu && i < bi),
            };
            if better {
                best = Some((i, r.best_utility, r.best_power));
            }
        }
        match best {
            Some((i, _, powers)) => TtiDecision::evaluate(
                self.scenario,
                state,
                &self.cfg.link.cqi_table,
                self.candidates[i].selection,
                powers,
            ),
            None => TtiDecision::idle(),
        }
    }
}

/// Argmax of the utility at peak power.
pub fn schedule_fpa(scenario: &Scenario, state: &RateState, cfg: &SimulationConfig) -> TtiDecision {
    Scheduler::new(scenario, SchedulerMode::Fpa, cfg).decide(state)
}

/// Joint selection and power optimization over every candidate.
pub fn schedule_dpa(scenario: &Scenario, state: &RateState, cfg: &SimulationConfig) -> TtiDecision {
    Scheduler::new(scenario, SchedulerMode::Dpa, cfg).decide(state)
}

/// DPA over half-duplex candidates only.
pub fn schedule_hd(scenario: &Scenario, state: &RateState, cfg: &SimulationConfig) -> TtiDecision {
    Scheduler::new(scenario, SchedulerMode::Hd, cfg).decide(state)
}

/// Decisions of a full run plus the state needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub decisions: Vec<TtiDecision>,
    pub initial_state: RateState,
    pub final_state: RateState,
    pub scenario: Scenario,
    pub mode: SchedulerMode,
    /// seconds
    pub tti_duration: f64,
}

impl SimulationTrace {
    pub fn num_ttis(&self) -> usize {
        self.decisions.len()
    }

    /// Re-applies every decision's rates to the initial state.
    pub fn replay(&self) -> RateState {
        let mut state = self.initial_state.clone();
        for d in &self.decisions {
            state.update(&d.selection, d.rates);
        }
        state
    }
}

pub fn run_simulation(
    scenario: &Scenario,
    mode: SchedulerMode,
    num_ttis: usize,
    cfg: &SimulationConfig,
) -> Result<SimulationTrace> {
    if num_ttis == 0 {
        return Err(invalid("num_ttis must be >= 1"));
    }
    cfg.validate()?;
    let scheduler = Scheduler::new(scenario, mode, cfg);
    let initial_state = RateState::for_scenario(scenario, &cfg.utility);
    let mut state = initial_state.clone();
    let mut decisions = Vec::with_capacity(num_ttis);
    for _ in 0..num_ttis {
        let d = scheduler.decide(&state);
        state.update(&d.selection, d.rates);
        decisions.push(d);
    }
    Ok(SimulationTrace {
        decisions,
        initial_state,
        final_state: state,
        scenario: scenario.clone(),
        mode,
        tti_duration: cfg.tti_duration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_scenario, D2dPair, Position, ScenarioConfig};
    use crate::utility::utility_value;

    fn brute_force_count(n: usize, l: usize, hd: bool) -> usize {
        let mut count = 0;
        for dl in 0..=n {
            for ul in 0..=n {
                for k in 0..=l {
                    // index n / l stands for "empty"
                    let (dl_e, ul_e, k_e) = (dl == n, ul == n, k == l);
                    if !dl_e && !ul_e && dl == ul {
                        continue;
                    }
                    if dl_e && ul_e && k_e {
                        continue;
                    }
                    if hd && !dl_e && !ul_e {
                        continue;
                    }
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn enumeration_counts() {
        let fd = enumerate_selections(10, 5, SchedulerMode::Dpa);
        assert_eq!(fd.len(), brute_force_count(10, 5, false));
        assert_eq!(fd.len(), 665);
        assert_eq!(enumerate_selections(1, 0, SchedulerMode::Fpa).len(), 2);
        let hd = enumerate_selections(10, 5, SchedulerMode::Hd);
        assert_eq!(hd.len(), 125);
        assert_eq!(hd.len(), brute_force_count(10, 5, true));
        assert!(hd.iter().all(|s| s.dl.is_none() || s.ul.is_none()));
        assert!(fd.iter().all(|s| s.is_valid() && !s.is_empty()));
        let mut uniq = fd.clone();
        uniq.sort_by_key(|s| (s.dl, s.ul, s.d2d));
        uniq.dedup();
        assert_eq!(uniq.len(), fd.len());
    }

    #[test]
    fn enumeration_order_puts_empty_last() {
        let s = enumerate_selections(2, 1, SchedulerMode::Fpa);
        assert_eq!(s[0], Selection::new(Some(0), Some(1), Some(0)));
        assert_eq!(*s.last().unwrap(), Selection::new(None, None, Some(0)));
    }

    #[test]
    fn combination_classes() {
        assert_eq!(CombinationClass::of(&Selection::new(Some(0), Some(1), Some(0))), CombinationClass::UlDlD2d);
        assert_eq!(CombinationClass::of(&Selection::new(None, Some(1), Some(0))), CombinationClass::UlD2d);
        assert_eq!(CombinationClass::of(&Selection::EMPTY), CombinationClass::None);
        assert_eq!(CombinationClass::ALL.iter().filter(|c| c.has_d2d()).count(), 4);
    }

    #[test]
    fn single_cue_near_fbs() {
        let s = Scenario::from_positions(ScenarioConfig::default(), vec![Position::new(32.0, 25.0)], vec![]).unwrap();
        let cfg = SimulationConfig::default();
        let state = RateState::for_scenario(&s, &cfg.utility);
        let d = schedule_fpa(&s, &state, &cfg);
        assert!(matches!(d.combination_class, CombinationClass::Dl | CombinationClass::Ul));
        assert!(d.utility > 0.0);
    }

    #[test]
    fn fpa_is_argmax_over_candidates() {
        let scenario = generate_scenario(&ScenarioConfig { num_cues: 3, num_d2d_links: 2, ..Default::default() }, 9).unwrap();
        let cfg = SimulationConfig::default();
        let mut state = RateState::for_scenario(&scenario, &cfg.utility);
        state.avg_dl = vec![2e6, 5e5, 1e7];
        state.avg_ul = vec![1e4, 3e6, 8e5];
        state.avg_d2d = vec![4e6, 9e6];
        let d = schedule_fpa(&scenario, &state, &cfg);
        let table = &cfg.link.cqi_table;
        for sel in enumerate_selections(3, 2, SchedulerMode::Fpa) {
            let p = PowerAllocation::peak_for(&sel, &scenario);
            assert!(d.utility >= utility_value(&sel, &p, &state, &scenario, table));
        }
        assert_eq!(d.powers, PowerAllocation::peak_for(&d.selection, &scenario));
    }

    #[test]
    fn dpa_lowers_fbs_power_for_nearby_dl_cue() {
        // DL CUE 2 m from the FBS, UL CUE 20 m away: at peak DL power the
        // self-interference drowns the UL, so DPA backs the FBS off.
        let s = Scenario::from_positions(
            ScenarioConfig::default(),
            vec![Position::new(32.0, 25.0), Position::new(30.0, 5.0)],
            vec![D2dPair { tx: Position::new(5.0, 5.0), rx: Position::new(7.0, 5.0) }],
        )
        .unwrap();
        let cfg = SimulationConfig::default();
        let state = RateState::for_scenario(&s, &cfg.utility);
        let peak = PowerAllocation::peak_for(&Selection::new(Some(0), Some(1), None), &s);
        let ul_at_peak = crate::link::sinr_uplink(&s, &Selection::new(Some(0), Some(1), None), &peak, s.budget.sic_linear);
        assert!(ul_at_peak < cfg.link.floors().min_sinr[1], "peak power must violate the UL floor");

        let d = schedule_dpa(&s, &state, &cfg);
        assert_eq!(d.selection.dl, Some(0));
        assert_eq!(d.selection.ul, Some(1));
        assert!(d.powers.p_dl < s.budget.p_fbs_max);
    }

    #[test]
    fn pruned_search_matches_exhaustive() {
        let scenario = generate_scenario(&ScenarioConfig { num_cues: 4, num_d2d_links: 2, ..Default::default() }, 9).unwrap();
        let cfg = SimulationConfig::default();
        for mode in [SchedulerMode::Dpa, SchedulerMode::Hd] {
            let sched = Scheduler::new(&scenario, mode, &cfg);
            let mut state = RateState::for_scenario(&scenario, &cfg.utility);
            for _ in 0..25 {
                let utilities = ClassUtilityTable::new(&state, &cfg.link.cqi_table, scenario.budget.bandwidth);
                let mut best: Option<(f64, Selection, PowerAllocation)> = None;
                for cand in &sched.candidates {
                    let f = sched.objective(cand, &utilities);
                    let r = pattern_search_maximize(&f, &cand.bounds, &sched.floors, &cfg.optimizer);
                    if r.feasible && best.is_none_or(|(bu, _, _)| r.best_utility > bu) {
                        best = Some((r.best_utility, cand.selection, r.best_power));
                    }
                }
                let (_, sel, powers) = best.unwrap();
                let d = sched.decide(&state);
                assert_eq!((d.selection, d.powers), (sel, powers));
                state.update(&d.selection, d.rates);
            }
        }
    }

    #[test]
    fn hd_never_schedules_both_directions() {
        let scenario = generate_scenario(&ScenarioConfig::default(), 5).unwrap();
        let cfg = SimulationConfig::default();
        let trace = run_simulation(&scenario, SchedulerMode::Hd, 30, &cfg).unwrap();
        assert!(trace.decisions.iter().all(|d| d.selection.dl.is_none() || d.selection.ul.is_none()));
    }

    #[test]
    fn single_tti_trace() {
        let scenario = generate_scenario(&ScenarioConfig::default(), 2).unwrap();
        let cfg = SimulationConfig::default();
        let trace = run_simulation(&scenario, SchedulerMode::Fpa, 1, &cfg).unwrap();
        assert_eq!(trace.num_ttis(), 1);
        let d = &trace.decisions[0];
        let (b, g, e) = (cfg.utility.beta, cfg.utility.gamma, cfg.utility.epsilon_rate);
        let expect = |r: f64| (b * e + g * r).max(e);
        for i in 0..scenario.num_cues() {
            let r = if d.selection.dl == Some(i) { d.rates[0] } else { 0.0 };
            assert_eq!(trace.final_state.avg_dl[i], expect(r));
        }
        assert_eq!(trace.replay(), trace.final_state);
    }

    #[test]
    fn zero_ttis_rejected() {
        let scenario = generate_scenario(&ScenarioConfig::default(), 2).unwrap();
        assert!(run_simulation(&scenario, SchedulerMode::Fpa, 0, &SimulationConfig::default()).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("DPA".parse::<SchedulerMode>().unwrap(), SchedulerMode::Dpa);
        assert!("full".parse::<SchedulerMode>().is_err());
    }
}
