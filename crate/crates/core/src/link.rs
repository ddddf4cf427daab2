//! SINR of a scheduled selection, the CQI step map and instantaneous rates.
//!
//! A [`Selection`] is a (DL CUE, UL CUE, D2DL) triple where any slot may be
//! empty. For a selection and a [`PowerAllocation`] the three SINRs are
//!
//! ```text
//! dl:  G(FBS->d) p_dl / (N_d + G(u->d) p_ul + G(l_tx->d) p_d2d)
//! ul:  G(u->FBS) p_ul / (N_u + G(l_tx->FBS) p_d2d + p_dl / SIC)
//! d2d: G(l_tx->l_rx) p_d2d / (N_l + G(FBS->l_rx) p_dl + G(u->l_rx) p_ul)
//! ```
//!
//! Empty slots carry zero power and zero gain, so they drop out of the other
//! slots' denominators exactly.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Scenario;
use crate::units::db_to_linear;

/// Slot order used by every 3-vector in the crate.
pub const DL: usize = 0;
pub const UL: usize = 1;
pub const D2D: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Selection {
    pub dl: Option<usize>,
    pub ul: Option<usize>,
    pub d2d: Option<usize>,
}

impl Selection {
    pub const EMPTY: Selection = Selection { dl: None, ul: None, d2d: None };

    pub fn new(dl: Option<usize>, ul: Option<usize>, d2d: Option<usize>) -> Self {
        Self { dl, ul, d2d }
    }

    /// Which of `[dl, ul, d2d]` are scheduled.
    pub fn active(&self) -> [bool; 3] {
        [self.dl.is_some(), self.ul.is_some(), self.d2d.is_some()]
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::EMPTY
    }

    pub fn num_active(&self) -> usize {
        self.active().iter().filter(|a| **a).count()
    }

    /// The same CUE may not be scheduled in both directions.
    pub fn is_valid(&self) -> bool {
        !matches!((self.dl, self.ul), (Some(d), Some(u)) if d == u)
    }
}

/// Transmit powers in watts for the DL (FBS), UL (CUE) and D2D sources.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub p_dl: f64,
    pub p_ul: f64,
    pub p_d2d: f64,
}

impl PowerAllocation {
    pub const ZERO: PowerAllocation = PowerAllocation { p_dl: 0.0, p_ul: 0.0, p_d2d: 0.0 };

    pub fn from_array(p: [f64; 3]) -> Self {
        Self { p_dl: p[DL], p_ul: p[UL], p_d2d: p[D2D] }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.p_dl, self.p_ul, self.p_d2d]
    }

    pub fn total(&self) -> f64 {
        self.p_dl + self.p_ul + self.p_d2d
    }

    /// Peak power on every active slot, zero elsewhere.
    pub fn peak_for(sel: &Selection, scenario: &Scenario) -> Self {
        let peak = scenario.budget.peak_powers();
        let active = sel.active();
        Self::from_array(std::array::from_fn(|i| if active[i] { peak[i] } else { 0.0 }))
    }

    /// Powers are non-negative, within the peak budget, and zero on empty slots.
    pub fn is_consistent_with(&self, sel: &Selection, scenario: &Scenario) -> bool {
        let peak = scenario.budget.peak_powers();
        let active = sel.active();
        self.to_array().iter().enumerate().all(|(i, &p)| {
            if active[i] {
                (0.0..=peak[i]).contains(&p)
            } else {
                p == 0.0
            }
        })
    }
}

/// Linear SINRs `[dl, ul, d2d]`. Values of empty slots are 0 and unused.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SinrTriple {
    pub sinr_dl: f64,
    pub sinr_ul: f64,
    pub sinr_d2d: f64,
}

impl SinrTriple {
    pub fn from_array(s: [f64; 3]) -> Self {
        Self { sinr_dl: s[DL], sinr_ul: s[UL], sinr_d2d: s[D2D] }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.sinr_dl, self.sinr_ul, self.sinr_d2d]
    }
}

/// Gains and noise of one selection, gathered once so that SINR evaluation in
/// the optimizer loop is a handful of multiply-adds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionChannel {
    // downlink
    fbs_to_d: f64,
    u_to_d: f64,
    lt_to_d: f64,
    noise_dl: f64,
    // uplink
    u_to_fbs: f64,
    lt_to_fbs: f64,
    noise_ul: f64,
    sic_linear: f64,
    // d2d
    lt_to_lr: f64,
    fbs_to_lr: f64,
    u_to_lr: f64,
    noise_d2d: f64,
}

impl SelectionChannel {
    pub fn new(scenario: &Scenario, sel: &Selection) -> Self {
        let g = &scenario.gains;
        let b = &scenario.budget;
        let (d, u, l) = (sel.dl, sel.ul, sel.d2d);
        Self {
            fbs_to_d: d.map_or(0.0, |d| g.fbs_to_cue[d]),
            u_to_d: match (u, d) {
                (Some(u), Some(d)) => g.cue_to_cue(u, d),
                _ => 0.0,
            },
            lt_to_d: match (l, d) {
                (Some(l), Some(d)) => g.d2d_tx_to_cue(l, d),
                _ => 0.0,
            },
            noise_dl: b.noise_dl,
            u_to_fbs: u.map_or(0.0, |u| g.cue_to_fbs[u]),
            lt_to_fbs: match (l, u) {
                (Some(l), Some(_)) => g.d2d_tx_to_fbs[l],
                _ => 0.0,
            },
            noise_ul: b.noise_ul,
            sic_linear: b.sic_linear,
            lt_to_lr: l.map_or(0.0, |l| g.d2d_direct[l]),
            fbs_to_lr: l.map_or(0.0, |l| g.fbs_to_d2d_rx[l]),
            u_to_lr: match (u, l) {
                (Some(u), Some(l)) => g.cue_to_d2d_rx(u, l),
                _ => 0.0,
            },
            noise_d2d: b.noise_d2d,
        }
    }

    #[inline]
    pub fn sinr_dl(&self, p: &[f64; 3]) -> f64 {
        self.fbs_to_d * p[DL] / (self.noise_dl + self.u_to_d * p[UL] + self.lt_to_d * p[D2D])
    }

    #[inline]
    pub fn sinr_ul(&self, p: &[f64; 3]) -> f64 {
        self.u_to_fbs * p[UL] / (self.noise_ul + self.lt_to_fbs * p[D2D] + p[DL] / self.sic_linear)
    }

    #[inline]
    pub fn sinr_d2d(&self, p: &[f64; 3]) -> f64 {
        self.lt_to_lr * p[D2D] / (self.noise_d2d + self.fbs_to_lr * p[DL] + self.u_to_lr * p[UL])
    }

    #[inline]
    pub fn sinrs(&self, p: &[f64; 3]) -> [f64; 3] {
        [self.sinr_dl(p), self.sinr_ul(p), self.sinr_d2d(p)]
    }

    /// Least DL power that reaches `sinr` at the DL receiver with no interference.
    pub fn min_dl_power_for(&self, sinr: f64) -> f64 {
        sinr * self.noise_dl / self.fbs_to_d
    }

    /// UL SINR with only noise and FBS self-interference.
    pub fn uplink_ceiling(&self, p_ul: f64, p_dl: f64) -> f64 {
        self.u_to_fbs * p_ul / (self.noise_ul + p_dl / self.sic_linear)
    }

    /// Noise-only SINRs; an upper bound on [`Self::sinrs`] at any powers up to `p`.
    pub fn interference_free_sinrs(&self, p: &[f64; 3]) -> [f64; 3] {
        [
            self.fbs_to_d * p[DL] / self.noise_dl,
            self.u_to_fbs * p[UL] / self.noise_ul,
            self.lt_to_lr * p[D2D] / self.noise_d2d,
        ]
    }
}

/// Downlink SINR of `sel.dl`. Panics if the DL slot is empty.
pub fn sinr_downlink(scenario: &Scenario, sel: &Selection, p: &PowerAllocation) -> f64 {
    assert!(sel.dl.is_some(), "downlink slot is empty");
    SelectionChannel::new(scenario, sel).sinr_dl(&p.to_array())
}

/// Uplink SINR of `sel.ul` with an explicit linear SIC factor.
pub fn sinr_uplink(scenario: &Scenario, sel: &Selection, p: &PowerAllocation, sic_linear: f64) -> f64 {
    assert!(sel.ul.is_some(), "uplink slot is empty");
    assert!(sic_linear > 0.0);
    let mut ch = SelectionChannel::new(scenario, sel);
    ch.sic_linear = sic_linear;
    ch.sinr_ul(&p.to_array())
}

/// D2D SINR at the receiver of `sel.d2d`.
pub fn sinr_d2d(scenario: &Scenario, sel: &Selection, p: &PowerAllocation) -> f64 {
    assert!(sel.d2d.is_some(), "d2d slot is empty");
    SelectionChannel::new(scenario, sel).sinr_d2d(&p.to_array())
}

/// All three SINRs, zero for empty slots.
pub fn sinr_triple(scenario: &Scenario, sel: &Selection, p: &PowerAllocation) -> SinrTriple {
    SinrTriple::from_array(SelectionChannel::new(scenario, sel).sinrs(&p.to_array()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CqiRow {
    pub threshold_db: f64,
    /// bits/s/Hz
    pub efficiency: f64,
}

/// Step map from SINR to spectral efficiency. Class `k` (1-based) is earned
/// when SINR >= the k-th threshold; class 0 means no transmission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct CqiTable {
    rows: Vec<CqiRow>,
    thresholds_linear: Vec<f64>,
    /// `efficiencies[0] == 0`, `efficiencies[k]` is row `k-1`.
    efficiencies: Vec<f64>,
}

/// SINR thresholds (dB) of the 10% BLER SINR-to-CQI mapping.
const DEFAULT_THRESHOLDS_DB: [f64; 15] = [
    -6.936, -5.147, -3.180, -1.253, 0.761, 2.699, 4.694, 6.525, 8.573, 10.366, 12.289, 14.173,
    15.888, 17.814, 19.829,
];

/// LTE 4-bit CQI spectral efficiencies, bits/s/Hz.
const DEFAULT_EFFICIENCIES: [f64; 15] = [
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141, 2.4063, 2.7305, 3.3223,
    3.9023, 4.5234, 5.1152, 5.5547,
];

impl Default for CqiTable {
    fn default() -> Self {
        let rows = DEFAULT_THRESHOLDS_DB
            .iter()
            .zip(DEFAULT_EFFICIENCIES)
            .map(|(&t, e)| (t, e))
            .collect();
        Self::new(rows).expect("default CQI table is well formed")
    }
}

impl CqiTable {
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid("CQI table must have at least one row"));
        }
        for w in rows.windows(2) {
            if !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1) {
                return Err(invalid("CQI thresholds and efficiencies must be strictly increasing"));
            }
        }
        if rows.iter().any(|&(t, e)| !t.is_finite() || !(e > 0.0) || !e.is_finite()) {
            return Err(invalid("CQI rows must be finite with positive efficiency"));
        }
        let rows: Vec<CqiRow> = rows
            .into_iter()
            .map(|(threshold_db, efficiency)| CqiRow { threshold_db, efficiency })
            .collect();
        let thresholds_linear = rows.iter().map(|r| db_to_linear(r.threshold_db)).collect();
        let efficiencies = std::iter::once(0.0).chain(rows.iter().map(|r| r.efficiency)).collect();
        Ok(Self { rows, thresholds_linear, efficiencies })
    }

    pub fn rows(&self) -> &[CqiRow] {
        &self.rows
    }

    /// Number of classes including class 0.
    pub fn num_classes(&self) -> usize {
        self.efficiencies.len()
    }

    pub fn lowest_threshold_db(&self) -> f64 {
        self.rows[0].threshold_db
    }

    pub fn top_efficiency(&self) -> f64 {
        *self.efficiencies.last().unwrap()
    }

    /// CQI class for a linear SINR: 0 below all thresholds, else 1-based row index.
    #[inline]
    pub fn class_of(&self, sinr: f64) -> usize {
        self.thresholds_linear.partition_point(|&t| t <= sinr)
    }

    #[inline]
    pub fn efficiency_of_class(&self, class: usize) -> f64 {
        self.efficiencies[class]
    }

    /// Linear SINR at which each class from 1 upward is earned.
    pub fn thresholds_linear(&self) -> &[f64] {
        &self.thresholds_linear
    }

    /// Efficiencies indexed by class, with class 0 mapped to 0.
    pub fn class_efficiencies(&self) -> &[f64] {
        &self.efficiencies
    }
}

impl TryFrom<Vec<(f64, f64)>> for CqiTable {
    type Error = Error;

    fn try_from(rows: Vec<(f64, f64)>) -> Result<Self> {
        CqiTable::new(rows)
    }
}

impl From<CqiTable> for Vec<(f64, f64)> {
    fn from(t: CqiTable) -> Self {
        t.rows.iter().map(|r| (r.threshold_db, r.efficiency)).collect()
    }
}

/// bits/s/Hz earned at a linear SINR.
pub fn spectral_efficiency(sinr: f64, table: &CqiTable) -> f64 {
    table.efficiency_of_class(table.class_of(sinr))
}

/// bits/s for a scheduled link.
pub fn instantaneous_rate(bandwidth: f64, sinr: f64, table: &CqiTable) -> f64 {
    bandwidth * spectral_efficiency(sinr, table)
}

/// Rates `[dl, ul, d2d]` of a selection; empty slots get exactly 0.
pub fn slot_rates(sel: &Selection, sinrs: &SinrTriple, bandwidth: f64, table: &CqiTable) -> [f64; 3] {
    let s = sinrs.to_array();
    let active = sel.active();
    std::array::from_fn(|i| if active[i] { instantaneous_rate(bandwidth, s[i], table) } else { 0.0 })
}
