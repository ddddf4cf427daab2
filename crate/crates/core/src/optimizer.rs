//! Derivative-free box-constrained maximizer for per-selection power control.
//!
//! The utility is a step function of the powers (through the CQI map), so the
//! solver is a generalized pattern search with multistart: each start polls the
//! `2k` coordinate directions of its `k` active dimensions at the current mesh,
//! moves to the first feasible improving point and expands the mesh, or
//! contracts the mesh when no poll point improves. SINR floors are handled by a
//! feasibility filter: any point violating a floor scores `-inf`.
//!
//! [`grid_search_maximize`] exhaustively scans a uniform grid and serves both as
//! a start-point generator and as a validation oracle.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::link::PowerAllocation;

/// Value of an infeasible point.
pub const INFEASIBLE: f64 = f64::NEG_INFINITY;

/// Coordinate poll order: `+dl, -dl, +ul, -ul, +d2d, -d2d`.
const POLL_SIGNS: [f64; 2] = [1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub active: [bool; 3],
}

impl BoxBounds {
    /// `[0, upper]` on active dimensions; inactive dimensions pinned to 0.
    pub fn new(upper: [f64; 3], active: [bool; 3]) -> Result<Self> {
        if upper.iter().any(|u| !(u.is_finite() && *u >= 0.0)) {
            return Err(invalid("upper bounds must be finite and >= 0"));
        }
        let upper = std::array::from_fn(|i| if active[i] { upper[i] } else { 0.0 });
        Ok(Self { lower: [0.0; 3], upper, active })
    }

    pub fn clip(&self, p: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| if self.active[i] { p[i].clamp(self.lower[i], self.upper[i]) } else { 0.0 })
    }

    pub fn contains(&self, p: &[f64; 3]) -> bool {
        (0..3).all(|i| {
            if self.active[i] {
                self.lower[i] <= p[i] && p[i] <= self.upper[i]
            } else {
                p[i] == 0.0
            }
        })
    }

    fn active_dims(&self) -> impl Iterator<Item = usize> + '_ {
        (0..3).filter(|&i| self.active[i])
    }

    fn width(&self, dim: usize) -> f64 {
        self.upper[dim] - self.lower[dim]
    }
}

/// Minimum linear SINR per slot `[dl, ul, d2d]`, enforced on active slots only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrFloors {
    pub min_sinr: [f64; 3],
}

impl SinrFloors {
    pub const NONE: SinrFloors = SinrFloors { min_sinr: [0.0; 3] };

    pub fn uniform(min_sinr: f64) -> Self {
        Self { min_sinr: [min_sinr; 3] }
    }

    #[inline]
    pub fn satisfied(&self, sinrs: &[f64; 3], active: &[bool; 3]) -> bool {
        (0..3).all(|i| !active[i] || sinrs[i] >= self.min_sinr[i])
    }
}

/// How a multistart run picks one of its starting points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartStrategy {
    /// Upper corner of the box.
    FullPower,
    BoxCenter,
    /// Best feasible point of a uniform grid with `levels` points per active dimension.
    GridBest { levels: usize },
    /// Explicit point, clipped to the box.
    Point([f64; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Initial mesh as a fraction of each box side.
    pub initial_mesh: f64,
    pub mesh_contraction: f64,
    pub mesh_expansion: f64,
    /// Stop once the mesh (fraction of box side) falls below this.
    pub mesh_tolerance: f64,
    /// Objective evaluations allowed per pattern-search run.
    pub max_evaluations: usize,
    pub multistart_points: Vec<StartStrategy>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            initial_mesh: 0.25,
            mesh_contraction: 0.5,
            mesh_expansion: 2.0,
            mesh_tolerance: 1e-4,
            max_evaluations: 2000,
            multistart_points: vec![
                StartStrategy::FullPower,
                StartStrategy::BoxCenter,
                StartStrategy::GridBest { levels: 5 },
            ],
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mesh_contraction > 0.0 && self.mesh_contraction < 1.0 && self.mesh_expansion > 1.0) {
            return Err(invalid("need 0 < mesh_contraction < 1 < mesh_expansion"));
        }
        if !(self.mesh_tolerance > 0.0) || !(self.initial_mesh > 0.0 && self.initial_mesh <= 1.0) {
            return Err(invalid("need mesh_tolerance > 0 and 0 < initial_mesh <= 1"));
        }
        if self.max_evaluations == 0 {
            return Err(invalid("max_evaluations must be > 0"));
        }
        if self.multistart_points.is_empty() {
            return Err(invalid("at least one start strategy is required"));
        }
        if self
            .multistart_points
            .iter()
            .any(|s| matches!(s, StartStrategy::GridBest { levels } if *levels < 2))
        {
            return Err(invalid("grid start strategies need levels >= 2"));
        }
        Ok(())
    }
}

/// Objective output: utility plus the SINRs the floors are checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub utility: f64,
    pub sinrs: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_power: PowerAllocation,
    /// [`INFEASIBLE`] when `feasible` is false.
    pub best_utility: f64,
    pub feasible: bool,
    pub evaluations: usize,
}

impl OptResult {
    fn infeasible(evaluations: usize) -> Self {
        Self { best_power: PowerAllocation::ZERO, best_utility: INFEASIBLE, feasible: false, evaluations }
    }
}

struct Scorer<'a, F> {
    objective: &'a F,
    bounds: &'a BoxBounds,
    floors: &'a SinrFloors,
    evaluations: usize,
}

impl<F: Fn(&[f64; 3]) -> Evaluation> Scorer<'_, F> {
    fn score(&mut self, p: &[f64; 3]) -> f64 {
        self.evaluations += 1;
        let e = (self.objective)(p);
        if self.floors.satisfied(&e.sinrs, &self.bounds.active) && !e.utility.is_nan() {
            e.utility
        } else {
            INFEASIBLE
        }
    }
}

/// Pattern search from one start. Returns the final point and its score.
fn pattern_search_from<F: Fn(&[f64; 3]) -> Evaluation>(
    scorer: &mut Scorer<'_, F>,
    start: [f64; 3],
    cfg: &OptimizerConfig,
) -> ([f64; 3], f64) {
    let bounds = scorer.bounds;
    let budget_end = scorer.evaluations + cfg.max_evaluations;
    let mut x = bounds.clip(&start);
    let mut fx = scorer.score(&x);
    let dims: Vec<usize> = bounds.active_dims().collect();
    if dims.is_empty() {
        return (x, fx);
    }

    let mut mesh = cfg.initial_mesh;
    'outer: while mesh >= cfg.mesh_tolerance {
        let mut improved = false;
        'poll: for &dim in &dims {
            for sign in POLL_SIGNS {
                if scorer.evaluations >= budget_end {
                    break 'outer;
                }
                let mut y = x;
                y[dim] = (x[dim] + sign * mesh * bounds.width(dim)).clamp(bounds.lower[dim], bounds.upper[dim]);
                if y[dim] == x[dim] {
                    continue;
                }
                let fy = scorer.score(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break 'poll;
                }
            }
        }
        mesh = if improved { (mesh * cfg.mesh_expansion).min(1.0) } else { mesh * cfg.mesh_contraction };
    }
    (x, fx)
}

fn grid_scan<F: Fn(&[f64; 3]) -> Evaluation>(scorer: &mut Scorer<'_, F>, levels: usize) -> ([f64; 3], f64) {
    let bounds = scorer.bounds;
    let dims: Vec<usize> = bounds.active_dims().collect();
    let level_value = |dim: usize, i: usize| {
        bounds.lower[dim] + bounds.width(dim) * (i as f64 / (levels - 1) as f64)
    };
    let total = levels.pow(dims.len() as u32);
    let mut best = ([0.0; 3], INFEASIBLE);
    // odometer over active dims, first active dim most significant => lexicographic order
    let mut idx = vec![0usize; dims.len()];
    for _ in 0..total {
        let mut p = [0.0; 3];
        for (k, &dim) in dims.iter().enumerate() {
            p[dim] = level_value(dim, idx[k]);
        }
        let f = scorer.score(&p);
        if f > best.1 {
            best = (p, f);
        }
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < levels {
                break;
            }
            idx[k] = 0;
        }
    }
    best
}

/// Exhaustive search over `levels` evenly spaced values (endpoints included)
/// per active dimension. Ties go to the lexicographically smallest power vector.
pub fn grid_search_maximize<F>(objective: &F, bounds: &BoxBounds, floors: &SinrFloors, levels: usize) -> OptResult
where
    F: Fn(&[f64; 3]) -> Evaluation,
{
    assert!(levels >= 2, "grid search needs at least 2 levels per dimension");
    let mut scorer = Scorer { objective, bounds, floors, evaluations: 0 };
    let (p, f) = grid_scan(&mut scorer, levels);
    if f == INFEASIBLE {
        return OptResult::infeasible(scorer.evaluations);
    }
    OptResult {
        best_power: PowerAllocation::from_array(p),
        best_utility: f,
        feasible: true,
        evaluations: scorer.evaluations,
    }
}

/// Multistart pattern search. Across starts, higher utility wins; equal
/// utilities go to the lower total power, then to the earlier start.
pub fn pattern_search_maximize<F>(
    objective: &F,
    bounds: &BoxBounds,
    floors: &SinrFloors,
    cfg: &OptimizerConfig,
) -> OptResult
where
    F: Fn(&[f64; 3]) -> Evaluation,
{
    let mut scorer = Scorer { objective, bounds, floors, evaluations: 0 };
    let mut best: Option<([f64; 3], f64)> = None;

    for strategy in &cfg.multistart_points {
        let start = match strategy {
            StartStrategy::FullPower => bounds.upper,
            StartStrategy::BoxCenter => std::array::from_fn(|i| 0.5 * (bounds.lower[i] + bounds.upper[i])),
            StartStrategy::GridBest { levels } => {
                let (p, f) = grid_scan(&mut scorer, *levels);
                if f == INFEASIBLE {
                    continue;
                }
                p
            }
            StartStrategy::Point(p) => *p,
        };
        let (x, fx) = pattern_search_from(&mut scorer, start, cfg);
        if fx == INFEASIBLE {
            continue;
        }
        let better = match best {
            None => true,
            Some((bx, bf)) => fx > bf || (fx == bf && x.iter().sum::<f64>() < bx.iter().sum::<f64>()),
        };
        if better {
            best = Some((x, fx));
        }
    }

    match best {
        Some((x, fx)) => OptResult {
            best_power: PowerAllocation::from_array(x),
            best_utility: fx,
            feasible: true,
            evaluations: scorer.evaluations,
        },
        None => OptResult::infeasible(scorer.evaluations),
    }
}
