//! Scenario generation and the deterministic channel model.
//!
//! A scenario is one random drop of CUEs and D2D pairs in a rectangle with the
//! femto base station (FBS) at its center. Channel gains follow the NLOS
//! log-distance model `147.4 + 43.3 log10(R_km)` dB and are converted to linear
//! power gains once, together with noise powers and power budgets, so that the
//! scheduler's hot loop only touches linear watts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::{db_to_linear, dbm_to_watts};

/// Distance floor for gain computation, meters.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Rejection-sampling attempts for a D2D receiver before the transmitter is redrawn.
const RX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D2dPair {
    pub tx: Position,
    pub rx: Position,
}

impl D2dPair {
    pub fn length(&self) -> f64 {
        self.tx.distance(&self.rx)
    }
}

/// Physical layout and link budget of the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// meters
    pub area_width: f64,
    /// meters
    pub area_height: f64,
    pub num_cues: usize,
    pub num_d2d_links: usize,
    /// meters
    pub max_d2d_length: f64,
    /// Hz
    pub bandwidth: f64,
    /// dB
    pub nf_dl: f64,
    /// dB
    pub nf_ul: f64,
    /// dB
    pub nf_d2d: f64,
    /// dBm/Hz
    pub thermal_noise_density: f64,
    /// dBm
    pub p_fbs_max: f64,
    /// dBm
    pub p_cue_max: f64,
    /// dBm
    pub p_d2d_max: f64,
    /// Self-interference cancellation, dB.
    pub sic: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area_width: 60.0,
            area_height: 50.0,
            num_cues: 10,
            num_d2d_links: 5,
            max_d2d_length: 4.0,
            bandwidth: 1e7,
            nf_dl: 8.0,
            nf_ul: 9.0,
            nf_d2d: 8.0,
            thermal_noise_density: -174.0,
            p_fbs_max: 1.78,
            p_cue_max: 0.78,
            p_d2d_max: 0.78,
            sic: 65.0,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.area_width) || !positive(self.area_height) {
            return Err(invalid("area dimensions must be > 0"));
        }
        if self.num_cues == 0 || self.num_d2d_links == 0 {
            return Err(invalid("num_cues and num_d2d_links must be > 0"));
        }
        if !positive(self.max_d2d_length) {
            return Err(invalid("max_d2d_length must be > 0"));
        }
        if !positive(self.bandwidth) {
            return Err(invalid("bandwidth must be > 0"));
        }
        if !(self.sic.is_finite() && self.sic >= 0.0) {
            return Err(invalid("sic must be >= 0 dB"));
        }
        for (name, v) in [
            ("nf_dl", self.nf_dl),
            ("nf_ul", self.nf_ul),
            ("nf_d2d", self.nf_d2d),
            ("thermal_noise_density", self.thermal_noise_density),
            ("p_fbs_max", self.p_fbs_max),
            ("p_cue_max", self.p_cue_max),
            ("p_d2d_max", self.p_d2d_max),
        ] {
            if !v.is_finite() {
                return Err(invalid(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &Position) -> bool {
        (0.0..=self.area_width).contains(&p.x) && (0.0..=self.area_height).contains(&p.y)
    }
}

/// NLOS path loss in dB for a distance in meters.
pub fn path_loss_db(distance: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    Ok(147.4 + 43.3 * (distance / 1000.0).log10())
}

/// Linear power gain between two points, with the distance floored at [`MIN_DISTANCE_M`].
pub fn channel_gain(a: &Position, b: &Position) -> f64 {
    gain_at_distance(a.distance(b))
}

pub fn gain_at_distance(distance: f64) -> f64 {
    let d = distance.max(MIN_DISTANCE_M);
    // d >= 1 m, so the path loss is always defined
    let pl = 147.4 + 43.3 * (d / 1000.0).log10();
    db_to_linear(-pl)
}

/// Thermal noise plus receiver noise figure over `bandwidth`, in watts.
pub fn noise_power(bandwidth: f64, noise_figure_db: f64, density_dbm_hz: f64) -> f64 {
    dbm_to_watts(density_dbm_hz + 10.0 * bandwidth.log10() + noise_figure_db)
}

/// Linear gains for every ordered pair any SINR expression references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainTable {
    num_cues: usize,
    num_d2d: usize,
    pub fbs_to_cue: Vec<f64>,
    pub cue_to_fbs: Vec<f64>,
    /// Row-major `[src * num_cues + dst]`.
    cue_to_cue: Vec<f64>,
    /// D2D tx to its own rx.
    pub d2d_direct: Vec<f64>,
    pub d2d_tx_to_fbs: Vec<f64>,
    /// Row-major `[link * num_cues + cue]`.
    d2d_tx_to_cue: Vec<f64>,
    pub fbs_to_d2d_rx: Vec<f64>,
    /// Row-major `[cue * num_d2d + link]`.
    cue_to_d2d_rx: Vec<f64>,
}

impl GainTable {
    pub fn build(fbs: &Position, cues: &[Position], pairs: &[D2dPair]) -> Self {
        let n = cues.len();
        let l = pairs.len();
        let mut cue_to_cue = Vec::with_capacity(n * n);
        for a in cues {
            for b in cues {
                cue_to_cue.push(channel_gain(a, b));
            }
        }
        let mut d2d_tx_to_cue = Vec::with_capacity(l * n);
        for p in pairs {
            for c in cues {
                d2d_tx_to_cue.push(channel_gain(&p.tx, c));
            }
        }
        let mut cue_to_d2d_rx = Vec::with_capacity(n * l);
        for c in cues {
            for p in pairs {
                cue_to_d2d_rx.push(channel_gain(c, &p.rx));
            }
        }
        Self {
            num_cues: n,
            num_d2d: l,
            fbs_to_cue: cues.iter().map(|c| channel_gain(fbs, c)).collect(),
            cue_to_fbs: cues.iter().map(|c| channel_gain(c, fbs)).collect(),
            cue_to_cue,
            d2d_direct: pairs.iter().map(|p| channel_gain(&p.tx, &p.rx)).collect(),
            d2d_tx_to_fbs: pairs.iter().map(|p| channel_gain(&p.tx, fbs)).collect(),
            d2d_tx_to_cue,
            fbs_to_d2d_rx: pairs.iter().map(|p| channel_gain(fbs, &p.rx)).collect(),
            cue_to_d2d_rx,
        }
    }

    pub fn cue_to_cue(&self, src: usize, dst: usize) -> f64 {
        self.cue_to_cue[src * self.num_cues + dst]
    }

    pub fn d2d_tx_to_cue(&self, link: usize, cue: usize) -> f64 {
        self.d2d_tx_to_cue[link * self.num_cues + cue]
    }

    pub fn cue_to_d2d_rx(&self, cue: usize, link: usize) -> f64 {
        self.cue_to_d2d_rx[cue * self.num_d2d + link]
    }

    /// Every stored gain, for bulk invariant checks.
    pub fn all_gains(&self) -> impl Iterator<Item = f64> + '_ {
        self.fbs_to_cue
            .iter()
            .chain(&self.cue_to_fbs)
            .chain(&self.cue_to_cue)
            .chain(&self.d2d_direct)
            .chain(&self.d2d_tx_to_fbs)
            .chain(&self.d2d_tx_to_cue)
            .chain(&self.fbs_to_d2d_rx)
            .chain(&self.cue_to_d2d_rx)
            .copied()
    }
}

/// Noise powers, peak powers and SIC in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub noise_dl: f64,
    pub noise_ul: f64,
    pub noise_d2d: f64,
    pub p_fbs_max: f64,
    pub p_cue_max: f64,
    pub p_d2d_max: f64,
    pub sic_linear: f64,
    pub bandwidth: f64,
}

impl LinkBudget {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            noise_dl: noise_power(cfg.bandwidth, cfg.nf_dl, cfg.thermal_noise_density),
            noise_ul: noise_power(cfg.bandwidth, cfg.nf_ul, cfg.thermal_noise_density),
            noise_d2d: noise_power(cfg.bandwidth, cfg.nf_d2d, cfg.thermal_noise_density),
            p_fbs_max: dbm_to_watts(cfg.p_fbs_max),
            p_cue_max: dbm_to_watts(cfg.p_cue_max),
            p_d2d_max: dbm_to_watts(cfg.p_d2d_max),
            sic_linear: db_to_linear(cfg.sic),
            bandwidth: cfg.bandwidth,
        }
    }

    /// Peak powers as `[dl, ul, d2d]` watts.
    pub fn peak_powers(&self) -> [f64; 3] {
        [self.p_fbs_max, self.p_cue_max, self.p_d2d_max]
    }
}

/// One random drop: positions, pairings and the derived channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub fbs_position: Position,
    pub cue_positions: Vec<Position>,
    pub d2d_pairs: Vec<D2dPair>,
    pub gains: GainTable,
    pub budget: LinkBudget,
}

impl Scenario {
    /// Builds a scenario from explicit node positions.
    pub fn from_positions(
        config: ScenarioConfig,
        cue_positions: Vec<Position>,
        d2d_pairs: Vec<D2dPair>,
    ) -> Result<Self> {
        let mut config = config;
        config.num_cues = cue_positions.len();
        config.num_d2d_links = d2d_pairs.len();
        if !(config.bandwidth > 0.0 && config.sic >= 0.0) {
            return Err(invalid("bandwidth must be > 0 and sic >= 0"));
        }
        let fbs = Position::new(config.area_width / 2.0, config.area_height / 2.0);
        let gains = GainTable::build(&fbs, &cue_positions, &d2d_pairs);
        let budget = LinkBudget::from_config(&config);
        Ok(Self {
            seed: config.seed,
            config,
            fbs_position: fbs,
            cue_positions,
            d2d_pairs,
            gains,
            budget,
        })
    }

    pub fn num_cues(&self) -> usize {
        self.cue_positions.len()
    }

    pub fn num_d2d(&self) -> usize {
        self.d2d_pairs.len()
    }

    /// Same drop with a different SIC value. Gains and positions are untouched.
    pub fn with_sic_db(&self, sic_db: f64) -> Self {
        let mut s = self.clone();
        s.config.sic = sic_db;
        s.budget.sic_linear = db_to_linear(sic_db);
        s
    }
}

/// Draws a scenario; a pure function of `(config, seed)`.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (config.area_width, config.area_height);

    let cues: Vec<Position> = (0..config.num_cues)
        .map(|_| Position::new(rng.gen_range(0.0..=w), rng.gen_range(0.0..=h)))
        .collect();

    let r = config.max_d2d_length;
    let mut pairs = Vec::with_capacity(config.num_d2d_links);
    while pairs.len() < config.num_d2d_links {
        let tx = Position::new(rng.gen_range(0.0..=w), rng.gen_range(0.0..=h));
        for _ in 0..RX_PLACEMENT_ATTEMPTS {
            // uniform in the bounding square, rejected outside disc or rectangle
            let rx = Position::new(tx.x + rng.gen_range(-r..=r), tx.y + rng.gen_range(-r..=r));
            if tx.distance(&rx) <= r && config.contains(&rx) {
                pairs.push(D2dPair { tx, rx });
                break;
            }
        }
    }

    let mut config = config.clone();
    config.seed = seed;
    Scenario::from_positions(config, cues, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::linear_to_db;

    #[test]
    fn path_loss_values() {
        assert!((path_loss_db(1000.0).unwrap() - 147.4).abs() < 1e-12);
        assert!((path_loss_db(100.0).unwrap() - 104.1).abs() < 1e-9);
        // 39.05 m, center to corner of 60 x 50
        assert!((path_loss_db(39.05).unwrap() - 86.417_190_954_636_74).abs() < 1e-9);
        assert!((path_loss_db(39.05).unwrap() - 86.42).abs() < 5e-3);
    }

    #[test]
    fn path_loss_rejects_degenerate_distance() {
        assert_eq!(path_loss_db(0.0), Err(Error::NonPositiveDistance(0.0)));
        assert!(path_loss_db(-3.0).is_err());
        assert!(path_loss_db(f64::NAN).is_err());
    }

    #[test]
    fn gain_values_and_floor() {
        let g = gain_at_distance(1000.0);
        assert!((g / 1.819_700_858_609_982_7e-15 - 1.0).abs() < 1e-12);
        assert_eq!(gain_at_distance(0.1), gain_at_distance(1.0));
        assert_eq!(gain_at_distance(0.0), gain_at_distance(1.0));
        assert!(gain_at_distance(2.0) > gain_at_distance(2.5));
    }

    #[test]
    fn noise_power_values() {
        let n8 = noise_power(1e7, 8.0, -174.0);
        assert!((n8 / 2.511_886_431_509_582e-13 - 1.0).abs() < 1e-12);
        let n9 = noise_power(1e7, 9.0, -174.0);
        assert!((crate::units::watts_to_dbm(n9) + 95.0).abs() < 1e-9);
        let unit = noise_power(1.0, 0.0, -174.0);
        assert!((crate::units::watts_to_dbm(unit) + 174.0).abs() < 1e-9);
    }

    #[test]
    fn default_budget_gives_ul_two_db_below_dl() {
        let b = LinkBudget::from_config(&ScenarioConfig::default());
        let g = gain_at_distance(25.0);
        let dl = linear_to_db(g * b.p_fbs_max / b.noise_dl);
        let ul = linear_to_db(g * b.p_cue_max / b.noise_ul);
        assert!((dl - ul - 2.0).abs() < 1e-9, "dl {dl} ul {ul}");
    }

    #[test]
    fn scenario_is_deterministic() {
        let cfg = ScenarioConfig::default();
        let a = generate_scenario(&cfg, 42).unwrap();
        let b = generate_scenario(&cfg, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_scenario(&cfg, 43).unwrap();
        assert_ne!(a.cue_positions, c.cue_positions);
    }

    #[test]
    fn scenario_shape_and_containment() {
        let cfg = ScenarioConfig::default();
        for seed in 0..1000 {
            let s = generate_scenario(&cfg, seed).unwrap();
            assert_eq!(s.cue_positions.len(), 10);
            assert_eq!(s.d2d_pairs.len(), 5);
            assert_eq!(s.fbs_position, Position::new(30.0, 25.0));
            for p in &s.cue_positions {
                assert!(cfg.contains(p));
            }
            for pair in &s.d2d_pairs {
                assert!(cfg.contains(&pair.tx) && cfg.contains(&pair.rx));
                assert!(pair.length() <= cfg.max_d2d_length);
            }
            assert!(s.gains.all_gains().all(|g| g > 0.0 && g < 1.0));
            assert!(s.budget.noise_dl > 0.0 && s.budget.noise_ul > 0.0 && s.budget.noise_d2d > 0.0);
        }
    }

    #[test]
    fn cue_x_mean_is_area_center() {
        let cfg = ScenarioConfig::default();
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..10_000 {
            let s = generate_scenario(&cfg, seed).unwrap();
            sum += s.cue_positions.iter().map(|p| p.x).sum::<f64>();
            count += s.cue_positions.len();
        }
        let mean = sum / count as f64;
        assert!((mean - 30.0).abs() < 0.5, "mean x {mean}");
    }

    #[test]
    fn tiny_area_still_places_pairs() {
        let cfg = ScenarioConfig {
            area_width: 0.5,
            area_height: 0.5,
            max_d2d_length: 0.2,
            ..Default::default()
        };
        let s = generate_scenario(&cfg, 7).unwrap();
        assert!(s.d2d_pairs.iter().all(|p| p.length() <= 0.2));
    }

    #[test]
    fn validate_rejects_bad_config() {
        let bad = [
            ScenarioConfig { num_cues: 0, ..Default::default() },
            ScenarioConfig { max_d2d_length: 0.0, ..Default::default() },
            ScenarioConfig { sic: -1.0, ..Default::default() },
            ScenarioConfig { bandwidth: 0.0, ..Default::default() },
            ScenarioConfig { area_width: -5.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(generate_scenario(&cfg, 0), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn with_sic_keeps_geometry() {
        let s = generate_scenario(&ScenarioConfig::default(), 3).unwrap();
        let t = s.with_sic_db(105.0);
        assert_eq!(s.gains, t.gains);
        assert_eq!(s.cue_positions, t.cue_positions);
        assert!((t.budget.sic_linear / 10f64.powf(10.5) - 1.0).abs() < 1e-12);
    }
}
