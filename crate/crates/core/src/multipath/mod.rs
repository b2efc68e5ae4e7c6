//! Dissimilar multipath selection.
//!
//! Five interchangeable algorithms each try to return `k` paths between the
//! same endpoints such that one of them is the optimum, every cost is within
//! `max_diff` percent of it, and every pair is at least `min_diff` percent
//! apart under the area metric.

mod bds;
mod ipa;
mod kspa;
mod labels;
mod se;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use bds::{run_bds, run_hybrid};
use ipa::run_ipa;
use kspa::run_kspa;
use se::run_se;

pub use ipa::{PenaltyBracket, Step as BracketStep};
pub use se::{sensitivity, sensitivity_score, sensitivity_width, wall_columns};

use crate::cost::CostModel;
use crate::dissimilarity::{area_diff, AreaConfig};
use crate::error::{CorridorError, Result};
use crate::graph::{expanding_height_mask, simple_height_mask, Graph3do, GridPoint, HeightMask};
use crate::scalar::{Scalar, COST_TIE_TOL};
use crate::search::{Path, SearchProblem, SearchStats};
use crate::terrain::TerrainGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Se,
    Ipa,
    Kspa,
    Bds,
    Hybrid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [Algorithm::Se, Algorithm::Ipa, Algorithm::Kspa, Algorithm::Bds, Algorithm::Hybrid];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Se => "se",
            Algorithm::Ipa => "ipa",
            Algorithm::Kspa => "kspa",
            Algorithm::Bds => "bds",
            Algorithm::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = CorridorError;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CorridorError::Config(format!("unknown algorithm {s:?}")))
    }
}

/// Vertical band restriction applied to the 3DO graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeightRule<T> {
    None,
    /// Window of radius `r` cells plus `hm` meters around the ground.
    Simple { hm: T, r: usize },
    /// `hi` meters around the ground, widened for ramps and the endpoint sight-line.
    Expanding { hi: T },
}

impl<T: Scalar> HeightRule<T> {
    pub fn name(&self) -> &'static str {
        match self {
            HeightRule::None => "none",
            HeightRule::Simple { .. } => "hr",
            HeightRule::Expanding { .. } => "ehr",
        }
    }

    pub fn build_mask(
        &self,
        grid: &TerrainGrid<T>,
        model: &CostModel<T>,
        src: GridPoint,
        dst: GridPoint,
    ) -> Option<HeightMask> {
        match *self {
            HeightRule::None => None,
            HeightRule::Simple { hm, r } => Some(simple_height_mask(grid, hm, r)),
            HeightRule::Expanding { hi } => Some(expanding_height_mask(
                grid,
                hi,
                model.max_grade,
                Some(((src.x, src.y), (dst.x, dst.y))),
            )),
        }
    }
}

/// What KSPA keeps `kappa` labels for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelKeying {
    /// The `kappa` labels at a grid vertex are shared by all its orientations,
    /// so paths that re-enter a lane from the side are judged against the
    /// lane. A separate tree keeps the optimal label of every augmented
    /// vertex, so the turn-constrained optimum always reaches the destination.
    #[default]
    Position,
    /// All `kappa` labels per augmented vertex.
    State,
}

impl LabelKeying {
    pub fn name(&self) -> &'static str {
        match self {
            LabelKeying::Position => "position",
            LabelKeying::State => "state",
        }
    }
}

impl FromStr for LabelKeying {
    type Err = CorridorError;
    fn from_str(s: &str) -> Result<Self> {
        [LabelKeying::Position, LabelKeying::State]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CorridorError::Config(format!("unknown label keying {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipathConfig<T> {
    pub algorithm: Algorithm,
    /// Number of paths wanted (the hybrid selects `kb` instead).
    pub k: usize,
    /// Minimum pairwise area difference, percent.
    pub min_diff: T,
    /// Maximum cost excess over the optimum, percent.
    pub max_diff: T,
    /// Sensitive elimination wall half-width in cells; derived from `min_diff` when unset.
    pub sensitivity_width: Option<usize>,
    /// Initial penalty width, percent of the map width.
    pub penalty_width: T,
    pub penalty_max: T,
    /// Labels kept per vertex by KSPA; defaults to `k`.
    pub kappa: Option<usize>,
    pub keying: LabelKeying,
    /// Labels per vertex on each side of the hybrid.
    pub ka: usize,
    /// Paths selected by the hybrid.
    pub kb: usize,
    /// Use the straight-paving heuristic (A* or, bidirectionally, average potentials).
    pub astar: bool,
    pub height: HeightRule<T>,
    pub timeout: Option<Duration>,
    /// Expansion budget for the whole run; exceeding it ends the run as timed
    /// out. Unlike `timeout` the outcome does not depend on machine speed.
    pub max_expansions: Option<u64>,
    /// Hard cap on labels held by the multi-label engines.
    pub label_cap: usize,
}

impl<T: Scalar> Default for MultipathConfig<T> {
    fn default() -> Self {
        MultipathConfig {
            algorithm: Algorithm::Bds,
            k: 3,
            min_diff: T::lit(12.0),
            max_diff: T::lit(10.0),
            sensitivity_width: None,
            penalty_width: T::lit(10.0),
            penalty_max: T::lit(320.0),
            kappa: None,
            keying: LabelKeying::Position,
            ka: 2,
            kb: 3,
            astar: false,
            height: HeightRule::None,
            timeout: Some(Duration::from_secs(300)),
            max_expansions: None,
            label_cap: 50_000_000,
        }
    }
}

impl<T: Scalar> MultipathConfig<T> {
    pub fn with_algorithm(self, algorithm: Algorithm) -> Self {
        MultipathConfig { algorithm, ..self }
    }

    /// Paths the configured algorithm must return to count as solved.
    pub fn target(&self) -> usize {
        match self.algorithm {
            Algorithm::Hybrid => self.kb,
            _ => self.k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CorridorError::Config(m.to_string()));
        if self.k < 2 {
            return bad("k must be greater than 1");
        }
        if self.kb < 2 {
            return bad("kb must be greater than 1");
        }
        if self.ka < 1 || self.kappa == Some(0) || self.sensitivity_width == Some(0) {
            return bad("ka, kappa and w must be at least 1");
        }
        if !(self.min_diff >= T::zero()) || !(self.max_diff >= T::zero()) {
            return bad("minDiff and maxDiff must be non-negative");
        }
        if !(self.penalty_width > T::zero()) || self.penalty_width > self.penalty_max {
            return bad("penaltyWidth must lie in (0, penaltyMax]");
        }
        if let HeightRule::Expanding { hi } = self.height {
            if !(hi > T::zero()) {
                return bad("Hi must be positive");
            }
        }
        if let HeightRule::Simple { hm, .. } = self.height {
            if !(hm >= T::zero()) {
                return bad("Hm must be non-negative");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MultipathResult<T> {
    pub algorithm: Algorithm,
    /// Accepted paths ordered by cost.
    pub paths: Vec<Path<T>>,
    /// Optimum found by the algorithm's own engine, if any path exists.
    pub optimal_cost: Option<T>,
    /// Cost of each path over the optimum.
    pub ratios: Vec<T>,
    /// Pairwise area differences in percent.
    pub areas: Vec<Vec<T>>,
    pub solved: bool,
    pub timed_out: bool,
    /// The multi-label engine hit its label cap.
    pub exhausted_memory: bool,
    pub stats: SearchStats,
    /// Shortest-path runs (SE, IPA) or candidate paths examined (KSPA, BDS, hybrid).
    pub iterations: u64,
}

/// Everything an algorithm needs about one query.
#[derive(Clone, Copy)]
pub(crate) struct Instance<'a, T> {
    pub problem: SearchProblem<'a, T>,
    pub area: AreaConfig<T>,
    pub deadline: Option<Instant>,
    pub cfg: &'a MultipathConfig<T>,
}

impl<'a, T: Scalar> Instance<'a, T> {
    pub fn cost_limit(&self, opt: T) -> T {
        (T::one() + self.cfg.max_diff / T::lit(100.0)) * opt
    }

    pub fn over_budget(&self, stats: &SearchStats) -> bool {
        self.cfg.max_expansions.is_some_and(|b| stats.expansions > b)
    }
}

/// Outcome of an algorithm before ordering and scoring.
pub(crate) struct Raw<T> {
    pub paths: Vec<Path<T>>,
    pub optimal_cost: Option<T>,
    pub timed_out: bool,
    pub exhausted_memory: bool,
    pub stats: SearchStats,
    pub iterations: u64,
}

/// Area normalization for a query.
pub fn area_config<T: Scalar>(grid: &TerrainGrid<T>, src: GridPoint, dst: GridPoint, min_diff: T) -> AreaConfig<T> {
    let dxy = grid.dxy();
    let (a, b) = (src.planar(dxy), dst.planar(dxy));
    let dist = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    AreaConfig::new(min_diff, grid.map_width(), dist.max(dxy), dxy)
}

/// Runs the configured algorithm between two ground points.
pub fn solve<T: Scalar>(
    grid: &TerrainGrid<T>,
    model: &CostModel<T>,
    src: GridPoint,
    dst: GridPoint,
    cfg: &MultipathConfig<T>,
) -> Result<MultipathResult<T>> {
    let mask = cfg.height.build_mask(grid, model, src, dst);
    solve_with_mask(grid, model, mask.as_ref(), src, dst, cfg)
}

/// As [`solve`], with a caller-built mask (the config's height rule is ignored).
pub fn solve_with_mask<T: Scalar>(
    grid: &TerrainGrid<T>,
    model: &CostModel<T>,
    mask: Option<&HeightMask>,
    src: GridPoint,
    dst: GridPoint,
    cfg: &MultipathConfig<T>,
) -> Result<MultipathResult<T>> {
    cfg.validate()?;
    model.validate()?;
    for p in [src, dst] {
        if !grid.contains(p.x as i64, p.y as i64) {
            return Err(CorridorError::OutOfBounds(p.x as i64, p.y as i64));
        }
    }
    if src.x == dst.x && src.y == dst.y {
        return Err(CorridorError::Config("source and destination coincide".into()));
    }
    let inst = Instance {
        problem: SearchProblem::new(Graph3do::new(grid, mask), model, src, dst),
        area: area_config(grid, src, dst, cfg.min_diff),
        deadline: cfg.timeout.map(|t| Instant::now() + t),
        cfg,
    };
    let raw = match cfg.algorithm {
        Algorithm::Se => run_se(&inst)?,
        Algorithm::Ipa => run_ipa(&inst)?,
        Algorithm::Kspa => run_kspa(&inst)?,
        Algorithm::Bds => run_bds(&inst)?,
        Algorithm::Hybrid => run_hybrid(&inst)?,
    };
    Ok(finish(cfg, &inst.area, raw))
}

pub(crate) fn sort_paths<T: Scalar>(paths: &mut [Path<T>]) {
    paths.sort_by(|a, b| {
        a.total_cost()
            .total_cmp_finite(&b.total_cost())
            .then_with(|| a.vertices().cmp(b.vertices()))
    });
}

fn finish<T: Scalar>(cfg: &MultipathConfig<T>, area: &AreaConfig<T>, raw: Raw<T>) -> MultipathResult<T> {
    let mut paths = raw.paths;
    sort_paths(&mut paths);
    let ratios = match raw.optimal_cost {
        Some(opt) if opt > T::zero() => paths.iter().map(|p| p.total_cost() / opt).collect(),
        _ => vec![T::one(); paths.len()],
    };
    let areas = area_matrix(&paths, area);
    let solved = !raw.timed_out
        && !raw.exhausted_memory
        && raw
            .optimal_cost
            .is_some_and(|opt| is_solution(&paths, opt, cfg.target(), cfg.max_diff, area));
    MultipathResult {
        algorithm: cfg.algorithm,
        paths,
        optimal_cost: raw.optimal_cost,
        ratios,
        areas,
        solved,
        timed_out: raw.timed_out,
        exhausted_memory: raw.exhausted_memory,
        stats: raw.stats,
        iterations: raw.iterations,
    }
}

pub fn area_matrix<T: Scalar>(paths: &[Path<T>], area: &AreaConfig<T>) -> Vec<Vec<T>> {
    let n = paths.len();
    let mut m = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let a = area_diff(&paths[i], &paths[j], area).unwrap_or(T::zero());
            m[i][j] = a;
            m[j][i] = a;
        }
    }
    m
}

/// The acceptance predicate: `k` paths ordered by cost, the first at the
/// optimum, all within `max_diff` percent of it and pairwise at least
/// `area.min_diff` percent apart.
pub fn is_solution<T: Scalar>(paths: &[Path<T>], opt: T, k: usize, max_diff: T, area: &AreaConfig<T>) -> bool {
    if paths.len() != k {
        return false;
    }
    let tol = T::lit(COST_TIE_TOL) * (T::one() + opt.abs());
    let cheapest = paths.iter().map(|p| p.total_cost()).fold(T::infinity(), T::min);
    if (cheapest - opt).abs() > tol {
        return false;
    }
    let limit = (T::one() + max_diff / T::lit(100.0)) * opt + tol;
    if paths.iter().any(|p| p.total_cost() > limit) {
        return false;
    }
    for i in 0..k {
        for j in i + 1..k {
            match area_diff(&paths[i], &paths[j], area) {
                Ok(a) if area.is_dissimilar(a) => {}
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("yen".parse::<Algorithm>().is_err());
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = MultipathConfig::<f64>::default();
        cfg.validate().unwrap();
        assert_eq!((cfg.k, cfg.ka, cfg.kb), (3, 2, 3));
        let bad = MultipathConfig::<f64> { k: 1, ..cfg };
        assert!(bad.validate().is_err());
    }
}
