//! Iterative penalty adaptation: surcharge a triangular corridor around every
//! accepted path and search again, adapting the corridor width by bracketing.

use std::collections::BTreeSet;

use super::{Instance, Raw};
use crate::dissimilarity::StationProfile;
use crate::error::Result;
use crate::graph::AugVertex;
use crate::scalar::Scalar;
use crate::search::{shortest_path, EdgeRules, Path, SearchStats};
use crate::terrain::TerrainGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step<T> {
    Try(T),
    Stop,
}

/// Penalty-width bracket. Widths are percentages of the map width; two widths
/// count as the same when they agree to 1/8 of a percent.
#[derive(Debug, Clone)]
pub struct PenaltyBracket<T> {
    width: T,
    lower: T,
    upper: Option<T>,
    max: T,
    tried: BTreeSet<i64>,
}

impl<T: Scalar> PenaltyBracket<T> {
    pub fn new(initial: T, max: T) -> Self {
        PenaltyBracket { width: initial, lower: T::zero(), upper: None, max, tried: BTreeSet::new() }
    }

    pub fn width(&self) -> T {
        self.width
    }

    fn key(w: T) -> i64 {
        (w * T::lit(8.0)).round().to_i64().unwrap_or(i64::MAX)
    }

    /// Records that the current width has been run.
    pub fn mark_tried(&mut self) {
        self.tried.insert(Self::key(self.width));
    }

    /// The path at the current width cost too much: narrow towards the lower bracket.
    pub fn too_expensive(&mut self) -> Step<T> {
        self.upper = Some(self.width);
        self.width = (self.lower + self.width) * T::lit(0.5);
        if self.tried.contains(&Self::key(self.width)) {
            Step::Stop
        } else {
            Step::Try(self.width)
        }
    }

    /// The path at the current width was too similar: widen, doubling until an upper bracket exists.
    pub fn too_similar(&mut self) -> Step<T> {
        self.lower = self.width;
        self.width = match self.upper {
            Some(u) => (self.width + u) * T::lit(0.5),
            None => self.width * T::lit(2.0),
        };
        if self.tried.contains(&Self::key(self.width)) || self.width > self.max {
            Step::Stop
        } else {
            Step::Try(self.width)
        }
    }

    /// A path was accepted: forget tried widths and the bracket, keep the width.
    pub fn accepted(&mut self) {
        self.tried.clear();
        self.lower = T::zero();
        self.upper = None;
    }
}

/// Corridor surcharge for one accepted path.
struct Corridor<T> {
    profile: StationProfile<T>,
    peak: T,
}

/// Per-column additive surcharge of all corridors at the given width.
fn penalty_table<T: Scalar>(grid: &TerrainGrid<T>, corridors: &[Corridor<T>], width: T) -> Vec<T> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let half = (width / T::lit(100.0) * T::from_usize_lossy(ny - 1)).round().max(T::one());
    let scale = width / T::lit(100.0);
    let mut table = vec![T::zero(); nx * ny];
    for c in corridors {
        for x in 0..nx {
            let centre = c.profile.at(x as i64);
            for y in 0..ny {
                let lateral = (T::from_usize_lossy(y) - centre).abs();
                if lateral < half {
                    table[y * nx + x] += scale * c.peak * (T::one() - lateral / half);
                }
            }
        }
    }
    table
}

fn corridor<T: Scalar>(path: &Path<T>) -> Corridor<T> {
    let edges = path.edge_costs().len().max(1);
    Corridor { profile: StationProfile::of_path(path), peak: path.total_cost() / T::from_usize_lossy(edges) }
}

pub(crate) fn run_ipa<T: Scalar>(inst: &Instance<'_, T>) -> Result<Raw<T>> {
    let problem = &inst.problem;
    let grid = problem.grid();
    let nx = grid.nx();
    let mut stats = SearchStats::default();
    let mut iterations = 0u64;

    let search = |table: Option<&[T]>, stats: &mut SearchStats, iterations: &mut u64| {
        let pen = |_: &AugVertex, v: &AugVertex| table.map_or(T::zero(), |t| t[v.y as usize * nx + v.x as usize]);
        let rules = EdgeRules { filter: None, penalty: Some(&pen), deadline: inst.deadline };
        *iterations += 1;
        let out = shortest_path(problem, &rules, inst.cfg.astar)?;
        stats.absorb(&out.stats);
        Ok::<_, crate::error::CorridorError>(out)
    };

    let first = search(None, &mut stats, &mut iterations)?;
    let Some(opt_path) = first.path else {
        return Ok(Raw { paths: vec![], optimal_cost: None, timed_out: first.timed_out, exhausted_memory: false, stats, iterations });
    };
    let opt = opt_path.total_cost();
    let limit = inst.cost_limit(opt);
    let mut corridors = vec![corridor(&opt_path)];
    let mut accepted = vec![opt_path];
    let mut bracket = PenaltyBracket::new(inst.cfg.penalty_width, inst.cfg.penalty_max);
    let mut timed_out = false;

    while accepted.len() < inst.cfg.k {
        bracket.mark_tried();
        let table = penalty_table(grid, &corridors, bracket.width());
        let out = search(Some(&table), &mut stats, &mut iterations)?;
        if out.timed_out || inst.over_budget(&stats) {
            timed_out = true;
            break;
        }
        // penalties never disconnect the graph, so a path exists whenever the optimum does
        let Some(path) = out.path else { break };
        let step = if path.total_cost() > limit {
            bracket.too_expensive()
        } else {
            let profile = StationProfile::of_path(&path);
            let similar = corridors
                .iter()
                .any(|c| !inst.area.is_dissimilar(inst.area.percent(profile.area_to(&c.profile, inst.area.dxy))));
            if similar {
                bracket.too_similar()
            } else {
                corridors.push(corridor(&path));
                accepted.push(path);
                bracket.accepted();
                continue;
            }
        };
        if step == Step::Stop {
            break;
        }
    }

    Ok(Raw { paths: accepted, optimal_cost: Some(opt), timed_out, exhausted_memory: false, stats, iterations })
}
