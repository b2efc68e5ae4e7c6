//! Sensitive elimination: repeatedly wall off the part of the map around the
//! most terrain-sensitive edge of the last accepted path and search again.

use super::{Instance, Raw};
use crate::dissimilarity::StationProfile;
use crate::error::Result;
use crate::graph::{turn_left, turn_right, AugVertex};
use crate::scalar::Scalar;
use crate::search::{shortest_path, EdgeRules, Path, SearchStats};
use crate::terrain::{TerrainGrid, DIRECTIONS};

/// `(sum |left|) * (sum |right|)`.
pub fn sensitivity_score<T: Scalar>(left: &[T], right: &[T]) -> T {
    let l: T = left.iter().map(|d| d.abs()).sum();
    let r: T = right.iter().map(|d| d.abs()).sum();
    l * r
}

/// Wall half-width from the minimum area difference (percent) and the map width in cells.
pub fn sensitivity_width(min_diff: f64, map_width_cells: usize) -> usize {
    let w = (min_diff / 100.0 * map_width_cells as f64 - 0.5).round();
    if w < 1.0 {
        1
    } else {
        w as usize
    }
}

/// Ground elevation differences at offsets `1..=w` to the left and right of
/// `head`, perpendicular to its incoming direction. Off-map offsets give 0.
fn lateral_diffs<T: Scalar>(grid: &TerrainGrid<T>, head: &AugVertex, w: usize) -> (Vec<T>, Vec<T>) {
    let base = grid.elevation(head.x as usize, head.y as usize);
    let side = |h: u8| -> Vec<T> {
        let (dx, dy) = DIRECTIONS[h as usize];
        (1..=w as i64)
            .map(|d| {
                let (x, y) = (head.x as i64 + d * dx as i64, head.y as i64 + d * dy as i64);
                if grid.contains(x, y) {
                    grid.elevation(x as usize, y as usize) - base
                } else {
                    T::zero()
                }
            })
            .collect()
    };
    (side(turn_left(turn_left(head.h))), side(turn_right(turn_right(head.h))))
}

/// Sensitivity of each edge of `path`, indexed by edge.
pub fn sensitivity<T: Scalar>(path: &Path<T>, grid: &TerrainGrid<T>, w: usize) -> Vec<T> {
    path.vertices()[1..]
        .iter()
        .map(|head| {
            let (l, r) = lateral_diffs(grid, head, w);
            sensitivity_score(&l, &r)
        })
        .collect()
}

/// Columns removed by a cut at `head`: the head and its `w` in-grid offsets on each side.
pub fn wall_columns<T: Scalar>(grid: &TerrainGrid<T>, head: &AugVertex, w: usize) -> Vec<(u32, u32)> {
    let mut out = vec![(head.x, head.y)];
    for h in [turn_left(turn_left(head.h)), turn_right(turn_right(head.h))] {
        let (dx, dy) = DIRECTIONS[h as usize];
        for d in 1..=w as i64 {
            let (x, y) = (head.x as i64 + d * dx as i64, head.y as i64 + d * dy as i64);
            if grid.contains(x, y) {
                out.push((x as u32, y as u32));
            }
        }
    }
    out
}

/// Edge indices of `path` from most to least sensitive; ties keep path order.
fn cut_order<T: Scalar>(path: &Path<T>, grid: &TerrainGrid<T>, w: usize) -> Vec<usize> {
    let s = sensitivity(path, grid, w);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp_finite(&s[a]).then(a.cmp(&b)));
    order
}

pub(crate) fn run_se<T: Scalar>(inst: &Instance<'_, T>) -> Result<Raw<T>> {
    let problem = &inst.problem;
    let grid = problem.grid();
    let nx = grid.nx();
    let w = inst
        .cfg
        .sensitivity_width
        .unwrap_or_else(|| sensitivity_width(inst.cfg.min_diff.as_f64(), grid.ny()));
    let k = inst.cfg.k;

    let mut stats = SearchStats::default();
    let mut iterations = 0u64;
    let mut walls = vec![false; nx * grid.ny()];
    let mut accepted: Vec<Path<T>> = Vec::new();
    let mut profiles: Vec<StationProfile<T>> = Vec::new();

    let search = |blocked: &[bool], stats: &mut SearchStats, iterations: &mut u64| {
        let filter = |_: &AugVertex, v: &AugVertex| !blocked[v.y as usize * nx + v.x as usize];
        let rules = EdgeRules { filter: Some(&filter), penalty: None, deadline: inst.deadline };
        *iterations += 1;
        let out = shortest_path(problem, &rules, inst.cfg.astar)?;
        stats.absorb(&out.stats);
        Ok::<_, crate::error::CorridorError>(out)
    };

    let first = search(&walls, &mut stats, &mut iterations)?;
    let Some(opt_path) = first.path else {
        return Ok(Raw { paths: vec![], optimal_cost: None, timed_out: first.timed_out, exhausted_memory: false, stats, iterations });
    };
    let opt = opt_path.total_cost();
    let limit = inst.cost_limit(opt);
    profiles.push(StationProfile::of_path(&opt_path));
    accepted.push(opt_path);

    let endpoint_cols = [(problem.src.x, problem.src.y), (problem.dst.x, problem.dst.y)];
    let mut order = cut_order(&accepted[0], grid, w);
    let mut next = 0usize;
    let mut timed_out = false;

    'outer: while accepted.len() < k {
        // pick the next untried cut of the last accepted path; cuts that would
        // wall off an endpoint can only fail, so they are skipped unrun
        let last = accepted.last().unwrap();
        let cut = loop {
            let Some(&e) = order.get(next) else { break 'outer };
            next += 1;
            let cols = wall_columns(grid, &last.vertices()[e + 1], w);
            if !cols.iter().any(|c| endpoint_cols.contains(c)) {
                break cols;
            }
        };
        let mut trial = walls.clone();
        for &(x, y) in &cut {
            trial[y as usize * nx + x as usize] = true;
        }
        let out = search(&trial, &mut stats, &mut iterations)?;
        if out.timed_out || inst.over_budget(&stats) {
            timed_out = true;
            break;
        }
        let Some(path) = out.path else { continue };
        if path.total_cost() > limit {
            break;
        }
        let profile = StationProfile::of_path(&path);
        let similar = profiles
            .iter()
            .any(|p| !inst.area.is_dissimilar(inst.area.percent(profile.area_to(p, inst.area.dxy))));
        if similar {
            continue;
        }
        walls = trial;
        order = cut_order(&path, grid, w);
        next = 0;
        profiles.push(profile);
        accepted.push(path);
    }

    Ok(Raw { paths: accepted, optimal_cost: Some(opt), timed_out, exhausted_memory: false, stats, iterations })
}
