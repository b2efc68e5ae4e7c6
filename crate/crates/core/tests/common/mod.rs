#![allow(dead_code)]

use std::collections::BTreeMap;

use corridor::graph::{GeomEdge, Graph3do};
use corridor::terrain::DIRECTIONS;
use corridor::{GridPoint, Grid, Model, Route};

/// Area difference in percent, straight from the definition: mean row per
/// column station, held constant past each path's ends, trapezoids between
/// stations, over map width times endpoint distance.
pub fn area_percent(p: &[(u32, u32)], q: &[(u32, u32)], grid: &Grid) -> f64 {
    fn stations(cols: &[(u32, u32)]) -> BTreeMap<i64, f64> {
        let mut acc: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
        for &(x, y) in cols {
            let e = acc.entry(x as i64).or_insert((0.0, 0.0));
            e.0 += y as f64;
            e.1 += 1.0;
        }
        acc.into_iter().map(|(x, (s, n))| (x, s / n)).collect()
    }
    fn value(m: &BTreeMap<i64, f64>, x: i64) -> f64 {
        if let Some(v) = m.get(&x) {
            return *v;
        }
        let (lo, hi) = (*m.keys().next().unwrap(), *m.keys().last().unwrap());
        if x < lo {
            m[&lo]
        } else if x > hi {
            m[&hi]
        } else {
            let a = m.range(..x).next_back().unwrap();
            let b = m.range(x..).next().unwrap();
            a.1 + (b.1 - a.1) * (x - a.0) as f64 / (b.0 - a.0) as f64
        }
    }
    let (sp, sq) = (stations(p), stations(q));
    let lo = (*sp.keys().next().unwrap()).min(*sq.keys().next().unwrap());
    let hi = (*sp.keys().last().unwrap()).max(*sq.keys().last().unwrap());
    let gap = |x: i64| (value(&sp, x) - value(&sq, x)).abs();
    let cells: f64 = (lo..hi).map(|x| 0.5 * (gap(x) + gap(x + 1))).sum();
    let dxy = grid.dxy();
    let (a, b) = (p[0], *p.last().unwrap());
    let dist = (((a.0 as f64 - b.0 as f64) * dxy).powi(2) + ((a.1 as f64 - b.1 as f64) * dxy).powi(2)).sqrt().max(dxy);
    100.0 * cells * dxy * dxy / (grid.map_width() * dist)
}

pub fn columns(p: &Route) -> Vec<(u32, u32)> {
    p.vertices().iter().map(|v| (v.x, v.y)).collect()
}

/// Checks a claimed solution from scratch: connectivity, endpoints, prices,
/// the optimum, the cost window and pairwise separation.
pub fn check_solution(
    paths: &[Route],
    opt: f64,
    k: usize,
    max_diff: f64,
    min_diff: f64,
    grid: &Grid,
    model: &Model,
    src: GridPoint,
    dst: GridPoint,
) -> Result<(), String> {
    if paths.len() != k {
        return Err(format!("{} paths, wanted {k}", paths.len()));
    }
    let graph = Graph3do::new(grid, None);
    for p in paths {
        p.validate(&graph, model, src, dst).map_err(|e| e.to_string())?;
    }
    let costs: Vec<f64> = paths.iter().map(|p| p.total_cost()).collect();
    let cheapest = costs.iter().copied().fold(f64::INFINITY, f64::min);
    if (cheapest - opt).abs() > 1e-9 * (1.0 + opt.abs()) {
        return Err(format!("cheapest {cheapest} is not the optimum {opt}"));
    }
    if let Some(c) = costs.iter().find(|&&c| c > (1.0 + max_diff / 100.0) * opt * (1.0 + 1e-12)) {
        return Err(format!("cost {c} over the window of {opt}"));
    }
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            let a = area_percent(&columns(&paths[i]), &columns(&paths[j]), grid);
            if a < min_diff {
                return Err(format!("paths {i} and {j} only {a:.3}% apart"));
            }
        }
    }
    Ok(())
}

/// Minimum over all column-simple, turn-limited planar walks of at most
/// `max_edges` edges at level 0, by depth-first enumeration.
pub fn enumerate_planar(grid: &Grid, model: &Model, src: (u32, u32), dst: (u32, u32), max_edges: usize) -> f64 {
    fn rec(
        grid: &Grid,
        model: &Model,
        at: (u32, u32),
        h: Option<u8>,
        dst: (u32, u32),
        visited: &mut Vec<(u32, u32)>,
        cost: f64,
        left: usize,
        best: &mut f64,
    ) {
        if at == dst {
            *best = best.min(cost);
            return;
        }
        if left == 0 {
            return;
        }
        let dirs: Vec<u8> = match h {
            None => (0..8).collect(),
            Some(h) => vec![(h + 7) % 8, h, (h + 1) % 8],
        };
        for d in dirs {
            let (dx, dy) = DIRECTIONS[d as usize];
            let (x, y) = (at.0 as i64 + dx as i64, at.1 as i64 + dy as i64);
            if !grid.contains(x, y) {
                continue;
            }
            let next = (x as u32, y as u32);
            if visited.contains(&next) {
                continue;
            }
            let e = GeomEdge::new(GridPoint::new(at.0, at.1, 0), GridPoint::new(next.0, next.1, 0));
            let c = model.edge_cost(grid, &e).unwrap();
            visited.push(next);
            rec(grid, model, next, Some(d), dst, visited, cost + c, left - 1, best);
            visited.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(grid, model, src, None, dst, &mut vec![src], 0.0, max_edges, &mut best);
    best
}
