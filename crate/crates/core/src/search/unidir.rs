use std::collections::BinaryHeap;

use super::{past_deadline, unwind, EdgeRules, HeapEntry, Path, SearchOutcome, SearchProblem, SearchStats, NO_PARENT};
use crate::error::Result;
use crate::graph::Graph3do;
use crate::scalar::Scalar;

pub fn dijkstra<T: Scalar>(problem: &SearchProblem<'_, T>, rules: &EdgeRules<'_, T>) -> Result<SearchOutcome<T>> {
    shortest_path(problem, rules, false)
}

/// A* with the straight-paving heuristic; same result contract as [`dijkstra`].
pub fn astar<T: Scalar>(problem: &SearchProblem<'_, T>, rules: &EdgeRules<'_, T>) -> Result<SearchOutcome<T>> {
    shortest_path(problem, rules, true)
}

pub fn shortest_path<T: Scalar>(
    problem: &SearchProblem<'_, T>,
    rules: &EdgeRules<'_, T>,
    use_heuristic: bool,
) -> Result<SearchOutcome<T>> {
    let graph = &problem.graph;
    let n = graph.state_count();
    let mut dist = vec![T::infinity(); n];
    let mut parent = vec![NO_PARENT; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut stats = SearchStats::default();

    let bound = |x: u32, y: u32| if use_heuristic { problem.to_dst_bound(x, y) } else { T::zero() };

    if graph.admissible_point(&problem.src) && graph.admissible_point(&problem.dst) {
        for s in Graph3do::<T>::orientations(problem.src) {
            let i = graph.index(&s);
            dist[i] = T::zero();
            stats.peak_labels += 1;
            stats.pushes += 1;
            heap.push(HeapEntry { key: bound(s.x, s.y), vertex: s, slot: 0 });
        }
    }

    while let Some(HeapEntry { vertex: u, .. }) = heap.pop() {
        let ui = graph.index(&u);
        if settled[ui] {
            continue;
        }
        settled[ui] = true;
        stats.expansions += 1;
        if past_deadline(rules.deadline, stats.expansions) {
            return Ok(SearchOutcome { path: None, stats, timed_out: true });
        }
        if u.position() == problem.dst {
            let path = Path::from_vertices(problem.grid(), problem.model, unwind(graph, &parent, ui))?;
            return Ok(SearchOutcome { path: Some(path), stats, timed_out: false });
        }
        let gu = dist[ui];
        for w in graph.successors(&u).iter() {
            if !rules.allows(&u, w) {
                continue;
            }
            let wi = graph.index(w);
            if settled[wi] {
                continue;
            }
            let cost = rules.weight(problem.edge_cost(&u, w), &u, w)?;
            let g = gu + cost;
            if g < dist[wi] {
                if dist[wi] == T::infinity() {
                    stats.peak_labels += 1;
                }
                dist[wi] = g;
                parent[wi] = ui as u32;
                stats.pushes += 1;
                heap.push(HeapEntry { key: g + bound(w.x, w.y), vertex: *w, slot: 0 });
            }
        }
    }
    Ok(SearchOutcome { path: None, stats, timed_out: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostModel;
    use crate::graph::GridPoint;
    use crate::terrain::TerrainGrid;

    #[test]
    fn flat_grid_gives_straight_line() {
        let g = TerrainGrid::<f64>::flat(12, 7);
        let model = CostModel::default();
        let p = SearchProblem::new(Graph3do::new(&g, None), &model, GridPoint::new(0, 3, 0), GridPoint::new(11, 3, 0));
        let out = dijkstra(&p, &EdgeRules::none()).unwrap();
        let path = out.path.unwrap();
        assert!(path.vertices().iter().all(|v| v.y == 3 && v.z == 0));
        assert_eq!(path.len(), 12);
        assert!((path.total_cost() - 30.0 * 110.0).abs() < 1e-9);
        path.validate(&p.graph, &model, p.src, p.dst).unwrap();
    }

    #[test]
    fn walled_destination_is_unreachable() {
        let g = TerrainGrid::<f64>::flat(8, 8);
        let model = CostModel::default();
        let p = SearchProblem::new(Graph3do::new(&g, None), &model, GridPoint::new(0, 0, 0), GridPoint::new(7, 7, 0));
        let wall = |_: &crate::graph::AugVertex, w: &crate::graph::AugVertex| w.x != 5;
        let rules = EdgeRules { filter: Some(&wall), ..EdgeRules::none() };
        assert!(dijkstra(&p, &rules).unwrap().path.is_none());
        assert!(astar(&p, &rules).unwrap().path.is_none());
    }

    #[test]
    fn trivial_query() {
        let g = TerrainGrid::<f64>::flat(4, 4);
        let model = CostModel::default();
        let s = GridPoint::new(2, 2, 0);
        let p = SearchProblem::new(Graph3do::new(&g, None), &model, s, s);
        let path = astar(&p, &EdgeRules::none()).unwrap().path.unwrap();
        assert_eq!(path.len(), 1);
        assert_eq!(path.total_cost(), 0.0);
    }

    #[test]
    fn negative_penalty_is_rejected() {
        let g = TerrainGrid::<f64>::flat(5, 5);
        let model = CostModel::default();
        let p = SearchProblem::new(Graph3do::new(&g, None), &model, GridPoint::new(0, 2, 0), GridPoint::new(4, 2, 0));
        let pen = |_: &crate::graph::AugVertex, _: &crate::graph::AugVertex| -1e6;
        let rules = EdgeRules { penalty: Some(&pen), ..EdgeRules::none() };
        assert!(dijkstra(&p, &rules).is_err());
    }
}
