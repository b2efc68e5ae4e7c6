//! k-shortest-paths adaptation: one multi-label Dijkstra from the source
//! keeping up to `kappa` mutually dissimilar labels per vertex (see
//! [`LabelKeying`](super::LabelKeying) for what a vertex is).

use super::labels::{LabelRules, LabelTree};
use super::{Instance, LabelKeying, Raw};
use crate::dissimilarity::PathSet;
use crate::error::Result;
use crate::graph::Graph3do;
use crate::scalar::{Scalar, COST_TIE_TOL};
use crate::search::{past_deadline, Path, SearchStats};

pub(crate) fn run_kspa<T: Scalar>(inst: &Instance<'_, T>) -> Result<Raw<T>> {
    let problem = &inst.problem;
    let graph = problem.graph;
    let cfg = inst.cfg;
    let kappa = cfg.kappa.unwrap_or(cfg.k);
    let rules = LabelRules {
        kappa,
        max_diff: cfg.max_diff,
        area: inst.area,
        root: problem.src.planar(problem.grid().dxy()),
    };
    let mut tree = match cfg.keying {
        LabelKeying::Position => LabelTree::pooled(graph.state_count(), 24, rules),
        LabelKeying::State => LabelTree::new(graph.state_count(), rules),
    };
    let mut stats = SearchStats::default();
    let mut set = PathSet::new(cfg.k, inst.area, cfg.max_diff);
    let heuristic = |x: u32, y: u32| if cfg.astar { problem.to_dst_bound(x, y) } else { T::zero() };

    if graph.admissible_point(&problem.src) && graph.admissible_point(&problem.dst) {
        for s in Graph3do::<T>::orientations(problem.src) {
            tree.seed(graph.index(&s), s, heuristic(s.x, s.y));
            stats.pushes += 1;
        }
    }

    let mut opt: Option<T> = None;
    let mut limit = T::infinity();
    let mut iterations = 0u64;
    let (mut timed_out, mut exhausted) = (false, false);

    while let Some(popped) = tree.pop() {
        let Some(id) = popped else { continue };
        let label = tree.labels[id as usize];
        let u = label.vertex;
        stats.expansions += 1;
        if past_deadline(inst.deadline, stats.expansions) || inst.over_budget(&stats) {
            timed_out = true;
            break;
        }
        let tol = T::lit(COST_TIE_TOL) * (T::one() + label.g.abs());
        if label.g + heuristic(u.x, u.y) > limit + tol {
            break;
        }
        if u.position() == problem.dst {
            let o = *opt.get_or_insert(label.g);
            limit = inst.cost_limit(o);
            iterations += 1;
            let path = Path::from_vertices(problem.grid(), problem.model, tree.unwind(id))?;
            set.offer(path, o);
            if set.is_full() {
                break;
            }
            continue;
        }
        for w in graph.successors(&u).iter() {
            let wi = graph.index(w);
            if tree.is_closed(wi, id) {
                continue;
            }
            let g = label.g + problem.edge_cost(&u, w);
            if g + problem.to_dst_bound(w.x, w.y) > limit + tol {
                continue;
            }
            if let Some(nid) = tree.offer(wi, *w, g, id) {
                tree.heap.push(crate::search::HeapEntry { key: g + heuristic(w.x, w.y), vertex: *w, slot: nid });
                stats.pushes += 1;
            }
        }
        if tree.labels.len() > cfg.label_cap {
            exhausted = true;
            break;
        }
    }
    stats.peak_labels = tree.labels.len() as u64;

    Ok(Raw { paths: set.into_paths(), optimal_cost: opt, timed_out, exhausted_memory: exhausted, stats, iterations })
}
