//! Bidirectional selection and its multi-label hybrid.
//!
//! Both grow trees from the source and the destination, turn every vertex
//! settled from both sides into a through-path and feed those paths, in the
//! order they appear, to the accept/replace/reject rule. Growth stops once
//! both frontiers pass `(1 + max_diff) * best`.

use std::collections::VecDeque;
use std::time::Instant;

use super::labels::{LabelRules, LabelTree};
use super::{Instance, Raw};
use crate::dissimilarity::PathSet;
use crate::error::Result;
use crate::graph::{AugVertex, Graph3do};
use crate::scalar::{Scalar, COST_TIE_TOL};
use crate::search::{past_deadline, BidiEngine, HeapEntry, MeetEvent, Path, SearchProblem, SearchStats};

/// Accept/replace/reject selection tracking a possibly improving optimum.
struct Selection<T> {
    set: PathSet<T>,
    opt: T,
    examined: u64,
}

impl<T: Scalar> Selection<T> {
    fn new(inst: &Instance<'_, T>, k: usize) -> Self {
        Selection { set: PathSet::new(k, inst.area, inst.cfg.max_diff), opt: T::infinity(), examined: 0 }
    }

    fn consider(&mut self, ev: MeetEvent<T>, best: T) {
        if best < self.opt {
            self.opt = best;
            self.set.prune_above(best);
        }
        self.examined += 1;
        self.set.offer(ev.path, self.opt);
    }
}

fn slack<T: Scalar>(inst: &Instance<'_, T>) -> T {
    T::one() + inst.cfg.max_diff / T::lit(100.0)
}

pub(crate) fn run_bds<T: Scalar>(inst: &Instance<'_, T>) -> Result<Raw<T>> {
    let mut engine = BidiEngine::new(inst.problem, slack(inst), inst.cfg.astar, inst.deadline);
    let mut sel = Selection::new(inst, inst.cfg.k);
    let mut over = false;
    while let Some(ev) = engine.next_event() {
        sel.consider(ev, engine.best_cost());
        if inst.over_budget(&engine.stats()) {
            over = true;
            break;
        }
    }
    let best = engine.best_cost();
    Ok(Raw {
        paths: sel.set.into_paths(),
        optimal_cost: best.is_finite().then_some(best),
        timed_out: engine.timed_out() || over,
        exhausted_memory: false,
        stats: engine.stats(),
        iterations: sel.examined,
    })
}

pub(crate) fn run_hybrid<T: Scalar>(inst: &Instance<'_, T>) -> Result<Raw<T>> {
    let mut engine = MultiBidi::new(inst, inst.cfg.ka);
    let mut sel = Selection::new(inst, inst.cfg.kb);
    while let Some(ev) = engine.next_event() {
        sel.consider(ev, engine.best);
    }
    let best = engine.best;
    Ok(Raw {
        paths: sel.set.into_paths(),
        optimal_cost: best.is_finite().then_some(best),
        timed_out: engine.timed_out,
        exhausted_memory: engine.exhausted,
        stats: engine.stats,
        iterations: sel.examined,
    })
}

/// Bidirectional growth with up to `ka` labels per vertex on each side.
/// With `ka = 1` it makes the same moves as [`BidiEngine`].
struct MultiBidi<'a, T> {
    problem: SearchProblem<'a, T>,
    deadline: Option<Instant>,
    potentials: bool,
    slack: T,
    best: T,
    fwd: LabelTree<T>,
    bwd: LabelTree<T>,
    pending: VecDeque<MeetEvent<T>>,
    stats: SearchStats,
    label_cap: usize,
    max_expansions: Option<u64>,
    timed_out: bool,
    exhausted: bool,
}

impl<'a, T: Scalar> MultiBidi<'a, T> {
    fn new(inst: &Instance<'a, T>, ka: usize) -> Self {
        let problem = inst.problem;
        let graph = problem.graph;
        let dxy = problem.grid().dxy();
        let rules = |root| LabelRules { kappa: ka, max_diff: inst.cfg.max_diff, area: inst.area, root };
        let n = graph.state_count();
        let mut engine = MultiBidi {
            problem,
            deadline: inst.deadline,
            potentials: inst.cfg.astar,
            slack: slack(inst),
            best: T::infinity(),
            fwd: LabelTree::new(n, rules(problem.src.planar(dxy))),
            bwd: LabelTree::new(n, rules(problem.dst.planar(dxy))),
            pending: VecDeque::new(),
            stats: SearchStats::default(),
            label_cap: inst.cfg.label_cap,
            max_expansions: inst.cfg.max_expansions,
            timed_out: false,
            exhausted: false,
        };
        if graph.admissible_point(&problem.src) && graph.admissible_point(&problem.dst) {
            for s in Graph3do::<T>::orientations(problem.src) {
                let key = engine.potential(&s);
                engine.fwd.seed(graph.index(&s), s, key);
                engine.stats.pushes += 1;
            }
            for d in Graph3do::<T>::orientations(problem.dst) {
                let key = -engine.potential(&d);
                engine.bwd.seed(graph.index(&d), d, key);
                engine.stats.pushes += 1;
            }
        }
        engine
    }

    #[inline]
    fn potential(&self, v: &AugVertex) -> T {
        if self.potentials {
            (self.problem.to_dst_bound(v.x, v.y) - self.problem.from_src_bound(v.x, v.y)) * T::lit(0.5)
        } else {
            T::zero()
        }
    }

    fn cutoff(&self) -> T {
        if self.best.is_finite() {
            self.best * self.slack
        } else {
            T::infinity()
        }
    }

    #[inline]
    fn tol(c: T) -> T {
        c + T::lit(COST_TIE_TOL) * (T::one() + c.abs())
    }

    fn next_event(&mut self) -> Option<MeetEvent<T>> {
        loop {
            while let Some(ev) = self.pending.pop_front() {
                if ev.cost() <= Self::tol(self.cutoff()) {
                    return Some(ev);
                }
            }
            if self.timed_out || self.exhausted {
                return None;
            }
            let limit = Self::tol(self.cutoff());
            let f_ok = self.fwd.min_key().is_some_and(|k| k <= limit);
            let b_ok = self.bwd.min_key().is_some_and(|k| k <= limit);
            let forward = match (f_ok, b_ok) {
                (false, false) => return None,
                (true, false) => true,
                (false, true) => false,
                (true, true) => self.fwd.heap.len() <= self.bwd.heap.len(),
            };
            self.step(forward);
        }
    }

    fn step(&mut self, forward: bool) {
        let graph = self.problem.graph;
        let limit = Self::tol(self.cutoff());
        let popped = if forward { self.fwd.pop() } else { self.bwd.pop() };
        let Some(Some(id)) = popped else { return };
        let (u, gu) = {
            let l = if forward { &self.fwd.labels[id as usize] } else { &self.bwd.labels[id as usize] };
            (l.vertex, l.g)
        };
        let ui = graph.index(&u);
        self.stats.expansions += 1;
        if past_deadline(self.deadline, self.stats.expansions) || self.max_expansions.is_some_and(|b| self.stats.expansions > b) {
            self.timed_out = true;
            return;
        }

        let adjacent = if forward { graph.successors(&u) } else { graph.predecessors(&u) };
        for w in adjacent.iter() {
            let wi = graph.index(w);
            let pot = self.potential(w);
            let (side, other) = if forward { (&mut self.fwd, &self.bwd) } else { (&mut self.bwd, &self.fwd) };
            if side.is_closed(wi, id) {
                continue;
            }
            let cost = if forward { self.problem.edge_cost(&u, w) } else { self.problem.edge_cost(w, &u) };
            let g = gu + cost;
            let lower = match (self.potentials, forward) {
                (false, _) => T::zero(),
                (true, true) => self.problem.to_dst_bound(w.x, w.y),
                (true, false) => self.problem.from_src_bound(w.x, w.y),
            };
            if g + lower > limit {
                continue;
            }
            if let Some(nid) = side.offer(wi, *w, g, id) {
                let key = if forward { g + pot } else { g - pot };
                side.heap.push(HeapEntry { key, vertex: *w, slot: nid });
                self.stats.pushes += 1;
                let through = g + other.cheapest(wi);
                if through < self.best {
                    self.best = through;
                }
            }
        }
        if self.fwd.labels.len() + self.bwd.labels.len() > self.label_cap {
            self.exhausted = true;
        }
        self.stats.peak_labels = (self.fwd.labels.len() + self.bwd.labels.len()) as u64;

        let partners: Vec<u32> = if forward { self.bwd.settled_at(ui).collect() } else { self.fwd.settled_at(ui).collect() };
        for other_id in partners {
            let (fid, bid) = if forward { (id, other_id) } else { (other_id, id) };
            let gf = self.fwd.labels[fid as usize].g;
            let gb = self.bwd.labels[bid as usize].g;
            if gf + gb < self.best {
                self.best = gf + gb;
            }
            let mut vertices = self.fwd.unwind(fid);
            let mut tail = self.bwd.unwind(bid);
            tail.reverse();
            vertices.extend_from_slice(&tail[1..]);
            if let Ok(path) = Path::from_vertices(self.problem.grid(), self.problem.model, vertices) {
                self.pending.push_back(MeetEvent { vertex: u, cost_from_src: gf, cost_to_dst: gb, path });
            }
        }
    }
}
