//! Bidirectional growth that reports every augmented vertex settled from both
//! sides as a meet event carrying the through-path `s -> A -> d`.
//!
//! The backward search walks predecessor edges, so backward labels are keyed
//! by the same augmented vertex as forward ones: a backward label on
//! `(x, y, z, h, v)` is the cheapest continuation of a road that arrived with
//! orientation `(h, v)`, i.e. the reverse-graph vertex `(h + 4 mod 8, -v)`.
//!
//! Each side stops once its smallest key exceeds the cutoff
//! `slack * best_meet` (optionally capped by a fixed value). At that point
//! every vertex whose through-path costs at most the cutoff has produced an
//! event, so the cheapest event is the optimum.

use std::collections::BinaryHeap;

use super::{past_deadline, unwind, EdgeRules, HeapEntry, Path, SearchOutcome, SearchProblem, SearchStats, NO_PARENT};
use crate::error::Result;
use crate::graph::{AugVertex, Graph3do};
use crate::scalar::{Scalar, COST_TIE_TOL};

#[derive(Debug, Clone)]
pub struct MeetEvent<T> {
    pub vertex: AugVertex,
    pub cost_from_src: T,
    pub cost_to_dst: T,
    pub path: Path<T>,
}

impl<T: Scalar> MeetEvent<T> {
    pub fn cost(&self) -> T {
        self.cost_from_src + self.cost_to_dst
    }
}

struct Side<T> {
    dist: Vec<T>,
    parent: Vec<u32>,
    settled: Vec<bool>,
    heap: BinaryHeap<HeapEntry<T>>,
}

impl<T: Scalar> Side<T> {
    fn new(n: usize) -> Self {
        Side {
            dist: vec![T::infinity(); n],
            parent: vec![NO_PARENT; n],
            settled: vec![false; n],
            heap: BinaryHeap::new(),
        }
    }

    fn min_key(&self) -> Option<T> {
        self.heap.peek().map(|e| e.key)
    }
}

pub struct BidiEngine<'a, T> {
    problem: SearchProblem<'a, T>,
    deadline: Option<std::time::Instant>,
    potentials: bool,
    slack: T,
    fixed_cutoff: T,
    best: T,
    fwd: Side<T>,
    bwd: Side<T>,
    stats: SearchStats,
    suppressed: u64,
    timed_out: bool,
}

impl<'a, T: Scalar> BidiEngine<'a, T> {
    /// `slack` multiplies the best meet cost to form the cutoff (1 + maxDiff
    /// for path selection, 1 for a plain shortest path). With `potentials`
    /// the sides are ordered by Ikeda average potentials built from the
    /// straight-paving bounds towards each endpoint.
    pub fn new(problem: SearchProblem<'a, T>, slack: T, potentials: bool, deadline: Option<std::time::Instant>) -> Self {
        let n = problem.graph.state_count();
        let mut engine = BidiEngine {
            problem,
            deadline,
            potentials,
            slack,
            fixed_cutoff: T::infinity(),
            best: T::infinity(),
            fwd: Side::new(n),
            bwd: Side::new(n),
            stats: SearchStats::default(),
            suppressed: 0,
            timed_out: false,
        };
        let graph = engine.problem.graph;
        if graph.admissible_point(&problem.src) && graph.admissible_point(&problem.dst) {
            for s in Graph3do::<T>::orientations(problem.src) {
                let i = graph.index(&s);
                engine.fwd.dist[i] = T::zero();
                let key = engine.fwd_potential(&s);
                engine.fwd.heap.push(HeapEntry { key, vertex: s, slot: 0 });
                engine.stats.pushes += 1;
                engine.stats.peak_labels += 1;
            }
            for d in Graph3do::<T>::orientations(problem.dst) {
                let i = graph.index(&d);
                engine.bwd.dist[i] = T::zero();
                let key = -engine.fwd_potential(&d);
                engine.bwd.heap.push(HeapEntry { key, vertex: d, slot: 0 });
                engine.stats.pushes += 1;
                engine.stats.peak_labels += 1;
            }
        }
        engine
    }

    /// Caps the cutoff at `cutoff` regardless of the best meet found.
    pub fn with_cutoff(mut self, cutoff: T) -> Self {
        self.fixed_cutoff = cutoff;
        self
    }

    pub fn problem(&self) -> &SearchProblem<'a, T> {
        &self.problem
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    /// Events dropped because their cost exceeded the cutoff.
    pub fn suppressed(&self) -> u64 {
        self.suppressed
    }

    /// Cheapest through-path cost seen so far (meets or relaxations).
    pub fn best_cost(&self) -> T {
        self.best
    }

    pub fn cutoff(&self) -> T {
        let dynamic = if self.best.is_finite() { self.best * self.slack } else { T::infinity() };
        dynamic.min(self.fixed_cutoff)
    }

    #[inline]
    fn fwd_potential(&self, v: &AugVertex) -> T {
        if self.potentials {
            (self.problem.to_dst_bound(v.x, v.y) - self.problem.from_src_bound(v.x, v.y)) * T::lit(0.5)
        } else {
            T::zero()
        }
    }

    #[inline]
    fn slack_tol(&self, c: T) -> T {
        c + T::lit(COST_TIE_TOL) * (T::one() + c.abs())
    }

    /// Grows the frontiers until the next meet event, or `None` when both sides are exhausted.
    pub fn next_event(&mut self) -> Option<MeetEvent<T>> {
        loop {
            let cutoff = self.cutoff();
            let limit = self.slack_tol(cutoff);
            let f_ok = self.fwd.min_key().is_some_and(|k| k <= limit);
            let b_ok = self.bwd.min_key().is_some_and(|k| k <= limit);
            let forward = match (f_ok, b_ok) {
                (false, false) => return None,
                (true, false) => true,
                (false, true) => false,
                (true, true) => self.fwd.heap.len() <= self.bwd.heap.len(),
            };
            if let Some(ev) = self.step(forward, cutoff) {
                if ev.cost() <= self.slack_tol(self.cutoff()) {
                    return Some(ev);
                }
                self.suppressed += 1;
            }
            if self.timed_out {
                return None;
            }
        }
    }

    fn step(&mut self, forward: bool, cutoff: T) -> Option<MeetEvent<T>> {
        let graph = self.problem.graph;
        let entry = if forward { self.fwd.heap.pop()? } else { self.bwd.heap.pop()? };
        let u = entry.vertex;
        let ui = graph.index(&u);
        {
            let side = if forward { &mut self.fwd } else { &mut self.bwd };
            if side.settled[ui] {
                return None;
            }
            side.settled[ui] = true;
        }
        self.stats.expansions += 1;
        if past_deadline(self.deadline, self.stats.expansions) {
            self.timed_out = true;
            self.fwd.heap.clear();
            self.bwd.heap.clear();
            return None;
        }

        let (gu, other_settled, other_g) = if forward {
            (self.fwd.dist[ui], self.bwd.settled[ui], self.bwd.dist[ui])
        } else {
            (self.bwd.dist[ui], self.fwd.settled[ui], self.fwd.dist[ui])
        };

        let limit = self.slack_tol(cutoff);
        let adjacent = if forward { graph.successors(&u) } else { graph.predecessors(&u) };
        for w in adjacent.iter() {
            let wi = graph.index(w);
            let (side, other) = if forward { (&mut self.fwd, &self.bwd) } else { (&mut self.bwd, &self.fwd) };
            if side.settled[wi] {
                continue;
            }
            let cost = if forward { self.problem.edge_cost(&u, w) } else { self.problem.edge_cost(w, &u) };
            let g = gu + cost;
            let lower = if self.potentials {
                if forward {
                    self.problem.to_dst_bound(w.x, w.y)
                } else {
                    self.problem.from_src_bound(w.x, w.y)
                }
            } else {
                T::zero()
            };
            if g + lower > limit {
                continue;
            }
            if g < side.dist[wi] {
                if side.dist[wi] == T::infinity() && other.dist[wi] == T::infinity() {
                    self.stats.peak_labels += 1;
                }
                side.dist[wi] = g;
                side.parent[wi] = ui as u32;
                let through = g + other.dist[wi];
                let pot = if self.potentials {
                    let p = (self.problem.to_dst_bound(w.x, w.y) - self.problem.from_src_bound(w.x, w.y)) * T::lit(0.5);
                    if forward { p } else { -p }
                } else {
                    T::zero()
                };
                side.heap.push(HeapEntry { key: g + pot, vertex: *w, slot: 0 });
                self.stats.pushes += 1;
                if through < self.best {
                    self.best = through;
                }
            }
        }

        if !other_settled {
            return None;
        }
        let (gf, gb) = if forward { (gu, other_g) } else { (other_g, gu) };
        if gf + gb < self.best {
            self.best = gf + gb;
        }
        let mut vertices = unwind(&graph, &self.fwd.parent, ui);
        let mut tail = unwind(&graph, &self.bwd.parent, ui);
        tail.reverse();
        vertices.extend_from_slice(&tail[1..]);
        let path = Path::from_vertices(self.problem.grid(), self.problem.model, vertices).ok()?;
        Some(MeetEvent { vertex: u, cost_from_src: gf, cost_to_dst: gb, path })
    }
}

/// Optimal path via bidirectional growth with a zero-slack cutoff.
pub fn bidirectional<T: Scalar>(
    problem: &SearchProblem<'_, T>,
    rules: &EdgeRules<'_, T>,
    potentials: bool,
) -> Result<SearchOutcome<T>> {
    let mut engine = BidiEngine::new(*problem, T::one(), potentials, rules.deadline);
    let mut best: Option<MeetEvent<T>> = None;
    while let Some(ev) = engine.next_event() {
        if best.as_ref().map_or(true, |b| ev.cost() < b.cost()) {
            best = Some(ev);
        }
    }
    Ok(SearchOutcome {
        path: best.map(|b| b.path),
        stats: engine.stats(),
        timed_out: engine.timed_out(),
    })
}
