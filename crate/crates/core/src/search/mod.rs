//! Shortest-path engines over the implicit 3DO graph.
//!
//! The source is seeded in all 24 orientations at cost zero and any
//! orientation at the destination point terminates a path. Heap ties are
//! broken by the lexicographic order of `(x, y, z, h, v)`.

mod bidi;
mod unidir;

use std::cmp::Ordering;
use std::time::Instant;

pub use bidi::{bidirectional, BidiEngine, MeetEvent};
pub use unidir::{astar, dijkstra, shortest_path};

use crate::cost::CostModel;
use crate::error::{CorridorError, Result};
use crate::graph::{AugVertex, GeomEdge, Graph3do, GridPoint};
use crate::scalar::{Scalar, COST_TIE_TOL};
use crate::terrain::TerrainGrid;

pub(crate) const NO_PARENT: u32 = u32::MAX;

/// A single-pair query over a (possibly height-restricted) 3DO graph.
#[derive(Clone, Copy)]
pub struct SearchProblem<'a, T> {
    pub graph: Graph3do<'a, T>,
    pub model: &'a CostModel<T>,
    pub src: GridPoint,
    pub dst: GridPoint,
}

impl<'a, T: Scalar> SearchProblem<'a, T> {
    pub fn new(graph: Graph3do<'a, T>, model: &'a CostModel<T>, src: GridPoint, dst: GridPoint) -> Self {
        SearchProblem { graph, model, src, dst }
    }

    pub fn grid(&self) -> &'a TerrainGrid<T> {
        self.graph.grid()
    }

    #[inline]
    pub fn edge_cost(&self, u: &AugVertex, w: &AugVertex) -> T {
        self.model
            .edge_cost(self.grid(), &GeomEdge::between(u, w))
            .expect("graph edges stay inside the grid")
    }

    /// Paving lower bound from `p` to the destination.
    #[inline]
    pub fn to_dst_bound(&self, x: u32, y: u32) -> T {
        let dxy = self.grid().dxy();
        self.model
            .astar_heuristic(GridPoint::new(x, y, 0).planar(dxy), self.dst.planar(dxy))
    }

    /// Paving lower bound from the source to `p`.
    #[inline]
    pub fn from_src_bound(&self, x: u32, y: u32) -> T {
        let dxy = self.grid().dxy();
        self.model
            .astar_heuristic(GridPoint::new(x, y, 0).planar(dxy), self.src.planar(dxy))
    }

    /// Straight-line planar distance between source and destination in meters.
    pub fn endpoint_distance(&self) -> T {
        let dxy = self.grid().dxy();
        let (a, b) = (self.src.planar(dxy), self.dst.planar(dxy));
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    }
}

pub type EdgeFilter<'a> = &'a (dyn Fn(&AugVertex, &AugVertex) -> bool + Sync);
pub type EdgePenalty<'a, T> = &'a (dyn Fn(&AugVertex, &AugVertex) -> T + Sync);

/// Optional per-query adjustments: removed edges, additive surcharges, deadline.
#[derive(Clone, Copy, Default)]
pub struct EdgeRules<'a, T> {
    pub filter: Option<EdgeFilter<'a>>,
    pub penalty: Option<EdgePenalty<'a, T>>,
    pub deadline: Option<Instant>,
}

impl<'a, T: Scalar> EdgeRules<'a, T> {
    pub fn none() -> Self {
        EdgeRules { filter: None, penalty: None, deadline: None }
    }

    #[inline]
    pub(crate) fn allows(&self, u: &AugVertex, w: &AugVertex) -> bool {
        self.filter.map_or(true, |f| f(u, w))
    }

    /// Effective weight of `u -> w`; errors if a penalty makes it negative.
    #[inline]
    pub(crate) fn weight(&self, base: T, u: &AugVertex, w: &AugVertex) -> Result<T> {
        match self.penalty {
            None => Ok(base),
            Some(p) => {
                let eff = base + p(u, w);
                if eff < T::zero() {
                    Err(CorridorError::NegativeWeight(eff.as_f64()))
                } else {
                    Ok(eff)
                }
            }
        }
    }
}

/// Work counters exported for benchmarking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Labels settled (popped and expanded).
    pub expansions: u64,
    pub pushes: u64,
    /// Labels ever created; the deterministic memory proxy.
    pub peak_labels: u64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: &SearchStats) {
        self.expansions += other.expansions;
        self.pushes += other.pushes;
        self.peak_labels = self.peak_labels.max(other.peak_labels);
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<T> {
    pub path: Option<Path<T>>,
    pub stats: SearchStats,
    pub timed_out: bool,
}

/// Ordered augmented-vertex sequence with its true (unpenalized) edge costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    vertices: Vec<AugVertex>,
    edge_costs: Vec<T>,
    total_cost: T,
}

impl<T: Scalar> Path<T> {
    /// Prices the vertex sequence with `model`. Does not check connectivity.
    pub fn from_vertices(grid: &TerrainGrid<T>, model: &CostModel<T>, vertices: Vec<AugVertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(CorridorError::EmptyPath);
        }
        let edge_costs = vertices
            .windows(2)
            .map(|w| model.edge_cost(grid, &GeomEdge::between(&w[0], &w[1])))
            .collect::<Result<Vec<T>>>()?;
        let total_cost = edge_costs.iter().copied().sum();
        Ok(Path { vertices, edge_costs, total_cost })
    }

    pub fn vertices(&self) -> &[AugVertex] {
        &self.vertices
    }

    pub fn edge_costs(&self) -> &[T] {
        &self.edge_costs
    }

    pub fn total_cost(&self) -> T {
        self.total_cost
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> &AugVertex {
        &self.vertices[0]
    }

    pub fn last(&self) -> &AugVertex {
        self.vertices.last().expect("non-empty path")
    }

    /// Cost accumulated up to and including each vertex.
    pub fn cumulative_costs(&self) -> Vec<T> {
        let mut acc = T::zero();
        std::iter::once(T::zero())
            .chain(self.edge_costs.iter().map(|&c| {
                acc += c;
                acc
            }))
            .collect()
    }

    /// Planar columns visited, in order.
    pub fn columns(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.vertices.iter().map(|v| (v.x, v.y))
    }

    /// Checks connectivity under the successor relation, the cost sum and the endpoints.
    pub fn validate(&self, graph: &Graph3do<'_, T>, model: &CostModel<T>, src: GridPoint, dst: GridPoint) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(CorridorError::EmptyPath);
        }
        if self.first().position() != src || self.last().position() != dst {
            return Err(CorridorError::InvalidPath("endpoints do not match the query".into()));
        }
        for w in self.vertices.windows(2) {
            if !graph.successors(&w[0]).contains(&w[1]) {
                return Err(CorridorError::InvalidPath(format!("{:?} -> {:?} is not an edge", w[0], w[1])));
            }
        }
        let repriced = Path::from_vertices(graph.grid(), model, self.vertices.clone())?;
        let sum: T = self.edge_costs.iter().copied().sum();
        let tol = T::lit(COST_TIE_TOL) * (T::one() + self.total_cost.abs());
        if (sum - self.total_cost).abs() > tol || (repriced.total_cost - self.total_cost).abs() > tol {
            return Err(CorridorError::InvalidPath("total cost does not match edge costs".into()));
        }
        Ok(())
    }
}

/// Min-heap entry ordered by key, then by vertex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HeapEntry<T> {
    pub key: T,
    pub vertex: AugVertex,
    pub slot: u32,
}

impl<T: Scalar> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for HeapEntry<T> {}

impl<T: Scalar> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for HeapEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .key
            .total_cmp_finite(&self.key)
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

#[inline]
pub(crate) fn past_deadline(deadline: Option<Instant>, counter: u64) -> bool {
    counter % 1024 == 0 && deadline.is_some_and(|d| Instant::now() >= d)
}

/// Follows parent links from `idx` to a root, returning vertices root-first.
pub(crate) fn unwind<T: Scalar>(graph: &Graph3do<'_, T>, parent: &[u32], idx: usize) -> Vec<AugVertex> {
    let mut out = vec![graph.vertex(idx)];
    let mut cur = idx;
    while parent[cur] != NO_PARENT {
        cur = parent[cur] as usize;
        out.push(graph.vertex(cur));
    }
    out.reverse();
    out
}
