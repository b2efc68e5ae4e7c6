//! Edge pricing (paving plus earthwork) and admissible search heuristics.

use crate::error::{CorridorError, Result};
use crate::graph::{GeomEdge, GridPoint};
use crate::scalar::Scalar;
use crate::terrain::TerrainGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel<T> {
    /// Cost per meter of road (3D length).
    pub paving_rate: T,
    /// Cost per cubic meter of excavation.
    pub cut_rate: T,
    /// Cost per cubic meter of embankment.
    pub fill_rate: T,
    /// Road width in meters.
    pub road_width: T,
    /// Maximum permissible road grade.
    pub max_grade: T,
}

impl<T: Scalar> Default for CostModel<T> {
    fn default() -> Self {
        CostModel {
            paving_rate: T::lit(30.0),
            cut_rate: T::lit(3.0),
            fill_rate: T::lit(3.0),
            road_width: T::lit(10.0),
            max_grade: T::lit(0.10),
        }
    }
}

impl<T: Scalar> CostModel<T> {
    pub fn validate(&self) -> Result<()> {
        let rates = [self.paving_rate, self.cut_rate, self.fill_rate];
        if rates.iter().any(|r| !(*r >= T::zero()) || !r.is_finite()) {
            return Err(CorridorError::Config("cost rates must be finite and >= 0".into()));
        }
        if !(self.road_width > T::zero()) {
            return Err(CorridorError::Config("road width must be > 0".into()));
        }
        if !(self.max_grade > T::zero()) {
            return Err(CorridorError::Config("max grade must be > 0".into()));
        }
        Ok(())
    }

    /// Multiplies every rate by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        CostModel {
            paving_rate: self.paving_rate * factor,
            cut_rate: self.cut_rate * factor,
            fill_rate: self.fill_rate * factor,
            ..*self
        }
    }

    /// Paving plus earthwork cost of building the straight segment `edge`.
    pub fn edge_cost(&self, grid: &TerrainGrid<T>, edge: &GeomEdge) -> Result<T> {
        Ok(self.edge_breakdown(grid, edge)?.total(self))
    }

    pub fn edge_breakdown(&self, grid: &TerrainGrid<T>, edge: &GeomEdge) -> Result<EdgeBreakdown<T>> {
        let dxy = grid.dxy();
        let p0 = edge.from.planar(dxy);
        let p1 = edge.to.planar(dxy);
        let profile = grid.ground_profile(p0, p1)?;
        let e0 = level_height(grid, &edge.from);
        let e1 = level_height(grid, &edge.to);
        let em = (e0 + e1) * T::lit(0.5);
        let d = [
            e0 - profile.elevations[0],
            em - profile.elevations[1],
            e1 - profile.elevations[2],
        ];
        let half = profile.length * T::lit(0.5);
        let (f0, c0) = fill_cut_area(d[0], d[1], half);
        let (f1, c1) = fill_cut_area(d[1], d[2], half);
        let rise = e1 - e0;
        Ok(EdgeBreakdown {
            length3d: (profile.length * profile.length + rise * rise).sqrt(),
            fill_volume: (f0 + f1) * self.road_width,
            cut_volume: (c0 + c1) * self.road_width,
        })
    }

    /// Lower bound on the cost of reaching `dest` from `p`: paving a straight road.
    pub fn astar_heuristic(&self, p: (T, T), dest: (T, T)) -> T {
        let dx = p.0 - dest.0;
        let dy = p.1 - dest.1;
        self.paving_rate * (dx * dx + dy * dy).sqrt()
    }
}

#[inline]
fn level_height<T: Scalar>(grid: &TerrainGrid<T>, p: &GridPoint) -> T {
    T::from_i32(p.z).unwrap() * grid.dz()
}

/// Areas where a linear difference `road - ground` running from `da` to `db`
/// over `len` meters is positive (fill) and negative (cut).
fn fill_cut_area<T: Scalar>(da: T, db: T, len: T) -> (T, T) {
    let zero = T::zero();
    let half = T::lit(0.5);
    if da >= zero && db >= zero {
        ((da + db) * half * len, zero)
    } else if da <= zero && db <= zero {
        (zero, -(da + db) * half * len)
    } else {
        // sign change at fraction t
        let t = da / (da - db);
        let first = da.abs() * t * len * half;
        let second = db.abs() * (T::one() - t) * len * half;
        if da > zero {
            (first, second)
        } else {
            (second, first)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBreakdown<T> {
    pub length3d: T,
    pub fill_volume: T,
    pub cut_volume: T,
}

impl<T: Scalar> EdgeBreakdown<T> {
    pub fn total(&self, model: &CostModel<T>) -> T {
        model.paving_rate * self.length3d + model.fill_rate * self.fill_volume + model.cut_rate * self.cut_volume
    }
}

/// Average potentials for bidirectional A*: `pf = (hf - hb) / 2`, `pb = -pf`.
///
/// With `hf` a consistent lower bound towards the destination and `hb` one
/// towards the source, both reduced edge weights stay non-negative and
/// `pf(u) + pb(u) = 0`, so the two searches agree on path lengths.
pub struct IkedaPotentials<F, B> {
    hf: F,
    hb: B,
}

pub fn ikeda_potentials<P, T, F, B>(hf: F, hb: B) -> IkedaPotentials<F, B>
where
    T: Scalar,
    F: Fn(P) -> T,
    B: Fn(P) -> T,
{
    IkedaPotentials { hf, hb }
}

impl<F, B> IkedaPotentials<F, B> {
    pub fn forward<P: Copy, T: Scalar>(&self, u: P) -> T
    where
        F: Fn(P) -> T,
        B: Fn(P) -> T,
    {
        ((self.hf)(u) - (self.hb)(u)) * T::lit(0.5)
    }

    pub fn backward<P: Copy, T: Scalar>(&self, u: P) -> T
    where
        F: Fn(P) -> T,
        B: Fn(P) -> T,
    {
        -self.forward(u)
    }
}
