//! Orientation-augmented implicit grid graphs.
//!
//! A 3D vertex `(x, y, z)` is split into 24 augmented vertices, one per
//! incoming orientation `(h, v)` with `h` in `0..8` (45 degree steps,
//! counter-clockwise from +x) and `v` in `{-1, 0, 1}`. An edge may turn by
//! at most one step in `h` and in `v`, so the 45 degree turn limit becomes a
//! plain shortest-path constraint. An edge entering with orientation
//! `(h', v')` moves one cell in direction `h'` and `v'` vertical levels.
//!
//! Height masks restrict each column to a band of admissible vertical levels.

use std::ops::Deref;

use crate::scalar::Scalar;
use crate::terrain::{TerrainGrid, DIRECTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AugVertex {
    pub x: u32,
    pub y: u32,
    pub z: i32,
    pub h: u8,
    pub v: i8,
}

impl AugVertex {
    pub fn new(x: u32, y: u32, z: i32, h: u8, v: i8) -> Self {
        debug_assert!(h < 8 && (-1..=1).contains(&v));
        AugVertex { x, y, z, h, v }
    }

    pub fn position(&self) -> GridPoint {
        GridPoint { x: self.x, y: self.y, z: self.z }
    }

    pub fn column(&self) -> (u32, u32) {
        (self.x, self.y)
    }
}

/// A 3D lattice position without orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub x: u32,
    pub y: u32,
    pub z: i32,
}

impl GridPoint {
    pub fn new(x: u32, y: u32, z: i32) -> Self {
        GridPoint { x, y, z }
    }

    /// The point at ground level of column `(x, y)`.
    pub fn on_ground<T: Scalar>(grid: &TerrainGrid<T>, x: u32, y: u32) -> Self {
        GridPoint { x, y, z: grid.ground_level(x as usize, y as usize) }
    }

    /// Planar position in meters.
    pub fn planar<T: Scalar>(&self, dxy: T) -> (T, T) {
        (T::from_u32(self.x).unwrap() * dxy, T::from_u32(self.y).unwrap() * dxy)
    }
}

/// The straight 3D segment realised by an edge; its cost depends only on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeomEdge {
    pub from: GridPoint,
    pub to: GridPoint,
}

impl GeomEdge {
    pub fn new(from: GridPoint, to: GridPoint) -> Self {
        GeomEdge { from, to }
    }

    pub fn between(u: &AugVertex, w: &AugVertex) -> Self {
        GeomEdge { from: u.position(), to: w.position() }
    }

    pub fn reversed(&self) -> Self {
        GeomEdge { from: self.to, to: self.from }
    }
}

#[inline]
pub fn turn_left(h: u8) -> u8 {
    (h + 1) % 8
}

#[inline]
pub fn turn_right(h: u8) -> u8 {
    (h + 7) % 8
}

#[inline]
pub fn opposite(h: u8) -> u8 {
    (h + 4) % 8
}

/// Vertical orientations reachable from `v`: `min(v+1,1)`, `v`, `max(v-1,-1)`, deduplicated.
#[inline]
fn next_vertical(v: i8) -> ([i8; 3], usize) {
    match v {
        1 => ([1, 0, 0], 2),
        0 => ([1, 0, -1], 3),
        _ => ([0, -1, 0], 2),
    }
}

/// Vertical orientations `v` from which `v2` is reachable.
#[inline]
fn prev_vertical(v2: i8) -> ([i8; 3], usize) {
    // the turn relation |v - v2| <= 1 is symmetric
    next_vertical(v2)
}

/// Up to nine adjacent augmented vertices, stored inline.
#[derive(Debug, Clone, Copy)]
pub struct Adjacent {
    items: [AugVertex; 9],
    len: usize,
}

impl Adjacent {
    fn new() -> Self {
        Adjacent { items: [AugVertex::default(); 9], len: 0 }
    }

    #[inline]
    fn push(&mut self, v: AugVertex) {
        self.items[self.len] = v;
        self.len += 1;
    }
}

impl Deref for Adjacent {
    type Target = [AugVertex];
    fn deref(&self) -> &[AugVertex] {
        &self.items[..self.len]
    }
}

/// Per-column admissible vertical interval `[lo, hi]` in grid levels.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMask {
    nx: usize,
    lo: Vec<i32>,
    hi: Vec<i32>,
}

impl HeightMask {
    /// The same level band `[lo, hi]` in every column.
    pub fn uniform<T: Scalar>(grid: &TerrainGrid<T>, lo: i32, hi: i32) -> Self {
        let n = grid.nx() * grid.ny();
        HeightMask { nx: grid.nx(), lo: vec![lo; n], hi: vec![hi; n] }
    }

    pub fn interval(&self, x: usize, y: usize) -> (i32, i32) {
        let k = y * self.nx + x;
        (self.lo[k], self.hi[k])
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize, z: i32) -> bool {
        let k = y * self.nx + x;
        self.lo[k] <= z && z <= self.hi[k]
    }

    /// True if every column interval of `self` lies inside the one of `other`.
    pub fn is_within(&self, other: &HeightMask) -> bool {
        self.lo.len() == other.lo.len()
            && self
                .lo
                .iter()
                .zip(&self.hi)
                .zip(other.lo.iter().zip(&other.hi))
                .all(|((&a, &b), (&c, &d))| a >= c && b <= d)
    }

    fn from_meters<T: Scalar>(grid: &TerrainGrid<T>, lo_m: &[T], hi_m: &[T]) -> Self {
        let dz = grid.dz();
        HeightMask {
            nx: grid.nx(),
            lo: lo_m.iter().map(|&m| (m / dz).floor().to_i32().unwrap()).collect(),
            hi: hi_m.iter().map(|&m| (m / dz).ceil().to_i32().unwrap()).collect(),
        }
    }
}

/// Simple height restriction: each column admits levels between
/// `min(window min, Z - hm)` and `max(window max, Z + hm)`, where the window is
/// the `(2r+1)^2` neighborhood clipped at the boundary. Snapped outward.
pub fn simple_height_mask<T: Scalar>(grid: &TerrainGrid<T>, hm: T, r: usize) -> HeightMask {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut lo_m = Vec::with_capacity(nx * ny);
    let mut hi_m = Vec::with_capacity(nx * ny);
    for y in 0..ny {
        for x in 0..nx {
            let z = grid.elevation(x, y);
            let (mut wlo, mut whi) = (z, z);
            for yy in y.saturating_sub(r)..=(y + r).min(ny - 1) {
                for xx in x.saturating_sub(r)..=(x + r).min(nx - 1) {
                    let e = grid.elevation(xx, yy);
                    wlo = wlo.min(e);
                    whi = whi.max(e);
                }
            }
            lo_m.push(wlo.min(z - hm));
            hi_m.push(whi.max(z + hm));
        }
    }
    HeightMask::from_meters(grid, &lo_m, &hi_m)
}

/// Expanding height restriction.
///
/// Starts from a band of `hi` meters around the ground, then widens it:
/// 1. Ramps: for every adjacent column pair steeper than `max_grade`, columns
///    within `step / max_grade` meters of the lower column may rise to the
///    upper column's elevation.
/// 2. Straight cuts: along the straight sight-line between the endpoints,
///    columns whose ground departs from the endpoint chord by more than `hi`
///    may reach the chord.
pub fn expanding_height_mask<T: Scalar>(
    grid: &TerrainGrid<T>,
    hi: T,
    max_grade: T,
    sightline: Option<((u32, u32), (u32, u32))>,
) -> HeightMask {
    let (nx, ny) = (grid.nx(), grid.ny());
    let dxy = grid.dxy();
    let mut lo_m: Vec<T> = grid.elevations().iter().map(|&z| z - hi).collect();
    let mut hi_m: Vec<T> = grid.elevations().iter().map(|&z| z + hi).collect();

    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    for y in 0..ny {
        for x in 0..nx {
            let base = grid.elevation(x, y);
            for (h, &(dx, dy)) in DIRECTIONS.iter().enumerate() {
                let (tx, ty) = (x as i64 + dx as i64, y as i64 + dy as i64);
                if !grid.contains(tx, ty) {
                    continue;
                }
                let top = grid.elevation(tx as usize, ty as usize);
                let run = if h % 2 == 0 { dxy } else { dxy * sqrt2 };
                let step = top - base;
                if step <= T::zero() || step / run <= max_grade {
                    continue;
                }
                let reach = step / max_grade;
                let rc = (reach / dxy).floor().to_usize().unwrap_or(0);
                for yy in y.saturating_sub(rc)..=(y + rc).min(ny - 1) {
                    for xx in x.saturating_sub(rc)..=(x + rc).min(nx - 1) {
                        let ddx = T::from_usize_lossy(xx.abs_diff(x)) * dxy;
                        let ddy = T::from_usize_lossy(yy.abs_diff(y)) * dxy;
                        if (ddx * ddx + ddy * ddy).sqrt() <= reach {
                            let k = yy * nx + xx;
                            hi_m[k] = hi_m[k].max(top);
                        }
                    }
                }
            }
        }
    }

    if let Some((a, b)) = sightline {
        let cells = line_cells(a, b);
        let za = grid.elevation(a.0 as usize, a.1 as usize);
        let zb = grid.elevation(b.0 as usize, b.1 as usize);
        let n = cells.len().max(2) - 1;
        for (i, &(x, y)) in cells.iter().enumerate() {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(n);
            let chord = za + (zb - za) * t;
            let k = y as usize * nx + x as usize;
            let g = grid.elevations()[k];
            if g - chord > hi {
                lo_m[k] = lo_m[k].min(chord);
            } else if chord - g > hi {
                hi_m[k] = hi_m[k].max(chord);
            }
        }
    }
    HeightMask::from_meters(grid, &lo_m, &hi_m)
}

/// Grid cells on the digital line between two cells (Bresenham), endpoints included.
pub fn line_cells(a: (u32, u32), b: (u32, u32)) -> Vec<(u32, u32)> {
    let (mut x0, mut y0) = (a.0 as i64, a.1 as i64);
    let (x1, y1) = (b.0 as i64, b.1 as i64);
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = vec![(x0 as u32, y0 as u32)];
    while (x0, y0) != (x1, y1) {
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
        out.push((x0 as u32, y0 as u32));
    }
    out
}

/// The implicit 3DO graph over a terrain grid, optionally height-restricted.
#[derive(Debug, Clone, Copy)]
pub struct Graph3do<'a, T> {
    grid: &'a TerrainGrid<T>,
    mask: Option<&'a HeightMask>,
    zmin: i32,
    zmax: i32,
}

impl<'a, T: Scalar> Graph3do<'a, T> {
    pub fn new(grid: &'a TerrainGrid<T>, mask: Option<&'a HeightMask>) -> Self {
        let (zmin, zmax) = grid.vertical_range();
        Graph3do { grid, mask, zmin, zmax }
    }

    pub fn grid(&self) -> &'a TerrainGrid<T> {
        self.grid
    }

    pub fn mask(&self) -> Option<&'a HeightMask> {
        self.mask
    }

    pub fn levels(&self) -> usize {
        (self.zmax - self.zmin + 1) as usize
    }

    /// Size of the dense augmented state space (admissible or not).
    pub fn state_count(&self) -> usize {
        self.grid.nx() * self.grid.ny() * self.levels() * 24
    }

    #[inline]
    pub fn index(&self, v: &AugVertex) -> usize {
        let col = v.y as usize * self.grid.nx() + v.x as usize;
        let lvl = (v.z - self.zmin) as usize;
        ((col * self.levels() + lvl) * 8 + v.h as usize) * 3 + (v.v + 1) as usize
    }

    pub fn vertex(&self, index: usize) -> AugVertex {
        let v = (index % 3) as i8 - 1;
        let rest = index / 3;
        let h = (rest % 8) as u8;
        let rest = rest / 8;
        let lvl = rest % self.levels();
        let col = rest / self.levels();
        AugVertex {
            x: (col % self.grid.nx()) as u32,
            y: (col / self.grid.nx()) as u32,
            z: self.zmin + lvl as i32,
            h,
            v,
        }
    }

    #[inline]
    pub fn admissible(&self, x: i64, y: i64, z: i32) -> bool {
        self.grid.contains(x, y)
            && z >= self.zmin
            && z <= self.zmax
            && self.mask.map_or(true, |m| m.contains(x as usize, y as usize, z))
    }

    pub fn admissible_point(&self, p: &GridPoint) -> bool {
        self.admissible(p.x as i64, p.y as i64, p.z)
    }

    /// Augmented vertices reachable by one edge from `u`.
    pub fn successors(&self, u: &AugVertex) -> Adjacent {
        let mut out = Adjacent::new();
        let (vs, nv) = next_vertical(u.v);
        for h2 in [turn_right(u.h), u.h, turn_left(u.h)] {
            let (dx, dy) = DIRECTIONS[h2 as usize];
            let (x, y) = (u.x as i64 + dx as i64, u.y as i64 + dy as i64);
            for &v2 in &vs[..nv] {
                let z = u.z + v2 as i32;
                if self.admissible(x, y, z) {
                    out.push(AugVertex { x: x as u32, y: y as u32, z, h: h2, v: v2 });
                }
            }
        }
        out
    }

    /// Augmented vertices with an edge into `w`.
    pub fn predecessors(&self, w: &AugVertex) -> Adjacent {
        let mut out = Adjacent::new();
        let (dx, dy) = DIRECTIONS[w.h as usize];
        let (x, y) = (w.x as i64 - dx as i64, w.y as i64 - dy as i64);
        let z = w.z - w.v as i32;
        if !self.admissible(x, y, z) {
            return out;
        }
        let (vs, nv) = prev_vertical(w.v);
        for h in [turn_right(w.h), w.h, turn_left(w.h)] {
            for &v in &vs[..nv] {
                out.push(AugVertex { x: x as u32, y: y as u32, z, h, v });
            }
        }
        out
    }

    /// All 24 augmented vertices at a lattice point.
    pub fn orientations(p: GridPoint) -> impl Iterator<Item = AugVertex> {
        (0..8u8).flat_map(move |h| (-1..=1i8).map(move |v| AugVertex { x: p.x, y: p.y, z: p.z, h, v }))
    }

    /// Counts admissible augmented vertices and directed edges by full enumeration.
    pub fn stats(&self) -> GraphStats {
        let mut vertex_count = 0usize;
        let mut edge_count = 0usize;
        for y in 0..self.grid.ny() as u32 {
            for x in 0..self.grid.nx() as u32 {
                for z in self.zmin..=self.zmax {
                    if !self.admissible(x as i64, y as i64, z) {
                        continue;
                    }
                    for u in Self::orientations(GridPoint { x, y, z }) {
                        vertex_count += 1;
                        edge_count += self.successors(&u).len();
                    }
                }
            }
        }
        GraphStats { vertex_count, edge_count }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
}

/// Augmented planar vertex of the 2DO model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarVertex {
    pub x: u32,
    pub y: u32,
    pub h: u8,
}

pub fn successors2do<T: Scalar>(grid: &TerrainGrid<T>, u: &PlanarVertex) -> Vec<PlanarVertex> {
    [turn_right(u.h), u.h, turn_left(u.h)]
        .into_iter()
        .filter_map(|h| {
            let (dx, dy) = DIRECTIONS[h as usize];
            let (x, y) = (u.x as i64 + dx as i64, u.y as i64 + dy as i64);
            grid.contains(x, y).then(|| PlanarVertex { x: x as u32, y: y as u32, h })
        })
        .collect()
}

pub fn graph_stats_2do<T: Scalar>(grid: &TerrainGrid<T>) -> GraphStats {
    let mut stats = GraphStats { vertex_count: 0, edge_count: 0 };
    for y in 0..grid.ny() as u32 {
        for x in 0..grid.nx() as u32 {
            for h in 0..8 {
                stats.vertex_count += 1;
                stats.edge_count += successors2do(grid, &PlanarVertex { x, y, h }).len();
            }
        }
    }
    stats
}
