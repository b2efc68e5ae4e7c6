//! Terrain elevation grids: text I/O, grade classification, synthetic
//! generation and interpolated ground profiles along edge footprints.

use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CorridorError, Result};
use crate::scalar::Scalar;

/// Planar offsets for the eight horizontal orientations, counter-clockwise from +x.
pub const DIRECTIONS: [(i32, i32); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// Elevation field sampled on a regular grid. `z` is row-major: `z[y * nx + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainGrid<T> {
    nx: usize,
    ny: usize,
    dxy: T,
    dz: T,
    z: Vec<T>,
}

impl<T: Scalar> TerrainGrid<T> {
    pub fn new(nx: usize, ny: usize, dxy: T, dz: T, z: Vec<T>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(CorridorError::InvalidGrid(format!(
                "grid must be at least 2x2, got {nx}x{ny}"
            )));
        }
        if !(dxy > T::zero()) || !(dz > T::zero()) || !dxy.is_finite() || !dz.is_finite() {
            return Err(CorridorError::InvalidGrid(
                "spacings must be positive and finite".into(),
            ));
        }
        if z.len() != nx * ny {
            return Err(CorridorError::ElevationCountMismatch {
                expected: nx * ny,
                found: z.len(),
            });
        }
        if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
            return Err(CorridorError::BadElevation(bad.to_string()));
        }
        Ok(TerrainGrid { nx, ny, dxy, dz, z })
    }

    /// Flat grid at elevation zero with the default 10 m / 1 m spacings.
    pub fn flat(nx: usize, ny: usize) -> Self {
        Self::from_fn(nx, ny, T::lit(10.0), T::one(), |_, _| T::zero())
    }

    /// Builds a grid by evaluating `f(x, y)` at every vertex (grid indices).
    ///
    /// Panics if the dimensions or the produced values are invalid.
    pub fn from_fn(nx: usize, ny: usize, dxy: T, dz: T, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut z = Vec::with_capacity(nx * ny);
        for y in 0..ny {
            for x in 0..nx {
                z.push(f(x, y));
            }
        }
        Self::new(nx, ny, dxy, dz, z).expect("valid generated grid")
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dxy(&self) -> T {
        self.dxy
    }

    pub fn dz(&self) -> T {
        self.dz
    }

    pub fn elevations(&self) -> &[T] {
        &self.z
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.nx && (y as usize) < self.ny
    }

    /// Ground elevation `Z(x, y)` in meters at a grid vertex.
    #[inline]
    pub fn elevation(&self, x: usize, y: usize) -> T {
        self.z[y * self.nx + x]
    }

    /// Vertical index of the grid level nearest to the ground at `(x, y)`.
    pub fn ground_level(&self, x: usize, y: usize) -> i32 {
        (self.elevation(x, y) / self.dz).round().to_i32().unwrap_or(0)
    }

    /// Inclusive range of vertical indices spanned by the terrain relief.
    pub fn vertical_range(&self) -> (i32, i32) {
        let (lo, hi) = self.min_max();
        let lo = (lo / self.dz).floor().to_i32().unwrap_or(0);
        let hi = (hi / self.dz).ceil().to_i32().unwrap_or(0);
        (lo, hi)
    }

    /// Number of vertical levels in the unrestricted 3D grid.
    pub fn levels(&self) -> usize {
        let (lo, hi) = self.vertical_range();
        (hi - lo + 1) as usize
    }

    pub fn min_max(&self) -> (T, T) {
        self.z.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }

    /// Planar extent in meters: `((nx-1)*dxy, (ny-1)*dxy)`.
    pub fn extent(&self) -> (T, T) {
        (
            T::from_usize_lossy(self.nx - 1) * self.dxy,
            T::from_usize_lossy(self.ny - 1) * self.dxy,
        )
    }

    /// Map width across the station axis, in meters.
    pub fn map_width(&self) -> T {
        self.extent().1
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| CorridorError::MalformedHeader("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(CorridorError::MalformedHeader(format!(
                "expected `nx ny dxy dz`, got {header:?}"
            )));
        }
        let nx: usize = fields[0]
            .parse()
            .map_err(|_| CorridorError::MalformedHeader(format!("bad nx {:?}", fields[0])))?;
        let ny: usize = fields[1]
            .parse()
            .map_err(|_| CorridorError::MalformedHeader(format!("bad ny {:?}", fields[1])))?;
        let dxy: T = fields[2]
            .parse()
            .map_err(|_| CorridorError::MalformedHeader(format!("bad dxy {:?}", fields[2])))?;
        let dz: T = fields[3]
            .parse()
            .map_err(|_| CorridorError::MalformedHeader(format!("bad dz {:?}", fields[3])))?;

        let mut z = Vec::with_capacity(nx.saturating_mul(ny).min(1 << 24));
        for tok in lines.flat_map(str::split_whitespace) {
            let v: T = tok
                .parse()
                .map_err(|_| CorridorError::BadElevation(tok.to_string()))?;
            if !v.is_finite() {
                return Err(CorridorError::BadElevation(tok.to_string()));
            }
            z.push(v);
        }
        if z.len() != nx * ny {
            return Err(CorridorError::ElevationCountMismatch {
                expected: nx * ny,
                found: z.len(),
            });
        }
        Self::new(nx, ny, dxy, dz, z)
    }

    /// Serializes to the grid text format. Values use shortest round-trip formatting.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {} {}", self.nx, self.ny, self.dxy, self.dz);
        for row in self.z.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CorridorError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| CorridorError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Maximum terrain grade at `(i, j)` over the in-grid horizontal directions.
    pub fn max_grade(&self, i: usize, j: usize) -> Result<T> {
        if i >= self.nx || j >= self.ny {
            return Err(CorridorError::OutOfBounds(i as i64, j as i64));
        }
        let here = self.elevation(i, j);
        let diag = self.dxy * T::lit(std::f64::consts::SQRT_2);
        let mut best = T::zero();
        for (h, &(dx, dy)) in DIRECTIONS.iter().enumerate() {
            let (x, y) = (i as i64 + dx as i64, j as i64 + dy as i64);
            if !self.contains(x, y) {
                continue;
            }
            let run = if h % 2 == 0 { self.dxy } else { diag };
            let g = (self.elevation(x as usize, y as usize) - here).abs() / run;
            best = best.max(g);
        }
        Ok(best)
    }

    /// Fraction of vertices in each grade class.
    pub fn classify(&self) -> TerrainClassBreakdown {
        let mut counts = [0usize; 3];
        for j in 0..self.ny {
            for i in 0..self.nx {
                let m = self.max_grade(i, j).expect("in-grid index");
                counts[TerrainClass::from_grade(m) as usize] += 1;
            }
        }
        let n = (self.nx * self.ny) as f64;
        TerrainClassBreakdown {
            frac_a: counts[0] as f64 / n,
            frac_b: counts[1] as f64 / n,
            frac_c: counts[2] as f64 / n,
        }
    }

    /// Bilinear interpolation of the ground at a planar point in meters.
    pub fn interpolate(&self, px: T, py: T) -> Result<T> {
        let (ex, ey) = self.extent();
        let tol = self.dxy * T::lit(1e-9);
        if !(px >= -tol && py >= -tol && px <= ex + tol && py <= ey + tol) {
            return Err(CorridorError::OutsideExtent(px.as_f64(), py.as_f64()));
        }
        let fx = (px / self.dxy).max(T::zero());
        let fy = (py / self.dxy).max(T::zero());
        let i0 = fx.floor().to_usize().unwrap_or(0).min(self.nx - 2);
        let j0 = fy.floor().to_usize().unwrap_or(0).min(self.ny - 2);
        let tx = fx - T::from_usize_lossy(i0);
        let ty = fy - T::from_usize_lossy(j0);
        let z00 = self.elevation(i0, j0);
        let z10 = self.elevation(i0 + 1, j0);
        let z01 = self.elevation(i0, j0 + 1);
        let z11 = self.elevation(i0 + 1, j0 + 1);
        let one = T::one();
        Ok(z00 * (one - tx) * (one - ty) + z10 * tx * (one - ty) + z01 * (one - tx) * ty + z11 * tx * ty)
    }

    /// Piecewise-linear ground elevation along the segment `p0 -> p1` (meters).
    pub fn ground_profile(&self, p0: (T, T), p1: (T, T)) -> Result<GroundProfile<T>> {
        let half = T::lit(0.5);
        let mid = ((p0.0 + p1.0) * half, (p0.1 + p1.1) * half);
        let len = ((p1.0 - p0.0).powi(2) + (p1.1 - p0.1).powi(2)).sqrt();
        Ok(GroundProfile {
            length: len,
            elevations: [
                self.interpolate(p0.0, p0.1)?,
                self.interpolate(mid.0, mid.1)?,
                self.interpolate(p1.0, p1.1)?,
            ],
        })
    }
}

/// Ground elevation along a segment, sampled at its endpoints and midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundProfile<T> {
    /// Planar length of the segment in meters.
    pub length: T,
    /// Elevations at fractions 0, 1/2 and 1 of the segment.
    pub elevations: [T; 3],
}

impl<T: Scalar> GroundProfile<T> {
    /// Elevation at planar distance `s` from the start, clamped to the segment.
    pub fn eval(&self, s: T) -> T {
        if self.length <= T::zero() {
            return self.elevations[0];
        }
        let t = (s / self.length).max(T::zero()).min(T::one());
        let two = T::lit(2.0);
        if t <= T::lit(0.5) {
            let u = t * two;
            self.elevations[0] + (self.elevations[1] - self.elevations[0]) * u
        } else {
            let u = (t - T::lit(0.5)) * two;
            self.elevations[1] + (self.elevations[2] - self.elevations[1]) * u
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerrainClass {
    A = 0,
    B = 1,
    C = 2,
}

impl TerrainClass {
    /// A up to and including 10%, C from 20% inclusive, B in between.
    pub fn from_grade<T: Scalar>(m: T) -> Self {
        if m <= T::lit(0.10) {
            TerrainClass::A
        } else if m < T::lit(0.20) {
            TerrainClass::B
        } else {
            TerrainClass::C
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainClassBreakdown {
    pub frac_a: f64,
    pub frac_b: f64,
    pub frac_c: f64,
}

impl std::fmt::Display for TerrainClassBreakdown {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "A={:.0}% B={:.0}% C={:.0}%",
            self.frac_a * 100.0,
            self.frac_b * 100.0,
            self.frac_c * 100.0
        )
    }
}

/// Deterministic synthetic terrain: a seeded sum of smooth bumps rescaled so
/// that the relief (max minus min elevation) equals `relief` meters.
pub fn synth_terrain<T: Scalar>(seed: u64, nx: usize, ny: usize, relief: T) -> TerrainGrid<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = nx.max(ny) as f64;
    let bumps: Vec<(f64, f64, f64, f64)> = (0..rng.gen_range(4..10))
        .map(|_| {
            let cx = rng.gen_range(0.0..nx as f64);
            let cy = rng.gen_range(0.0..ny as f64);
            let r = rng.gen_range(0.08..0.35) * span;
            let a = rng.gen_range(-1.0..1.0);
            (cx, cy, r, a)
        })
        .collect();
    let raw: Vec<f64> = (0..ny)
        .flat_map(|y| (0..nx).map(move |x| (x, y)))
        .map(|(x, y)| {
            bumps
                .iter()
                .map(|&(cx, cy, r, a)| {
                    let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    a * (-d2 / (2.0 * r * r)).exp()
                })
                .sum()
        })
        .collect();
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let z = raw
        .iter()
        .map(|&v| {
            if range > 0.0 && relief > T::zero() {
                T::lit((v - lo) / range) * relief
            } else {
                T::zero()
            }
        })
        .collect();
    TerrainGrid::new(nx, ny, T::lit(10.0), T::one(), z).expect("valid synthetic grid")
}
