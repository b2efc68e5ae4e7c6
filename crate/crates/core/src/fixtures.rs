//! Small hand-shaped terrains with known corridor structure, used by tests,
//! the benchmark suite and the CLI examples. All use 10 m / 1 m spacings and
//! put the endpoints on the middle row at both short ends.

use crate::graph::GridPoint;
use crate::scalar::Scalar;
use crate::terrain::TerrainGrid;

/// A terrain with its intended endpoints.
#[derive(Debug, Clone)]
pub struct Fixture<T> {
    pub name: &'static str,
    pub grid: TerrainGrid<T>,
    pub src: GridPoint,
    pub dst: GridPoint,
}

impl<T: Scalar> Fixture<T> {
    fn new(name: &'static str, grid: TerrainGrid<T>) -> Self {
        let (nx, ny) = (grid.nx() as u32, grid.ny() as u32);
        let src = GridPoint::on_ground(&grid, 0, ny / 2);
        let dst = GridPoint::on_ground(&grid, nx - 1, ny / 2);
        Fixture { name, grid, src, dst }
    }
}

fn tri(d: f64, r: f64) -> f64 {
    (1.0 - d.abs() / r).max(0.0)
}

/// 0 outside `[a - ramp, b + ramp]`, 1 inside `[a, b]`, linear in between.
fn taper(x: f64, a: f64, b: f64, ramp: f64) -> f64 {
    if x < a {
        ((x - (a - ramp)) / ramp).clamp(0.0, 1.0)
    } else if x > b {
        (((b + ramp) - x) / ramp).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Central flat lane flanked by two ridges, with a flat valley beyond each
/// ridge and steep outer walls. The ridges open out near both ends, so the
/// lane and the two valleys are three corridors within 10 % of each other.
pub fn two_valley<T: Scalar>() -> Fixture<T> {
    let (nx, ny) = (41usize, 21usize);
    let mid = (ny / 2) as f64;
    let grid = TerrainGrid::from_fn(nx, ny, T::lit(10.0), T::one(), |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let ridges = 5.0 * (tri(yf - (mid - 2.0), 1.5) + tri(yf - (mid + 2.0), 1.5));
        let walls = 3.0 * ((yf - (mid + 5.0)).max(0.0) + ((mid - 5.0) - yf).max(0.0));
        T::lit(ridges * taper(xf, 7.0, 33.0, 4.0) + walls)
    });
    Fixture::new("two-valley", grid)
}

/// One flat canyon floor between walls 30 m high; there is no second corridor.
pub fn narrow_canyon<T: Scalar>() -> Fixture<T> {
    let (nx, ny) = (41usize, 21usize);
    let mid = (ny / 2) as f64;
    let grid = TerrainGrid::from_fn(nx, ny, T::lit(10.0), T::one(), |_, y| {
        let d = (y as f64 - mid).abs();
        T::lit(if d <= 1.0 { 0.0 } else { 30.0 })
    });
    Fixture::new("narrow-canyon", grid)
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Two valleys cut into high ground that leave the endpoints on opposite
/// sides and swap over in the middle of the map, crossing at right angles.
/// The valley that starts north is slightly shorter.
pub fn x_valleys<T: Scalar>() -> Fixture<T> {
    let (nx, ny) = (41usize, 21usize);
    let m = (ny / 2) as f64;
    let north_first = [(0.0, m), (3.0, m + 3.0), (17.0, m + 3.0), (23.0, m - 3.0), (37.0, m - 3.0), (40.0, m)];
    let south_first = [(0.0, m), (5.0, m - 5.0), (15.0, m - 5.0), (25.0, m + 5.0), (35.0, m + 5.0), (40.0, m)];
    let grid = TerrainGrid::from_fn(nx, ny, T::lit(10.0), T::one(), |x, y| {
        let p = (x as f64, y as f64);
        let d = [&north_first[..], &south_first[..]]
            .iter()
            .flat_map(|line| line.windows(2).map(|s| segment_distance(p, s[0], s[1])))
            .fold(f64::INFINITY, f64::min);
        T::lit(if d <= 1.0 { 0.0 } else { 20.0 })
    });
    Fixture::new("x-valleys", grid)
}

/// Gently rolling ground with a 10 m cliff block off to one side of the corridors.
pub fn cliff<T: Scalar>() -> Fixture<T> {
    let (nx, ny) = (41usize, 21usize);
    let grid = TerrainGrid::from_fn(nx, ny, T::lit(10.0), T::one(), |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let roll = 0.6 * (xf / 6.0).sin() * (yf / 5.0).cos();
        let block = if (16..=24).contains(&x) && y >= 17 { 10.0 } else { 0.0 };
        T::lit(roll + block)
    });
    Fixture::new("cliff", grid)
}

/// Uniform flat ground, long enough that well-separated detours stay within
/// a 10 % cost excess.
pub fn flat_long<T: Scalar>() -> Fixture<T> {
    Fixture::new("flat", TerrainGrid::flat(61, 21))
}

/// The suite used for mask comparisons.
pub fn suite<T: Scalar>() -> Vec<Fixture<T>> {
    vec![two_valley(), narrow_canyon(), x_valleys(), cliff()]
}
