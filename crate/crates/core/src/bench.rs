//! Batch experiments: a matrix of maps × solver variants, one record per
//! cell, performance profiles over the records and the terrain table.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path as FsPath;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::pathset;
use crate::cost::CostModel;
use crate::error::{CorridorError, Result};
use crate::graph::GridPoint;
use crate::multipath::{solve, Algorithm, HeightRule, MultipathConfig};
use crate::scalar::COST_TIE_TOL;
use crate::terrain::{synth_terrain, TerrainGrid};

/// What the `time` column measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clock {
    /// Vertex expansions: reproducible across runs and machines.
    #[default]
    Work,
    /// Wall-clock seconds, including mask construction.
    Wall,
}

impl FromStr for Clock {
    type Err = CorridorError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "work" => Ok(Clock::Work),
            "wall" => Ok(Clock::Wall),
            _ => Err(CorridorError::Config(format!("unknown clock {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Restriction {
    None,
    Hr,
    Ehr,
}

/// An algorithm with its speed-up modifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Variant {
    pub algorithm: Algorithm,
    pub astar: bool,
    pub restriction: Restriction,
}

impl Variant {
    pub fn base(algorithm: Algorithm) -> Self {
        Variant { algorithm, astar: false, restriction: Restriction::None }
    }

    /// The base algorithms followed by A*, A*+HR and A*+EHR runs of `modified`.
    pub fn standard(base: &[Algorithm], modified: &[Algorithm]) -> Vec<Variant> {
        let mut out: Vec<Variant> = base.iter().map(|&a| Variant::base(a)).collect();
        for &algorithm in modified {
            for restriction in [Restriction::None, Restriction::Hr, Restriction::Ehr] {
                out.push(Variant { algorithm, astar: true, restriction });
            }
        }
        out
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.algorithm.name())?;
        if self.astar {
            f.write_str("+astar")?;
        }
        match self.restriction {
            Restriction::None => Ok(()),
            Restriction::Hr => f.write_str("+hr"),
            Restriction::Ehr => f.write_str("+ehr"),
        }
    }
}

impl FromStr for Variant {
    type Err = CorridorError;
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('+');
        let algorithm = parts.next().unwrap_or_default().parse()?;
        let mut v = Variant::base(algorithm);
        for p in parts {
            match p.to_ascii_lowercase().as_str() {
                "astar" => v.astar = true,
                "hr" => v.restriction = Restriction::Hr,
                "ehr" => v.restriction = Restriction::Ehr,
                _ => return Err(CorridorError::Config(format!("unknown modification {p:?} in {s:?}"))),
            }
        }
        Ok(v)
    }
}

/// A terrain with fixed endpoints.
#[derive(Debug, Clone)]
pub struct MapInstance {
    pub id: String,
    pub grid: TerrainGrid<f64>,
    pub src: GridPoint,
    pub dst: GridPoint,
}

impl MapInstance {
    /// Endpoints on the middle row at both short ends.
    pub fn across(id: impl Into<String>, grid: TerrainGrid<f64>) -> Self {
        let (nx, ny) = (grid.nx() as u32, grid.ny() as u32);
        let src = GridPoint::on_ground(&grid, 0, ny / 2);
        let dst = GridPoint::on_ground(&grid, nx - 1, ny / 2);
        MapInstance { id: id.into(), grid, src, dst }
    }
}

/// Synthetic maps: for every length, one map per entry of `shapes`
/// (length-to-width ratio, relief in meters).
pub fn synth_maps(seed: u64, lengths: &[usize], shapes: &[(usize, f64)]) -> Vec<MapInstance> {
    let mut maps = Vec::new();
    for &nx in lengths {
        for (i, &(ratio, relief)) in shapes.iter().enumerate() {
            let ny = (nx / ratio.max(1)).max(2);
            let map_seed = seed.wrapping_mul(1_000_003).wrapping_add((nx * 100 + i) as u64);
            let grid = synth_terrain(map_seed, nx, ny, relief);
            maps.push(MapInstance::across(format!("m{nx}x{ny}-{i}"), grid));
        }
    }
    maps
}

/// Map lengths 40 and 80; per length two 2:1 maps and one 8:1 map.
pub fn desk_maps(seed: u64) -> Vec<MapInstance> {
    synth_maps(seed, &[40, 80], &[(2, 10.0), (2, 30.0), (8, 20.0)])
}

/// Everything shared by the cells of a matrix.
#[derive(Debug, Clone)]
pub struct MatrixSettings {
    pub base: MultipathConfig<f64>,
    pub model: CostModel<f64>,
    /// Simple restriction window radius and margin.
    pub r: usize,
    pub hm: f64,
    /// Expanding restriction initial band.
    pub hi: f64,
    pub clock: Clock,
    pub threads: usize,
}

impl Default for MatrixSettings {
    fn default() -> Self {
        MatrixSettings {
            base: MultipathConfig { timeout: None, max_expansions: Some(20_000_000), ..MultipathConfig::default() },
            model: CostModel::default(),
            r: 3,
            hm: 1.0,
            hi: 0.5,
            clock: Clock::Work,
            threads: 1,
        }
    }
}

impl MatrixSettings {
    pub fn config(&self, v: &Variant) -> MultipathConfig<f64> {
        let height = match v.restriction {
            Restriction::None => HeightRule::None,
            Restriction::Hr => HeightRule::Simple { hm: self.hm, r: self.r },
            Restriction::Ehr => HeightRule::Expanding { hi: self.hi },
        };
        let mut cfg = self.base.with_algorithm(v.algorithm);
        cfg.astar = v.astar;
        cfg.height = height;
        if self.clock == Clock::Work {
            cfg.timeout = None;
        }
        cfg
    }
}

/// One matrix cell. Lists are `;`-separated; `areas` holds the upper
/// triangle of the pairwise matrix row by row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub map: String,
    pub dim_x: usize,
    pub dim_y: usize,
    pub dim_z: usize,
    pub frac_a: f64,
    pub frac_b: f64,
    pub frac_c: f64,
    pub variant: String,
    pub k: usize,
    pub min_diff: f64,
    pub max_diff: f64,
    pub time: f64,
    pub wall_seconds: Option<f64>,
    pub expansions: u64,
    pub peak_labels: u64,
    pub solved: bool,
    pub timed_out: bool,
    pub exhausted_memory: bool,
    pub paths: usize,
    pub optimal_cost: Option<f64>,
    pub costs: String,
    pub areas: String,
    pub error: String,
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn split(s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|t| t.parse::<f64>().map_err(|_| CorridorError::Config(format!("bad number {t:?} in record"))))
        .collect()
}

impl ExperimentRecord {
    pub fn cost_list(&self) -> Result<Vec<f64>> {
        split(&self.costs)
    }

    pub fn area_list(&self) -> Result<Vec<f64>> {
        split(&self.areas)
    }

    /// Re-derives the solved flag from the stored costs and areas.
    pub fn recheck(&self) -> Result<bool> {
        let costs = self.cost_list()?;
        let areas = self.area_list()?;
        let Some(opt) = self.optimal_cost else { return Ok(false) };
        if self.timed_out || self.exhausted_memory || costs.len() != self.k {
            return Ok(false);
        }
        let tol = COST_TIE_TOL * (1.0 + opt.abs());
        let cheapest = costs.iter().copied().fold(f64::INFINITY, f64::min);
        let limit = (1.0 + self.max_diff / 100.0) * opt + tol;
        Ok((cheapest - opt).abs() <= tol
            && costs.iter().all(|&c| c <= limit)
            && areas.len() == costs.len() * (costs.len() - 1) / 2
            && areas.iter().all(|&a| a >= self.min_diff))
    }
}

fn cell_file(dir: &FsPath, map: &str, variant: &str) -> std::path::PathBuf {
    dir.join(format!("{map}.{variant}.paths"))
}

fn run_cell(map: &MapInstance, v: &Variant, s: &MatrixSettings, paths_dir: Option<&FsPath>) -> ExperimentRecord {
    let cfg = s.config(v);
    let class = map.grid.classify();
    let mut rec = ExperimentRecord {
        map: map.id.clone(),
        dim_x: map.grid.nx(),
        dim_y: map.grid.ny(),
        dim_z: map.grid.levels(),
        frac_a: class.frac_a,
        frac_b: class.frac_b,
        frac_c: class.frac_c,
        variant: v.to_string(),
        k: cfg.target(),
        min_diff: cfg.min_diff,
        max_diff: cfg.max_diff,
        time: f64::NAN,
        wall_seconds: None,
        expansions: 0,
        peak_labels: 0,
        solved: false,
        timed_out: false,
        exhausted_memory: false,
        paths: 0,
        optimal_cost: None,
        costs: String::new(),
        areas: String::new(),
        error: String::new(),
    };
    let start = Instant::now();
    let result = solve(&map.grid, &s.model, map.src, map.dst, &cfg);
    let wall = start.elapsed().as_secs_f64();
    let res = match result {
        Ok(r) => r,
        Err(e) => {
            rec.error = e.to_string();
            return rec;
        }
    };
    rec.time = match s.clock {
        Clock::Work => res.stats.expansions as f64,
        Clock::Wall => wall,
    };
    if s.clock == Clock::Wall {
        rec.wall_seconds = Some(wall);
    }
    rec.expansions = res.stats.expansions;
    rec.peak_labels = res.stats.peak_labels;
    rec.solved = res.solved;
    rec.timed_out = res.timed_out;
    rec.exhausted_memory = res.exhausted_memory;
    rec.paths = res.paths.len();
    rec.optimal_cost = res.optimal_cost;
    rec.costs = join(res.paths.iter().map(|p| p.total_cost()));
    rec.areas = join(
        (0..res.areas.len()).flat_map(|i| ((i + 1)..res.areas.len()).map(move |j| (i, j))).map(|(i, j)| res.areas[i][j]),
    );
    if let Some(dir) = paths_dir {
        if let Err(e) = pathset::write(cell_file(dir, &rec.map, &rec.variant), &res) {
            rec.error = e.to_string();
        }
    }
    rec
}

/// Runs every (map, variant) cell. Records come back in map-major input
/// order whatever the thread count; failures are recorded, never raised.
/// With `paths_dir` each cell's path set is written to `<map>.<variant>.paths`.
pub fn run_matrix(
    maps: &[MapInstance],
    variants: &[Variant],
    settings: &MatrixSettings,
    paths_dir: Option<&FsPath>,
) -> Result<Vec<ExperimentRecord>> {
    if let Some(dir) = paths_dir {
        std::fs::create_dir_all(dir).map_err(|source| CorridorError::Io { path: dir.display().to_string(), source })?;
    }
    let cells: Vec<(usize, usize)> = (0..maps.len()).flat_map(|m| (0..variants.len()).map(move |v| (m, v))).collect();
    let run = |&(m, v): &(usize, usize)| run_cell(&maps[m], &variants[v], settings, paths_dir);
    if settings.threads <= 1 {
        return Ok(cells.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build()
        .map_err(|e| CorridorError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(run).collect()))
}

/// Path-set file written by [`run_matrix`] for `record`.
pub fn record_paths_file(dir: &FsPath, record: &ExperimentRecord) -> std::path::PathBuf {
    cell_file(dir, &record.map, &record.variant)
}

pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CorridorError::Config(format!("csv: {e}")))
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

fn csv_err(e: csv::Error) -> CorridorError {
    CorridorError::Config(format!("csv: {e}"))
}

/// Step-function points `(tau, fraction)` of one solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverProfile {
    pub solver: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceProfile {
    pub solvers: Vec<SolverProfile>,
    /// Problems that at least one solver solved.
    pub problems: usize,
    /// Problems dropped because nobody solved them.
    pub excluded: usize,
}

/// Time ratio to the fastest solver per problem, and the fraction of
/// problems each solver solves within ratio `tau`. Problems that no listed
/// solver solved are left out of every denominator.
pub fn profile(records: &[ExperimentRecord], solvers: &[String]) -> Result<PerformanceProfile> {
    if records.is_empty() {
        return Err(CorridorError::EmptyRecords);
    }
    let mut times: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    let mut all_problems: Vec<&str> = Vec::new();
    for r in records {
        if !all_problems.contains(&r.map.as_str()) {
            all_problems.push(&r.map);
        }
        if r.solved && solvers.iter().any(|s| *s == r.variant) {
            times.entry(r.map.as_str()).or_default().insert(r.variant.as_str(), r.time);
        }
    }
    let problems = times.len();
    let excluded = all_problems.len() - problems;

    let mut out = Vec::new();
    for s in solvers {
        let mut ratios: Vec<f64> = times
            .values()
            .filter_map(|per| {
                let t = *per.get(s.as_str())?;
                let best = per.values().copied().fold(f64::INFINITY, f64::min);
                Some(if t <= best { 1.0 } else { t / best.max(f64::MIN_POSITIVE) })
            })
            .collect();
        ratios.sort_by(f64::total_cmp);
        let frac = |n: usize| if problems == 0 { 0.0 } else { n as f64 / problems as f64 };
        let at_one = ratios.iter().filter(|&&r| r <= 1.0).count();
        let mut points = vec![(1.0, frac(at_one))];
        for (i, &r) in ratios.iter().enumerate() {
            if r > 1.0 && ratios.get(i + 1) != Some(&r) {
                points.push((r, frac(i + 1)));
            }
        }
        out.push(SolverProfile { solver: s.clone(), points });
    }
    Ok(PerformanceProfile { solvers: out, problems, excluded })
}

impl PerformanceProfile {
    /// Fraction solved within `tau`.
    pub fn rho(&self, solver: &str, tau: f64) -> Option<f64> {
        let p = self.solvers.iter().find(|p| p.solver == solver)?;
        Some(p.points.iter().take_while(|(t, _)| *t <= tau).last().map_or(0.0, |&(_, f)| f))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["solver", "tau", "fraction"]).map_err(csv_err)?;
        for s in &self.solvers {
            for &(t, f) in &s.points {
                w.write_record([s.solver.clone(), t.to_string(), f.to_string()]).map_err(csv_err)?;
            }
        }
        w.flush().map_err(|e| CorridorError::Config(format!("csv: {e}")))
    }
}

/// Solver names in first-appearance order.
pub fn solvers_of(records: &[ExperimentRecord]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in records {
        if !out.contains(&r.variant) {
            out.push(r.variant.clone());
        }
    }
    out
}

/// `map, Dim x, Dim y, Dim z, A, B, C` with class shares in percent.
pub fn write_terrain_table<W: Write>(out: W, maps: &[MapInstance]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["map", "Dim x", "Dim y", "Dim z", "A", "B", "C"]).map_err(csv_err)?;
    for m in maps {
        let c = m.grid.classify();
        let pct = |f: f64| format!("{:.1}", 100.0 * f);
        w.write_record([
            m.id.clone(),
            m.grid.nx().to_string(),
            m.grid.ny().to_string(),
            m.grid.levels().to_string(),
            pct(c.frac_a),
            pct(c.frac_b),
            pct(c.frac_c),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CorridorError::Config(format!("csv: {e}")))
}
