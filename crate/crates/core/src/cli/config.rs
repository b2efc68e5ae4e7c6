//! Flat `key=value` configuration files. Blank lines and `#` comments are
//! ignored; unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use crate::bench::{Clock, MatrixSettings, Variant};
use crate::cost::CostModel;
use crate::error::{CorridorError, Result};
use crate::multipath::{Algorithm, HeightRule, LabelKeying, MultipathConfig};

/// Key, default, meaning.
pub type KeyDoc = (&'static str, &'static str, &'static str);

const SOLVER_KEYS: &[KeyDoc] = &[
    ("algorithm", "bds", "se | ipa | kspa | bds | hybrid"),
    ("k", "3", "number of paths wanted"),
    ("minDiff", "12", "minimum pairwise area difference, percent"),
    ("maxDiff", "10", "maximum cost excess over the optimum, percent"),
    ("w", "derived", "sensitive elimination wall half-width in cells; round(minDiff/100 * map width - 0.5) when unset"),
    ("penaltyWidth", "10", "initial penalty corridor width, percent of the map width"),
    ("penaltyMax", "320", "largest penalty width tried, percent"),
    ("kappa", "k", "labels kept per vertex by kspa"),
    ("keying", "position", "kspa label sets per grid vertex (position) or per augmented vertex (state)"),
    ("ka", "2", "labels per vertex on each side of the hybrid"),
    ("kb", "3", "paths selected by the hybrid"),
    ("astar", "false", "straight-paving heuristic (A*, or average potentials bidirectionally)"),
    ("height", "none", "none | hr | ehr"),
    ("R", "3", "hr window radius in cells"),
    ("Hm", "1", "hr margin around the ground, meters"),
    ("Hi", "0.5", "ehr initial band around the ground, meters"),
    ("timeout", "300", "wall-clock limit per run in seconds; 0 disables"),
    ("maxExpansions", "none", "expansion budget per run"),
    ("labelCap", "50000000", "label limit for kspa and the hybrid"),
    ("paving", "30", "paving cost per meter"),
    ("cut", "3", "cut cost per cubic meter"),
    ("fill", "3", "fill cost per cubic meter"),
    ("width", "10", "road width, meters"),
    ("maxGrade", "0.10", "maximum road grade"),
];

/// Keys of `corridor solve` configs, in addition to the solver keys.
pub const SOLVE_KEYS: &[KeyDoc] = &[
    ("grid", "required", "terrain grid file, relative to the config file"),
    ("src", "0,ny/2", "source column x,y"),
    ("dst", "nx-1,ny/2", "destination column x,y"),
    ("out", "corridor-out", "output directory, relative to the config file"),
];

/// Keys of `corridor bench` configs, in addition to the solver keys.
pub const BENCH_KEYS: &[KeyDoc] = &[
    ("seed", "1", "seed for the synthetic maps"),
    ("lengths", "40,80", "map lengths in cells"),
    ("shapes", "2:10,2:30,8:20", "one map per ratio:relief entry and length"),
    ("maps", "none", "grid files to use instead of synthetic maps"),
    ("algorithms", "se,ipa,kspa,bds,hybrid", "algorithms run without modifications"),
    ("modified", "bds,hybrid", "algorithms also run with astar, astar+hr and astar+ehr"),
    ("threads", "1", "worker threads"),
    ("clock", "work", "profile time measure: work (expansions) or wall (seconds)"),
    ("writePaths", "false", "write each cell's path set next to the records"),
    ("out", "bench-out", "output directory, relative to the config file"),
];

pub fn solver_keys() -> &'static [KeyDoc] {
    SOLVER_KEYS
}

#[derive(Debug, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CorridorError::Config(format!("line {}: expected key=value", i + 1)));
            };
            let key = k.trim().to_string();
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(CorridorError::Config(format!("line {}: repeated key {key:?}", i + 1)));
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    pub fn take<V: FromStr>(&mut self, key: &str) -> Result<Option<V>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| CorridorError::Config(format!("line {line}: bad value {v:?} for {key}"))),
        }
    }

    pub fn take_list<V: FromStr>(&mut self, key: &str) -> Result<Option<Vec<V>>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|t| t.trim())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| CorridorError::Config(format!("line {line}: bad item {t:?} in {key}"))))
                .collect::<Result<Vec<V>>>()
                .map(Some),
        }
    }

    /// Errors on any key nobody consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(CorridorError::Config(format!("line {line}: unknown key {k:?}"))),
        }
    }
}

fn parse_point(s: &str) -> Result<(u32, u32)> {
    let bad = || CorridorError::Config(format!("expected x,y but found {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

/// Solver settings shared by `solve` and `bench`.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub multipath: MultipathConfig<f64>,
    pub model: CostModel<f64>,
    pub r: usize,
    pub hm: f64,
    pub hi: f64,
}

fn take_solver(kv: &mut KeyValues, default_budget: Option<u64>) -> Result<SolverSettings> {
    let mut c = MultipathConfig::<f64> { max_expansions: default_budget, ..MultipathConfig::default() };
    if let Some(a) = kv.take::<Algorithm>("algorithm")? {
        c.algorithm = a;
    }
    macro_rules! set {
        ($key:literal, $field:expr) => {
            if let Some(v) = kv.take($key)? {
                $field = v;
            }
        };
    }
    set!("k", c.k);
    set!("minDiff", c.min_diff);
    set!("maxDiff", c.max_diff);
    set!("penaltyWidth", c.penalty_width);
    set!("penaltyMax", c.penalty_max);
    set!("ka", c.ka);
    set!("kb", c.kb);
    set!("astar", c.astar);
    set!("labelCap", c.label_cap);
    if let Some(w) = kv.take::<usize>("w")? {
        c.sensitivity_width = Some(w);
    }
    if let Some(kappa) = kv.take::<usize>("kappa")? {
        c.kappa = Some(kappa);
    }
    if let Some(keying) = kv.take::<LabelKeying>("keying")? {
        c.keying = keying;
    }
    if let Some(b) = kv.take::<u64>("maxExpansions")? {
        c.max_expansions = Some(b);
    }
    if let Some(t) = kv.take::<f64>("timeout")? {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(CorridorError::Config("timeout must be a non-negative number of seconds".into()));
        }
        c.timeout = (t > 0.0).then(|| Duration::from_secs_f64(t));
    }

    let mut model = CostModel::<f64>::default();
    set!("paving", model.paving_rate);
    set!("cut", model.cut_rate);
    set!("fill", model.fill_rate);
    set!("width", model.road_width);
    set!("maxGrade", model.max_grade);
    model.validate()?;

    let r = kv.take("R")?.unwrap_or(3usize);
    let hm = kv.take("Hm")?.unwrap_or(1.0f64);
    let hi = kv.take("Hi")?.unwrap_or(0.5f64);
    c.height = match kv.take_str("height").as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("none") => HeightRule::None,
        Some("hr") => HeightRule::Simple { hm, r },
        Some("ehr") => HeightRule::Expanding { hi },
        Some(other) => return Err(CorridorError::Config(format!("unknown height rule {other:?}"))),
    };
    c.validate()?;
    Ok(SolverSettings { multipath: c, model, r, hm, hi })
}

fn resolve(base: &FsPath, p: &str) -> PathBuf {
    let p = PathBuf::from(p);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

/// A `corridor solve` configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: PathBuf,
    pub src: Option<(u32, u32)>,
    pub dst: Option<(u32, u32)>,
    pub out: PathBuf,
    pub solver: SolverSettings,
}

impl RunConfig {
    /// Parses `text`; relative paths are taken from `base`.
    pub fn parse(text: &str, base: &FsPath) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let grid = kv.take_str("grid").ok_or_else(|| CorridorError::Config("missing key \"grid\"".into()))?;
        let src = kv.take_str("src").map(|s| parse_point(&s)).transpose()?;
        let dst = kv.take_str("dst").map(|s| parse_point(&s)).transpose()?;
        let out = kv.take_str("out").unwrap_or_else(|| "corridor-out".into());
        let solver = take_solver(&mut kv, None)?;
        kv.finish()?;
        if src.is_some() && src == dst {
            return Err(CorridorError::Config("src and dst coincide".into()));
        }
        Ok(RunConfig { grid: resolve(base, &grid), src, dst, out: resolve(base, &out), solver })
    }

    pub fn load(path: &FsPath) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CorridorError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text, path.parent().unwrap_or(FsPath::new(".")))
    }
}

/// A `corridor bench` configuration.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub seed: u64,
    pub lengths: Vec<usize>,
    pub shapes: Vec<(usize, f64)>,
    pub maps: Vec<PathBuf>,
    pub variants: Vec<Variant>,
    pub settings: MatrixSettings,
    pub write_paths: bool,
    pub out: PathBuf,
}

fn parse_shape(s: &str) -> Result<(usize, f64)> {
    let bad = || CorridorError::Config(format!("expected ratio:relief but found {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let ratio: usize = a.trim().parse().map_err(|_| bad())?;
    let relief: f64 = b.trim().parse().map_err(|_| bad())?;
    if ratio == 0 || !(relief >= 0.0) {
        return Err(bad());
    }
    Ok((ratio, relief))
}

impl BenchConfig {
    pub fn parse(text: &str, base: &FsPath) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let seed = kv.take("seed")?.unwrap_or(1u64);
        let lengths = kv.take_list("lengths")?.unwrap_or_else(|| vec![40usize, 80]);
        let shapes = match kv.take_list::<String>("shapes")? {
            Some(list) => list.iter().map(|s| parse_shape(s)).collect::<Result<Vec<_>>>()?,
            None => vec![(2, 10.0), (2, 30.0), (8, 20.0)],
        };
        let maps = kv.take_list::<String>("maps")?.unwrap_or_default().iter().map(|m| resolve(base, m)).collect();
        let algorithms = kv.take_list("algorithms")?.unwrap_or_else(|| Algorithm::ALL.to_vec());
        let modified = kv.take_list("modified")?.unwrap_or_else(|| vec![Algorithm::Bds, Algorithm::Hybrid]);
        let threads = kv.take("threads")?.unwrap_or(1usize).max(1);
        let clock = kv.take("clock")?.unwrap_or_default();
        let write_paths = kv.take("writePaths")?.unwrap_or(false);
        let out = kv.take_str("out").unwrap_or_else(|| "bench-out".into());
        let solver = take_solver(&mut kv, MatrixSettings::default().base.max_expansions)?;
        kv.finish()?;
        if lengths.iter().any(|&l| l < 2) {
            return Err(CorridorError::Config("map lengths must be at least 2".into()));
        }
        let mut base_cfg = solver.multipath;
        if clock == Clock::Work {
            base_cfg.timeout = None;
        }
        let settings = MatrixSettings {
            base: base_cfg,
            model: solver.model,
            r: solver.r,
            hm: solver.hm,
            hi: solver.hi,
            clock,
            threads,
        };
        Ok(BenchConfig {
            seed,
            lengths,
            shapes,
            maps,
            variants: Variant::standard(&algorithms, &modified),
            settings,
            write_paths,
            out: resolve(base, &out),
        })
    }

    pub fn load(path: &FsPath) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CorridorError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text, path.parent().unwrap_or(FsPath::new(".")))
    }
}
