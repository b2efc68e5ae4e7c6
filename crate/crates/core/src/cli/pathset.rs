//! Path-set text files and the JSON run summary.
//!
//! A path-set file starts with `#` header lines (path count, optimal cost,
//! totals and the pairwise area matrix) followed by one block per path: one
//! line `x y z h v cumulative_cost` per vertex, blocks separated by blank lines.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::error::{CorridorError, Result};
use crate::graph::{AugVertex, Graph3do};
use crate::multipath::MultipathResult;
use crate::scalar::COST_TIE_TOL;
use crate::search::Path;
use crate::terrain::TerrainGrid;

pub fn render(result: &MultipathResult<f64>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# corridor path set");
    let _ = writeln!(s, "# algorithm {}", result.algorithm);
    let _ = writeln!(s, "# paths {}", result.paths.len());
    match result.optimal_cost {
        Some(c) => {
            let _ = writeln!(s, "# optimal_cost {c}");
        }
        None => {
            let _ = writeln!(s, "# optimal_cost none");
        }
    }
    let _ = writeln!(s, "# solved {}", result.solved);
    let totals: Vec<String> = result.paths.iter().map(|p| p.total_cost().to_string()).collect();
    let _ = writeln!(s, "# totals {}", totals.join(" "));
    let _ = writeln!(s, "# areas");
    for row in &result.areas {
        let cells: Vec<String> = row.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(s, "# {}", cells.join(" "));
    }
    for p in &result.paths {
        s.push('\n');
        for (v, c) in p.vertices().iter().zip(p.cumulative_costs()) {
            let _ = writeln!(s, "{} {} {} {} {} {}", v.x, v.y, v.z, v.h, v.v, c);
        }
    }
    s
}

pub fn write(path: impl AsRef<FsPath>, result: &MultipathResult<f64>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render(result)).map_err(|source| CorridorError::Io { path: path.display().to_string(), source })
}

/// A parsed path-set file, not yet checked against a terrain.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSetFile {
    pub declared: usize,
    pub optimal_cost: Option<f64>,
    pub solved: Option<bool>,
    /// Vertex and cumulative cost, per path.
    pub paths: Vec<Vec<(AugVertex, f64)>>,
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CorridorError {
    CorridorError::InvalidPath(format!("line {line}: {msg}"))
}

impl PathSetFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut optimal_cost = None;
        let mut solved = None;
        let mut paths: Vec<Vec<(AugVertex, f64)>> = Vec::new();
        let mut current: Vec<(AugVertex, f64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim();
            if let Some(h) = line.strip_prefix('#') {
                let mut it = h.split_whitespace();
                match (it.next(), it.next()) {
                    (Some("paths"), Some(v)) => declared = Some(v.parse::<usize>().map_err(|_| bad(n, "bad path count"))?),
                    (Some("optimal_cost"), Some("none")) => optimal_cost = None,
                    (Some("optimal_cost"), Some(v)) => optimal_cost = Some(v.parse::<f64>().map_err(|_| bad(n, "bad optimal cost"))?),
                    (Some("solved"), Some(v)) => solved = Some(v.parse::<bool>().map_err(|_| bad(n, "bad solved flag"))?),
                    _ => {}
                }
                continue;
            }
            if line.is_empty() {
                if !current.is_empty() {
                    paths.push(std::mem::take(&mut current));
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(bad(n, format!("expected 6 fields, found {}", f.len())));
            }
            let num = |k: usize| -> Result<i64> { f[k].parse::<i64>().map_err(|_| bad(n, format!("bad integer {:?}", f[k]))) };
            let (x, y, z, h, v) = (num(0)?, num(1)?, num(2)?, num(3)?, num(4)?);
            if x < 0 || y < 0 || !(0..8).contains(&h) || !(-1..=1).contains(&v) {
                return Err(bad(n, "vertex fields out of range"));
            }
            let c: f64 = f[5].parse().map_err(|_| bad(n, format!("bad cost {:?}", f[5])))?;
            if !c.is_finite() {
                return Err(bad(n, "non-finite cost"));
            }
            current.push((AugVertex::new(x as u32, y as u32, z as i32, h as u8, v as i8), c));
        }
        if !current.is_empty() {
            paths.push(current);
        }
        let declared = declared.ok_or_else(|| CorridorError::InvalidPath("missing '# paths' header".into()))?;
        if declared != paths.len() {
            return Err(CorridorError::InvalidPath(format!("header declares {declared} paths, found {}", paths.len())));
        }
        Ok(PathSetFile { declared, optimal_cost, solved, paths })
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| CorridorError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Re-prices every path on `grid`, checks that consecutive vertices are
    /// graph edges and that the stored cumulative costs agree.
    pub fn rebuild(&self, grid: &TerrainGrid<f64>, model: &CostModel<f64>) -> Result<Vec<Path<f64>>> {
        let graph = Graph3do::new(grid, None);
        self.paths
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                let path = Path::from_vertices(grid, model, rows.iter().map(|r| r.0).collect())?;
                path.validate(&graph, model, path.first().position(), path.last().position())?;
                for (j, (&(_, stored), fresh)) in rows.iter().zip(path.cumulative_costs()).enumerate() {
                    if (stored - fresh).abs() > 1e-6 * (1.0 + fresh.abs()) + COST_TIE_TOL {
                        return Err(CorridorError::InvalidPath(format!(
                            "path {}: vertex {j} stores cost {stored}, terrain gives {fresh}",
                            i + 1
                        )));
                    }
                }
                Ok(path)
            })
            .collect()
    }
}

/// Machine-readable report written next to the path set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algorithm: String,
    pub solved: bool,
    pub timed_out: bool,
    pub exhausted_memory: bool,
    pub optimal_cost: Option<f64>,
    pub costs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub areas: Vec<Vec<f64>>,
    pub expansions: u64,
    pub pushes: u64,
    pub peak_labels: u64,
    pub iterations: u64,
    pub wall_seconds: f64,
}

impl Summary {
    pub fn new(result: &MultipathResult<f64>, wall_seconds: f64) -> Self {
        Summary {
            algorithm: result.algorithm.name().to_string(),
            solved: result.solved,
            timed_out: result.timed_out,
            exhausted_memory: result.exhausted_memory,
            optimal_cost: result.optimal_cost,
            costs: result.paths.iter().map(|p| p.total_cost()).collect(),
            ratios: result.ratios.clone(),
            areas: result.areas.clone(),
            expansions: result.stats.expansions,
            pushes: result.stats.pushes,
            peak_labels: result.stats.peak_labels,
            iterations: result.iterations,
            wall_seconds,
        }
    }

    pub fn write(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).map_err(|e| CorridorError::Config(format!("json: {e}")))?;
        std::fs::write(path, text + "\n").map_err(|source| CorridorError::Io { path: path.display().to_string(), source })
    }
}
