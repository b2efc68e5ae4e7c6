//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails unless every criterion outside `KNOWN_FAILURES` passes.

mod common;

use std::collections::BTreeMap;
use std::path::Path as FsPath;
use std::process::Command;
use std::time::Instant;

use corridor::bench::{self, ExperimentRecord, MatrixSettings, Variant};
use corridor::cli::PathSetFile;
use corridor::dissimilarity::StationProfile;
use corridor::graph::{graph_stats_2do, successors2do, Graph3do, HeightMask, PlanarVertex};
use corridor::multipath::sensitivity_score;
use corridor::search::{astar, bidirectional, dijkstra, EdgeRules, SearchProblem};
use corridor::{fixtures, solve, synth_terrain, Algorithm, Areas, Config, Grid, GridPoint, HeightRule, Model, Route};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_solution, enumerate_planar};

/// Criteria allowed to report FAIL without failing the test; each is
/// explained in the printed detail line.
const KNOWN_FAILURES: &[usize] = &[];

type Verdict = Result<String, String>;

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn corridor_bin(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_corridor")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn structural_bounds() -> Verdict {
    let mut grids: Vec<Grid> = vec![Grid::flat(2, 2), Grid::flat(5, 3)];
    for seed in 0..8 {
        grids.push(synth_terrain(seed, 6 + seed as usize, 4 + seed as usize % 3, 2.0 + seed as f64));
    }
    grids.extend(fixtures::suite::<f64>().into_iter().map(|f| f.grid));
    let mut checked = 0usize;
    for (i, grid) in grids.iter().enumerate() {
        let (nx, ny) = (grid.nx(), grid.ny());
        let v2 = graph_stats_2do(grid);
        if v2.vertex_count != 8 * nx * ny {
            return Err(format!("grid {i}: 2DO has {} vertices, not 8V = {}", v2.vertex_count, 8 * nx * ny));
        }
        for y in 0..ny as u32 {
            for x in 0..nx as u32 {
                for h in 0..8 {
                    let d = successors2do(grid, &PlanarVertex { x, y, h }).len();
                    let interior = x > 0 && y > 0 && x + 1 < nx as u32 && y + 1 < ny as u32;
                    if d > 3 || (interior && d != 3) {
                        return Err(format!("grid {i}: 2DO out-degree {d} at ({x},{y},{h})"));
                    }
                }
            }
        }
        let graph = Graph3do::new(grid, None);
        let (zmin, zmax) = grid.vertical_range();
        let base = nx * ny * graph.levels();
        let s3 = graph.stats();
        if s3.vertex_count != 24 * base {
            return Err(format!("grid {i}: 3DO has {} vertices, not 24V = {}", s3.vertex_count, 24 * base));
        }
        if s3.edge_count > 9 * s3.vertex_count {
            return Err(format!("grid {i}: {} edges exceed 9 per vertex", s3.edge_count));
        }
        for y in 0..ny as u32 {
            for x in 0..nx as u32 {
                for z in zmin..=zmax {
                    for u in Graph3do::<f64>::orientations(GridPoint::new(x, y, z)) {
                        let d = graph.successors(&u).len();
                        let interior =
                            x > 0 && y > 0 && x + 1 < nx as u32 && y + 1 < ny as u32 && z > zmin && z < zmax;
                        let want = if u.v == 0 { 9 } else { 6 };
                        if d > 9 || (interior && d != want) {
                            return Err(format!("grid {i}: 3DO out-degree {d} at {u:?}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{} grids, {checked} augmented vertices", grids.len()))
}

fn oracle_equivalence() -> Verdict {
    let model = Model::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for seed in 0..100u64 {
        let relief = rng.gen_range(0.0..10.0);
        let grid: Grid = synth_terrain(seed, 20, 10, relief);
        let src = GridPoint::on_ground(&grid, 0, rng.gen_range(0..10));
        let dst = GridPoint::on_ground(&grid, 19, rng.gen_range(0..10));
        let problem = SearchProblem::new(Graph3do::new(&grid, None), &model, src, dst);
        let none = EdgeRules::none();
        let d = dijkstra(&problem, &none).map_err(|e| e.to_string())?.path.ok_or("dijkstra found no path")?;
        let others = [
            ("astar", astar(&problem, &none)),
            ("bidi", bidirectional(&problem, &none, false)),
            ("bidi+ikeda", bidirectional(&problem, &none, true)),
        ];
        for (name, out) in others {
            let p = out.map_err(|e| e.to_string())?.path.ok_or(format!("{name} found no path"))?;
            if !rel_close(d.total_cost(), p.total_cost()) {
                return Err(format!("seed {seed}: dijkstra {} vs {name} {}", d.total_cost(), p.total_cost()));
            }
        }
    }
    for seed in 0..10u64 {
        let grid: Grid = synth_terrain(500 + seed, 6, 6, 0.49);
        let mask = HeightMask::uniform(&grid, 0, 0);
        let (s, t) = ((0, rng.gen_range(0..6)), (5, rng.gen_range(0..6)));
        let problem =
            SearchProblem::new(Graph3do::new(&grid, Some(&mask)), &model, GridPoint::new(s.0, s.1, 0), GridPoint::new(t.0, t.1, 0));
        let d = dijkstra(&problem, &EdgeRules::none()).map_err(|e| e.to_string())?.path.ok_or("no planar path")?;
        let best = enumerate_planar(&grid, &model, s, t, 11);
        if !rel_close(d.total_cost(), best) {
            return Err(format!("planar seed {seed}: dijkstra {} vs enumeration {best}", d.total_cost()));
        }
    }
    Ok("100 random 20x10 instances, 10 enumerated 6x6 planar instances".into())
}

fn sensitivity_example() -> Verdict {
    let s = sensitivity_score(&[-0.8, -0.5], &[0.1, -0.2]);
    if (s - 0.39f64).abs() <= 1e-12 {
        Ok(format!("score {s}"))
    } else {
        Err(format!("score {s}, wanted 0.39"))
    }
}

struct Desk {
    maps: Vec<bench::MapInstance>,
    records: Vec<ExperimentRecord>,
    paths: BTreeMap<(String, String), Vec<Route>>,
    settings: MatrixSettings,
}

/// Runs the default desk matrix through the binary and reads everything back.
fn desk_matrix(dir: &FsPath) -> Result<Desk, String> {
    let cfg = dir.join("desk.cfg");
    std::fs::write(&cfg, "writePaths = true\nout = desk\n").map_err(|e| e.to_string())?;
    corridor_bin(&["bench", cfg.to_str().unwrap()])?;
    let out = dir.join("desk");
    let file = std::fs::File::open(out.join("records.csv")).map_err(|e| e.to_string())?;
    let records = bench::read_records(file).map_err(|e| e.to_string())?;
    let maps = bench::desk_maps(1);
    let settings = MatrixSettings::default();
    let model = settings.model;
    let mut paths = BTreeMap::new();
    for r in &records {
        let map = maps.iter().find(|m| m.id == r.map).ok_or(format!("unknown map {}", r.map))?;
        let set = PathSetFile::load(bench::record_paths_file(&out.join("paths"), r)).map_err(|e| e.to_string())?;
        let rebuilt = set.rebuild(&map.grid, &model).map_err(|e| format!("{} {}: {e}", r.map, r.variant))?;
        paths.insert((r.map.clone(), r.variant.clone()), rebuilt);
    }
    Ok(Desk { maps, records, paths, settings })
}

fn solution_validity(desk: &Desk) -> Verdict {
    let model = desk.settings.model;
    let mut solved = 0;
    for r in &desk.records {
        if !r.error.is_empty() {
            return Err(format!("{} {}: {}", r.map, r.variant, r.error));
        }
        if r.recheck().map_err(|e| e.to_string())? != r.solved {
            return Err(format!("{} {}: stored solved flag disagrees with stored costs", r.map, r.variant));
        }
        if !r.solved {
            continue;
        }
        solved += 1;
        let map = desk.maps.iter().find(|m| m.id == r.map).unwrap();
        let variant: Variant = r.variant.parse().map_err(|e: corridor::CorridorError| e.to_string())?;
        let mask = desk.settings.config(&variant).height.build_mask(&map.grid, &model, map.src, map.dst);
        let problem = SearchProblem::new(Graph3do::new(&map.grid, mask.as_ref()), &model, map.src, map.dst);
        let opt = dijkstra(&problem, &EdgeRules::none()).map_err(|e| e.to_string())?.path.ok_or("no path")?.total_cost();
        let paths = &desk.paths[&(r.map.clone(), r.variant.clone())];
        check_solution(paths, opt, 3, 10.0, 12.0, &map.grid, &model, map.src, map.dst)
            .map_err(|e| format!("{} {}: {e}", r.map, r.variant))?;
    }
    Ok(format!("{solved} of {} desk runs solved, 0 violations", desk.records.len()))
}

fn inside(mask: &HeightMask, path: &Route) -> bool {
    path.vertices().iter().all(|v| mask.contains(v.x as usize, v.y as usize, v.z))
}

fn pruning(desk: &Desk) -> Verdict {
    let model = Model::default();
    let hr = HeightRule::Simple { hm: 1.0, r: 3 };
    let ehr = HeightRule::Expanding { hi: 0.5 };

    // expansions, per instance, of the single-path engines
    let mut instances: Vec<(String, Grid, GridPoint, GridPoint)> =
        desk.maps.iter().map(|m| (m.id.clone(), m.grid.clone(), m.src, m.dst)).collect();
    for f in fixtures::suite::<f64>() {
        instances.push((f.name.to_string(), f.grid, f.src, f.dst));
    }
    for seed in 0..20u64 {
        let g: Grid = synth_terrain(900 + seed, 30, 15, 15.0);
        let (s, t) = (GridPoint::on_ground(&g, 0, 7), GridPoint::on_ground(&g, 29, 7));
        instances.push((format!("synth-{seed}"), g, s, t));
    }
    for (id, grid, src, dst) in &instances {
        let none = EdgeRules::none();
        let full = SearchProblem::new(Graph3do::new(grid, None), &model, *src, *dst);
        let mask = hr.build_mask(grid, &model, *src, *dst).unwrap();
        let masked = SearchProblem::new(Graph3do::new(grid, Some(&mask)), &model, *src, *dst);
        let d = dijkstra(&full, &none).map_err(|e| e.to_string())?.stats.expansions;
        let a = astar(&full, &none).map_err(|e| e.to_string())?.stats.expansions;
        let h = astar(&masked, &none).map_err(|e| e.to_string())?.stats.expansions;
        if !(h <= a && a <= d) {
            return Err(format!("{id}: expansions hr {h}, astar {a}, dijkstra {d}"));
        }
    }

    // the restricted variant solves wherever its unrestricted twin did with
    // the optimum inside the band
    let mut kept = 0;
    for r in desk.records.iter().filter(|r| r.variant.ends_with("+astar+hr")) {
        let twin = r.variant.trim_end_matches("+hr");
        let Some(base) = desk.records.iter().find(|b| b.map == r.map && b.variant == twin) else { continue };
        let map = desk.maps.iter().find(|m| m.id == r.map).unwrap();
        let mask = hr.build_mask(&map.grid, &model, map.src, map.dst).unwrap();
        let base_paths = &desk.paths[&(base.map.clone(), base.variant.clone())];
        if base.solved && inside(&mask, &base_paths[0]) {
            kept += 1;
            if !r.solved {
                return Err(format!("{} {}: unsolved though {twin} solved inside the band", r.map, r.variant));
            }
        }
    }

    // EHR against HR on the fixture suite
    let (mut t_hr, mut t_ehr) = (0.0, 0.0);
    for f in fixtures::suite::<f64>() {
        for alg in Algorithm::ALL {
            let mut best = [f64::INFINITY; 2];
            let mut sets: [Vec<Vec<_>>; 2] = Default::default();
            for (i, rule) in [hr, ehr].into_iter().enumerate() {
                let cfg = Config { astar: true, height: rule, ..Config::default().with_algorithm(alg) };
                for _ in 0..3 {
                    let start = Instant::now();
                    let res = solve(&f.grid, &model, f.src, f.dst, &cfg).map_err(|e| e.to_string())?;
                    best[i] = best[i].min(start.elapsed().as_secs_f64());
                    sets[i] = res.paths.iter().map(|p| p.vertices().to_vec()).collect();
                }
            }
            if sets[0] != sets[1] {
                return Err(format!("{} {alg}: EHR and HR path sets differ", f.name));
            }
            t_hr += best[0];
            t_ehr += best[1];
        }
    }
    let summary = format!(
        "{} instances ordered hr <= astar <= dijkstra; {kept} band-contained twins all solved; \
         EHR and HR path sets identical on the fixture suite; wall time EHR {t_ehr:.3}s vs HR {t_hr:.3}s",
        instances.len()
    );
    if t_ehr >= t_hr {
        Ok(summary)
    } else {
        Err(format!("{summary}: the expanding band starts narrower than the simple one here, so it is faster"))
    }
}

fn hybrid_reduction() -> Verdict {
    let model = Model::default();
    let mut solved = 0;
    for seed in 0..20u64 {
        let grid: Grid = synth_terrain(100 + seed, 24, 12, 12.0);
        let (src, dst) = (GridPoint::on_ground(&grid, 0, 6), GridPoint::on_ground(&grid, 23, 6));
        let b = solve(&grid, &model, src, dst, &Config::default().with_algorithm(Algorithm::Bds)).map_err(|e| e.to_string())?;
        let cfg = Config { ka: 1, ..Config::default().with_algorithm(Algorithm::Hybrid) };
        let h = solve(&grid, &model, src, dst, &cfg).map_err(|e| e.to_string())?;
        let verts = |r: &corridor::Outcome| r.paths.iter().map(|p| p.vertices().to_vec()).collect::<Vec<_>>();
        if verts(&b) != verts(&h) || b.solved != h.solved {
            return Err(format!("seed {seed}: hybrid with ka = 1 differs from bds"));
        }
        solved += b.solved as usize;
    }
    Ok(format!("20 instances identical ({solved} solved)"))
}

fn kspa_pathology() -> Verdict {
    let f = fixtures::flat_long::<f64>();
    let model = Model::default();
    let k = solve(&f.grid, &model, f.src, f.dst, &Config::default().with_algorithm(Algorithm::Kspa)).map_err(|e| e.to_string())?;
    let b = solve(&f.grid, &model, f.src, f.dst, &Config::default().with_algorithm(Algorithm::Bds)).map_err(|e| e.to_string())?;
    let width = f.grid.map_width();
    let needed = 3.0 * 0.12 * width;
    let detail = format!("kspa {} path(s), bds {} paths; map {width} m wide, needs {needed:.1} m", k.paths.len(), b.paths.len());
    if k.paths.len() == 1 && b.paths.len() == 3 && b.solved && width >= needed {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn area_metric() -> Verdict {
    let line = |n: u32, y: u32| (0..=n).map(move |x| (x, y));
    let p = StationProfile::<f64>::new(line(40, 5));
    if p.area_to(&p, 10.0) != 0.0 {
        return Err("identity is not 0".into());
    }
    let q = StationProfile::<f64>::new(line(40, 15));
    let cfg = Areas::new(12.0, 200.0, 400.0, 10.0);
    let pct = cfg.percent(StationProfile::new(line(40, 5)).area_to(&q, 10.0));
    if (pct - 50.0).abs() > 1e-9 {
        return Err(format!("parallel offset gives {pct}%"));
    }
    // operation counts against path length on random walks
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut walk = |len: usize| {
        let mut y: i64 = 50;
        let mut x: u32 = 0;
        let mut cols = vec![(0u32, 50u32)];
        while cols.len() < len {
            if rng.gen_bool(0.8) {
                x += 1;
            }
            y = (y + rng.gen_range(-1..=1)).clamp(0, 100);
            cols.push((x, y as u32));
        }
        cols
    };
    let mut samples = Vec::new();
    for len in (10..=1000).step_by(55) {
        let (a, b) = (walk(len), walk(len));
        let mut ops = 0u64;
        let pa = StationProfile::<f64>::counted(a.iter().copied(), &mut ops);
        let pb = StationProfile::<f64>::counted(b.iter().copied(), &mut ops);
        pa.area_to_counted(&pb, 10.0, &mut ops);
        samples.push(((a.len() + b.len()) as f64, ops as f64));
    }
    let n = samples.len() as f64;
    let (mx, my) = (samples.iter().map(|s| s.0).sum::<f64>() / n, samples.iter().map(|s| s.1).sum::<f64>() / n);
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let syy: f64 = samples.iter().map(|s| (s.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    let detail = format!("identity 0%, offset {pct}%, op-count R^2 {r2:.5} over {} lengths", samples.len());
    if r2 >= 0.99 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn profile_correctness() -> Verdict {
    let rec = |map: &str, variant: &str, time: f64, solved: bool| ExperimentRecord {
        map: map.into(),
        variant: variant.into(),
        time,
        solved,
        ..Default::default()
    };
    let records = [
        rec("p", "A", 10.0, true),
        rec("p", "B", 20.0, true),
        rec("q", "A", 30.0, true),
        rec("q", "B", 20.0, true),
        rec("r", "A", 5.0, true),
        rec("r", "B", 20.0, true),
        rec("s", "A", 7.0, true),
        rec("s", "B", 1.0, false),
        rec("u", "A", 7.0, false),
        rec("u", "B", 1.0, false),
    ];
    let prof = bench::profile(&records, &["A".to_string(), "B".to_string()]).map_err(|e| e.to_string())?;
    let want_a = vec![(1.0, 0.75), (1.5, 1.0)];
    let want_b = vec![(1.0, 0.25), (2.0, 0.5), (4.0, 0.75)];
    if prof.solvers[0].points != want_a || prof.solvers[1].points != want_b {
        return Err(format!("got {:?} / {:?}", prof.solvers[0].points, prof.solvers[1].points));
    }
    if (prof.problems, prof.excluded) != (4, 1) {
        return Err(format!("{} problems, {} excluded", prof.problems, prof.excluded));
    }
    Ok("hand-computed step functions match; 1 unsolved problem excluded".into())
}

fn determinism(dir: &FsPath) -> Verdict {
    let mut files = Vec::new();
    for name in ["run1", "run2"] {
        let cfg = dir.join(format!("{name}.cfg"));
        std::fs::write(&cfg, format!("seed = 7\nlengths = 24\nthreads = 1\nout = {name}\n")).map_err(|e| e.to_string())?;
        corridor_bin(&["bench", cfg.to_str().unwrap()])?;
        let read = |f: &str| std::fs::read(dir.join(name).join(f)).map_err(|e| e.to_string());
        files.push((read("records.csv")?, read("profile.csv")?, read("terrain.csv")?));
    }
    if files[0] == files[1] {
        let rows = files[0].0.iter().filter(|&&b| b == b'\n').count() - 1;
        Ok(format!("records ({rows} rows), profile and terrain CSVs byte-identical"))
    } else {
        Err("CSV outputs differ between runs".into())
    }
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let desk = desk_matrix(dir.path());
    let from_desk = |f: fn(&Desk) -> Verdict| match &desk {
        Ok(d) => f(d),
        Err(e) => Err(format!("desk matrix failed: {e}")),
    };
    let results: Vec<(usize, Verdict)> = vec![
        (1, structural_bounds()),
        (2, oracle_equivalence()),
        (3, sensitivity_example()),
        (4, from_desk(solution_validity)),
        (5, from_desk(pruning)),
        (6, hybrid_reduction()),
        (7, kspa_pathology()),
        (8, area_metric()),
        (9, profile_correctness()),
        (10, determinism(dir.path())),
    ];
    let mut unexpected = Vec::new();
    for (n, verdict) in &results {
        match verdict {
            Ok(detail) => println!("criterion {n:>2} PASS: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL: {detail}");
                if !KNOWN_FAILURES.contains(n) {
                    unexpected.push(*n);
                }
            }
        }
    }
    assert!(unexpected.is_empty(), "criteria {unexpected:?} failed");
}
