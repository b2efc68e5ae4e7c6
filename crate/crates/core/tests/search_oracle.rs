use corridor::graph::{AugVertex, Graph3do, GridPoint, HeightMask};
use corridor::search::{astar, bidirectional, dijkstra, BidiEngine, EdgeRules, SearchProblem};
use corridor::{synth_terrain, CostModel, Grid, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::enumerate_planar;

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn dijkstra_matches_exhaustive_enumeration_on_planar_grids() {
    let model = Model::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..12 {
        // relief below half a level keeps the ground on level 0
        let grid: Grid = synth_terrain(seed, 6, 6, 0.49);
        let mask = HeightMask::uniform(&grid, 0, 0);
        let src = (0, rng.gen_range(0..6));
        let dst = (5, rng.gen_range(0..6));
        let problem = SearchProblem::new(
            Graph3do::new(&grid, Some(&mask)),
            &model,
            GridPoint::new(src.0, src.1, 0),
            GridPoint::new(dst.0, dst.1, 0),
        );
        let path = dijkstra(&problem, &EdgeRules::none()).unwrap().path.unwrap();
        let oracle = enumerate_planar(&grid, &model, src, dst, 11);
        assert!(rel_close(path.total_cost(), oracle), "seed {seed}: {} vs {oracle}", path.total_cost());
    }
}

#[test]
fn all_engines_agree_on_random_instances() {
    let model = Model::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..100u64 {
        let relief = rng.gen_range(0.0..10.0);
        let grid: Grid = synth_terrain(seed, 20, 10, relief);
        let src = GridPoint::on_ground(&grid, 0, rng.gen_range(0..10));
        let dst = GridPoint::on_ground(&grid, 19, rng.gen_range(0..10));
        let problem = SearchProblem::new(Graph3do::new(&grid, None), &model, src, dst);
        let none = EdgeRules::none();
        let d = dijkstra(&problem, &none).unwrap();
        let a = astar(&problem, &none).unwrap();
        let b = bidirectional(&problem, &none, false).unwrap();
        let bi = bidirectional(&problem, &none, true).unwrap();
        let dc = d.path.as_ref().unwrap().total_cost();
        for (name, out) in [("astar", &a), ("bidi", &b), ("bidi+ikeda", &bi)] {
            let c = out.path.as_ref().unwrap().total_cost();
            assert!(rel_close(dc, c), "seed {seed} {name}: {dc} vs {c}");
            out.path.as_ref().unwrap().validate(&problem.graph, &model, src, dst).unwrap();
        }
        assert!(a.stats.expansions <= d.stats.expansions, "seed {seed}");
    }
}

#[test]
fn heuristic_never_overestimates() {
    let model = Model::default();
    for seed in 0..10 {
        let grid: Grid = synth_terrain(100 + seed, 20, 20, 8.0);
        let src = GridPoint::on_ground(&grid, 0, 10);
        let dst = GridPoint::on_ground(&grid, 19, 3);
        let problem = SearchProblem::new(Graph3do::new(&grid, None), &model, src, dst);
        let opt = dijkstra(&problem, &EdgeRules::none()).unwrap().path.unwrap().total_cost();
        assert!(problem.to_dst_bound(src.x, src.y) <= opt);
    }
}

#[test]
fn cutoff_at_optimum_emits_only_optimal_events() {
    let model = Model::default();
    let grid: Grid = synth_terrain(3, 16, 8, 4.0);
    let src = GridPoint::on_ground(&grid, 0, 4);
    let dst = GridPoint::on_ground(&grid, 15, 4);
    let problem = SearchProblem::new(Graph3do::new(&grid, None), &model, src, dst);
    let opt = dijkstra(&problem, &EdgeRules::none()).unwrap().path.unwrap().total_cost();
    let mut engine = BidiEngine::new(problem, 10.0, false, None).with_cutoff(opt);
    let mut n = 0;
    while let Some(ev) = engine.next_event() {
        assert!(rel_close(ev.cost(), opt), "{} vs {opt}", ev.cost());
        assert!(rel_close(ev.path.total_cost(), opt));
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn meet_events_on_uniform_grid_include_straight_and_distant_paths() {
    let model = Model::default();
    let grid = Grid::flat(21, 11);
    let src = GridPoint::new(0, 5, 0);
    let dst = GridPoint::new(20, 5, 0);
    let problem = SearchProblem::new(Graph3do::new(&grid, None), &model, src, dst);
    let mut engine = BidiEngine::new(problem, 1.10, false, None);
    let mut straight = false;
    let mut far = false;
    while let Some(ev) = engine.next_event() {
        let ys: Vec<u32> = ev.path.vertices().iter().map(|v| v.y).collect();
        straight |= ys.iter().all(|&y| y == 5);
        // a two-cell detour costs 2(2√2 - 2)·10·30 extra, inside the 10% slack
        far |= ys.iter().any(|&y| y.abs_diff(5) >= 2);
    }
    assert!(straight && far);
}

#[test]
fn scaling_rates_scales_costs_and_keeps_argmin() {
    let grid: Grid = synth_terrain(8, 14, 7, 6.0);
    let model = Model::default();
    let scaled = model.scaled(3.5);
    let src = GridPoint::on_ground(&grid, 0, 3);
    let dst = GridPoint::on_ground(&grid, 13, 3);
    let p1 = dijkstra(&SearchProblem::new(Graph3do::new(&grid, None), &model, src, dst), &EdgeRules::none())
        .unwrap()
        .path
        .unwrap();
    let p2 = dijkstra(&SearchProblem::new(Graph3do::new(&grid, None), &scaled, src, dst), &EdgeRules::none())
        .unwrap()
        .path
        .unwrap();
    assert!(rel_close(p1.total_cost() * 3.5, p2.total_cost()));
    let reprice = corridor::Path::from_vertices(&grid, &model, p2.vertices().to_vec()).unwrap();
    assert!(rel_close(reprice.total_cost(), p1.total_cost()));
}

#[test]
fn f32_scalar_runs_the_same_pipeline() {
    let grid = synth_terrain::<f32>(2, 10, 6, 3.0);
    let model = CostModel::<f32>::default();
    let src = GridPoint::on_ground(&grid, 0, 3);
    let dst = GridPoint::on_ground(&grid, 9, 3);
    let problem = SearchProblem::new(Graph3do::new(&grid, None), &model, src, dst);
    let path = astar(&problem, &EdgeRules::none()).unwrap().path.unwrap();
    assert!(path.total_cost() > 0.0);
    let _: &AugVertex = path.first();
}
