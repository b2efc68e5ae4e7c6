use corridor::bench::{self, ExperimentRecord, PerformanceProfile};
use proptest::prelude::*;

fn rec(map: &str, variant: &str, time: f64, solved: bool) -> ExperimentRecord {
    ExperimentRecord { map: map.into(), variant: variant.into(), time, solved, ..Default::default() }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn two_solvers_one_problem() {
    let p = bench::profile(&[rec("p", "A", 10.0, true), rec("p", "B", 20.0, true)], &names(&["A", "B"])).unwrap();
    assert_eq!(p.rho("A", 1.0), Some(1.0));
    assert_eq!(p.rho("B", 1.0), Some(0.0));
    assert_eq!(p.rho("B", 1.999), Some(0.0));
    assert_eq!(p.rho("B", 2.0), Some(1.0));
    assert_eq!(p.solvers[1].points, vec![(1.0, 0.0), (2.0, 1.0)]);
}

#[test]
fn solver_that_never_solves_is_flat_zero() {
    let records = [rec("p", "A", 3.0, true), rec("p", "B", 1.0, false), rec("q", "A", 5.0, true), rec("q", "B", 2.0, false)];
    let p = bench::profile(&records, &names(&["A", "B"])).unwrap();
    assert_eq!(p.solvers[1].points, vec![(1.0, 0.0)]);
    assert_eq!(p.rho("B", 1e9), Some(0.0));
    assert_eq!(p.rho("A", 1.0), Some(1.0));
}

#[test]
fn single_solver_reaches_its_solve_fraction_at_one() {
    let records = [rec("p", "A", 3.0, true), rec("q", "A", 5.0, true), rec("r", "A", 1.0, false)];
    let p = bench::profile(&records, &names(&["A"])).unwrap();
    // r is solved by nobody, so it leaves the denominator
    assert_eq!((p.problems, p.excluded), (2, 1));
    assert_eq!(p.solvers[0].points, vec![(1.0, 1.0)]);
}

#[test]
fn hand_computed_step_function() {
    // ratios for B: p 2, q 1, r 4, s unsolved; for A: p 1, q 1.5, r 1, s 1
    let records = [
        rec("p", "A", 10.0, true),
        rec("p", "B", 20.0, true),
        rec("q", "A", 30.0, true),
        rec("q", "B", 20.0, true),
        rec("r", "A", 5.0, true),
        rec("r", "B", 20.0, true),
        rec("s", "A", 7.0, true),
        rec("s", "B", 1.0, false),
        rec("t", "A", 7.0, false),
        rec("t", "B", 1.0, false),
    ];
    let p = bench::profile(&records, &names(&["A", "B"])).unwrap();
    assert_eq!((p.problems, p.excluded), (4, 1));
    assert_eq!(p.solvers[0].points, vec![(1.0, 0.75), (1.5, 1.0)]);
    assert_eq!(p.solvers[1].points, vec![(1.0, 0.25), (2.0, 0.5), (4.0, 0.75)]);
}

#[test]
fn empty_records_are_an_error() {
    assert!(bench::profile(&[], &names(&["A"])).is_err());
}

#[test]
fn records_round_trip_through_csv() {
    let mut a = rec("m40x20-0", "bds+astar+hr", 1234.0, true);
    a.costs = "10;10.5;10.9".into();
    a.areas = "12.5;30;14".into();
    a.optimal_cost = Some(10.0);
    a.wall_seconds = Some(0.25);
    a.k = 3;
    let b = rec("m40x20-0", "se", f64::NAN, false);
    let mut buf = Vec::new();
    bench::write_records(&mut buf, &[a.clone(), b.clone()]).unwrap();
    let back = bench::read_records(buf.as_slice()).unwrap();
    assert_eq!(back[0], a);
    assert!(back[1].time.is_nan() && back[1].variant == "se");

    let solvers = names(&["bds+astar+hr", "se"]);
    let again = bench::profile(&back, &solvers).unwrap();
    assert_eq!(again, bench::profile(&[a, b], &solvers).unwrap());
}

#[test]
fn terrain_table_has_the_expected_columns() {
    let maps = bench::synth_maps(2, &[12], &[(2, 10.0)]);
    let mut buf = Vec::new();
    bench::write_terrain_table(&mut buf, &maps).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("map,Dim x,Dim y,Dim z,A,B,C"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], &["m12x6-0", "12", "6"]);
    let total: f64 = row[4..].iter().map(|s| s.parse::<f64>().unwrap()).sum();
    assert!((total - 100.0).abs() <= 0.15, "{total}");
}

fn monotone(p: &PerformanceProfile) -> bool {
    p.solvers.iter().all(|s| {
        s.points.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
            && s.points.iter().all(|&(t, f)| t >= 1.0 && (0.0..=1.0).contains(&f))
    })
}

proptest! {
    #[test]
    fn profiles_are_monotone_step_functions(cells in prop::collection::vec((0u8..6, 0u8..4, 1u32..50, any::<bool>()), 1..60)) {
        let records: Vec<ExperimentRecord> = cells
            .iter()
            .map(|&(p, s, t, ok)| rec(&format!("p{p}"), &format!("s{s}"), t as f64, ok))
            .collect();
        let solvers = names(&["s0", "s1", "s2", "s3"]);
        let prof = bench::profile(&records, &solvers).unwrap();
        prop_assert!(monotone(&prof));
        // the fastest solver on each problem counts at tau = 1
        let at_one: f64 = solvers.iter().map(|s| prof.rho(s, 1.0).unwrap()).sum();
        prop_assert!(prof.problems == 0 || at_one >= 1.0 - 1e-12);
    }
}
