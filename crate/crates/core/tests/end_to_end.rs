mod common;

use std::io::Write;
use std::time::Duration;

use cqb::graph::{gen_debruijn, gen_mixed, gen_toroidal, write_edge_list};
use cqb::rounding::partition_from_binary;
use cqb::{
    brute_force, load_graph, solve, BoundVariant, Graph, Graph32, GraphFormat, PartitionSpec, SolveStatus,
    SolverConfig,
};

#[test]
fn edge_list_file_round_trip_solves_to_the_same_value() {
    let g: Graph = gen_toroidal(3, 4, 5).unwrap();
    let mut file = tempfile::Builder::new().suffix(".el").tempfile().unwrap();
    file.write_all(write_edge_list(&g).as_bytes()).unwrap();
    let back: Graph = load_graph(file.path(), GraphFormat::EdgeList).unwrap();
    assert_eq!(back.edges(), g.edges());

    let spec = PartitionSpec::bisection(12);
    let a = solve(&g, spec, &SolverConfig::default()).unwrap();
    let b = solve(&back, spec, &SolverConfig::default()).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.x, b.x);
}

#[test]
fn matrix_market_input() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n4 4 4\n2 1 3\n3 2 1\n4 3 3\n4 1 1\n";
    let mut file = tempfile::Builder::new().suffix(".mtx").tempfile().unwrap();
    file.write_all(text.as_bytes()).unwrap();
    let g: Graph = load_graph(file.path(), GraphFormat::from_path(file.path())).unwrap();
    let sol = solve(&g, PartitionSpec::bisection(4), &SolverConfig::default()).unwrap();
    assert_eq!(sol.value, 2.0);
    assert_eq!(sol.value, brute_force(&g, PartitionSpec::bisection(4)).unwrap().value);
}

#[test]
fn partition_sides_match_the_binary_vector() {
    let g: Graph = gen_mixed(3, 4, 2).unwrap();
    let spec = PartitionSpec::new(3, 5, 12).unwrap();
    let sol = solve(&g, spec, &SolverConfig::default()).unwrap();
    assert_eq!(sol.side1, partition_from_binary(&sol.x).unwrap());
    assert_eq!(sol.side0.len() + sol.side1.len(), 12);
    assert!((3..=5).contains(&sol.side1.len()));
    assert_eq!(g.cut_weight(&sol.x).unwrap(), sol.value);
}

#[test]
fn threads_do_not_change_the_search() {
    let g: Graph = gen_toroidal(4, 4, 9).unwrap();
    let spec = PartitionSpec::bisection(16);
    let one = solve(&g, spec, &SolverConfig::default()).unwrap();
    let four = solve(&g, spec, &SolverConfig { threads: 4, ..SolverConfig::default() }).unwrap();
    assert_eq!(one.value, four.value);
    assert_eq!(one.x, four.x);
    assert_eq!(one.node_count, four.node_count);
}

#[test]
fn limits_report_the_best_incumbent() {
    let g: Graph = gen_debruijn(5).unwrap();
    let spec = PartitionSpec::bisection(32);
    let sol = solve(&g, spec, &SolverConfig { max_nodes: Some(5), ..SolverConfig::default() }).unwrap();
    assert_eq!(sol.status, SolveStatus::NodeLimit);
    assert!(sol.node_count <= 5);
    assert!(sol.lower_bound <= sol.value);
    assert_eq!(sol.side1.len(), 16);

    let sol = solve(&g, spec, &SolverConfig { time_limit: Some(Duration::ZERO), ..SolverConfig::default() }).unwrap();
    assert_eq!(sol.status, SolveStatus::TimeLimit);
    assert_eq!(g.cut_weight(&sol.x).unwrap(), sol.value);
}

#[test]
fn incumbent_trace_is_decreasing_and_ends_at_the_optimum() {
    for inst in common::corpus().iter().step_by(23) {
        let sol = solve(&inst.graph, inst.spec, &SolverConfig::default()).unwrap();
        let trace = &sol.incumbent_trace;
        assert!(!trace.is_empty(), "{}", inst.name);
        assert!(trace.windows(2).all(|w| w[1].value < w[0].value), "{}", inst.name);
        assert_eq!(trace.last().unwrap().value, sol.value, "{}", inst.name);
        assert!(sol.root_lower_bound <= sol.value + 1e-6, "{}", inst.name);
    }
}

#[test]
fn single_precision_agrees_with_double() {
    for seed in 0..4 {
        let g64: Graph = gen_toroidal(3, 4, seed).unwrap();
        let g32: Graph32 = gen_toroidal(3, 4, seed).unwrap();
        let spec = PartitionSpec::bisection(12);
        for bound in [BoundVariant::Eig, BoundVariant::Sdp] {
            let cfg = SolverConfig { bound, ..SolverConfig::default() };
            let a = solve(&g64, spec, &cfg).unwrap();
            let b = solve(&g32, spec, &cfg).unwrap();
            assert_eq!(a.value as f32, b.value, "seed {seed} {bound}");
        }
    }
}

#[test]
fn infeasible_and_degenerate_specs() {
    let g: Graph = Graph::from_edges(4, &[(0, 1, 1.0)]).unwrap();
    assert!(PartitionSpec::new(3, 2, 4).is_err());
    assert!(PartitionSpec::new(1, 5, 4).is_err());
    let sol = solve(&g, PartitionSpec::new(0, 0, 4).unwrap(), &SolverConfig::default()).unwrap();
    assert_eq!(sol.value, 0.0);
    assert!(sol.side1.is_empty());
    let sol = solve(&g, PartitionSpec::new(4, 4, 4).unwrap(), &SolverConfig::default()).unwrap();
    assert_eq!(sol.side1, vec![0, 1, 2, 3]);
}
