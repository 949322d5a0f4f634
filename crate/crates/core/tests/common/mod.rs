#![allow(dead_code)]

use cqb::graph::{gen_debruijn, gen_mixed, gen_planar, gen_random, gen_toroidal};
use cqb::{Graph, PartitionSpec};

pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub spec: PartitionSpec,
}

const GRIDS: [(usize, usize); 10] = [(2, 3), (2, 4), (3, 3), (2, 5), (3, 4), (2, 6), (2, 7), (3, 5), (4, 4), (2, 8)];

fn graphs() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for &(h, k) in &GRIDS {
        for seed in 0..3 {
            out.push((format!("toroidal:{h}x{k}/{seed}"), gen_toroidal(h, k, seed).unwrap()));
            out.push((format!("planar:{h}x{k}/{seed}"), gen_planar(h, k, seed).unwrap()));
        }
        for seed in 0..2 {
            out.push((format!("mixed:{h}x{k}/{seed}"), gen_mixed(h, k, seed).unwrap()));
        }
    }
    for n in 6..=16 {
        for &density in &[0.2, 0.5] {
            for seed in 0..2 {
                out.push((format!("random:{n}:{density}/{seed}"), gen_random(n, density, seed).unwrap()));
            }
        }
    }
    for order in [3, 4] {
        out.push((format!("debruijn:{order}"), gen_debruijn(order).unwrap()));
    }
    out
}

/// Every graph twice: as a bisection and with a size window `l < u`.
pub fn corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for (name, graph) in graphs() {
        let n = graph.n();
        let window = PartitionSpec::new((n / 4).max(1), n / 2 + 1, n).unwrap();
        out.push(Instance { name: format!("{name} bisection"), spec: PartitionSpec::bisection(n), graph: graph.clone() });
        out.push(Instance { name: format!("{name} l={} u={}", window.lower, window.upper), spec: window, graph });
    }
    out
}

/// Small instances for point-wise optimality checks.
pub fn small_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 3..=8 {
        for seed in 0..3 {
            let graph = gen_random(n, 0.6, 100 + seed).unwrap();
            out.push(Instance { name: format!("random:{n}/{seed} bisection"), spec: PartitionSpec::bisection(n), graph: graph.clone() });
            let spec = PartitionSpec::new(1, n - 1, n).unwrap();
            out.push(Instance { name: format!("random:{n}/{seed} l=1 u={}", n - 1), spec, graph });
        }
    }
    for (h, k) in [(2, 3), (2, 4)] {
        let graph = gen_planar(h, k, 7).unwrap();
        out.push(Instance { name: format!("planar:{h}x{k}"), spec: PartitionSpec::bisection(h * k), graph });
    }
    out
}
