//! Instance generators for the benchmark families (toroidal, planar and
//! mixed grids, random graphs, binary de Bruijn graphs).
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, so a given
//! `(family, size, seed)` produces the same graph on every platform.
//! Edges are drawn in the order documented on each generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw<T: Scalar>(rng: &mut ChaCha8Rng, hi: u32) -> T {
    T::of(rng.gen_range(1..=hi) as f64)
}

/// `h x k` torus: vertex `(r, c)` is `r * k + c`. For each vertex in
/// row-major order the right edge `(r, c)-(r, c+1 mod k)` then the down
/// edge `(r, c)-(r+1 mod h, c)` get weights uniform in `1..=10`.
/// When `h` or `k` is 2 the wrap edges coincide with grid edges and the
/// parallel weights are summed.
pub fn gen_toroidal<T: Scalar>(h: usize, k: usize, seed: u64) -> Result<WeightedGraph<T>> {
    if h < 2 || k < 2 {
        return Err(Error::InvalidSize(format!("toroidal grid needs h, k >= 2, got {h}x{k}")));
    }
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(2 * h * k);
    for r in 0..h {
        for c in 0..k {
            let v = r * k + c;
            edges.push((v, r * k + (c + 1) % k, draw(&mut rng, 10)));
            edges.push((v, ((r + 1) % h) * k + c, draw(&mut rng, 10)));
        }
    }
    Ok(WeightedGraph::from_edges_summed(h * k, &edges))
}

fn planar_edges(h: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(2 * h * k);
    for r in 0..h {
        for c in 0..k {
            let v = r * k + c;
            if c + 1 < k {
                out.push((v, v + 1));
            }
            if r + 1 < h {
                out.push((v, v + k));
            }
        }
    }
    out
}

/// `h x k` planar grid with `2hk - h - k` edges, weights uniform in `1..=10`,
/// drawn per vertex in row-major order (right edge, then down edge).
pub fn gen_planar<T: Scalar>(h: usize, k: usize, seed: u64) -> Result<WeightedGraph<T>> {
    if h == 0 || k == 0 || h * k < 2 {
        return Err(Error::InvalidSize(format!("planar grid needs at least 2 vertices, got {h}x{k}")));
    }
    let mut rng = rng(seed);
    let edges: Vec<_> = planar_edges(h, k)
        .into_iter()
        .map(|(i, j)| (i, j, draw(&mut rng, 10)))
        .collect();
    WeightedGraph::from_edges(h * k, &edges)
}

/// Complete graph on the `h x k` grid vertices: grid edges get weights in
/// `1..=100`, all other pairs weights in `1..=10`. Pairs `i < j` are drawn
/// in lexicographic order.
pub fn gen_mixed<T: Scalar>(h: usize, k: usize, seed: u64) -> Result<WeightedGraph<T>> {
    if h == 0 || k == 0 || h * k < 2 {
        return Err(Error::InvalidSize(format!("mixed grid needs at least 2 vertices, got {h}x{k}")));
    }
    let n = h * k;
    let grid: std::collections::HashSet<(usize, usize)> = planar_edges(h, k).into_iter().collect();
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let hi = if grid.contains(&(i, j)) { 100 } else { 10 };
            edges.push((i, j, draw(&mut rng, hi)));
        }
    }
    WeightedGraph::from_edges(n, &edges)
}

/// Each pair `i < j` (lexicographic order) is kept with probability
/// `density`; kept edges get weights in `1..=10`.
pub fn gen_random<T: Scalar>(n: usize, density: f64, seed: u64) -> Result<WeightedGraph<T>> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density must lie in [0, 1], got {density}")));
    }
    if n == 0 {
        return Err(Error::InvalidSize("random graph needs n >= 1".into()));
    }
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density) {
                edges.push((i, j, draw(&mut rng, 10)));
            }
        }
    }
    WeightedGraph::from_edges(n, &edges)
}

/// Binary de Bruijn graph of the given order: `2^order` vertices, directed
/// arcs `x -> 2x mod 2^order` and `x -> 2x+1 mod 2^order`. The weight
/// matrix is `B + Bᵀ` with the diagonal zeroed, so a pair joined by arcs
/// in both directions has weight 2.
pub fn gen_debruijn<T: Scalar>(order: u32) -> Result<WeightedGraph<T>> {
    if order == 0 || order > 20 {
        return Err(Error::InvalidSize(format!("de Bruijn order must be in 1..=20, got {order}")));
    }
    let n = 1usize << order;
    let mut edges = Vec::with_capacity(2 * n);
    for x in 0..n {
        for y in [(2 * x) % n, (2 * x + 1) % n] {
            edges.push((x, y, T::one()));
        }
    }
    Ok(WeightedGraph::from_edges_summed(n, &edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights_in(g: &WeightedGraph<f64>, lo: f64, hi: f64) -> bool {
        g.edges().iter().all(|&(_, _, w)| w >= lo && w <= hi && w.fract() == 0.0)
    }

    #[test]
    fn toroidal_sizes() {
        let g: WeightedGraph<f64> = gen_toroidal(4, 5, 1).unwrap();
        assert_eq!(g.n(), 20);
        assert_eq!(g.edge_count(), 40);
        assert!(weights_in(&g, 1.0, 10.0));
        assert!(gen_toroidal::<f64>(1, 5, 1).is_err());
    }

    #[test]
    fn toroidal_degenerate_wrap_sums() {
        // 2x2 torus: 8 drawn edges collapse onto the 4 cycle edges
        let g: WeightedGraph<f64> = gen_toroidal(2, 2, 7).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(weights_in(&g, 2.0, 20.0));
        let total: f64 = g.edges().iter().map(|e| e.2).sum();
        let mut rng = rng(7);
        let drawn: f64 = (0..8).map(|_| draw::<f64>(&mut rng, 10)).sum();
        assert_eq!(total, drawn);
    }

    #[test]
    fn planar_sizes() {
        let g: WeightedGraph<f64> = gen_planar(10, 2, 3).unwrap();
        assert_eq!(g.n(), 20);
        assert_eq!(g.edge_count(), 28);
        assert!(weights_in(&g, 1.0, 10.0));
    }

    #[test]
    fn mixed_is_complete_with_heavier_grid_edges() {
        let g: WeightedGraph<f64> = gen_mixed(2, 3, 5).unwrap();
        assert_eq!(g.edge_count(), 15);
        for (i, j, w) in g.edges() {
            let grid = planar_edges(2, 3).contains(&(i, j));
            if grid {
                assert!((1.0..=100.0).contains(&w));
            } else {
                assert!((1.0..=10.0).contains(&w));
            }
        }
    }

    #[test]
    fn random_density_extremes() {
        let empty: WeightedGraph<f64> = gen_random(12, 0.0, 1).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full: WeightedGraph<f64> = gen_random(12, 1.0, 1).unwrap();
        assert_eq!(full.edge_count(), 66);
        assert!(weights_in(&full, 1.0, 10.0));
        assert!(gen_random::<f64>(5, 1.5, 1).is_err());
    }

    #[test]
    fn debruijn_order_five() {
        let g: WeightedGraph<f64> = gen_debruijn(5).unwrap();
        assert_eq!(g.n(), 32);
        for i in 0..32 {
            assert_eq!(g.weight(i, i), 0.0);
        }
        // order 2: 01 -> 10 and 10 -> 01 make a weight-2 pair
        let g2: WeightedGraph<f64> = gen_debruijn(2).unwrap();
        assert_eq!(g2.weight(1, 2), 2.0);
        assert_eq!(g2.weight(0, 1), 1.0);
    }

    #[test]
    fn generators_are_deterministic() {
        let a: WeightedGraph<f64> = gen_random(15, 0.4, 99).unwrap();
        let b: WeightedGraph<f64> = gen_random(15, 0.4, 99).unwrap();
        let c: WeightedGraph<f64> = gen_random(15, 0.4, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
