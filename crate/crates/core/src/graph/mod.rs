//! Edge-weighted undirected graphs, the diagonal shift `D`, cut weights,
//! file ingestion and instance generators.

mod generators;
mod io;

pub use generators::{gen_debruijn, gen_mixed, gen_planar, gen_random, gen_toroidal};
pub use io::{load_graph, parse_edge_list, parse_matrix_market, write_edge_list, GraphFormat};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SymMatrix};
use crate::scalar::Scalar;

/// Graphs with more vertices than this are stored sparse by default.
pub const DEFAULT_DENSE_THRESHOLD: usize = 512;

/// Undirected graph with symmetric weights `a_ij = a_ji` and `a_ii = 0`.
/// Weights may be negative.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph<T> {
    weights: SymMatrix<T>,
    edge_count: usize,
}

/// Bounds `l <= |V1| <= u` on the size of one side of the partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub lower: usize,
    pub upper: usize,
}

impl PartitionSpec {
    pub fn new(lower: usize, upper: usize, n: usize) -> Result<Self> {
        if lower > upper || upper > n {
            return Err(Error::InvalidArgument(format!(
                "partition bounds must satisfy 0 <= l <= u <= n, got l = {lower}, u = {upper}, n = {n}"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// `l = u = n/2` (floor for odd `n`).
    pub fn bisection(n: usize) -> Self {
        Self { lower: n / 2, upper: n / 2 }
    }
}

impl<T: Scalar> WeightedGraph<T> {
    /// Graph from 0-based undirected edges. Each unordered pair may appear
    /// once; zero-weight self loops are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        Self::from_edges_with_threshold(n, edges, DEFAULT_DENSE_THRESHOLD)
    }

    pub fn from_edges_with_threshold(n: usize, edges: &[(usize, usize, T)], dense_threshold: usize) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut triplets = Vec::with_capacity(2 * edges.len());
        for &(i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx + 1, n });
                }
            }
            if i == j {
                if w != T::zero() {
                    return Err(Error::SelfLoop { vertex: i + 1 });
                }
                continue;
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge { i: i + 1, j: j + 1 });
            }
            triplets.push((i, j, w));
            triplets.push((j, i, w));
        }
        Ok(Self::from_symmetric_triplets(n, triplets, dense_threshold))
    }

    /// Sums parallel edges instead of rejecting them.
    pub(crate) fn from_edges_summed(n: usize, edges: &[(usize, usize, T)]) -> Self {
        let triplets = edges
            .iter()
            .filter(|(i, j, _)| i != j)
            .flat_map(|&(i, j, w)| [(i, j, w), (j, i, w)])
            .collect();
        Self::from_symmetric_triplets(n, triplets, DEFAULT_DENSE_THRESHOLD)
    }

    fn from_symmetric_triplets(n: usize, triplets: Vec<(usize, usize, T)>, dense_threshold: usize) -> Self {
        let weights = SymMatrix::from_triplets(n, triplets, dense_threshold);
        let edge_count = (0..n)
            .map(|i| weights.row_entries(i).iter().filter(|(j, _)| *j > i).count())
            .sum();
        Self { weights, edge_count }
    }

    /// Graph from a dense weight matrix, which must be symmetric with zero diagonal.
    pub fn from_dense(a: DenseMatrix<T>) -> Result<Self> {
        let n = a.dim();
        for i in 0..n {
            if a[(i, i)] != T::zero() {
                return Err(Error::SelfLoop { vertex: i + 1 });
            }
            for j in 0..i {
                if a[(i, j)] != a[(j, i)] {
                    return Err(Error::InvalidArgument(format!(
                        "weight matrix not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if a[(i, j)] != T::zero() {
                    triplets.push((i, j, a[(i, j)]));
                }
            }
        }
        Ok(Self::from_symmetric_triplets(n, triplets, DEFAULT_DENSE_THRESHOLD))
    }

    pub fn n(&self) -> usize {
        self.weights.dim()
    }

    /// Number of unordered pairs with nonzero weight.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights.get(i, j)
    }

    pub fn weights(&self) -> &SymMatrix<T> {
        &self.weights
    }

    /// Edges `(i, j, w)` with `i < j`, 0-based.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        (0..self.n())
            .flat_map(|i| {
                self.weights
                    .row_entries(i)
                    .into_iter()
                    .filter(move |(j, _)| *j > i)
                    .map(move |(j, w)| (i, j, w))
            })
            .collect()
    }

    /// Neighbors of `i` with nonzero weight.
    pub fn neighbors(&self, i: usize) -> Vec<(usize, T)> {
        self.weights.row_entries(i)
    }

    /// `w_i = Σ_j a_ij`.
    pub fn vertex_weights(&self) -> Vec<T> {
        self.weights.row_sums()
    }

    /// True when all weights are integers, so every cut value is an integer.
    pub fn is_integral(&self) -> bool {
        self.edges().iter().all(|&(_, _, w)| w.is_integral())
    }

    /// Percentage of nonzero off-diagonal entries.
    pub fn density_percent(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        200.0 * self.edge_count as f64 / (n as f64 * (n as f64 - 1.0))
    }

    /// Sum of `a_ij` over pairs with `side_i != side_j`.
    pub fn cut_weight(&self, side: &[T]) -> Result<T> {
        check_binary(side, self.n())?;
        Ok(self
            .edges()
            .iter()
            .filter(|&&(i, j, _)| side[i] != side[j])
            .map(|&(_, _, w)| w)
            .sum())
    }
}

/// `d_jj = max(0, max_i a_ij)`; satisfies `d_ii + d_jj >= 2 a_ij`, `d_ii >= 0`.
pub fn build_diagonal_shift<T: Scalar>(g: &WeightedGraph<T>) -> Vec<T> {
    (0..g.n())
        .map(|j| {
            g.neighbors(j)
                .into_iter()
                .map(|(_, w)| w)
                .fold(T::zero(), T::max)
        })
        .collect()
}

pub(crate) fn check_binary<T: Scalar>(x: &[T], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    match x.iter().position(|&v| v != T::zero() && v != T::one()) {
        Some(index) => Err(Error::NonBinary { index }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> WeightedGraph<f64> {
        WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn k3() -> WeightedGraph<f64> {
        WeightedGraph::from_edges(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn diagonal_shift_examples() {
        assert_eq!(build_diagonal_shift(&k3()), vec![1.0, 1.0, 1.0]);
        assert_eq!(build_diagonal_shift(&p3()), vec![1.0, 1.0, 1.0]);
        let neg = WeightedGraph::from_edges(3, &[(0, 1, -2.0), (1, 2, -0.5)]).unwrap();
        assert_eq!(build_diagonal_shift(&neg), vec![0.0, 0.0, 0.0]);
        let mixed = WeightedGraph::from_edges(3, &[(0, 1, 3.0), (1, 2, -4.0)]).unwrap();
        assert_eq!(build_diagonal_shift(&mixed), vec![3.0, 3.0, 0.0]);
    }

    #[test]
    fn cut_weight_examples() {
        assert_eq!(p3().cut_weight(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(p3().cut_weight(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(k3().cut_weight(&[1.0, 0.0, 0.0]).unwrap(), 2.0);
        assert!(matches!(p3().cut_weight(&[0.5, 0.0, 0.0]), Err(Error::NonBinary { index: 0 })));
        assert!(matches!(p3().cut_weight(&[0.0, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn edge_construction_errors() {
        assert!(matches!(
            WeightedGraph::<f64>::from_edges(3, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge { .. })
        ));
        assert!(matches!(
            WeightedGraph::<f64>::from_edges(3, &[(1, 1, 1.0)]),
            Err(Error::SelfLoop { vertex: 2 })
        ));
        assert!(matches!(
            WeightedGraph::<f64>::from_edges(3, &[(0, 3, 1.0)]),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
        // zero-weight self loop is harmless
        let g = WeightedGraph::<f64>::from_edges(2, &[(1, 1, 0.0), (0, 1, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn dense_construction_validates() {
        let bad = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(WeightedGraph::from_dense(bad).is_err());
        let diag = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(WeightedGraph::from_dense(diag).is_err());
        let ok = DenseMatrix::from_rows(&[vec![0.0, -1.5], vec![-1.5, 0.0]]);
        let g = WeightedGraph::from_dense(ok).unwrap();
        assert_eq!(g.weight(0, 1), -1.5);
        assert!(!g.is_integral());
    }

    #[test]
    fn sparse_storage_threshold() {
        let g = WeightedGraph::<f64>::from_edges_with_threshold(3, &[(0, 1, 1.0), (1, 2, 1.0)], 2).unwrap();
        assert!(!g.weights().is_dense());
        assert_eq!(g.cut_weight(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(build_diagonal_shift(&g), vec![1.0, 1.0, 1.0]);
        assert_eq!(g.vertex_weights(), vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn partition_spec_validation() {
        assert!(PartitionSpec::new(2, 1, 4).is_err());
        assert!(PartitionSpec::new(1, 5, 4).is_err());
        assert_eq!(PartitionSpec::bisection(7), PartitionSpec { lower: 3, upper: 3 });
    }

    #[test]
    fn shift_condition_holds_exhaustively() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 5.0), (1, 2, -3.0), (2, 3, 2.0), (0, 3, 7.0)]).unwrap();
        let d = build_diagonal_shift(&g);
        for i in 0..4 {
            assert!(d[i] >= 0.0);
            for j in 0..4 {
                if i != j {
                    assert!(d[i] + d[j] >= 2.0 * g.weight(i, j));
                }
            }
        }
    }
}
