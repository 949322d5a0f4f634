//! Exact edge-weighted graph partitioning: minimize the weight of edges cut
//! by a vertex set `S` with `l <= |S| <= u`.
//!
//! The binary problem is solved as the continuous quadratic program
//! `min (1 − x)ᵀ(A + D)x` over `0 <= x <= 1, l <= 1ᵀx <= u`, whose minimum
//! is attained at a binary point. Branch and bound fixes vertices one at a
//! time; each node is bounded by a convex relaxation built from a diagonal
//! (or scalar) shift of `A + D` and the best affine underestimate of the
//! concave remainder, solved by gradient projection.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! unsuffixed aliases below fix `f64`.
//!
//! ```
//! use cqb::{solve, Graph, PartitionSpec, SolverConfig};
//!
//! let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
//! let sol = solve(&g, PartitionSpec::new(1, 1, 3).unwrap(), &SolverConfig::default()).unwrap();
//! assert_eq!(sol.value, 1.0);
//! ```

pub mod bnb;
pub mod bounds;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod optimality;
pub mod oracle;
pub mod projgrad;
pub mod qp;
pub mod rounding;
pub mod scalar;

pub use bnb::{order_vertices, prune_threshold, root_bound, solve, BoundVariant, SolveStatus, SolverConfig};
pub use bounds::{DcShift, SdpOptions};
pub use error::{Error, Result};
pub use graph::{load_graph, GraphFormat, PartitionSpec, WeightedGraph};
pub use oracle::brute_force;
pub use qp::{make_qp, FeasibleSet, PartitionQp, QpProblem, Quadratic, ReducedQp, SubproblemLabel};
pub use scalar::Scalar;

pub type Graph = WeightedGraph<f64>;
pub type Graph32 = WeightedGraph<f32>;
pub type Qp = QpProblem<f64>;
pub type Qp32 = QpProblem<f32>;
pub type Solution = bnb::Solution<f64>;
pub type Solution32 = bnb::Solution<f32>;
pub type Shift = DcShift<f64>;
pub type Shift32 = DcShift<f32>;
