//! Best-first branch and bound over vertex labels, with certified convex
//! lower bounds at every node and a descent-and-round upper bound.

mod heuristic;
mod node;

use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use log::{debug, info};

pub use heuristic::improve_from;
pub use node::{Incumbent, NodeStatus, TreeNode};
use node::Ranked;

use crate::bounds::{build_relaxation, certified_lower_bound, sdp_shift, sigma_shift, DcShift, SdpOptions};
use crate::error::{Error, Result};
use crate::graph::{PartitionSpec, WeightedGraph};
use crate::linalg::SymMatrix;
use crate::projgrad::{project, solve_convex, SolveOptions};
use crate::qp::{make_qp, QpProblem, Quadratic, ReducedQp, SubproblemLabel};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundVariant {
    /// Scalar shift `σ >= λ_max(M)`.
    Eig,
    /// Minimal-trace diagonal shift.
    #[default]
    Sdp,
}

impl std::str::FromStr for BoundVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eig" | "eigen" | "lb1" => Ok(Self::Eig),
            "sdp" | "lb2" => Ok(Self::Sdp),
            other => Err(Error::InvalidArgument(format!("unknown bound variant `{other}`"))),
        }
    }
}

impl std::fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Eig => "eig",
            Self::Sdp => "sdp",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub bound: BoundVariant,
    /// Projected-gradient residual tolerance for the relaxations.
    pub tol: f64,
    pub max_iter: usize,
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Worker threads for child evaluation; 1 runs everything inline.
    pub threads: usize,
    /// Run the upper-bound heuristic at every k-th created node.
    pub ub_every: u64,
    /// Recompute the shift on each node's free submatrix instead of restricting the root shift.
    pub per_node_shift: bool,
    pub prune_eps: f64,
    /// Descent/round/escape rounds per heuristic call.
    pub heuristic_rounds: usize,
    pub sdp: SdpOptions,
    /// Keep the label and bound of every evaluated node in [`Solution::node_log`].
    pub record_nodes: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            bound: BoundVariant::Sdp,
            tol: 1e-4,
            max_iter: 10_000,
            max_nodes: None,
            time_limit: None,
            threads: 1,
            ub_every: 1,
            per_node_shift: false,
            prune_eps: 1e-6,
            heuristic_rounds: 8,
            sdp: SdpOptions::default(),
            record_nodes: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    NodeLimit,
    TimeLimit,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Optimal => "optimal",
            Self::NodeLimit => "node_limit",
            Self::TimeLimit => "time_limit",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IncumbentUpdate<T> {
    pub node: u64,
    pub value: T,
    pub elapsed_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSample<T> {
    pub node: u64,
    pub lower: T,
    pub upper: T,
}

/// An evaluated node: the vertices fixed so far (in branching order) and its bound.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord<T> {
    pub fixed: Vec<(usize, bool)>,
    pub bound: T,
}

#[derive(Clone, Debug)]
pub struct Solution<T> {
    /// Vertices with `x_i = 0`.
    pub side0: Vec<usize>,
    /// Vertices with `x_i = 1`.
    pub side1: Vec<usize>,
    pub x: Vec<T>,
    pub value: T,
    /// Nodes whose bound was evaluated, the root included.
    pub node_count: u64,
    pub status: SolveStatus,
    pub root_lower_bound: T,
    /// Best bound over the unexplored tree at exit (equals `value` up to the prune band when optimal).
    pub lower_bound: T,
    pub incumbent_trace: Vec<IncumbentUpdate<T>>,
    pub bound_trace: Vec<BoundSample<T>>,
    /// Filled only with [`SolverConfig::record_nodes`].
    pub node_log: Vec<NodeRecord<T>>,
    pub elapsed: Duration,
    pub shift_warning: Option<String>,
}

/// Vertices by total incident weight, heaviest first; ties by index.
pub fn order_vertices<T: Scalar>(g: &WeightedGraph<T>) -> Vec<usize> {
    let w = g.vertex_weights();
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| w[b].partial_cmp(&w[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    order
}

/// Nodes with a bound at or above this value cannot hold a better binary point.
pub fn prune_threshold<T: Scalar>(upper: T, integral: bool, eps: T) -> T {
    if integral {
        upper - T::one() + eps
    } else {
        upper - eps
    }
}

/// The shift of the chosen variant for `M`.
pub fn compute_shift<T: Scalar>(m: &SymMatrix<T>, variant: BoundVariant, sdp: SdpOptions) -> DcShift<T> {
    match variant {
        BoundVariant::Eig => sigma_shift(m),
        BoundVariant::Sdp => sdp_shift(&m.to_dense(), sdp),
    }
}

#[derive(Clone, Debug)]
pub struct RootBound<T> {
    pub lower_bound: T,
    /// Value of the relaxation at the computed minimizer.
    pub relaxation_value: T,
    /// Relaxation minimizer (full length).
    pub x: Vec<T>,
    pub shift: DcShift<T>,
}

/// Certified root lower bound under the given shift variant.
pub fn root_bound<T: Scalar>(
    g: &WeightedGraph<T>,
    spec: PartitionSpec,
    variant: BoundVariant,
    config: &SolverConfig,
) -> Result<RootBound<T>> {
    let qp = make_qp(g, spec)?;
    let shift = compute_shift(qp.matrix(), variant, config.sdp);
    let order: Vec<usize> = (0..qp.n()).collect();
    let reduced = qp.reduce(&SubproblemLabel::root(), &order)?;
    let start = uniform_start(&qp);
    let eval = bound_node(&reduced, &shift, &start, config, None)?;
    Ok(RootBound { lower_bound: eval.bound, relaxation_value: eval.relax_value, x: eval.x_full, shift })
}

fn uniform_start<T: Scalar>(qp: &QpProblem<T>) -> Vec<T> {
    let n = qp.n().max(1);
    let spec = qp.spec();
    let mid = T::of_usize(spec.lower + spec.upper) / T::of_usize(2 * n);
    vec![mid; qp.n()]
}

struct BoundEval<T> {
    bound: T,
    relax_value: T,
    x_full: Vec<T>,
}

fn bound_node<T: Scalar>(
    reduced: &ReducedQp<T>,
    shift: &DcShift<T>,
    start_full: &[T],
    config: &SolverConfig,
    local_variant: Option<BoundVariant>,
) -> Result<BoundEval<T>> {
    let local;
    let shift = match local_variant {
        Some(v) => {
            local = compute_shift(&SymMatrix::Dense(reduced.matrix().clone()), v, config.sdp);
            &local
        }
        None => shift,
    };
    let rel = build_relaxation(reduced, shift)?;
    let set = rel.feasible_set();
    let x0 = project(&reduced.restrict(start_full), &set)?;
    let opts = SolveOptions { tol: config.tol, max_iter: config.max_iter };
    let report = solve_convex(&rel, &set, &x0, opts)?;
    let bound = certified_lower_bound(&rel, &report.x)?;
    Ok(BoundEval { bound, relax_value: report.value, x_full: reduced.assemble(&report.x) })
}

enum ChildEval<T> {
    Infeasible,
    /// All variables fixed: exact value.
    Leaf { x: Vec<T>, value: T },
    Node { bound: T, x_full: Vec<T>, candidate: Option<Incumbent<T>> },
}

struct Ctx<'a, T> {
    qp: &'a QpProblem<T>,
    order: &'a [usize],
    shift: &'a DcShift<T>,
    config: &'a SolverConfig,
}

impl<T: Scalar> Ctx<'_, T> {
    fn evaluate(&self, label: &SubproblemLabel, parent: &TreeNode<T>, run_heuristic: bool) -> Result<ChildEval<T>> {
        let reduced = match self.qp.reduce(label, self.order) {
            Ok(r) => r,
            Err(Error::InfeasibleSubproblem { .. }) => return Ok(ChildEval::Infeasible),
            Err(e) => return Err(e),
        };
        if reduced.dim() == 0 {
            let x = reduced.assemble(&[]);
            let value = self.qp.value(&x);
            return Ok(ChildEval::Leaf { x, value });
        }
        let local = self.config.per_node_shift.then_some(self.config.bound);
        let eval = bound_node(&reduced, self.shift, &parent.relax_x, self.config, local)?;
        let bound = eval.bound.max(parent.bound);
        let candidate = if run_heuristic {
            let opts = SolveOptions { tol: self.config.tol, max_iter: self.config.max_iter };
            Some(improve_from(self.qp, &eval.x_full, opts, self.config.heuristic_rounds)?)
        } else {
            None
        };
        Ok(ChildEval::Node { bound, x_full: eval.x_full, candidate })
    }
}

/// Exact minimum cut with `l <= |S| <= u` by best-first branch and bound.
pub fn solve<T: Scalar>(g: &WeightedGraph<T>, spec: PartitionSpec, config: &SolverConfig) -> Result<Solution<T>> {
    if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| solve_inner(g, spec, config))
    } else {
        solve_inner(g, spec, config)
    }
}

fn solve_inner<T: Scalar>(g: &WeightedGraph<T>, spec: PartitionSpec, config: &SolverConfig) -> Result<Solution<T>> {
    let started = Instant::now();
    let n = g.n();
    if spec.upper > n || spec.lower > spec.upper {
        return Err(Error::InvalidArgument(format!("bounds l = {}, u = {} for n = {n}", spec.lower, spec.upper)));
    }
    let qp = make_qp(g, spec)?;
    let order = order_vertices(g);
    let shift = compute_shift(qp.matrix(), config.bound, config.sdp);
    let integral = g.is_integral();
    let eps = T::of(config.prune_eps);
    let ctx = Ctx { qp: &qp, order: &order, shift: &shift, config };
    let elapsed_s = || started.elapsed().as_secs_f64();

    // root
    let root_red = qp.reduce(&SubproblemLabel::root(), &order)?;
    let mut node_count = 1u64;
    let root_eval = bound_node(&root_red, &shift, &uniform_start(&qp), config, None)?;
    let root_lower_bound = root_eval.bound;
    let mut node_log = Vec::new();
    let fixed_of = |label: &SubproblemLabel| -> Vec<(usize, bool)> {
        order.iter().copied().zip(label.bits().iter().copied()).collect()
    };
    if config.record_nodes {
        node_log.push(NodeRecord { fixed: Vec::new(), bound: root_lower_bound });
    }

    let mut fallback = vec![T::zero(); n];
    for &v in order.iter().take(spec.lower) {
        fallback[v] = T::one();
    }
    let mut incumbent = Incumbent { value: qp.value(&fallback), x: fallback };
    let mut incumbent_trace = vec![IncumbentUpdate { node: 0, value: incumbent.value, elapsed_s: elapsed_s() }];
    let opts = SolveOptions { tol: config.tol, max_iter: config.max_iter };
    let first = improve_from(&qp, &root_eval.x_full, opts, config.heuristic_rounds)?;
    if first.value < incumbent.value {
        incumbent = first;
        incumbent_trace.push(IncumbentUpdate { node: 0, value: incumbent.value, elapsed_s: elapsed_s() });
    }
    info!("root bound {} incumbent {}", root_lower_bound, incumbent.value);

    let mut heap = BinaryHeap::new();
    let mut next_id = 1u64;
    heap.push(Ranked(TreeNode {
        id: 0,
        label: SubproblemLabel::root(),
        bound: root_lower_bound,
        relax_x: root_eval.x_full,
        status: NodeStatus::Open,
    }));
    let mut bound_trace = vec![BoundSample { node: 0, lower: root_lower_bound, upper: incumbent.value }];
    let mut status = SolveStatus::Optimal;
    let mut lower_bound = root_lower_bound;

    loop {
        let threshold = prune_threshold(incumbent.value, integral, eps);
        let Some(Ranked(mut node)) = heap.pop() else {
            lower_bound = incumbent.value;
            break;
        };
        if node.bound >= threshold {
            lower_bound = node.bound.min(incumbent.value);
            break;
        }
        if node.bound > lower_bound {
            lower_bound = node.bound;
            bound_trace.push(BoundSample { node: node_count, lower: lower_bound, upper: incumbent.value });
        }
        if config.max_nodes.is_some_and(|m| node_count >= m) {
            status = SolveStatus::NodeLimit;
            heap.push(Ranked(node));
            break;
        }
        if config.time_limit.is_some_and(|t| started.elapsed() >= t) {
            status = SolveStatus::TimeLimit;
            heap.push(Ranked(node));
            break;
        }

        node.status = NodeStatus::Branched;
        let labels = [node.label.child(false), node.label.child(true)];
        let every = config.ub_every.max(1);
        let runs = [(node_count + 1).is_multiple_of(every), (node_count + 2).is_multiple_of(every)];
        let (e0, e1) = if config.threads > 1 {
            rayon::join(|| ctx.evaluate(&labels[0], &node, runs[0]), || ctx.evaluate(&labels[1], &node, runs[1]))
        } else {
            (ctx.evaluate(&labels[0], &node, runs[0]), ctx.evaluate(&labels[1], &node, runs[1]))
        };

        for (label, eval) in labels.into_iter().zip([e0?, e1?]) {
            let id = next_id;
            next_id += 1;
            match eval {
                ChildEval::Infeasible => {
                    debug!("node {id} infeasible");
                }
                ChildEval::Leaf { x, value } => {
                    node_count += 1;
                    if config.record_nodes {
                        node_log.push(NodeRecord { fixed: fixed_of(&label), bound: value });
                    }
                    if value < incumbent.value {
                        incumbent = Incumbent { x, value };
                        incumbent_trace.push(IncumbentUpdate { node: node_count, value, elapsed_s: elapsed_s() });
                    }
                }
                ChildEval::Node { bound, x_full, candidate } => {
                    node_count += 1;
                    if config.record_nodes {
                        node_log.push(NodeRecord { fixed: fixed_of(&label), bound });
                    }
                    if let Some(c) = candidate {
                        if c.value < incumbent.value {
                            incumbent = c;
                            incumbent_trace.push(IncumbentUpdate {
                                node: node_count,
                                value: incumbent.value,
                                elapsed_s: elapsed_s(),
                            });
                        }
                    }
                    let child = TreeNode { id, label, bound, relax_x: x_full, status: NodeStatus::Open };
                    if bound < prune_threshold(incumbent.value, integral, eps) {
                        heap.push(Ranked(child));
                    }
                }
            }
        }
    }
    if status != SolveStatus::Optimal {
        lower_bound = heap.peek().map_or(incumbent.value, |r| r.0.bound.min(incumbent.value));
    }

    let side0 = (0..n).filter(|&i| incumbent.x[i] == T::zero()).collect();
    let side1 = (0..n).filter(|&i| incumbent.x[i] == T::one()).collect();
    Ok(Solution {
        side0,
        side1,
        value: g.cut_weight(&incumbent.x)?,
        x: incumbent.x,
        node_count,
        status,
        root_lower_bound,
        lower_bound,
        incumbent_trace,
        bound_trace,
        node_log,
        elapsed: started.elapsed(),
        shift_warning: shift.solver_warning.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random;
    use crate::oracle::brute_force;

    #[test]
    fn ordering_examples() {
        let star = WeightedGraph::from_edges(4, &[(3, 0, 1.0), (3, 1, 1.0), (3, 2, 1.0)]).unwrap();
        assert_eq!(order_vertices(&star)[0], 3);
        let mut e = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                e.push((i, j, 1.0));
            }
        }
        let k4 = WeightedGraph::from_edges(4, &e).unwrap();
        assert_eq!(order_vertices(&k4), vec![0, 1, 2, 3]);
        let iso = WeightedGraph::from_edges(3, &[(1, 2, 1.0)]).unwrap();
        assert_eq!(order_vertices(&iso), vec![1, 2, 0]);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(prune_threshold(28.0, true, 1e-6), 27.0 + 1e-6);
        assert_eq!(prune_threshold(3.5, false, 1e-6), 3.5 - 1e-6);
    }

    #[test]
    fn k2_bisection() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let s = solve(&g, PartitionSpec::bisection(2), &SolverConfig::default()).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(s.node_count <= 3);
    }

    #[test]
    fn disconnected_balanced_components() {
        let g = WeightedGraph::from_edges(6, &[(0, 1, 3.0), (1, 2, 3.0), (3, 4, 2.0), (4, 5, 2.0), (3, 5, 1.0)]).unwrap();
        let s = solve(&g, PartitionSpec::bisection(6), &SolverConfig::default()).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn matches_oracle_on_small_random_graphs() {
        for seed in 0..12u64 {
            let n = 6 + (seed as usize % 7);
            let density = 0.1 + 0.08 * seed as f64;
            let g = gen_random::<f64>(n, density, seed).unwrap();
            let spec = if seed % 2 == 0 {
                PartitionSpec::bisection(n)
            } else {
                PartitionSpec::new(n / 3, n / 2 + 1, n).unwrap()
            };
            for variant in [BoundVariant::Eig, BoundVariant::Sdp] {
                let config = SolverConfig { bound: variant, ..Default::default() };
                let s = solve(&g, spec, &config).unwrap();
                let o = brute_force(&g, spec).unwrap();
                assert_eq!(s.value, o.value, "seed {seed} variant {variant}");
                assert!(s.node_count < 1 << (n + 1));
                assert!(s.root_lower_bound <= o.value + 1e-6 * (1.0 + o.value));
                let ones = s.side1.len();
                assert!(spec.lower <= ones && ones <= spec.upper);
            }
        }
    }

    #[test]
    fn node_limit_reports_status() {
        let g = gen_random::<f64>(16, 0.5, 1).unwrap();
        let config = SolverConfig { max_nodes: Some(1), ..Default::default() };
        let s = solve(&g, PartitionSpec::bisection(16), &config).unwrap();
        if s.status != SolveStatus::Optimal {
            assert_eq!(s.status, SolveStatus::NodeLimit);
            assert!(s.lower_bound <= s.value);
        }
    }

    #[test]
    fn parallel_mode_agrees() {
        let g = gen_random::<f64>(12, 0.4, 5).unwrap();
        let spec = PartitionSpec::bisection(12);
        let a = solve(&g, spec, &SolverConfig::default()).unwrap();
        let b = solve(&g, spec, &SolverConfig { threads: 3, ..Default::default() }).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.node_count, b.node_count);
    }

    #[test]
    fn root_bound_is_sound() {
        let g = gen_random::<f64>(10, 0.5, 2).unwrap();
        let spec = PartitionSpec::bisection(10);
        let opt = brute_force(&g, spec).unwrap().value;
        for v in [BoundVariant::Eig, BoundVariant::Sdp] {
            let rb = root_bound(&g, spec, v, &SolverConfig::default()).unwrap();
            assert!(rb.lower_bound <= opt + 1e-6 * (1.0 + opt));
            assert!(rb.lower_bound <= rb.relaxation_value + 1e-9);
        }
    }

    #[test]
    fn single_precision_solve() {
        let g = gen_random::<f32>(8, 0.5, 4).unwrap();
        let s = solve(&g, PartitionSpec::bisection(8), &SolverConfig::default()).unwrap();
        let o = brute_force(&g, PartitionSpec::bisection(8)).unwrap();
        assert_eq!(s.value, o.value);
    }
}
