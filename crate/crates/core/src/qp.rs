//! The continuous formulation `min (1 - x)ᵀ(A + D)x` over
//! `0 <= x <= 1, l <= 1ᵀx <= u`, and its reduction after fixing variables.

use crate::error::{Error, Result};
use crate::graph::{build_diagonal_shift, PartitionSpec, WeightedGraph};
use crate::linalg::{DenseMatrix, SymMatrix};
use crate::scalar::{dot, sum, Scalar};

/// A quadratic `f(x) = c₀ + cᵀx + xᵀQx`, seen only through what the
/// gradient-projection solver needs.
pub trait Quadratic<T: Scalar> {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    fn gradient_into(&self, x: &[T], out: &mut [T]);
    /// `dᵀQd`: `f(x + t d) = f(x) + t ∇f(x)ᵀd + t² dᵀQd`.
    fn curvature(&self, d: &[T]) -> T;

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.dim()];
        self.gradient_into(x, &mut g);
        g
    }
}

/// A partitioning objective `k + cᵀx − xᵀMx` with integer budget bounds,
/// where `M` satisfies `M_ii + M_jj >= 2 M_ij` and `M_ii >= 0`.
pub trait PartitionQp<T: Scalar>: Quadratic<T> {
    /// `M_ij`; on the diagonal this is `d_ii`, off it `a_ij`.
    fn entry(&self, i: usize, j: usize) -> T;
    /// Effective integer budget `(lo, hi)` for `1ᵀx`.
    fn budget(&self) -> (i64, i64);
    /// `Σ_i |M_ij|` maximized over rows; scales sign tolerances.
    fn scale(&self) -> T;
}

/// Box `p <= x <= q` intersected with the slab `lo <= 1ᵀx <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibleSet<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub budget_lo: T,
    pub budget_hi: T,
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>, budget_lo: T, budget_hi: T) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::EmptySet(format!("box bounds cross at index {i}")));
        }
        let set = Self { lower, upper, budget_lo, budget_hi };
        set.check_nonempty()?;
        Ok(set)
    }

    /// Unit box with budget `[lo, hi]`.
    pub fn unit(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![T::zero(); n], vec![T::one(); n], lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn check_nonempty(&self) -> Result<()> {
        let (pmin, qmax) = (sum(&self.lower), sum(&self.upper));
        if self.budget_lo > self.budget_hi || self.budget_lo > qmax || self.budget_hi < pmin {
            return Err(Error::EmptySet(format!(
                "budget [{}, {}] misses box sum range [{}, {}]",
                self.budget_lo, self.budget_hi, pmin, qmax
            )));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[T], tol: T) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let inside = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&p, &q))| v >= p - tol && v <= q + tol);
        let s = sum(x);
        inside && s >= self.budget_lo - tol && s <= self.budget_hi + tol
    }
}

/// `(b_1, …, b_i)`: values assigned to the first `i` vertices in branching order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SubproblemLabel {
    bits: Vec<bool>,
}

impl SubproblemLabel {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(bit);
        Self { bits }
    }

    pub fn depth(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// `M = A + D` with the partition bounds.
#[derive(Clone, Debug)]
pub struct QpProblem<T> {
    matrix: SymMatrix<T>,
    diag: Vec<T>,
    row_sums: Vec<T>,
    lower: usize,
    upper: usize,
    scale: T,
}

/// Builds `M = A + Diag(d)` with `d_jj = max(0, max_i a_ij)`.
pub fn make_qp<T: Scalar>(g: &WeightedGraph<T>, spec: PartitionSpec) -> Result<QpProblem<T>> {
    let spec = PartitionSpec::new(spec.lower, spec.upper, g.n())?;
    let d = build_diagonal_shift(g);
    Ok(QpProblem::from_parts(g.weights().with_diagonal(&d), spec))
}

impl<T: Scalar> QpProblem<T> {
    /// `matrix` must be symmetric with nonnegative diagonal satisfying the
    /// pair condition; `make_qp` guarantees this.
    pub fn from_parts(matrix: SymMatrix<T>, spec: PartitionSpec) -> Self {
        let n = matrix.dim();
        let diag = (0..n).map(|i| matrix.get(i, i)).collect();
        let row_sums = matrix.row_sums();
        let scale = matrix.inf_norm();
        Self { matrix, diag, row_sums, lower: spec.lower, upper: spec.upper, scale }
    }

    pub fn n(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.matrix
    }

    pub fn dense_matrix(&self) -> DenseMatrix<T> {
        self.matrix.to_dense()
    }

    /// The diagonal shift `d`.
    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    pub fn spec(&self) -> PartitionSpec {
        PartitionSpec { lower: self.lower, upper: self.upper }
    }

    pub fn feasible_set(&self) -> FeasibleSet<T> {
        FeasibleSet::unit(self.n(), T::of_usize(self.lower), T::of_usize(self.upper))
            .expect("partition spec validated at construction")
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        Ok(())
    }

    /// `f(x) = (1 − x)ᵀ M x`.
    pub fn objective(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        Ok(Quadratic::value(self, x))
    }

    /// `∇f(x) = M1 − 2Mx`.
    pub fn gradient_at(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x)?;
        Ok(Quadratic::gradient(self, x))
    }

    /// Fixes `x_{order[j]} = b_j` for the label's bits and returns the
    /// quadratic in the remaining coordinates.
    pub fn reduce(&self, label: &SubproblemLabel, order: &[usize]) -> Result<ReducedQp<T>> {
        let n = self.n();
        if order.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: order.len() });
        }
        if label.depth() > n {
            return Err(Error::InvalidArgument(format!("label depth {} exceeds n = {n}", label.depth())));
        }
        let mut value = vec![None; n];
        for (&v, &b) in order.iter().zip(label.bits()) {
            value[v] = Some(b);
        }
        let free: Vec<usize> = (0..n).filter(|&i| value[i].is_none()).collect();
        let fixed: Vec<(usize, bool)> = order[..label.depth()]
            .iter()
            .map(|&v| (v, value[v].unwrap()))
            .collect();

        let ones = label.ones() as i64;
        let lower = self.lower as i64 - ones;
        let upper = self.upper as i64 - ones;
        if upper < 0 || lower > free.len() as i64 {
            return Err(Error::InfeasibleSubproblem { lower, upper, free: free.len() });
        }

        // b = fixed vector (zeros on free coordinates)
        let mut b = vec![T::zero(); n];
        for &(v, bit) in &fixed {
            if bit {
                b[v] = T::one();
            }
        }
        let mut mb = vec![T::zero(); n];
        self.matrix.matvec(&b, &mut mb);

        // f = 1ᵀM(x_F + b) − (x_F + b)ᵀM(x_F + b)
        //   = [s_Xᵀb − bᵀM b] + (s_F − 2(Mb)_F)ᵀ x_F − x_Fᵀ M_FF x_F
        let constant = dot(&self.row_sums, &b) - dot(&b, &mb);
        let linear = free.iter().map(|&i| self.row_sums[i] - T::of(2.0) * mb[i]).collect();
        let mff = match &self.matrix {
            SymMatrix::Dense(m) => m.principal_submatrix(&free),
            SymMatrix::Sparse(_) => {
                let mut pos = vec![usize::MAX; n];
                for (a, &i) in free.iter().enumerate() {
                    pos[i] = a;
                }
                let mut m = DenseMatrix::zeros(free.len());
                for (a, &i) in free.iter().enumerate() {
                    for (j, v) in self.matrix.row_entries(i) {
                        if pos[j] != usize::MAX {
                            m[(a, pos[j])] = v;
                        }
                    }
                }
                m
            }
        };
        let scale = mff.inf_norm();
        Ok(ReducedQp { n_full: n, free, fixed, mff, linear, constant, lower, upper, scale })
    }
}

impl<T: Scalar> Quadratic<T> for QpProblem<T> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[T]) -> T {
        let mut mx = vec![T::zero(); self.n()];
        self.matrix.matvec(x, &mut mx);
        x.iter().zip(&mx).map(|(&xi, &v)| (T::one() - xi) * v).sum()
    }

    fn gradient_into(&self, x: &[T], out: &mut [T]) {
        self.matrix.matvec(x, out);
        let two = T::of(2.0);
        for (o, &s) in out.iter_mut().zip(&self.row_sums) {
            *o = s - two * *o;
        }
    }

    fn curvature(&self, d: &[T]) -> T {
        let mut md = vec![T::zero(); self.n()];
        self.matrix.matvec(d, &mut md);
        -dot(d, &md)
    }
}

impl<T: Scalar> PartitionQp<T> for QpProblem<T> {
    fn entry(&self, i: usize, j: usize) -> T {
        self.matrix.get(i, j)
    }

    fn budget(&self) -> (i64, i64) {
        (self.lower as i64, self.upper as i64)
    }

    fn scale(&self) -> T {
        self.scale
    }
}

/// `f_τ(x) = k + cᵀx − xᵀ M_FF x` on the free coordinates `F`, with
/// budgets `l_τ = l − Σb`, `u_τ = u − Σb`.
#[derive(Clone, Debug)]
pub struct ReducedQp<T> {
    n_full: usize,
    free: Vec<usize>,
    fixed: Vec<(usize, bool)>,
    mff: DenseMatrix<T>,
    linear: Vec<T>,
    constant: T,
    lower: i64,
    upper: i64,
    scale: T,
}

impl<T: Scalar> ReducedQp<T> {
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn fixed(&self) -> &[(usize, bool)] {
        &self.fixed
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.mff
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    /// `(l_τ, u_τ)` as defined, possibly outside `[0, |F|]`.
    pub fn raw_budget(&self) -> (i64, i64) {
        (self.lower, self.upper)
    }

    pub fn n_full(&self) -> usize {
        self.n_full
    }

    pub fn feasible_set(&self) -> FeasibleSet<T> {
        let (lo, hi) = self.budget();
        FeasibleSet::unit(self.free.len(), T::of_i64(lo), T::of_i64(hi))
            .expect("reduced budgets checked at construction")
    }

    /// Full-length point with the fixed values and `x_free` on `F`.
    pub fn assemble(&self, x_free: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.n_full];
        for &(v, b) in &self.fixed {
            x[v] = if b { T::one() } else { T::zero() };
        }
        for (&i, &v) in self.free.iter().zip(x_free) {
            x[i] = v;
        }
        x
    }

    /// Free coordinates of a full-length point.
    pub fn restrict(&self, x: &[T]) -> Vec<T> {
        self.free.iter().map(|&i| x[i]).collect()
    }
}

impl<T: Scalar> Quadratic<T> for ReducedQp<T> {
    fn dim(&self) -> usize {
        self.free.len()
    }

    fn value(&self, x: &[T]) -> T {
        self.constant + dot(&self.linear, x) - self.mff.quad_form(x)
    }

    fn gradient_into(&self, x: &[T], out: &mut [T]) {
        self.mff.matvec(x, out);
        let two = T::of(2.0);
        for (o, &c) in out.iter_mut().zip(&self.linear) {
            *o = c - two * *o;
        }
    }

    fn curvature(&self, d: &[T]) -> T {
        -self.mff.quad_form(d)
    }
}

impl<T: Scalar> PartitionQp<T> for ReducedQp<T> {
    fn entry(&self, i: usize, j: usize) -> T {
        self.mff[(i, j)]
    }

    fn budget(&self) -> (i64, i64) {
        (self.lower.max(0), self.upper.min(self.free.len() as i64))
    }

    fn scale(&self) -> T {
        self.scale
    }
}
