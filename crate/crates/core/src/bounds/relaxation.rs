//! The convex relaxation `f_L = f_τ + xᵀΛx − λᵀx` of a reduced problem and
//! lower bounds certified from any feasible point of it.

use super::shift::{DcShift, ShiftKind};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::qp::{FeasibleSet, PartitionQp, Quadratic, ReducedQp};
use crate::scalar::{dot, Scalar};

/// `f_L(x) = k + (c − λ_F)ᵀx + xᵀ(Diag(λ_F) − M_FF)x` on the reduced
/// feasible set. Convex because the shift was certified on the full matrix
/// and `Diag(λ_F) − M_FF` is a principal submatrix of `Diag(λ) − M`.
#[derive(Clone, Debug)]
pub struct ConvexRelaxation<T> {
    quad: DenseMatrix<T>,
    linear: Vec<T>,
    constant: T,
    lambda: Vec<T>,
    budget: (i64, i64),
    /// Margin from the certificate of the shift.
    pub certificate_margin: T,
}

impl<T: Scalar> ConvexRelaxation<T> {
    /// `Diag(λ_F) − M_FF`.
    pub fn hessian_half(&self) -> &DenseMatrix<T> {
        &self.quad
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn shift(&self) -> &[T] {
        &self.lambda
    }

    pub fn budget(&self) -> (i64, i64) {
        self.budget
    }

    pub fn feasible_set(&self) -> FeasibleSet<T> {
        FeasibleSet::unit(self.quad.dim(), T::of_i64(self.budget.0), T::of_i64(self.budget.1))
            .expect("budget inside [0, |F|]")
    }
}

impl<T: Scalar> Quadratic<T> for ConvexRelaxation<T> {
    fn dim(&self) -> usize {
        self.quad.dim()
    }

    fn value(&self, x: &[T]) -> T {
        self.constant + dot(&self.linear, x) + self.quad.quad_form(x)
    }

    fn gradient_into(&self, x: &[T], out: &mut [T]) {
        self.quad.matvec(x, out);
        let two = T::of(2.0);
        for (o, &c) in out.iter_mut().zip(&self.linear) {
            *o = c + two * *o;
        }
    }

    fn curvature(&self, d: &[T]) -> T {
        self.quad.quad_form(d)
    }
}

/// Relaxation of `reduced` under `shift`. A diagonal shift of full length is
/// restricted to the free coordinates; one of length `|F|` is used as is.
pub fn build_relaxation<T: Scalar>(reduced: &ReducedQp<T>, shift: &DcShift<T>) -> Result<ConvexRelaxation<T>> {
    let nf = reduced.dim();
    let lambda = match &shift.kind {
        ShiftKind::Scalar(s) => vec![*s; nf],
        ShiftKind::Diagonal(l) if l.len() == reduced.n_full() => shift.restricted(reduced.free()),
        ShiftKind::Diagonal(l) if l.len() == nf => l.clone(),
        ShiftKind::Diagonal(l) => {
            return Err(Error::DimensionMismatch { expected: reduced.n_full(), got: l.len() });
        }
    };
    let quad = reduced.matrix().diag_minus(&lambda);
    let linear = reduced.linear().iter().zip(&lambda).map(|(&c, &l)| c - l).collect();
    Ok(ConvexRelaxation {
        quad,
        linear,
        constant: reduced.constant(),
        lambda,
        budget: reduced.budget(),
        certificate_margin: shift.certificate.margin,
    })
}

/// Minimizer of `cᵀy` over `{0 <= y <= 1, lo <= 1ᵀy <= hi}`: take the
/// negative coefficients in ascending order up to `hi`, then top up with
/// the smallest remaining ones until `lo` is met. Ties go to the lower index.
pub fn greedy_linear_min<T: Scalar>(c: &[T], lo: i64, hi: i64) -> Result<Vec<T>> {
    let n = c.len() as i64;
    if lo > hi || lo > n || hi < 0 {
        return Err(Error::EmptySet(format!("budget [{lo}, {hi}] infeasible for n = {n}")));
    }
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[a].partial_cmp(&c[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut y = vec![T::zero(); c.len()];
    let mut taken = 0i64;
    for &i in &order {
        let want = taken < lo.max(0) || (c[i] < T::zero() && taken < hi);
        if !want {
            break;
        }
        y[i] = T::one();
        taken += 1;
    }
    Ok(y)
}

/// `f_L(x̂) + min_y ∇f_L(x̂)ᵀ(y − x̂)`: a valid lower bound on the minimum
/// of the convex relaxation (hence of the reduced problem) for any feasible `x̂`.
pub fn certified_lower_bound<T: Scalar>(rel: &ConvexRelaxation<T>, x: &[T]) -> Result<T> {
    if x.len() != rel.dim() {
        return Err(Error::DimensionMismatch { expected: rel.dim(), got: x.len() });
    }
    let tol = T::tol_floor(1e-9) * T::of_usize(rel.dim().max(1));
    if !rel.feasible_set().contains(x, tol) {
        return Err(Error::InfeasiblePoint("relaxation point outside the feasible set".into()));
    }
    let g = rel.gradient(x);
    let (lo, hi) = rel.budget;
    let y = greedy_linear_min(&g, lo, hi)?;
    let gap: T = g.iter().zip(y.iter().zip(x)).map(|(&gi, (&yi, &xi))| gi * (yi - xi)).sum();
    Ok(rel.value(x) + gap)
}
