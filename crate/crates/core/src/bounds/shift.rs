//! DC shifts: a scalar `σ` with `σI − M ⪰ 0`, or a diagonal `λ` with
//! `Diag(λ) − M ⪰ 0` of minimal trace. Both come back certified by a
//! successful Cholesky factorization of the shifted matrix.

use log::warn;

use crate::linalg::{lanczos_max_eigenvalue, DenseMatrix, SymMatrix};
use crate::scalar::{sum, Scalar};

/// Relative margin added to the Lanczos estimate of `λ_max(M)`.
pub const SIGMA_RELATIVE_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum ShiftKind<T> {
    Scalar(T),
    Diagonal(Vec<T>),
}

/// How the shift was verified: the Cholesky factorization of
/// `Diag(shift) − M` succeeded after `margin` had been folded into the shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdCertificate<T> {
    pub margin: T,
    /// False only when the Gershgorin bound was used without factorization.
    pub factorized: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DcShift<T> {
    pub kind: ShiftKind<T>,
    pub certificate: PsdCertificate<T>,
    /// Set when the inner SDP solver stopped without meeting its gap tolerance.
    pub solver_warning: Option<String>,
}

impl<T: Scalar> DcShift<T> {
    /// The shift as a vector of length `n` (`σ1` for the scalar variant).
    pub fn lambda(&self, n: usize) -> Vec<T> {
        match &self.kind {
            ShiftKind::Scalar(s) => vec![*s; n],
            ShiftKind::Diagonal(l) => {
                debug_assert_eq!(l.len(), n);
                l.clone()
            }
        }
    }

    /// Entries on the given coordinates.
    pub fn restricted(&self, idx: &[usize]) -> Vec<T> {
        match &self.kind {
            ShiftKind::Scalar(s) => vec![*s; idx.len()],
            ShiftKind::Diagonal(l) => idx.iter().map(|&i| l[i]).collect(),
        }
    }

    /// `Σ λ_i` (`nσ` for the scalar variant).
    pub fn trace(&self, n: usize) -> T {
        match &self.kind {
            ShiftKind::Scalar(s) => *s * T::of_usize(n),
            ShiftKind::Diagonal(l) => sum(l),
        }
    }

    pub fn sigma(&self) -> Option<T> {
        match self.kind {
            ShiftKind::Scalar(s) => Some(s),
            ShiftKind::Diagonal(_) => None,
        }
    }
}

/// Tries `Diag(lambda) − M`, growing a uniform margin until the Cholesky
/// factorization succeeds. Returns the certified shift and the margin used,
/// or `None` once the margin would exceed `cap`.
fn certify<T: Scalar>(m: &DenseMatrix<T>, lambda: &[T], first_margin: T, cap: T) -> Option<(Vec<T>, T)> {
    let mut margin = T::zero();
    let mut step = first_margin;
    loop {
        let shifted: Vec<T> = lambda.iter().map(|&l| l + margin).collect();
        if m.diag_minus(&shifted).is_positive_definite() {
            return Some((shifted, margin));
        }
        if margin > cap {
            return None;
        }
        margin = if margin == T::zero() { step } else { margin + step };
        step *= T::of(4.0);
    }
}

fn norm_scale<T: Scalar>(m: &DenseMatrix<T>) -> T {
    m.inf_norm().max(T::one())
}

/// `σ ≥ max(0, λ_max(M))`, certified.
///
/// The Lanczos estimate gets a relative margin; if factorization of
/// `σI − M` still fails, `σ` grows geometrically, and the Gershgorin
/// bound `max_i Σ_j |M_ij|` caps the search.
pub fn sigma_shift<T: Scalar>(m: &SymMatrix<T>) -> DcShift<T> {
    let n = m.dim();
    if n == 0 {
        return DcShift {
            kind: ShiftKind::Scalar(T::zero()),
            certificate: PsdCertificate { margin: T::zero(), factorized: true },
            solver_warning: None,
        };
    }
    let estimate = lanczos_max_eigenvalue(n, |x, out| m.matvec(x, out), n.min(300));
    let dense = m.to_dense();
    let scale = norm_scale(&dense);
    let base = if estimate > T::zero() {
        estimate * (T::one() + T::of(SIGMA_RELATIVE_MARGIN))
    } else {
        T::zero()
    };
    let gersh = dense.gershgorin_max().max(T::zero());
    let first = T::tol_floor(1e-10) * scale;
    match certify(&dense, &vec![base; n], first, gersh.max(scale)) {
        Some((shift, margin)) => DcShift {
            kind: ShiftKind::Scalar(shift[0]),
            certificate: PsdCertificate { margin, factorized: true },
            solver_warning: None,
        },
        None => DcShift {
            kind: ShiftKind::Scalar(gersh + first),
            certificate: PsdCertificate { margin: gersh + first - base, factorized: false },
            solver_warning: Some("Gershgorin fallback".into()),
        },
    }
}

/// Controls for the interior-point solve of `min Σλ s.t. Diag(λ) − M ⪰ 0`.
#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Stop when the duality gap is below `gap_tol · max(1, |Σλ|)`.
    pub gap_tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { max_iter: 100, gap_tol: 1e-9 }
    }
}

/// Result of the raw interior-point iteration.
#[derive(Clone, Debug)]
pub struct SdpSolve<T> {
    pub lambda: Vec<T>,
    pub primal: T,
    pub dual: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest `α ∈ (0, 1]` (backtracking by 0.8) keeping `base + α·dir` positive
/// definite, damped by 0.95 when it had to backtrack.
fn pd_step<T: Scalar>(base: &DenseMatrix<T>, dir: &DenseMatrix<T>) -> T {
    let mut alpha = T::one();
    for _ in 0..80 {
        let mut trial = base.clone();
        for i in 0..base.dim() {
            for j in 0..base.dim() {
                trial[(i, j)] += alpha * dir[(i, j)];
            }
        }
        if trial.is_positive_definite() {
            return if alpha < T::one() { alpha * T::of(0.95) } else { alpha };
        }
        alpha *= T::of(0.8);
    }
    T::zero()
}

/// Primal–dual interior-point method for the diagonal-shift SDP and its
/// dual `max ⟨M, X⟩ s.t. diag(X) = 1, X ⪰ 0`. Iterates stay strictly
/// feasible: `X ≻ 0` with unit diagonal and `Z = Diag(λ) − M ≻ 0`.
pub fn solve_min_trace_sdp<T: Scalar>(m: &DenseMatrix<T>, opts: SdpOptions) -> SdpSolve<T> {
    let n = m.dim();
    let two_n = T::of_usize(2 * n);
    let mut x = DenseMatrix::<T>::identity(n);
    let mut y: Vec<T> = (0..n)
        .map(|i| T::of(1.1) * m.row(i).iter().map(|v| v.abs()).sum::<T>() + T::one())
        .collect();
    let mut z = m.diag_minus(&y);
    let mut primal = sum(&y);
    let mut dual = m.frobenius_dot(&x);
    let mut mu = z.frobenius_dot(&x) / two_n;
    let tol = T::tol_floor(opts.gap_tol);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        if primal - dual <= tol * primal.abs().max(T::one()) {
            converged = true;
            break;
        }
        iterations += 1;
        let zi = match z.cholesky() {
            Some(ch) => ch.inverse(),
            None => break,
        };
        let schur = zi.hadamard(&x);
        let rhs: Vec<T> = (0..n).map(|i| mu * zi[(i, i)] - T::one()).collect();
        let dy = match schur.cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => break,
        };
        // dX = −Zi Diag(dy) X + μ Zi − X
        let mut zi_dy = zi.clone();
        for i in 0..n {
            for j in 0..n {
                zi_dy[(i, j)] *= dy[j];
            }
        }
        let mut dx = zi_dy.matmul(&x).scaled(-T::one());
        for i in 0..n {
            for j in 0..n {
                dx[(i, j)] += mu * zi[(i, j)] - x[(i, j)];
            }
        }
        dx.symmetrize();

        let alpha_p = pd_step(&x, &dx);
        let dz = DenseMatrix::from_diagonal(&dy);
        let alpha_d = pd_step(&z, &dz);
        if alpha_p == T::zero() && alpha_d == T::zero() {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] += alpha_p * dx[(i, j)];
            }
            y[i] += alpha_d * dy[i];
            z[(i, i)] += alpha_d * dy[i];
        }
        mu = z.frobenius_dot(&x) / two_n;
        let steps = alpha_p + alpha_d;
        if steps > T::of(1.6) {
            mu *= T::of(0.5);
        }
        if steps > T::of(1.9) {
            mu /= T::of(5.0);
        }
        primal = sum(&y);
        dual = m.frobenius_dot(&x);
    }
    if !converged && primal - dual <= tol * primal.abs().max(T::one()) {
        converged = true;
    }
    SdpSolve { lambda: y, primal, dual, iterations, converged }
}

/// Minimal-trace diagonal shift, repaired and certified.
///
/// After the interior-point solve, negative entries are raised to zero
/// (only relevant when `diag(M)` has negative entries), a negative smallest
/// eigenvalue `μ` of `Diag(λ) − M` is repaired by `λ ← λ + (|μ| + ε)1`, and
/// a growing margin is added until Cholesky succeeds. If the result would
/// exceed the scalar bound `nσ`, the certified `σ1` is returned instead.
pub fn sdp_shift<T: Scalar>(m: &DenseMatrix<T>, opts: SdpOptions) -> DcShift<T> {
    let n = m.dim();
    if n == 0 {
        return DcShift {
            kind: ShiftKind::Diagonal(Vec::new()),
            certificate: PsdCertificate { margin: T::zero(), factorized: true },
            solver_warning: None,
        };
    }
    let scale = norm_scale(m);
    let eps = T::tol_floor(1e-10) * scale;

    // diagonal matrices are their own optimum
    let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == T::zero()));
    let (mut lambda, mut warning) = if is_diagonal {
        (m.diagonal(), None)
    } else {
        let solve = solve_min_trace_sdp(m, opts);
        let warning = (!solve.converged).then(|| {
            let msg = format!(
                "SDP solver stopped after {} iterations with gap {}",
                solve.iterations,
                solve.primal - solve.dual
            );
            warn!("{msg}");
            msg
        });
        (solve.lambda, warning)
    };
    for l in lambda.iter_mut() {
        if *l < T::zero() {
            *l = T::zero();
        }
    }

    let min_eig = m.diag_minus(&lambda).min_eigenvalue();
    if min_eig < T::zero() {
        let bump = -min_eig + eps;
        lambda.iter_mut().for_each(|l| *l += bump);
    }

    let sigma = sigma_shift(&SymMatrix::Dense(m.clone()));
    let sigma_trace = sigma.trace(n);
    match certify(m, &lambda, eps, scale) {
        Some((lambda, margin)) if sum(&lambda) <= sigma_trace => DcShift {
            kind: ShiftKind::Diagonal(lambda),
            certificate: PsdCertificate { margin, factorized: true },
            solver_warning: warning,
        },
        _ => {
            warning.get_or_insert_with(|| "diagonal shift fell back to scalar shift".into());
            let s = sigma.sigma().expect("scalar shift");
            DcShift {
                kind: ShiftKind::Diagonal(vec![s; n]),
                certificate: sigma.certificate,
                solver_warning: warning,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[Vec<f64>]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows)
    }

    fn p3_matrix() -> DenseMatrix<f64> {
        dense(&[vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0]])
    }

    #[test]
    fn sigma_examples() {
        let s = sigma_shift(&SymMatrix::Dense(dense(&[vec![1.0, 1.0], vec![1.0, 1.0]])));
        let sigma = s.sigma().unwrap();
        assert!((2.0..=2.0 * (1.0 + 1e-5)).contains(&sigma));

        let s = sigma_shift(&SymMatrix::Dense(DenseMatrix::<f64>::identity(3).scaled(-1.0)));
        assert_eq!(s.sigma().unwrap(), 0.0);

        let s = sigma_shift(&SymMatrix::Dense(p3_matrix()));
        let sigma = s.sigma().unwrap();
        let exact = 1.0 + 2f64.sqrt();
        assert!(sigma >= exact && sigma - exact < 1e-4);
        assert!(s.certificate.factorized);
    }

    #[test]
    fn sigma_on_zero_matrix_is_tiny() {
        let s = sigma_shift(&SymMatrix::Dense(DenseMatrix::<f64>::zeros(4)));
        let sigma = s.sigma().unwrap();
        assert!(sigma > 0.0 && sigma <= 1e-8);
    }

    #[test]
    fn sdp_two_by_two() {
        let s = sdp_shift(&dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]), SdpOptions::default());
        let l = s.lambda(2);
        assert!((l[0] - 2.0).abs() < 1e-6 && (l[1] - 2.0).abs() < 1e-6);
        assert!(s.solver_warning.is_none());
    }

    #[test]
    fn sdp_path_three() {
        let m = p3_matrix();
        let s = sdp_shift(&m, SdpOptions::default());
        let l = s.lambda(3);
        assert!((sum(&l) - 7.0).abs() < 1e-4, "{l:?}");
        for (a, b) in l.iter().zip([2.0, 3.0, 2.0]) {
            assert!((a - b).abs() < 1e-3);
        }
        assert!(m.diag_minus(&l).is_positive_definite());
    }

    #[test]
    fn sdp_diagonal_input_is_returned_unchanged() {
        let m = DenseMatrix::<f64>::from_diagonal(&[1.0, 0.0, 3.0]);
        let s = sdp_shift(&m, SdpOptions::default());
        let l = s.lambda(3);
        for (a, b) in l.iter().zip([1.0, 0.0, 3.0]) {
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn sdp_dominated_by_scalar_shift() {
        let g = crate::graph::gen_random::<f64>(14, 0.4, 8).unwrap();
        let q = crate::qp::make_qp(&g, crate::graph::PartitionSpec::bisection(14)).unwrap();
        let m = q.dense_matrix();
        let sdp = sdp_shift(&m, SdpOptions::default());
        let sig = sigma_shift(q.matrix());
        assert!(sdp.trace(14) <= sig.trace(14) + 1e-6);
        assert!(m.diag_minus(&sdp.lambda(14)).is_positive_definite());
        assert!(sdp.certificate.margin <= 1e-8 * m.inf_norm());
    }

    #[test]
    fn sdp_single_precision() {
        let m = DenseMatrix::<f32>::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let s = sdp_shift(&m, SdpOptions::default());
        let l = s.lambda(2);
        assert!((l[0] + l[1] - 4.0).abs() < 1e-3);
        assert!(m.diag_minus(&l).is_positive_definite());
    }
}
