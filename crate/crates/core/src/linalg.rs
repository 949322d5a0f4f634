//! Small dense/sparse symmetric linear algebra: storage, Cholesky
//! certificates and Lanczos extreme-eigenvalue estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{dot, norm2, Scalar};

/// Square dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds from row slices. Panics when the rows are ragged.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn matvec(&self, x: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = dot(self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        self.matvec(x, &mut out);
        out
    }

    pub fn quad_form(&self, x: &[T]) -> T {
        (0..self.n).map(|i| x[i] * dot(self.row(i), x)).sum()
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut out = Self::zeros(k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.data[a * k + b] = self[(i, j)];
            }
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&v| v * s).collect() }
    }

    /// `Diag(d) - self`.
    pub fn diag_minus(&self, d: &[T]) -> Self {
        let mut out = self.scaled(-T::one());
        for (i, &v) in d.iter().enumerate() {
            out[(i, i)] += v;
        }
        out
    }

    pub fn add_diagonal(&mut self, d: T) {
        for i in 0..self.n {
            self[(i, i)] += d;
        }
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        let half = T::of(0.5);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (self[(i, j)] + self[(j, i)]) * half;
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Upper bound on the largest eigenvalue from Gershgorin discs.
    pub fn gershgorin_max(&self) -> T {
        (0..self.n)
            .map(|i| {
                let off: T = (0..self.n)
                    .filter(|&j| j != i)
                    .map(|j| self[(i, j)].abs())
                    .sum();
                self[(i, i)] + off
            })
            .fold(T::neg_infinity(), T::max)
    }

    /// Frobenius inner product.
    pub fn frobenius_dot(&self, other: &Self) -> T {
        dot(&self.data, &other.data)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Hadamard (entrywise) product.
    pub fn hadamard(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).collect(),
        }
    }

    pub fn cholesky(&self) -> Option<Cholesky<T>> {
        Cholesky::factor(self)
    }

    /// True when the matrix admits a Cholesky factorization, i.e. is
    /// positive definite to working precision.
    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_some()
    }

    /// Largest eigenvalue by Lanczos with full reorthogonalization.
    pub fn max_eigenvalue(&self) -> T {
        lanczos_max_eigenvalue(self.n, |x, out| self.matvec(x, out), self.n)
    }

    pub fn min_eigenvalue(&self) -> T {
        -lanczos_max_eigenvalue(self.n, |x, out| {
            self.matvec(x, out);
            out.iter_mut().for_each(|v| *v = -*v);
        }, self.n)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: DenseMatrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Option<Self> {
        let n = a.dim();
        let mut l = DenseMatrix::zeros(n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Self { l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.l.dim();
        let mut inv = DenseMatrix::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv.symmetrize();
        inv
    }
}

/// Largest eigenvalue of a symmetric operator of dimension `n` given by
/// `apply(x, out)`, using at most `max_steps` Lanczos steps with full
/// reorthogonalization. With `max_steps >= n` the result is exact up to
/// rounding; with fewer steps it is a Ritz value, i.e. never above the
/// true largest eigenvalue.
pub fn lanczos_max_eigenvalue<T, F>(n: usize, mut apply: F, max_steps: usize) -> T
where
    T: Scalar,
    F: FnMut(&[T], &mut [T]),
{
    if n == 0 {
        return T::neg_infinity();
    }
    let steps = max_steps.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2c_2057);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(steps);
    let mut alpha: Vec<T> = Vec::with_capacity(steps);
    let mut beta: Vec<T> = Vec::with_capacity(steps);

    let mut v = random_unit(n, &mut rng, &basis).expect("nonempty space");
    let mut w = vec![T::zero(); n];
    for k in 0..steps {
        apply(&v, &mut w);
        let a = dot(&w, &v);
        alpha.push(a);
        basis.push(v.clone());
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for (wi, &qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        if k + 1 == steps {
            break;
        }
        let b = norm2(&w);
        let scale = alpha.iter().fold(T::zero(), |m, &a| m.max(a.abs())).max(T::one());
        if b <= scale * T::epsilon() * T::of_usize(n) {
            // invariant subspace; restart in the orthogonal complement
            match random_unit(n, &mut rng, &basis) {
                Some(fresh) => {
                    beta.push(T::zero());
                    v = fresh;
                }
                None => break,
            }
        } else {
            beta.push(b);
            v = w.iter().map(|&x| x / b).collect();
        }
    }
    tridiagonal_max_eigenvalue(&alpha, &beta[..alpha.len() - 1])
}

fn random_unit<T: Scalar>(n: usize, rng: &mut ChaCha8Rng, against: &[Vec<T>]) -> Option<Vec<T>> {
    for _ in 0..8 {
        let mut v: Vec<T> = (0..n).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect();
        for _ in 0..2 {
            for q in against {
                let c = dot(&v, q);
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = norm2(&v);
        if nv > T::of(1e-3) {
            return Some(v.iter().map(|&x| x / nv).collect());
        }
    }
    None
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, by Sturm-sequence bisection.
pub fn tridiagonal_max_eigenvalue<T: Scalar>(alpha: &[T], beta: &[T]) -> T {
    let k = alpha.len();
    debug_assert_eq!(beta.len() + 1, k);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { T::zero() }
            + if i + 1 < k { beta[i].abs() } else { T::zero() };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // count of eigenvalues strictly greater than x
    let count_above = |x: T| -> usize {
        let mut count_below = 0;
        let mut q = T::one();
        for i in 0..k {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { T::zero() };
            q = alpha[i] - x - if i > 0 { b2 / q } else { T::zero() };
            if q == T::zero() {
                q = T::min_positive_value() * T::of(1e3);
            }
            if q < T::zero() {
                count_below += 1;
            }
        }
        k - count_below
    };
    let two = T::of(2.0);
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Symmetric matrix storage: dense up to a threshold, CSR above it.
#[derive(Clone, Debug, PartialEq)]
pub enum SymMatrix<T> {
    Dense(DenseMatrix<T>),
    Sparse(CsrMatrix<T>),
}

/// Compressed sparse row matrix with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Builds from `(i, j, v)` triplets; duplicate positions are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

impl<T: Scalar> SymMatrix<T> {
    /// Chooses dense storage when `n <= dense_threshold`.
    pub fn from_triplets(n: usize, triplets: Vec<(usize, usize, T)>, dense_threshold: usize) -> Self {
        if n <= dense_threshold {
            let mut m = DenseMatrix::zeros(n);
            for (i, j, v) in triplets {
                m[(i, j)] += v;
            }
            SymMatrix::Dense(m)
        } else {
            SymMatrix::Sparse(CsrMatrix::from_triplets(n, triplets))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SymMatrix::Dense(m) => m.dim(),
            SymMatrix::Sparse(m) => m.dim(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match self {
            SymMatrix::Dense(m) => m[(i, j)],
            SymMatrix::Sparse(m) => m.get(i, j),
        }
    }

    /// Nonzero entries of row `i`.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, T)> {
        match self {
            SymMatrix::Dense(m) => m
                .row(i)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != T::zero())
                .map(|(j, &v)| (j, v))
                .collect(),
            SymMatrix::Sparse(m) => m.row(i).filter(|&(_, v)| v != T::zero()).collect(),
        }
    }

    pub fn matvec(&self, x: &[T], out: &mut [T]) {
        match self {
            SymMatrix::Dense(m) => m.matvec(x, out),
            SymMatrix::Sparse(m) => {
                for (i, o) in out.iter_mut().enumerate().take(m.dim()) {
                    *o = m.row(i).map(|(j, v)| v * x[j]).sum();
                }
            }
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        match self {
            SymMatrix::Dense(m) => m.clone(),
            SymMatrix::Sparse(s) => {
                let mut m = DenseMatrix::zeros(s.dim());
                for i in 0..s.dim() {
                    for (j, v) in s.row(i) {
                        m[(i, j)] = v;
                    }
                }
                m
            }
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, SymMatrix::Dense(_))
    }

    /// Replaces the diagonal (keeping storage kind).
    pub fn with_diagonal(&self, d: &[T]) -> Self {
        match self {
            SymMatrix::Dense(m) => {
                let mut m = m.clone();
                for (i, &v) in d.iter().enumerate() {
                    m[(i, i)] = v;
                }
                SymMatrix::Dense(m)
            }
            SymMatrix::Sparse(s) => {
                let mut trip: Vec<(usize, usize, T)> = Vec::with_capacity(s.nnz() + d.len());
                for i in 0..s.dim() {
                    trip.extend(s.row(i).filter(|&(j, _)| j != i).map(|(j, v)| (i, j, v)));
                }
                trip.extend(d.iter().enumerate().filter(|(_, &v)| v != T::zero()).map(|(i, &v)| (i, i, v)));
                SymMatrix::Sparse(CsrMatrix::from_triplets(s.dim(), trip))
            }
        }
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> T {
        (0..self.dim())
            .map(|i| self.row_entries(i).into_iter().map(|(_, v)| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.dim())
            .map(|i| self.row_entries(i).into_iter().map(|(_, v)| v).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![4.0, 2.0, 0.0], vec![2.0, 5.0, 1.0], vec![0.0, 1.0, 3.0]]);
        let ch = a.cholesky().unwrap();
        let x = ch.solve(&[1.0, 2.0, 3.0]);
        let back = a.mul_vec(&x);
        for (b, e) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((b - e).abs() < 1e-12);
        }
        let inv = ch.inverse();
        let id = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(a.cholesky().is_none());
        // singular PSD is rejected as well
        let b = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(b.cholesky().is_none());
    }

    #[test]
    fn lanczos_matches_known_spectra() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!((a.max_eigenvalue() - 2.0).abs() < 1e-12);
        assert!(a.min_eigenvalue().abs() < 1e-12);
        // P3 with unit diagonal: 1 + sqrt(2)
        let p3 = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ]);
        assert!((p3.max_eigenvalue() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((p3.min_eigenvalue() - (1.0 - 2f64.sqrt())).abs() < 1e-12);
        let neg = DenseMatrix::<f64>::identity(4).scaled(-1.0);
        assert!((neg.max_eigenvalue() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_on_path_laplacian_against_closed_form() {
        // path Laplacian eigenvalues: 2 - 2 cos(k pi / n), k = 0..n-1
        let n = 30;
        let mut a = DenseMatrix::<f64>::zeros(n);
        for i in 0..n {
            let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
            a[(i, i)] = deg;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        let expected = 2.0 - 2.0 * ((n as f64 - 1.0) * std::f64::consts::PI / n as f64).cos();
        assert!((a.max_eigenvalue() - expected).abs() < 1e-10);
        assert!(a.min_eigenvalue().abs() < 1e-10);
    }

    #[test]
    fn tridiagonal_bisection() {
        let alpha = [2.0, 2.0, 2.0];
        let beta = [-1.0, -1.0];
        let top = tridiagonal_max_eigenvalue(&alpha, &beta);
        assert!((top - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn sparse_and_dense_agree() {
        let trip = vec![(0, 1, 2.0), (1, 0, 2.0), (1, 2, -1.0), (2, 1, -1.0), (1, 1, 3.0)];
        let d = SymMatrix::from_triplets(3, trip.clone(), 10);
        let s = SymMatrix::from_triplets(3, trip, 0);
        assert!(d.is_dense() && !s.is_dense());
        assert_eq!(d.to_dense(), s.to_dense());
        let x = [1.0, -2.0, 0.5];
        let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
        d.matvec(&x, &mut a);
        s.matvec(&x, &mut b);
        assert_eq!(a, b);
        assert_eq!(s.get(1, 2), -1.0);
        assert_eq!(s.get(0, 2), 0.0);
        assert_eq!(d.inf_norm(), 6.0);
    }

    #[test]
    fn works_in_single_precision() {
        let a = DenseMatrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((a.max_eigenvalue() - 3.0).abs() < 1e-5);
        assert!(a.is_positive_definite());
    }
}
