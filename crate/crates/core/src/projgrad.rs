//! Euclidean projection onto `{p <= x <= q, lo <= 1ᵀx <= hi}` and a
//! gradient-projection method with Barzilai–Borwein steps and exact
//! line search along the projected segment.

use crate::error::{Error, Result};
use crate::qp::{FeasibleSet, Quadratic};
use crate::scalar::{dot, Scalar};

/// Projection of `y`: `x_i = clip(y_i − θ, p_i, q_i)` with the shift `θ`
/// chosen so that `1ᵀx` lands in the budget. `θ` is found exactly by
/// sorting the breakpoints of the piecewise linear map `θ ↦ 1ᵀx(θ)`.
pub fn project<T: Scalar>(y: &[T], set: &FeasibleSet<T>) -> Result<Vec<T>> {
    if y.len() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: y.len() });
    }
    let clip_at = |theta: T| -> Vec<T> {
        y.iter()
            .zip(set.lower.iter().zip(&set.upper))
            .map(|(&v, (&p, &q))| (v - theta).max(p).min(q))
            .collect()
    };
    let phi = |theta: T| -> T {
        y.iter()
            .zip(set.lower.iter().zip(&set.upper))
            .map(|(&v, (&p, &q))| (v - theta).max(p).min(q))
            .sum()
    };
    let s0 = phi(T::zero());
    let target = if s0 > set.budget_hi {
        set.budget_hi
    } else if s0 < set.budget_lo {
        set.budget_lo
    } else {
        return Ok(clip_at(T::zero()));
    };

    let mut bps: Vec<T> = Vec::with_capacity(2 * y.len());
    for ((&v, &p), &q) in y.iter().zip(&set.lower).zip(&set.upper) {
        bps.push(v - q);
        bps.push(v - p);
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    bps.dedup();

    // φ is nonincreasing; find adjacent breakpoints a < b with φ(a) >= target >= φ(b)
    let mut theta = bps[bps.len() - 1];
    let mut prev = bps[0];
    let mut prev_val = phi(prev);
    if prev_val <= target {
        theta = prev;
    } else {
        for &b in &bps[1..] {
            let val = phi(b);
            if val <= target {
                theta = prev + (b - prev) * (prev_val - target) / (prev_val - val);
                break;
            }
            prev = b;
            prev_val = val;
        }
    }
    let mut x = clip_at(theta);
    // θ carries an absolute error of ulp(θ), which is large when |y| is;
    // push the remaining budget residual onto the coordinates that can absorb it
    for _ in 0..4 {
        let err = target - x.iter().copied().sum::<T>();
        if err == T::zero() {
            break;
        }
        let room = |i: usize| if err > T::zero() { x[i] < set.upper[i] } else { x[i] > set.lower[i] };
        let interior: Vec<usize> = (0..x.len()).filter(|&i| room(i) && x[i] > set.lower[i] && x[i] < set.upper[i]).collect();
        let movable = if interior.is_empty() { (0..x.len()).filter(|&i| room(i)).collect() } else { interior };
        if movable.is_empty() {
            break;
        }
        let share = err / T::of_usize(movable.len());
        for i in movable {
            x[i] = (x[i] + share).max(set.lower[i]).min(set.upper[i]);
        }
    }
    Ok(x)
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Stop when `‖P(x − ∇f(x)) − x‖ <= tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iter: 10_000 }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub residual: T,
    pub converged: bool,
}

const ALPHA_MIN: f64 = 1e-8;
const ALPHA_MAX: f64 = 1e8;

/// `‖P(x − g) − x‖₂`, the projected-gradient residual.
pub fn residual<T: Scalar>(x: &[T], g: &[T], set: &FeasibleSet<T>) -> Result<T> {
    let trial: Vec<T> = x.iter().zip(g).map(|(&a, &b)| a - b).collect();
    let p = project(&trial, set)?;
    Ok(p.iter().zip(x).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt())
}

fn descend<T: Scalar, Q: Quadratic<T> + ?Sized>(
    q: &Q,
    set: &FeasibleSet<T>,
    x0: &[T],
    opts: SolveOptions,
) -> Result<SolveReport<T>> {
    let n = q.dim();
    if x0.len() != n || set.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let tol = T::tol_floor(opts.tol);
    let (amin, amax) = (T::of(ALPHA_MIN), T::of(ALPHA_MAX));
    let mut x = project(x0, set)?;
    let mut g = q.gradient(&x);
    let gmax = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let mut alpha = if gmax > T::zero() { (T::one() / gmax).max(amin).min(amax) } else { T::one() };
    let mut res = residual(&x, &g, set)?;
    let mut iterations = 0;
    let mut g_new = vec![T::zero(); n];

    while res > tol && iterations < opts.max_iter {
        iterations += 1;
        let trial: Vec<T> = x.iter().zip(&g).map(|(&a, &b)| a - alpha * b).collect();
        let z = project(&trial, set)?;
        let d: Vec<T> = z.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let slope = dot(&g, &d);
        let curv = q.curvature(&d);
        let t = if curv > T::zero() {
            (-slope / (T::of(2.0) * curv)).max(T::zero()).min(T::one())
        } else if slope + curv < T::zero() {
            T::one()
        } else {
            T::zero()
        };
        if t == T::zero() || d.iter().all(|&v| v == T::zero()) {
            // no progress along this segment; retry with the plain gradient scale
            if alpha == T::one() {
                break;
            }
            alpha = T::one();
            continue;
        }
        let s: Vec<T> = d.iter().map(|&v| t * v).collect();
        for (xi, &si) in x.iter_mut().zip(&s) {
            *xi += si;
        }
        q.gradient_into(&x, &mut g_new);
        let sty: T = s.iter().zip(g_new.iter().zip(&g)).map(|(&si, (&a, &b))| si * (a - b)).sum();
        let sts = dot(&s, &s);
        alpha = if sty > T::zero() { (sts / sty).max(amin).min(amax) } else { amax };
        std::mem::swap(&mut g, &mut g_new);
        res = residual(&x, &g, set)?;
    }
    Ok(SolveReport { value: q.value(&x), converged: res <= tol, x, iterations, residual: res })
}

/// Minimizes a convex quadratic over the set from `x0` (projected first).
pub fn solve_convex<T: Scalar, Q: Quadratic<T> + ?Sized>(
    q: &Q,
    set: &FeasibleSet<T>,
    x0: &[T],
    opts: SolveOptions,
) -> Result<SolveReport<T>> {
    descend(q, set, x0, opts)
}

/// Monotone descent on a possibly nonconvex quadratic; on segments with
/// nonpositive curvature the far endpoint is taken whenever it decreases `f`.
/// The result is a stationary point, not necessarily a minimizer.
pub fn descend_nonconvex<T: Scalar, Q: Quadratic<T> + ?Sized>(
    q: &Q,
    set: &FeasibleSet<T>,
    x0: &[T],
    opts: SolveOptions,
) -> Result<SolveReport<T>> {
    descend(q, set, x0, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::scalar::{dist2, sum};
    use proptest::prelude::*;

    struct Dense {
        q: DenseMatrix<f64>,
        c: Vec<f64>,
    }

    impl Quadratic<f64> for Dense {
        fn dim(&self) -> usize {
            self.c.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            dot(&self.c, x) + self.q.quad_form(x)
        }
        fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
            self.q.matvec(x, out);
            for (o, &c) in out.iter_mut().zip(&self.c) {
                *o = c + 2.0 * *o;
            }
        }
        fn curvature(&self, d: &[f64]) -> f64 {
            self.q.quad_form(d)
        }
    }

    fn set_strategy() -> impl Strategy<Value = (FeasibleSet<f64>, Vec<f64>)> {
        (1usize..8).prop_flat_map(|n| {
            (
                proptest::collection::vec((-2.0f64..2.0, 0.0f64..2.0), n),
                proptest::collection::vec(-5.0f64..5.0, n),
                0.0f64..1.0,
                0.0f64..1.0,
            )
                .prop_map(|(boxes, y, a, b)| {
                    let lower: Vec<f64> = boxes.iter().map(|&(p, _)| p).collect();
                    let upper: Vec<f64> = boxes.iter().map(|&(p, w)| p + w).collect();
                    let (smin, smax) = (sum(&lower), sum(&upper));
                    let (a, b) = if a <= b { (a, b) } else { (b, a) };
                    let lo = smin + a * (smax - smin);
                    let hi = smin + b * (smax - smin);
                    (FeasibleSet::new(lower, upper, lo, hi).unwrap(), y)
                })
        })
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent((set, y) in set_strategy()) {
            let x = project(&y, &set).unwrap();
            prop_assert!(set.contains(&x, 1e-9));
            let again = project(&x, &set).unwrap();
            prop_assert!(dist2(&x, &again) <= 1e-9);
        }

        #[test]
        fn projection_is_nonexpansive((set, y) in set_strategy(), shift in proptest::collection::vec(-1.0f64..1.0, 8)) {
            let z: Vec<f64> = y.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let px = project(&y, &set).unwrap();
            let pz = project(&z, &set).unwrap();
            prop_assert!(dist2(&px, &pz) <= dist2(&y, &z) + 1e-9);
        }

        #[test]
        fn projection_satisfies_variational_inequality(
            (set, y) in set_strategy(),
            weights in proptest::collection::vec(0.0f64..1.0, 8),
        ) {
            // any feasible z: (y − P y)ᵀ(z − P y) <= 0
            let x = project(&y, &set).unwrap();
            let z0: Vec<f64> = set.lower.iter().zip(&set.upper).zip(&weights)
                .map(|((&p, &q), &w)| p + w * (q - p)).collect();
            let z = project(&z0, &set).unwrap();
            let lhs: f64 = y.iter().zip(&x).zip(&z).map(|((&a, &b), &c)| (a - b) * (c - b)).sum();
            prop_assert!(lhs <= 1e-9);
        }
    }

    #[test]
    fn projection_examples() {
        let set = FeasibleSet::unit(3, 1.0, 1.0).unwrap();
        let x: Vec<f64> = project(&[1.0, 1.0, 1.0], &set).unwrap();
        for v in &x {
            assert!((*v - 1.0f64 / 3.0).abs() < 1e-15);
        }
        let x = project(&[2.0, -1.0, 0.2], &set).unwrap();
        assert!(dist2(&x, &[1.0, 0.0, 0.0]) < 1e-15);
        let set = FeasibleSet::unit(2, 0.0, 2.0).unwrap();
        assert_eq!(project(&[0.3, 1.7], &set).unwrap(), vec![0.3, 1.0]);
        assert!(project(&[0.0], &set).is_err());
    }

    #[test]
    fn convex_solve_reaches_known_minimizer() {
        // min (x0 − 0.2)² + (x1 − 0.9)² + (x2 − 0.4)² s.t. x0 + x1 + x2 = 1
        let q = Dense { q: DenseMatrix::identity(3), c: vec![-0.4, -1.8, -0.8] };
        let set = FeasibleSet::unit(3, 1.0, 1.0).unwrap();
        let r = solve_convex(&q, &set, &[0.0, 0.0, 0.0], SolveOptions { tol: 1e-10, max_iter: 1000 }).unwrap();
        assert!(r.converged);
        let expect = project(&[0.2, 0.9, 0.4], &set).unwrap();
        assert!(dist2(&r.x, &expect) < 1e-8, "{:?} vs {expect:?}", r.x);
    }

    #[test]
    fn nonconvex_descent_is_monotone_and_stationary() {
        let q = Dense {
            q: DenseMatrix::from_rows(&[vec![-1.0, 0.3], vec![0.3, -2.0]]),
            c: vec![0.1, 0.5],
        };
        let set = FeasibleSet::unit(2, 0.0, 2.0).unwrap();
        let x0 = [0.5, 0.5];
        let r = descend_nonconvex(&q, &set, &x0, SolveOptions::default()).unwrap();
        assert!(r.value <= q.value(&x0));
        assert!(r.converged);
        assert!(set.contains(&r.x, 1e-12));
    }

    #[test]
    fn zero_gradient_start_is_immediately_optimal() {
        let q = Dense { q: DenseMatrix::identity(2), c: vec![-1.0, -1.0] };
        let set = FeasibleSet::unit(2, 0.0, 2.0).unwrap();
        let r = solve_convex(&q, &set, &[0.5, 0.5], SolveOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
    }
}
