//! First-order, local and strict-local optimality tests for partitioning
//! quadratics, and extraction of a descent direction when a stationary
//! point is not a local minimizer.
//!
//! With `κ_ij = M_ii + M_jj − 2M_ij >= 0`, moving along `e_i − e_j` changes
//! `f` by `α ∇f·(e_i − e_j) − α²κ_ij`, and along `e_i` by `α ∂_i f − α² M_ii`.
//! A stationary point is a local minimizer exactly when no such move with a
//! vanishing first-order term has positive curvature loss.

use crate::error::{Error, Result};
use crate::qp::PartitionQp;
use crate::scalar::{sum, Scalar};

/// Tolerance bands for set membership and sign tests.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// `x_i` within this of 0 or 1 counts as on the bound.
    pub x: f64,
    /// Relative to `‖M‖∞`: multipliers and gradient differences within this count as zero.
    pub mu: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { x: 1e-7, mu: 1e-6 }
    }
}

struct Bands<T> {
    x: T,
    sum: T,
    mu: T,
}

fn bands<T: Scalar, Q: PartitionQp<T> + ?Sized>(q: &Q, tol: Tolerances) -> Bands<T> {
    let scale = if q.scale() > T::zero() { q.scale() } else { T::one() };
    let x = T::tol_floor(tol.x);
    Bands { x, sum: x * T::of_usize(q.dim().max(1)), mu: T::tol_floor(tol.mu) * scale }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P4Case {
    /// `l < 1ᵀx < u`
    Interior,
    /// `x_i > 0` and `1ᵀx = u`
    AtUpper,
    /// `x_i < 1` and `1ᵀx = l`
    AtLower,
}

/// The first condition found to fail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness<T> {
    /// First-order conditions fail; `gap` measures the violation.
    Kkt { gap: T },
    /// `i, j ∈ F` with `κ_ij > 0`.
    P2 { i: usize, j: usize },
    /// `i, j` in different sets among `U0, L0, F` with `κ_ij > 0`.
    P3 { i: usize, j: usize },
    /// `λ = ∂_i f = 0` and `M_ii > 0` in one of the three budget cases.
    P4 { i: usize, case: P4Case },
}

#[derive(Clone, Debug)]
pub struct KktAssessment<T> {
    pub lambda: T,
    pub mu: Vec<T>,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub free: Vec<usize>,
    pub upper_zero: Vec<usize>,
    pub lower_zero: Vec<usize>,
    /// `{i : ∇f(x)_i = 0}`
    pub zero_gradient: Vec<usize>,
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    /// `None` when `l = u`, where the condition does not apply.
    pub p4: Option<bool>,
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> KktAssessment<T> {
    pub fn is_stationary(&self) -> bool {
        self.p1
    }

    pub fn is_local_min(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.p4.unwrap_or(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrictAssessment {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
}

impl StrictAssessment {
    pub fn is_strict(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }
}

struct Point<T> {
    g: Vec<T>,
    s: T,
    lo: T,
    hi: T,
    at_lo: bool,
    at_hi: bool,
}

fn point<T: Scalar, Q: PartitionQp<T> + ?Sized>(q: &Q, x: &[T], b: &Bands<T>) -> Result<Point<T>> {
    let n = q.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let (lo, hi) = q.budget();
    let (lo, hi) = (T::of_i64(lo), T::of_i64(hi));
    let s = sum(x);
    if x.iter().any(|&v| v < -b.x || v > T::one() + b.x) || s < lo - b.sum || s > hi + b.sum {
        return Err(Error::InfeasiblePoint(format!("1ᵀx = {s} with budget [{lo}, {hi}]")));
    }
    Ok(Point { g: q.gradient(x), s, lo, hi, at_lo: (s - lo).abs() <= b.sum, at_hi: (s - hi).abs() <= b.sum })
}

fn kappa<T: Scalar, Q: PartitionQp<T> + ?Sized>(q: &Q, i: usize, j: usize) -> T {
    q.entry(i, i) + q.entry(j, j) - T::of(2.0) * q.entry(i, j)
}

fn pick_lambda<T: Scalar>(p: &Point<T>, x: &[T], b: &Bands<T>) -> T {
    if !p.at_lo && !p.at_hi {
        return T::zero();
    }
    let free: Vec<usize> = (0..x.len()).filter(|&i| x[i] > b.x && x[i] < T::one() - b.x).collect();
    if !free.is_empty() {
        let mean = free.iter().map(|&i| p.g[i]).sum::<T>() / T::of_usize(free.len());
        return -mean;
    }
    // λ >= −g_i on L, λ <= −g_i on U
    let mut a = T::neg_infinity();
    let mut c = T::infinity();
    for (i, &v) in x.iter().enumerate() {
        if v <= b.x {
            a = a.max(-p.g[i]);
        } else {
            c = c.min(-p.g[i]);
        }
    }
    if !(p.at_lo && p.at_hi) {
        if p.at_hi {
            a = a.max(T::zero());
        } else {
            c = c.min(T::zero());
        }
    }
    match (a.is_finite(), c.is_finite()) {
        (true, true) => (a + c) * T::of(0.5),
        (true, false) => a,
        (false, true) => c,
        (false, false) => T::zero(),
    }
}

/// KKT multipliers `(λ, μ)` with `μ = ∇f(x) + λ1`.
///
/// `λ = 0` when the budget is inactive. At an active budget `λ` is
/// `−mean(∇f_F)` when `F ≠ ∅`, and otherwise the midpoint of the interval
/// `[max_{i∈L} −∂_i f, min_{i∈U} −∂_i f]` clipped to the sign the active
/// bound allows.
pub fn multipliers<T: Scalar, Q: PartitionQp<T> + ?Sized>(q: &Q, x: &[T], tol: Tolerances) -> Result<(T, Vec<T>)> {
    let b = bands(q, tol);
    let p = point(q, x, &b)?;
    let lambda = pick_lambda(&p, x, &b);
    let mu = p.g.iter().map(|&g| g + lambda).collect();
    Ok((lambda, mu))
}

fn kkt_gap<T: Scalar>(x: &[T], p: &Point<T>, lambda: T, mu: &[T], b: &Bands<T>) -> T {
    let mut gap = T::zero();
    for (i, &m) in mu.iter().enumerate() {
        if x[i] > b.x && m > b.mu {
            gap = gap.max(m);
        }
        if x[i] < T::one() - b.x && m < -b.mu {
            gap = gap.max(-m);
        }
    }
    if lambda > b.mu && !p.at_hi {
        gap = gap.max(lambda);
    }
    if lambda < -b.mu && !p.at_lo {
        gap = gap.max(-lambda);
    }
    gap
}

/// `x` is feasible, `μ_i > 0 ⟹ x_i = 0`, `μ_i < 0 ⟹ x_i = 1`,
/// `λ > 0 ⟹ 1ᵀx = u` and `λ < 0 ⟹ 1ᵀx = l`, all within the tolerance bands.
pub fn check_first_order<T: Scalar, Q: PartitionQp<T> + ?Sized>(
    q: &Q,
    x: &[T],
    lambda: T,
    mu: &[T],
    tol: Tolerances,
) -> bool {
    let b = bands(q, tol);
    match point(q, x, &b) {
        Ok(p) if mu.len() == x.len() => kkt_gap(x, &p, lambda, mu, &b) == T::zero(),
        _ => false,
    }
}

/// Evaluates P1–P4 at a feasible `x` and records the first violation.
pub fn check_local_min<T: Scalar, Q: PartitionQp<T> + ?Sized>(
    q: &Q,
    x: &[T],
    tol: Tolerances,
) -> Result<KktAssessment<T>> {
    let b = bands(q, tol);
    let p = point(q, x, &b)?;
    let n = x.len();
    let lambda = pick_lambda(&p, x, &b);
    let mu: Vec<T> = p.g.iter().map(|&g| g + lambda).collect();

    let lower: Vec<usize> = (0..n).filter(|&i| x[i] <= b.x).collect();
    let upper: Vec<usize> = (0..n).filter(|&i| x[i] >= T::one() - b.x).collect();
    let free: Vec<usize> = (0..n).filter(|&i| x[i] > b.x && x[i] < T::one() - b.x).collect();
    let upper_zero: Vec<usize> = upper.iter().copied().filter(|&i| mu[i].abs() <= b.mu).collect();
    let lower_zero: Vec<usize> = lower.iter().copied().filter(|&i| mu[i].abs() <= b.mu).collect();
    let zero_gradient: Vec<usize> = (0..n).filter(|&i| p.g[i].abs() <= b.mu).collect();

    let gap = kkt_gap(x, &p, lambda, &mu, &b);
    let p1 = gap == T::zero();
    let mut witness = (!p1).then_some(Witness::Kkt { gap });

    let positive = |i: usize, j: usize| kappa(q, i, j) > b.mu;
    let mut p2 = true;
    'p2: for (a, &i) in free.iter().enumerate() {
        for &j in &free[a + 1..] {
            if positive(i, j) {
                p2 = false;
                witness.get_or_insert(Witness::P2 { i, j });
                break 'p2;
            }
        }
    }

    let groups = [&upper_zero, &lower_zero, &free];
    let mut p3 = true;
    'p3: for ga in 0..3 {
        for gb in (ga + 1)..3 {
            for &i in groups[ga].iter() {
                for &j in groups[gb].iter() {
                    if positive(i, j) {
                        p3 = false;
                        witness.get_or_insert(Witness::P3 { i, j });
                        break 'p3;
                    }
                }
            }
        }
    }

    let p4 = if p.lo < p.hi {
        let mut ok = true;
        if lambda.abs() <= b.mu {
            for &i in &zero_gradient {
                let case = if !p.at_lo && !p.at_hi {
                    Some(P4Case::Interior)
                } else if p.at_hi && x[i] > b.x {
                    Some(P4Case::AtUpper)
                } else if p.at_lo && x[i] < T::one() - b.x {
                    Some(P4Case::AtLower)
                } else {
                    None
                };
                if let Some(case) = case {
                    if q.entry(i, i) > b.mu {
                        ok = false;
                        witness.get_or_insert(Witness::P4 { i, case });
                        break;
                    }
                }
            }
        }
        Some(ok)
    } else {
        None
    };

    Ok(KktAssessment {
        lambda,
        mu,
        lower,
        upper,
        free,
        upper_zero,
        lower_zero,
        zero_gradient,
        p1,
        p2,
        p3,
        p4,
        witness,
    })
}

/// C1–C3 for a local minimizer `x`.
pub fn check_strict<T: Scalar, Q: PartitionQp<T> + ?Sized>(q: &Q, x: &[T], tol: Tolerances) -> Result<StrictAssessment> {
    let b = bands(q, tol);
    let p = point(q, x, &b)?;
    let n = x.len();
    let lower: Vec<usize> = (0..n).filter(|&i| x[i] <= b.x).collect();
    let upper: Vec<usize> = (0..n).filter(|&i| x[i] >= T::one() - b.x).collect();
    let c1 = lower.len() + upper.len() == n;
    let c2 = lower.iter().all(|&i| upper.iter().all(|&j| p.g[i] - p.g[j] > b.mu));
    let c3 = if p.lo < p.hi && kkt_gap(x, &p, T::zero(), &p.g, &b) == T::zero() {
        let zero: Vec<usize> = (0..n).filter(|&i| p.g[i].abs() <= b.mu).collect();
        zero.is_empty()
            || (p.at_hi && zero.iter().all(|&i| x[i] <= b.x))
            || (p.at_lo && zero.iter().all(|&i| x[i] >= T::one() - b.x))
    } else {
        true
    };
    Ok(StrictAssessment { c1, c2, c3 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// `d = sign · e_i`
    Single { i: usize, sign: i8 },
    /// `d = sign · (e_i − e_j)`
    Pair { i: usize, j: usize, sign: i8 },
}

impl Move {
    pub fn apply<T: Scalar>(&self, x: &[T], alpha: T) -> Vec<T> {
        let mut y = x.to_vec();
        match *self {
            Move::Single { i, sign } => y[i] += T::of(sign as f64) * alpha,
            Move::Pair { i, j, sign } => {
                let s = T::of(sign as f64) * alpha;
                y[i] += s;
                y[j] -= s;
            }
        }
        y
    }

    pub fn to_dense<T: Scalar>(&self, n: usize) -> Vec<T> {
        self.apply(&vec![T::zero(); n], T::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentStep<T> {
    pub direction: Move,
    /// Largest `α` keeping `x + αd` feasible.
    pub alpha_max: T,
}

fn single_cap<T: Scalar>(x: &[T], p: &Point<T>, i: usize, sign: i8) -> T {
    if sign > 0 {
        (T::one() - x[i]).min(p.hi - p.s).max(T::zero())
    } else {
        x[i].min(p.s - p.lo).max(T::zero())
    }
}

fn pair_cap<T: Scalar>(x: &[T], i: usize, j: usize, sign: i8) -> T {
    if sign > 0 {
        (T::one() - x[i]).min(x[j]).max(T::zero())
    } else {
        x[i].min(T::one() - x[j]).max(T::zero())
    }
}

/// A feasible descent move at `x`, or `None` when `x` is a local minimizer.
///
/// For P2/P3 witnesses `d = ±(e_i − e_j)`, for P4 witnesses `d = ±e_i`,
/// with the sign chosen so that `x + αd` stays feasible for small `α > 0`
/// (and, when both signs are feasible, so that `∇f·d <= 0`). When the
/// first-order conditions fail, the feasible move of either kind with the
/// most negative `∇f·d` is returned.
pub fn descent_direction<T: Scalar, Q: PartitionQp<T> + ?Sized>(
    q: &Q,
    x: &[T],
    assessment: &KktAssessment<T>,
    tol: Tolerances,
) -> Result<Option<DescentStep<T>>> {
    let b = bands(q, tol);
    let p = point(q, x, &b)?;
    let feasible_floor = b.x;
    let pair = |i: usize, j: usize| -> Option<DescentStep<T>> {
        let slope = p.g[i] - p.g[j];
        let mut best: Option<(T, DescentStep<T>)> = None;
        for sign in [1i8, -1] {
            let cap = pair_cap(x, i, j, sign);
            if cap > feasible_floor {
                let s = T::of(sign as f64) * slope;
                if best.as_ref().is_none_or(|(bs, _)| s < *bs) {
                    best = Some((s, DescentStep { direction: Move::Pair { i, j, sign }, alpha_max: cap }));
                }
            }
        }
        best.map(|(_, d)| d)
    };
    let single = |i: usize| -> Option<DescentStep<T>> {
        let mut best: Option<(T, DescentStep<T>)> = None;
        for sign in [1i8, -1] {
            let cap = single_cap(x, &p, i, sign);
            if cap > feasible_floor {
                let s = T::of(sign as f64) * p.g[i];
                if best.as_ref().is_none_or(|(bs, _)| s < *bs) {
                    best = Some((s, DescentStep { direction: Move::Single { i, sign }, alpha_max: cap }));
                }
            }
        }
        best.map(|(_, d)| d)
    };

    Ok(match assessment.witness {
        None => None,
        Some(Witness::P2 { i, j }) | Some(Witness::P3 { i, j }) => pair(i, j),
        Some(Witness::P4 { i, .. }) => single(i),
        Some(Witness::Kkt { .. }) => {
            let n = x.len();
            let mut best: Option<(T, DescentStep<T>)> = None;
            let mut consider = |step: Option<DescentStep<T>>| {
                if let Some(step) = step {
                    let slope = match step.direction {
                        Move::Single { i, sign } => T::of(sign as f64) * p.g[i],
                        Move::Pair { i, j, sign } => T::of(sign as f64) * (p.g[i] - p.g[j]),
                    };
                    if slope < -b.mu && best.as_ref().is_none_or(|(bs, _)| slope < *bs) {
                        best = Some((slope, step));
                    }
                }
            };
            for i in 0..n {
                consider(single(i));
                for j in (i + 1)..n {
                    consider(pair(i, j));
                }
            }
            best.map(|(_, d)| d)
        }
    })
}
