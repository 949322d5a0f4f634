//! Rounding a feasible fractional point to a binary one without increasing
//! the objective, by moving along `±e_i` and `e_i − e_j`, both directions of
//! nonpositive curvature for a partitioning quadratic.

use crate::error::{Error, Result};
use crate::qp::PartitionQp;
use crate::scalar::Scalar;

/// Values closer than this to 0 or 1 (and sums closer to an integer) count as integral.
pub const ROUNDING_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MoveKind {
    /// `x ← x + t e_i`
    Single { i: usize },
    /// `x ← x + t (e_i − e_j)`
    Pair { i: usize, j: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundingMove<T> {
    pub kind: MoveKind,
    pub step: T,
    pub before: T,
    pub after: T,
}

#[derive(Clone, Debug)]
pub struct Rounded<T> {
    pub x: Vec<T>,
    pub value: T,
    pub moves: Vec<RoundingMove<T>>,
}

fn near_int<T: Scalar>(v: T, tol: T) -> Option<T> {
    let r = v.round();
    ((v - r).abs() <= tol).then_some(r)
}

/// Rounds a feasible `x` to a binary point `x̄` with `f(x̄) <= f(x)`.
///
/// Phase one (sum of `x` fractional): take the lowest-index fractional
/// coordinate `i` and move it towards 1 if `∂f/∂x_i < 0`, towards 0
/// otherwise, stopping at the box face or when `1ᵀx` becomes an integer.
/// Phase two (integral sum): take the two lowest-index fractional
/// coordinates `i < j` and move along `±(e_i − e_j)`, with the sign making
/// the directional derivative nonpositive, until one of them hits a face.
pub fn round_to_binary<T: Scalar, Q: PartitionQp<T> + ?Sized>(q: &Q, x: &[T]) -> Result<Rounded<T>> {
    let n = q.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let tol = T::tol_floor(ROUNDING_TOL);
    let sum_tol = tol * T::of_usize(n.max(1));
    let (lo, hi) = q.budget();
    let s: T = x.iter().copied().sum();
    if x.iter().any(|&v| v < -tol || v > T::one() + tol) || s < T::of_i64(lo) - sum_tol || s > T::of_i64(hi) + sum_tol {
        return Err(Error::InfeasiblePoint(format!("rounding needs a feasible start, 1ᵀx = {s} with budget [{lo}, {hi}]")));
    }

    let mut x: Vec<T> = x.to_vec();
    let snap = |v: &mut T| {
        if let Some(r) = near_int(*v, tol) {
            *v = r;
        }
    };
    x.iter_mut().for_each(snap);
    let mut moves = Vec::new();
    let mut value = q.value(&x);

    loop {
        let frac: Vec<usize> = (0..n).filter(|&i| x[i] != T::zero() && x[i] != T::one()).collect();
        if frac.is_empty() {
            break;
        }
        let s: T = x.iter().copied().sum();
        let g = q.gradient(&x);
        let (kind, step) = match near_int(s, sum_tol) {
            None => {
                let i = frac[0];
                let step = if g[i] < T::zero() {
                    (T::one() - x[i]).min(s.ceil() - s)
                } else {
                    -(x[i].min(s - s.floor()))
                };
                (MoveKind::Single { i }, step)
            }
            Some(_) if frac.len() == 1 => {
                let i = frac[0];
                let before = value;
                x[i] = x[i].round();
                value = q.value(&x);
                moves.push(RoundingMove { kind: MoveKind::Single { i }, step: T::zero(), before, after: value });
                continue;
            }
            Some(_) => {
                let (i, j) = (frac[0], frac[1]);
                // t > 0 raises x_i and lowers x_j
                let step = if g[i] - g[j] < T::zero() {
                    (T::one() - x[i]).min(x[j])
                } else {
                    -(x[i].min(T::one() - x[j]))
                };
                (MoveKind::Pair { i, j }, step)
            }
        };
        let before = value;
        match kind {
            MoveKind::Single { i } => {
                x[i] += step;
                snap(&mut x[i]);
            }
            MoveKind::Pair { i, j } => {
                x[i] += step;
                x[j] -= step;
                snap(&mut x[i]);
                snap(&mut x[j]);
            }
        }
        // the coordinate that reached its limit is set exactly
        if let MoveKind::Single { i } = kind {
            let s_new: T = x.iter().copied().sum();
            if near_int(s_new, sum_tol).is_some() && x[i] != T::zero() && x[i] != T::one() {
                let drift = s_new - s_new.round();
                x[i] -= drift;
            }
        }
        value = q.value(&x);
        moves.push(RoundingMove { kind, step, before, after: value });
    }
    Ok(Rounded { x, value, moves })
}

/// `S = {i : x_i = 1}` for a binary `x`.
pub fn partition_from_binary<T: Scalar>(x: &[T]) -> Result<Vec<usize>> {
    crate::graph::check_binary(x, x.len())?;
    Ok((0..x.len()).filter(|&i| x[i] == T::one()).collect())
}
