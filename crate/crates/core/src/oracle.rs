//! Exhaustive reference solver for small instances.

use crate::error::{Error, Result};
use crate::graph::{PartitionSpec, WeightedGraph};
use crate::scalar::Scalar;

/// Largest `n` the enumeration accepts.
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution<T> {
    pub value: T,
    pub x: Vec<T>,
    /// Number of feasible vectors visited.
    pub feasible_count: u64,
}

/// Minimum cut over all binary `x` with `l <= 1ᵀx <= u`, by Gray-code
/// enumeration with incremental cut updates.
///
/// Among minimizers the one with the smallest code `Σ x_i 2^i` is
/// returned, so the lowest-index vertices are preferred on the `x = 1` side.
pub fn brute_force<T: Scalar>(g: &WeightedGraph<T>, spec: PartitionSpec) -> Result<OracleSolution<T>> {
    if g.n() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n: g.n(), limit: BRUTE_FORCE_LIMIT });
    }
    brute_force_fixed(g, spec, &[])?.ok_or_else(|| Error::EmptySet("no binary vector meets the bounds".into()))
}

/// Like [`brute_force`] with some vertices pinned; `None` when no
/// completion meets the bounds. The free vertices are limited to
/// [`BRUTE_FORCE_LIMIT`] and the graph to 64 vertices.
pub fn brute_force_fixed<T: Scalar>(
    g: &WeightedGraph<T>,
    spec: PartitionSpec,
    fixed: &[(usize, bool)],
) -> Result<Option<OracleSolution<T>>> {
    let n = g.n();
    if spec.upper > n || spec.lower > spec.upper {
        return Err(Error::InvalidArgument(format!("bounds l = {}, u = {} for n = {n}", spec.lower, spec.upper)));
    }
    let mut side = vec![false; n];
    let mut pinned = vec![false; n];
    for &(v, b) in fixed {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, n });
        }
        side[v] = b;
        pinned[v] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !pinned[i]).collect();
    if free.len() > BRUTE_FORCE_LIMIT || n > 64 {
        return Err(Error::TooLarge { n: free.len().max(n.min(65)), limit: BRUTE_FORCE_LIMIT });
    }
    let adj: Vec<Vec<(usize, T)>> = (0..n).map(|i| g.neighbors(i)).collect();
    let tol = T::tol_floor(1e-9);

    let start: Vec<T> = side.iter().map(|&b| if b { T::one() } else { T::zero() }).collect();
    let mut cut = g.cut_weight(&start)?;
    let mut ones = side.iter().filter(|&&b| b).count();
    let mut code: u64 = (0..n).filter(|&i| side[i]).map(|i| 1u64 << i).sum();
    let mut best: Option<(T, u64)> = None;
    let mut feasible_count = 0u64;

    let total: u64 = 1 << free.len();
    for step in 0..total {
        if step > 0 {
            let v = free[step.trailing_zeros() as usize];
            // edges to the same side become cut, edges across stop being cut
            let mut delta = T::zero();
            for &(j, w) in &adj[v] {
                if side[j] == side[v] {
                    delta += w;
                } else {
                    delta -= w;
                }
            }
            cut += delta;
            side[v] = !side[v];
            code ^= 1 << v;
            if side[v] {
                ones += 1;
            } else {
                ones -= 1;
            }
        }
        if ones < spec.lower || ones > spec.upper {
            continue;
        }
        feasible_count += 1;
        let scale = T::one() + cut.abs();
        best = match best {
            None => Some((cut, code)),
            Some((bv, bc)) if cut < bv - tol * scale || ((cut - bv).abs() <= tol * scale && code < bc) => {
                Some((cut, code))
            }
            keep => keep,
        };
    }
    let Some((_, code)) = best else {
        return Ok(None);
    };
    let x: Vec<T> = (0..n).map(|i| if code >> i & 1 == 1 { T::one() } else { T::zero() }).collect();
    let value = g.cut_weight(&x)?;
    Ok(Some(OracleSolution { value, x, feasible_count }))
}
