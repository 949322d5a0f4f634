//! Upper bounds from relaxation points: descend on the nonconvex objective,
//! round to a binary point, and use descent directions to escape binary
//! points that are stationary but not locally minimal.

use super::node::Incumbent;
use crate::error::Result;
use crate::optimality::{check_local_min, descent_direction, Tolerances};
use crate::projgrad::{descend_nonconvex, SolveOptions};
use crate::qp::PartitionQp;
use crate::rounding::round_to_binary;
use crate::scalar::Scalar;

/// Binary feasible point with value no larger than `f(x)` for the feasible
/// start `x`.
pub fn improve_from<T: Scalar, Q: PartitionQp<T> + ?Sized>(
    q: &Q,
    x: &[T],
    opts: SolveOptions,
    rounds: usize,
) -> Result<Incumbent<T>> {
    let set_lo = T::of_i64(q.budget().0);
    let set_hi = T::of_i64(q.budget().1);
    let set = crate::qp::FeasibleSet::unit(q.dim(), set_lo, set_hi)?;
    let tol = Tolerances::default();

    let mut start = x.to_vec();
    let mut best: Option<Incumbent<T>> = None;
    for _ in 0..rounds.max(1) {
        let desc = descend_nonconvex(q, &set, &start, opts)?;
        let rounded = round_to_binary(q, &desc.x)?;
        let y = rounded.x;
        let value = q.value(&y);
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(Incumbent { x: y.clone(), value });
        } else if best.is_some() {
            break;
        }
        let assessment = check_local_min(q, &y, tol)?;
        if assessment.is_local_min() {
            break;
        }
        match descent_direction(q, &y, &assessment, tol)? {
            Some(step) => {
                let mut next = step.direction.apply(&y, step.alpha_max);
                for v in next.iter_mut() {
                    *v = v.max(T::zero()).min(T::one());
                }
                start = next;
            }
            None => break,
        }
    }
    Ok(best.expect("at least one round"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random, PartitionSpec};
    use crate::qp::{make_qp, Quadratic};

    #[test]
    fn never_worse_than_start() {
        for seed in 0..20 {
            let g = gen_random::<f64>(12, 0.4, seed).unwrap();
            let q = make_qp(&g, PartitionSpec::bisection(12)).unwrap();
            let x = vec![0.5; 12];
            let inc = improve_from(&q, &x, SolveOptions::default(), 5).unwrap();
            assert!(inc.value <= q.value(&x) + 1e-9);
            assert_eq!(inc.x.iter().sum::<f64>(), 6.0);
            assert_eq!(inc.value, g.cut_weight(&inc.x).unwrap());
        }
    }
}
