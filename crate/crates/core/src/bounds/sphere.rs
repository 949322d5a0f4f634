//! Enclosing spheres and the best affine underestimates they induce for
//! the concave term `−xᵀΛx`.

use super::shift::DcShift;
use crate::error::{Error, Result};
use crate::qp::FeasibleSet;
use crate::scalar::{dot, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Sphere<T> {
    pub center: Vec<T>,
    pub radius: T,
}

/// Smallest sphere containing the box `p <= x <= q`:
/// `c = (p + q)/2`, `r = ‖p − q‖/2`.
pub fn sphere_for_box<T: Scalar>(p: &[T], q: &[T]) -> Result<Sphere<T>> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    if let Some(i) = (0..p.len()).find(|&i| p[i] > q[i]) {
        return Err(Error::EmptySet(format!("box bounds cross at index {i}")));
    }
    let half = T::of(0.5);
    let center = p.iter().zip(q).map(|(&a, &b)| (a + b) * half).collect();
    let radius = p.iter().zip(q).map(|(&a, &b)| (b - a) * (b - a)).sum::<T>().sqrt() * half;
    Ok(Sphere { center, radius })
}

/// Sphere containing `Λ^{1/2}{0 <= x <= 1, 1ᵀx = b}`: the slice of the box
/// sphere of `Λ^{1/2}[0,1]ⁿ` by the hyperplane `yᵀλ^{-1/2} = b`.
pub fn sphere_for_box_hyperplane<T: Scalar>(lambda: &[T], b: T) -> Result<Sphere<T>> {
    let n = lambda.len();
    if let Some(i) = lambda.iter().position(|&l| !(l > T::zero())) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, lambda[{i}] = {}", lambda[i])));
    }
    let half = T::of(0.5);
    let inv_sum: T = lambda.iter().map(|&l| T::one() / l).sum();
    let offset = (b - half * T::of_usize(n)) / inv_sum;
    let center = lambda.iter().map(|&l| half * l.sqrt() + offset / l.sqrt()).collect();
    let lam_sum: T = lambda.iter().copied().sum();
    let r2 = T::of(0.25) * lam_sum - (b - half * T::of_usize(n)).powi(2) / inv_sum;
    let slack = T::epsilon() * T::of(64.0) * lam_sum.max(T::one());
    if r2 < -slack {
        return Err(Error::EmptySet(format!("hyperplane 1ᵀx = {b} misses the box")));
    }
    Ok(Sphere { center, radius: r2.max(T::zero()).sqrt() })
}

/// Affine function `ℓ(x) = slopeᵀx + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine<T> {
    pub slope: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Affine<T> {
    pub fn eval(&self, x: &[T]) -> T {
        dot(&self.slope, x) + self.offset
    }
}

/// Best affine underestimate of `−xᵀΛx` over a box `p <= x <= q`.
///
/// In the scaled variable `y = Λ^{1/2}x` the box stays a box whose smallest
/// sphere has `c_i = λ_i^{1/2}(p_i + q_i)/2`; the optimal underestimate
/// `−2cᵀy + ‖c‖² − r²` becomes `−Σ λ_i(p_i + q_i)x_i + Σ λ_i p_i q_i`,
/// i.e. `−λᵀx` on the unit box. Coordinates with `λ_i = 0` get zero slope.
///
/// With `exact_budget = Some(b)` (the set additionally satisfies `1ᵀx = b`)
/// the hyperplane-sphere construction gives the same function on the set,
/// so the box formula is returned after validating `b`.
pub fn affine_underestimate<T: Scalar>(
    shift: &DcShift<T>,
    set: &FeasibleSet<T>,
    exact_budget: Option<T>,
) -> Result<Affine<T>> {
    let n = set.dim();
    let lambda = shift.lambda(n);
    if let Some(b) = exact_budget {
        let (lo, hi) = (crate::scalar::sum(&set.lower), crate::scalar::sum(&set.upper));
        if b < lo || b > hi {
            return Err(Error::EmptySet(format!("budget {b} outside [{lo}, {hi}]")));
        }
    }
    let slope = (0..n).map(|i| -lambda[i] * (set.lower[i] + set.upper[i])).collect();
    let offset = (0..n).map(|i| lambda[i] * set.lower[i] * set.upper[i]).sum();
    Ok(Affine { slope, offset })
}

/// The literal hyperplane construction: `ℓ(x) = −λᵀx + ((n − 2b)/Σλ⁻¹)1ᵀx + ‖c'‖² − r'²`.
/// It agrees with `−λᵀx` whenever `1ᵀx = b`.
pub fn hyperplane_underestimate<T: Scalar>(lambda: &[T], b: T) -> Result<Affine<T>> {
    let sphere = sphere_for_box_hyperplane(lambda, b)?;
    let n = T::of_usize(lambda.len());
    let inv_sum: T = lambda.iter().map(|&l| T::one() / l).sum();
    let tilt = (n - T::of(2.0) * b) / inv_sum;
    let slope = lambda.iter().map(|&l| -l + tilt).collect();
    let offset = dot(&sphere.center, &sphere.center) - sphere.radius * sphere.radius;
    Ok(Affine { slope, offset })
}
