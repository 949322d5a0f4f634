//! Lower bounds: DC shifts, sphere underestimates and convex relaxations.

mod relaxation;
mod shift;
mod sphere;

pub use relaxation::{build_relaxation, certified_lower_bound, greedy_linear_min, ConvexRelaxation};
pub use shift::{
    sdp_shift, sigma_shift, solve_min_trace_sdp, DcShift, PsdCertificate, SdpOptions, SdpSolve, ShiftKind,
    SIGMA_RELATIVE_MARGIN,
};
pub use sphere::{
    affine_underestimate, hyperplane_underestimate, sphere_for_box, sphere_for_box_hyperplane, Affine, Sphere,
};
