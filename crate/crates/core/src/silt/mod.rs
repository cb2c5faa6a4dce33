//! Pathwise estimators of the mollified self-intersection local time and its
//! derivatives, the local-time route, and `eps -> 0` extrapolation.

mod estimator;
mod extrapolate;
mod grid;
mod local_time;
mod pairs;
mod region;

pub use estimator::{
    alpha_eps, alpha_prime_eps, alpha_tilde_prime_eps, default_epsilon_ladder, estimate,
    pair_integral, renormalized_alpha_prime, EstimatorKind, SiltEstimate,
};
pub use extrapolate::epsilon_extrapolate;
pub use grid::{alpha_time_field, grid_estimates, GridEstimates, YGrid};
pub use local_time::{
    alpha_via_local_time, alpha_via_local_time_snapped, default_bin_width, local_time,
    LocalTimeProfile, SnappedAlpha,
};
pub use region::{Rect, Region};
