//! Occupation identities, the derivative identity, empirical Hölder exponents,
//! and an ensemble probe of the derivative near `y = 0`.

mod holder;
mod occupation;
mod probe;
mod test_function;

pub use holder::{
    holder_exponent_estimate, simulate_alpha_time_field, simulate_space_field, theoretical_bound,
    Axis, Field, HolderReport, ProcessKind,
};
pub use occupation::{
    covering_grid, derivative_consistency, occupation_check_alpha, occupation_check_derivative,
    occupation_checks, DerivativeConsistency, OccupationCheck,
};
pub use probe::{continuity_probe_at_zero, ProbeRow, ProbeSetup};
pub use test_function::TestFunction;
