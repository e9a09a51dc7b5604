//! Numerical checks of the linear dispersive estimates, the commutator and
//! product inequalities, and the oscillatory integral behind the decay bound.

pub mod commutators;
pub mod ensemble;
pub mod line;
pub mod linear;
pub mod oscillatory;

pub use commutators::{kato_ponce_ratio, leibniz_ratio, skew_adjoint_residual};
pub use ensemble::{draw_seed, ensemble_protocol};
pub use line::{random_line, Line};
pub use linear::{
    box_traversal_time, cor33_exponent, cor33_ratio, decay_ratio, decay_sweep, low_xi_fraction,
    refined_strichartz_check, refined_summary, strichartz_lhs, strichartz_ratio, zero_x_mean, AdmissiblePair,
    DecaySetup, RefinedStrichartz,
};
pub use oscillatory::{lambda_budget, oscillatory_integral, oscillatory_j, JValue};
