//! Periodic-box discretization: grid, unitary-scaled transforms, multipliers
//! and norms.

pub(crate) mod fft;
mod field;
mod grid;
mod ops;
mod snapshot;

pub use field::{forward_transform, inverse_transform, RealField, SpectralField, HERMITIAN_TOL};
pub use grid::{s_alpha, GridSpec, SobolevIndex};
pub use ops::{
    abs_pow, apply_bessel, apply_dx_alpha, apply_dy_delta, apply_hilbert_x, apply_multiplier,
    dealias_mask, dx, dy, grad_inf, grid_product, padded_product, sgn, sobolev_norm, sup_norms,
    sup_norms_spectral, SupNorms,
};
pub(crate) use ops::apply_real;
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, Snapshot};
