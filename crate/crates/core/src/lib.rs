//! Pseudospectral solver for `u_t + D_x^α u_x + H u_yy + u u_x = 0` on a
//! periodic box, with numerical checks of its dispersive, energy and
//! well-posedness estimates.

pub mod cli;
pub mod error;
pub mod estimates;
pub mod evolution;
pub mod experiments;
pub mod illposedness;
pub mod littlewood_paley;
pub mod propagator;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
