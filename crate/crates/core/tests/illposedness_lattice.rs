//! The grid-free `f₃` quadrature against a discrete first Picard correction
//! on a lattice fine enough to resolve both rectangles.

use fbo2d::illposedness::{f3_hs_norm, lattice_box_norm, phi_on_lattice, PhiNSpec, QuadPanels};
use fbo2d::propagator::{picard_iterate, propagate};
use fbo2d::spectral::GridSpec;

#[test]
fn picard_correction_matches_quadrature() {
    let (alpha, t) = (0.5, 0.75);
    let spec = PhiNSpec::new(4.0, 0.05, alpha, 1.6).unwrap();
    // About 12 lattice points across each side of I₁; the 2/3 mask keeps the
    // whole f₃ box.
    let lx = 2.0 * std::f64::consts::PI / (spec.beta / 24.0);
    let ly = 2.0 * std::f64::consts::PI / (spec.height() / 12.0);
    let grid = GridSpec::new(1024, 128, lx, ly).unwrap();
    let phi = phi_on_lattice(&spec, grid);
    let second = picard_iterate(&phi, 1, t, alpha, 32).unwrap();
    let correction = second.sub(&propagate(&phi, t, alpha)).unwrap();
    let lattice = lattice_box_norm(&spec, &correction);
    let quad = f3_hs_norm(&spec, t, QuadPanels::default()).unwrap().norm;
    let rel = (lattice - quad).abs() / quad;
    assert!(rel < 0.05, "lattice {lattice} quadrature {quad} (rel {rel:.3e})");
}
