//! Numerical laboratory for nonlocal (fractional) minimal surfaces.
//!
//! The crate evaluates fractional perimeters and mean curvatures of
//! rasterized sets with analytic far-field data, minimizes the nonlocal
//! graph-area functional in 1D and the set perimeter functional in 1D/2D,
//! and packages the classical annulus construction and the stickiness
//! experiments behind a configuration-driven front end.
//!
//! Module map:
//! - [`grid`]: uniform grids, shapes, rasterization, volumes
//! - [`kernel`]: singular-kernel pair weights and tables
//! - [`gs`]: the G and script-G profile tables for graph energies
//! - [`tail`]: analytic far-field models and their kernel integrals
//! - [`perimeter`]: fractional perimeter with local/nonlocal/tail split
//! - [`curvature`]: fractional mean curvature, numeric alpha, s-limits
//! - [`graph`]: 1D nonlocal graph minimization and stickiness gaps
//! - [`annulus`]: the classical annulus minimal graph (closed form + FD)
//! - [`set`]: binary perimeter minimization (min-cut, relaxation, brute)
//! - [`experiment`]: configs, reports, CSV/JSON emission, experiment runs

pub mod annulus;
pub mod curvature;
pub mod error;
pub mod experiment;
pub mod extrapolate;
pub mod graph;
pub mod grid;
pub mod gs;
pub mod kernel;
pub mod perimeter;
pub mod set;
pub mod tail;

pub use error::{Error, Result};

/// Surface area of the unit sphere in `R^n`: `H^{n-1}(boundary of B_1)`.
///
/// `omega(1) = 2` (two endpoints), `omega(2) = 2*pi`.
pub fn omega(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => panic!("only dimensions 1 and 2 are supported"),
    }
}
