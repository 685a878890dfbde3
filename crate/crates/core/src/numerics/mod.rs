//! Small dense kernels used by the physics layers.
//!
//! Everything here is sized for desk-scale problems (chains of at most a few
//! dozen resonators), so no blocking or sparse storage is attempted.

mod eigen;
mod geometry;
mod linsolve;
mod matrix;
mod winding;

pub use eigen::{eigh_tridiagonal, TridiagonalEigen};
pub use geometry::{cross, dot, norm, normalized, solid_angle, Vec3};
pub use linsolve::solve_complex;
pub use matrix::{ComplexMatrix, TridiagonalSym};
pub use winding::{principal_value, unwrap_winding, Winding, MAX_PHASE_STEP};
