//! Contour dynamics of layered vortex patches.
//!
//! The vorticity is `1` on `D₁ \ D̄₂` and `α` on `D₂`, where `D₂ ⊂ D₁` are
//! Jordan domains bounded by [`Contour`]s. The crate evaluates Cauchy
//! transforms of such domains, the induced velocity, rigid-rotation residuals
//! on both interfaces, and evolves the boundaries in time.

pub mod cauchy;
pub mod contours;
pub mod error;
pub mod evolve;
pub mod field;
pub mod inverse;
pub mod rotation;
pub mod scalar;
pub mod solver;

pub use contours::{Contour, EllipseSpec, Orientation, Side};
pub use error::{Error, Result};

pub use num_complex::Complex64;
