//! Exact local-model kernel for symplectic and contact cutting.
//!
//! The crate works on two local models: the half model `D^d x S^1 x [0, eps)`
//! carrying a free circle action in `theta`, and the disc model `D^d x D^2`
//! obtained by collapsing the boundary circles. Functions and forms are kept
//! as exact polynomials in `x`, `s^(1/2)` and `e^(i theta)` (resp. `z`, `zbar`)
//! with coefficients in `Q(i)`, so every algebraic identity is checked without
//! rounding. Numeric checks (ranks, commuting squares, smoothness probes) use
//! `f64` with fixed tolerances.

pub mod blowup;
pub mod cutting;
pub mod error;
pub mod expr;
pub mod forms;
pub mod funcalg;
pub mod rational;
pub mod tolerance;
pub mod verify;

pub use error::{CutError, Result};
