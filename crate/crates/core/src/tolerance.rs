//! Default numeric tolerances. Algebraic identities are always checked exactly.

/// Commuting squares and other pointwise map identities.
pub const COMMUTING: f64 = 1e-10;
/// Nondegeneracy of determinants and top-degree coefficients.
pub const NONDEGENERATE: f64 = 1e-9;
/// Symbolic versus finite-difference derivatives.
pub const DERIVATIVE: f64 = 1e-6;
/// Singular-value threshold for numeric rank.
pub const RANK: f64 = 1e-8;
/// `|b|^2 = 1` and `|a| = 1` for twists.
pub const UNIT: f64 = 1e-10;
/// Rotation-invariance probe for radial-squared inputs.
pub const INVARIANCE: f64 = 1e-8;
/// Difference-quotient mismatch flagging a non-smooth point.
pub const SMOOTHNESS: f64 = 1e-2;
/// Step for central finite differences.
pub const FD_STEP: f64 = 1e-4;
