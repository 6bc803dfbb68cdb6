//! Numerical tolerances shared by the library and its tests.

/// Hermiticity, positivity, trace and unitarity checks.
pub const ALGEBRAIC: f64 = 1e-10;
/// Round trips through tensor products and partial traces.
pub const ROUND_TRIP: f64 = 1e-12;
/// Randomized operator-algebra properties (lifting, composition).
pub const PROPERTY: f64 = 1e-9;
/// POVM completeness on the truncated single-mode space.
pub const COMPLETENESS: f64 = 1e-12;
/// Outcome probabilities below this cannot be conditioned on.
pub const MIN_PROBABILITY: f64 = 1e-14;
/// Absolute tolerance for fidelity comparisons.
pub const FIDELITY: f64 = 1e-9;
