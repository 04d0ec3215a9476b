//! Numerical thresholds shared across the crate.

/// Relative singular-value cutoff used for rank decisions.
pub const RANK: f64 = 1e-10;
/// Orthonormality defect tolerated in stored bases.
pub const ORTHO: f64 = 1e-12;
/// Projector distance below which two subspaces are identified.
pub const DEDUP: f64 = 1e-9;
/// Distance below which comb atoms are merged.
pub const MERGE: f64 = 1e-12;
/// Hermiticity defect (relative to max entry) accepted by the spectral solvers.
pub const HERMITIAN: f64 = 1e-8;
/// Angle below which a direction counts as lying in an excluded subspace.
pub const DIRECTION_ANGLE: f64 = 1e-3;
