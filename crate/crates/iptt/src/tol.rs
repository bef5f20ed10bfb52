//! Numerical tolerances, pinned in one place.
//!
//! Relative tolerances are taken against the larger operand norm with an
//! absolute floor so zero-matrix comparisons stay meaningful.

/// Relative deviation allowed for a computed unitary (`||U*U - I||`).
pub const TOL_UNITARY: f64 = 1e-9;

/// Relative reconstruction error allowed for eigen/singular decompositions.
pub const TOL_RECON: f64 = 1e-9;

/// Margin by which spectra must stay inside the open unit disk.
pub const TOL_DISK: f64 = 1e-12;

/// Absolute tolerance for Ky Fan partial-sum dominance comparisons.
pub const TOL_DOM: f64 = 1e-10;

/// Default relative tolerance for the normality test.
pub const TOL_NORMAL: f64 = 1e-9;

/// Relative tolerance below which inequality margins count as violations:
/// a violation is `margin < -TOL_INEQ_REL * max(1, rhs)`.
pub const TOL_INEQ_REL: f64 = 1e-9;

/// Absolute floor for relative comparisons near zero.
pub const ABS_FLOOR: f64 = 1e-14;

/// Relative bound on how negative an eigenvalue of a matrix claimed PSD
/// may be before the claim is rejected.
pub const TOL_PSD_NEG: f64 = 1e-9;

/// Relative threshold under which PSD eigenvalues are clipped to zero, so
/// fractional and zeroth powers act only on the numerical support.
pub const TOL_PSD_CLIP: f64 = 1e-12;

/// Hermitian-defect tolerance used when verifying field flags.
pub const TOL_HERMITIAN: f64 = 1e-10;

/// Pairwise commutator tolerance used when verifying field flags.
pub const TOL_COMMUTE: f64 = 1e-10;

/// Weight-sum tolerance for probability fields and Herglotz atoms.
pub const TOL_WEIGHT_SUM: f64 = 1e-12;

/// Agreement required between the two independent transformer-norm routes.
pub const TOL_HS_IDENTITY: f64 = 1e-8;

/// Relative agreement required between exact Korkine-type identities.
pub const TOL_IDENTITY: f64 = 1e-10;
