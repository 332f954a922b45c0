//! Centralized tolerances used by the library and its verification suites.
//!
//! Every threshold that a check asserts against lives here, with a note on
//! where it comes from. Checks never invent ad-hoc magic numbers inline.

/// Exact-arithmetic comparisons routed through f64 (a handful of rounding
/// steps on well-scaled values).
pub const EXACT_F64: f64 = 1e-10;

/// Orthogonality of rotation matrices: `R^T R = I` entrywise.
pub const ROTATION_ORTHO: f64 = 1e-10;

/// Coordinate-square sum of a unit quaternion.
pub const UNIT_NORM: f64 = 1e-12;

/// Symmetry gate for the eigensolver input (max |M - M^T| entry).
pub const SYMMETRY_GATE: f64 = 1e-8;

/// Off-diagonal Frobenius norm (relative to the matrix norm) at which the
/// cyclic Jacobi iteration stops.
pub const JACOBI_OFFDIAG: f64 = 1e-12;

/// Eigen residual `|M v - lambda v|` relative to the matrix norm, after the
/// Jacobi iteration converged.
pub const EIGEN_RESIDUAL: f64 = 1e-9;

/// Absolute joint-eigenvector residual accepted per Hecke level after
/// degenerate clusters were refined.
pub const JOINT_RESIDUAL: f64 = 1e-7;

/// Eigenvalue gap below which two Jacobi eigenvalues are treated as one
/// cluster during joint diagonalization.
pub const CLUSTER_GAP: f64 = 1e-6;

/// Residual for the Hecke composition law checked as matrices,
/// `T_r T_s = sum_{d | (r,s)} d T_{rs/d^2}` (max entry of the difference).
pub const COMPOSITION: f64 = 1e-8;

/// Commutator norm relative to the product of operator norms.
pub const COMMUTATOR_REL: f64 = 1e-8;

/// Asymmetry of a constructed Hecke matrix (max |M - M^T| entry).
pub const HECKE_ASYMMETRY: f64 = 1e-10;

/// Slack on the Deligne bound `|eigenvalue of T_p| <= 2 sqrt(p)` absorbing
/// floating-point construction error.
pub const DELIGNE_SLACK: f64 = 1e-6;

/// Residual of the multiplicative relation `eta(p)^2 - eta(p^2) = 1`.
pub const HECKE_RELATION: f64 = 1e-6;

/// Window mass: `integral of rho = 1` after normalization, re-integrated on
/// the cached grid by Simpson's rule.
pub const WINDOW_MASS: f64 = 1e-6;

/// Window evenness on the cached grid.
pub const WINDOW_EVEN: f64 = 1e-10;

/// Default relative tail threshold: the window is treated as zero once it
/// falls below this multiple of its peak. Sets the degree truncation of all
/// kernel sums.
pub const WINDOW_TAIL: f64 = 1e-14;

/// Relative agreement of the geometric and spectral kernel evaluations
/// (the pre-trace identity) and of the two amplified-sum pipelines.
pub const PRETRACE_REL: f64 = 1e-6;

/// Imaginary part allowed in the Hermitian amplified double sum, relative
/// to its magnitude.
pub const HERMITIAN_IMAG: f64 = 1e-9;

/// Unit-vector and argument clamping slop for inverse trigonometry.
pub const TRIG_CLAMP: f64 = 1e-12;

/// Relative accuracy of the grid-plus-polish sup-norm search on the tested
/// families (the estimate is always a lower bound on the true sup norm).
pub const SUPNORM_REL: f64 = 1e-3;

/// Monte-Carlo / quasi-random quadrature budget for L^2 mass checks.
pub const QUADRATURE_REL: f64 = 1e-2;
