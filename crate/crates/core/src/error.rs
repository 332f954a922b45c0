use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An exact integer operation left the i64 range.
    #[error("arithmetic overflow in exact integer computation")]
    ArithmeticOverflow,

    /// A zero quaternion (or other degenerate input) where a direction is needed.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// Structure constants failed validation (squarefree / sign conditions).
    #[error("invalid algebra constants (a, b) = ({a}, {b}): {reason}")]
    InvalidAlgebra { a: i64, b: i64, reason: &'static str },

    /// A matrix expected to be a rotation is not orthogonal with det +1.
    #[error("matrix is not a rotation (orthogonality or determinant check failed)")]
    InvalidRotation,

    /// A matrix expected symmetric is not, beyond tolerance.
    #[error("matrix is not symmetric within {tol:e} (max asymmetry {found:e})")]
    NotSymmetric { tol: f64, found: f64 },

    /// Jacobi sweeps failed to reduce the off-diagonal norm.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {offdiag:e})")]
    EigenNoConvergence { sweeps: usize, offdiag: f64 },

    /// A Hecke level with no lattice points (n not congruent to 1 mod 4).
    #[error("empty Hecke level n = {0} (levels must be 1 mod 4)")]
    EmptyLevel(u64),

    /// Joint diagonalization left a cluster with residual above tolerance.
    #[error(
        "joint eigenbasis degeneracy unresolved at k = {k}: residual {residual:e} \
         for level {level} exceeds {tol:e}"
    )]
    DegeneracyUnresolved { k: u32, level: u64, residual: f64, tol: f64 },

    /// Window support half-width outside (0, 1].
    #[error("window support half-width {0} outside (0, 1]")]
    WindowParam(f64),

    /// kernel_offdiag called on the diagonal.
    #[error("off-diagonal kernel requires 0 < theta <= pi (got {0})")]
    ThetaOutOfRange(f64),

    /// A point that must lie in the upper half plane does not.
    #[error("point must have positive imaginary part (got {0})")]
    NotInUpperHalfPlane(f64),

    /// The enumeration box for hyperbolic counting could not be certified.
    #[error("enumeration bound overflow: {0}")]
    EnumerationBoundOverflow(String),

    /// A bound fit needs variation in the counts.
    #[error("degenerate counting profile: all counts equal ({0})")]
    DegenerateProfile(u64),

    /// A counting profile with too few rows for fitting.
    #[error("profile has {0} rows; at least {1} required")]
    ProfileTooSmall(usize, usize),

    /// Eigendata does not contain a required Hecke level.
    #[error("eigendata is missing Hecke level {0}")]
    MissingLevel(u64),

    /// Eigendata does not cover a required harmonic degree.
    #[error("eigendata is missing degree k = {0} inside the window support")]
    MissingDegree(u32),

    /// No admissible prime enters the amplifier support.
    #[error("no admissible prime p = 1 mod 4 with p^2 <= N = {0}")]
    NoAdmissiblePrimes(u64),

    /// Amplifier form index out of range.
    #[error("form index {index} out of range for degree k = {k} (dimension {dim})")]
    FormIndexOutOfRange { k: u32, index: usize, dim: usize },

    /// K-type weight outside |l| <= k.
    #[error("K-type weight l = {l} exceeds degree k = {k}")]
    WeightOutOfRange { k: u32, l: i32 },

    /// Sup-norm grid below the Nyquist-style resolution floor.
    #[error("grid resolution {res} below 4k = {needed} for degree k")]
    UnderResolved { res: u32, needed: u32 },

    /// Exponent fit needs enough distinct samples.
    #[error("exponent fit needs at least {needed} samples with distinct eigenvalues (got {got})")]
    InsufficientSamples { got: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
