use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Inputs were rejected before any numerics ran (bad shapes, bad data, parse errors).
    Validation,
    /// A numerical stage failed or its post-check did not hold.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("spectral radius {rho} is not below 1")]
    SpectralRadius { rho: f64 },
    #[error("{0} is not Hermitian positive semidefinite")]
    NotPsd(&'static str),
    #[error("{0} is not Hermitian")]
    NotHermitian(&'static str),
    #[error("pencil has no finite positive eigenvalue")]
    DegeneratePencil,
    #[error("denominator has a root of modulus {modulus} inside or on the unit circle")]
    UnstableDenominator { modulus: f64 },
    #[error("linear system is singular: {0}")]
    SingularSystem(String),
    #[error("interpolation point {0} listed more than once")]
    DuplicatePoint(String),
    #[error("interpolation point {0} is not inside the open unit disc")]
    PointOutsideDisc(String),
    #[error("two generated interpolation points coincide")]
    AngleCollision,
    #[error("pair (A, B) is not reachable (sigma_min/sigma_max = {ratio:e})")]
    NotReachable { ratio: f64 },
    #[error("evaluation point is numerically a pole")]
    NearPole,
    #[error("scalar function is not analytic in the closed unit disc")]
    UnstableF,
    #[error("covariance is not a feasible state covariance (relative residual {residual:e})")]
    StructureViolation { residual: f64 },
    #[error("state-Markov vector is zero")]
    ZeroMarkov,
    #[error("optimizer denominator has an uncancelled root of modulus {modulus}")]
    UnstableOptimizer { modulus: f64 },
    #[error("xi*B vanishes; the reduced realization is undefined")]
    XiBZero,
    #[error("model is not stable")]
    UnstableModel,
    #[error("model domain does not match the operation")]
    DomainMismatch,
    #[error("bilinear map is singular for this model and period")]
    SingularBilinear,
    #[error("no samples remain after the burn-in period")]
    EmptyAfterBurnIn,
    #[error("eigen-decomposition did not converge")]
    NoConvergence,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Dimension(_)
            | Error::NonFinite(_)
            | Error::InvalidArgument(_)
            | Error::NotPsd(_)
            | Error::NotHermitian(_)
            | Error::DuplicatePoint(_)
            | Error::PointOutsideDisc(_)
            | Error::AngleCollision
            | Error::NotReachable { .. }
            | Error::StructureViolation { .. }
            | Error::ZeroMarkov
            | Error::DomainMismatch
            | Error::EmptyAfterBurnIn
            | Error::Parse { .. }
            | Error::Io(_) => Category::Validation,
            _ => Category::Numerical,
        }
    }

    /// Short machine-readable tag for the variant.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SpectralRadius { .. } => "spectral_radius",
            Error::NotPsd(_) => "not_psd",
            Error::NotHermitian(_) => "not_hermitian",
            Error::DegeneratePencil => "degenerate_pencil",
            Error::UnstableDenominator { .. } => "unstable_denominator",
            Error::SingularSystem(_) => "singular_system",
            Error::DuplicatePoint(_) => "duplicate_point",
            Error::PointOutsideDisc(_) => "point_outside_disc",
            Error::AngleCollision => "angle_collision",
            Error::NotReachable { .. } => "not_reachable",
            Error::NearPole => "near_pole",
            Error::UnstableF => "unstable_f",
            Error::StructureViolation { .. } => "structure_violation",
            Error::ZeroMarkov => "zero_markov",
            Error::UnstableOptimizer { .. } => "unstable_optimizer",
            Error::XiBZero => "xib_zero",
            Error::UnstableModel => "unstable_model",
            Error::DomainMismatch => "domain_mismatch",
            Error::SingularBilinear => "singular_bilinear",
            Error::EmptyAfterBurnIn => "empty_after_burn_in",
            Error::NoConvergence => "no_convergence",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}
