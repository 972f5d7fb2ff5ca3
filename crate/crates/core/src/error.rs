use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant maps onto a stable upper-case code (see [`Error::code`]) and
/// onto one of the process exit classes used by the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("reflection coefficient denominator vanished for harmonic (n={n}, k={k}): |D| = {magnitude:e}")]
    DegenerateDenominator { n: u32, k: u32, magnitude: f64 },

    #[error(
        "harmonic series not converged at n_max={n_max}, k_max={k_max}: last band is {ratio:e} of the total (tolerance {tolerance:e})"
    )]
    NonConverged {
        n_max: u32,
        k_max: u32,
        ratio: f64,
        tolerance: f64,
    },

    #[error("at slip speed {rpm} rpm: {source}")]
    AtSpeed {
        rpm: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("layer system is singular: {0}")]
    SingularSystem(String),

    #[error("finite-difference extrapolation did not converge: estimated error {estimate:e} exceeds {tolerance:e}")]
    NoConvergence { estimate: f64, tolerance: f64 },

    #[error("oracle disagrees with the closed form: max relative error {max_relative_error:e} exceeds {tolerance:e}")]
    OracleMismatch {
        max_relative_error: f64,
        tolerance: f64,
    },

    #[error("test speed {test_speed} km/h must exceed the handover speed {handover_speed} km/h")]
    InvalidSpeeds {
        test_speed: f64,
        handover_speed: f64,
    },

    #[error("no grid cell keeps the minimum torque above the {target} N·m target")]
    EmptyFeasibleSet { target: f64 },

    #[error("uncalibrated torque at the reference point is zero; lambda cannot be fitted")]
    ZeroReference,

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("field `{field}`: {message}")]
    Unit { field: String, message: String },

    #[error("field `{field}`: {message}")]
    Range { field: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

/// Process exit classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Validation = 2,
    Numerical = 3,
    Io = 4,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::DegenerateDenominator { .. } => "DEGENERATE_DENOMINATOR",
            Error::NonConverged { .. } => "NON_CONVERGED",
            Error::AtSpeed { source, .. } => source.code(),
            Error::SingularSystem(_) => "SINGULAR_SYSTEM",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::OracleMismatch { .. } => "ORACLE_MISMATCH",
            Error::InvalidSpeeds { .. } => "INVALID_SPEEDS",
            Error::EmptyFeasibleSet { .. } => "EMPTY_FEASIBLE_SET",
            Error::ZeroReference => "ZERO_REFERENCE",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Unit { .. } => "UNIT_ERROR",
            Error::Range { .. } => "RANGE_ERROR",
            Error::Io { .. } => "IO_ERROR",
        }
    }

    pub fn exit_class(&self) -> ExitClass {
        match self {
            Error::InvalidInput(_)
            | Error::InvalidSpeeds { .. }
            | Error::Parse { .. }
            | Error::Unit { .. }
            | Error::Range { .. } => ExitClass::Validation,
            Error::AtSpeed { source, .. } => source.exit_class(),
            Error::Io { .. } => ExitClass::Io,
            Error::DegenerateDenominator { .. }
            | Error::NonConverged { .. }
            | Error::SingularSystem(_)
            | Error::NoConvergence { .. }
            | Error::OracleMismatch { .. }
            | Error::EmptyFeasibleSet { .. }
            | Error::ZeroReference => ExitClass::Numerical,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
