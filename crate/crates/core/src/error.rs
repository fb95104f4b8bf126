use std::fmt;

/// Error type shared by every module.
///
/// `code()` is a stable machine-readable tag; `exit_status()` maps the error
/// onto the CLI convention (2 = configuration, 3 = numerical).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("integrator instability: minimum eigenvalue {min_eigenvalue:e} below -1e-6, reduce dt")]
    IntegratorInstability { min_eigenvalue: f64 },
    #[error("spectral singularity at omega = {omega}: nearest Liouvillian eigenvalue {eigenvalue}")]
    SpectralSingularity { omega: f64, eigenvalue: Eigenvalue },
    #[error("inconclusive integration: tail remainder {remainder:e} exceeds tolerance {tolerance:e}")]
    InconclusiveIntegration { remainder: f64, tolerance: f64 },
    #[error("heating instability: gamma_p + A_minus - A_plus = {denominator:e} <= 0")]
    HeatingInstability { denominator: f64 },
    #[error("phonon truncation overflow: tail probability {tail:e} at N_max = {n_max}")]
    TruncationOverflow { n_max: usize, tail: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource cap exceeded: {what} = {requested} > {cap}")]
    Resource { what: &'static str, requested: usize, cap: usize },
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// A complex Liouvillian eigenvalue, printed as `re+imi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e}{:+.6e}i", self.re, self.im)
    }
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Argument(_) => "argument",
            Error::Config(_) => "config",
            Error::Unsupported(_) => "unsupported_configuration",
            Error::Precondition(_) => "precondition",
            Error::Structural(_) => "structural",
            Error::IntegratorInstability { .. } => "integrator_instability",
            Error::SpectralSingularity { .. } => "spectral_singularity",
            Error::InconclusiveIntegration { .. } => "inconclusive_integration",
            Error::HeatingInstability { .. } => "heating_instability",
            Error::TruncationOverflow { .. } => "truncation_overflow",
            Error::Domain(_) => "domain",
            Error::Resource { .. } => "resource",
            Error::LinearAlgebra(_) => "linear_algebra",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub fn exit_status(&self) -> i32 {
        match self {
            Error::Argument(_)
            | Error::Config(_)
            | Error::Unsupported(_)
            | Error::Precondition(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
