use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// ξ = [[I, η], [ηᵗ, I]] is not positive definite.
    #[error("invalid correlation matrix: {reason} (sigma_max = {sigma_max})")]
    InvalidCorrelation { sigma_max: f64, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{threshold:e}")]
    NotPsd { eigenvalue: f64, threshold: f64 },

    #[error("{algorithm} did not converge after {iterations} iterations (n = {dimension})")]
    NoConvergence {
        algorithm: &'static str,
        iterations: usize,
        dimension: usize,
    },

    #[error("singular block: {0}")]
    SingularBlock(&'static str),

    #[error("no sign change of the contour equation on ray at angle {angle}")]
    RootNotBracketed { angle: f64 },

    #[error("square-root branch check failed at angle {angle} (residuals {principal:e}, {flipped:e})")]
    BranchError {
        angle: f64,
        principal: f64,
        flipped: f64,
    },

    #[error("resolvent is singular at psi = {re} + {im}i")]
    SingularResolvent { re: f64, im: f64 },

    #[error("contour self-intersects between segments {first} and {second}")]
    SelfIntersecting { first: usize, second: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate contour: polygon area {area:e}")]
    DegenerateContour { area: f64 },

    #[error("{} realization(s) failed: {}", failures.len(), summarize(failures))]
    Ensemble { failures: Vec<(usize, Error)> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn summarize(failures: &[(usize, Error)]) -> String {
    failures
        .iter()
        .map(|(i, e)| format!("#{i}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// True for failures of an iterative numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. }
            | Error::RootNotBracketed { .. }
            | Error::BranchError { .. }
            | Error::SingularResolvent { .. }
            | Error::SelfIntersecting { .. }
            | Error::SingularBlock(_)
            | Error::NotPsd { .. } => true,
            Error::Ensemble { failures } => failures.iter().all(|(_, e)| e.is_numerical()),
            _ => false,
        }
    }
}
