use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The ODE integrator could not make progress.
    #[error("ODE solver failed to converge at x = {x} for k = {k}")]
    Nonconvergence { x: f64, k: Complex64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("zero of the function on or near the contour at k = {at}")]
    ZeroOnContour { at: Complex64 },

    #[error("adaptive quadrature did not converge ({0})")]
    Quadrature(String),

    #[error("winding number {value} is not close to an integer")]
    NonIntegerWinding { value: f64 },

    #[error("zero search budget exhausted in region {region:?}")]
    Budget { region: [f64; 4] },

    #[error("zero count mismatch: contour says {expected}, harvest found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("internal consistency violated: {0}")]
    Inconsistency(String),

    #[error("logarithmic derivative has a pole at k = {k}")]
    Pole { k: Complex64 },

    #[error("function vanishes to high order at the origin")]
    HighOrderVanishing,

    #[error("conjugation symmetry violated: {0}")]
    SymmetryViolation(String),

    #[error("not applicable: {0}")]
    Inapplicable(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Nonconvergence { .. }
                | Error::ZeroOnContour { .. }
                | Error::Quadrature(_)
                | Error::NonIntegerWinding { .. }
                | Error::Budget { .. }
                | Error::CountMismatch { .. }
        )
    }
}
