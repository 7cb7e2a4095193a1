use thiserror::Error;

/// Errors raised across the crate.
///
/// Domain failures of closed-form estimates (negative radicands, vanishing
/// denominators, wrong-sign preconditions) are kept distinct from numerical
/// failures of the simulation oracle so callers can tell "this set is not
/// defined here" apart from "the integrator gave up".
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("normal-form constants are degenerate: {0}")]
    InvalidConstants(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("root solver failed to converge: {0}")]
    SolverFailure(String),

    #[error("no secondary equilibria in this estimate (radicand {radicand:.3e} < 0)")]
    NotBifurcated { radicand: f64 },

    #[error("degenerate denominator in {0}")]
    DegenerateDenominator(&'static str),

    #[error("saddle-node branch is complex (radicand {radicand:.3e} < 0)")]
    ComplexBranch { radicand: f64 },

    #[error("outside the domain of the estimate: {0}")]
    Domain(String),

    #[error("no limit cycle for these coefficients: {0}")]
    NoCycle(String),

    #[error("integration step failed at t = {t:.6e} (step size underflow)")]
    StepFailure { t: f64 },

    #[error("trajectory diverged at t = {t:.6e}")]
    Divergence { t: f64 },

    #[error("no limit cycle found: {0}")]
    NoCycleFound(String),

    #[error("bisection bracket does not straddle the predicate: {0}")]
    BracketInvalid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that mean "the closed form is undefined at this point",
    /// as opposed to numerical or configuration failures.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::NotBifurcated { .. }
                | Error::DegenerateDenominator(_)
                | Error::ComplexBranch { .. }
                | Error::Domain(_)
                | Error::NoCycle(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
