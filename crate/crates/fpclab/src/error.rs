//! Crate-wide error type.
//!
//! Errors are `Clone` so sweep drivers can record a failed cell in its row
//! and keep going.

/// Everything that can go wrong across the numeric, analytic, simulation and
/// CLI layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Adaptive quadrature ran out of subdivisions. Carries the best estimate
    /// so a caller may still inspect it.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {estimate:e}, error bound {error_bound:e})"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    /// Root bracketing failed: f(lo) and f(hi) do not straddle zero.
    #[error("no sign change on bracket [{lo}, {hi}]: f(lo)={f_lo:e}, f(hi)={f_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// A fractional moment E[H^t] does not exist for the given model.
    #[error("divergent moment: E[H^{exponent}] does not exist for {model} fading")]
    DivergentMoment { model: String, exponent: f64 },

    /// The requested operating point is outside the feasible region
    /// (e.g. channel inversion with SNR/E[H^-1] <= beta).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Configuration rejected before any computation ran.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// Filesystem problem while writing artifacts.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI: 1 for validation-type failures,
    /// 2 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence { .. } => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
