use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("stereographic projection is singular at the north pole")]
    Pole,

    #[error("field is not normalized: integral of e^u is {mass}, expected 1")]
    Gauge { mass: f64 },

    #[error("non-integrable tail: fitted decay rate {beta:.6} does not exceed {threshold:.6}")]
    DivergentMass { beta: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} contains non-finite values")))
    }
}
