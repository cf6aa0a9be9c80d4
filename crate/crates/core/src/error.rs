use thiserror::Error;

/// Errors raised by the solvers and checkers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("shooting failure at y = {y:.6} (psi = {psi:.3e}, dpsi = {dpsi:.3e}, seed = {seed:.3e}, steps = {steps}): {reason}")]
    Shooting {
        reason: String,
        y: f64,
        psi: f64,
        dpsi: f64,
        seed: f64,
        steps: usize,
    },

    #[error("asymptotics fit failure: {0}")]
    AsymptoticsFit(String),

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("root bracketing failure: {0}")]
    Bracketing(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error(
        "newton iteration did not converge at tau = {tau:.6} after {halvings} step halvings (residual {residual:.3e})"
    )]
    NewtonDivergence { tau: f64, halvings: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("certification required: {0}")]
    Uncertified(String),

    #[error("no certified q up to cap {cap}: {details}")]
    NoCertifiedQ { cap: f64, details: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
