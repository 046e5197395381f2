use thiserror::Error;

use crate::grid::Support;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected support {expected}, found {found:?}")]
    Support { expected: &'static str, found: Support },

    #[error("functions are not combinable: {0}")]
    NotCombinable(String),

    #[error("step count {steps} is not divisible by block width {block}")]
    Divisibility { steps: usize, block: usize },

    #[error("t = {t} lies outside [{a}, {b}]")]
    Domain { t: f64, a: f64, b: f64 },

    #[error("evaluation failed at node {node} (t = {t}): {reason}")]
    Evaluation { node: usize, t: f64, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid polynomial data: {0}")]
    InvalidPolynomial(String),

    #[error("segment degree would exceed 3")]
    DegreeOverflow,

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular Newton matrix")]
    Singular,

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate Lagrangian at step {step}: the discrete Legendre map is not invertible")]
    Degenerate { step: usize },

    #[error("analytic partial {which} disagrees with finite differences at (t={t}, x={x:?}, v={v:?})")]
    PartialMismatch { which: &'static str, t: f64, x: Vec<f64>, v: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
