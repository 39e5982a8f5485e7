//! Crate-wide error type.
//!
//! Variants are grouped by failure class so the CLI can map them onto its
//! exit-code contract: usage/validation errors, numeric failures, and I/O.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside a function's domain (poles, strips, ranges).
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact integer arithmetic exceeded 128-bit signed range.
    #[error("integer overflow computing coefficient a({n})")]
    Overflow { n: usize },

    /// A coefficient table failed an eigenform invariant.
    #[error("invalid coefficient table: {0}")]
    InvalidCoefficients(String),

    /// More Fourier coefficients are required than the table holds.
    #[error("insufficient coefficients: need a(1..{required}), table holds a(1..{available})")]
    InsufficientCoefficients { required: usize, available: usize },

    /// An iterative method exhausted its iteration budget.
    #[error("no convergence in {context} after {iterations} iterations")]
    NoConvergence { context: String, iterations: usize },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error(
        "quadrature failed over [{a}, {b}]: est_error {est_error:.3e} > tol {tol:.3e} \
         with {panels} panels"
    )]
    Quadrature {
        a: f64,
        b: f64,
        est_error: f64,
        tol: f64,
        panels: usize,
    },

    /// Evaluation too close to a pole of an auxiliary function.
    #[error("argument within {distance:.3e} of the pole at Gram index {index}")]
    PoleProximity { index: i64, distance: f64 },

    /// The monotonicity certificate for the phase function failed.
    #[error("monotonicity certificate failed at t = {t}: theta'(t) = {theta_prime:.3e}")]
    MonotonicityCertificate { t: f64, theta_prime: f64 },

    /// Root bracketing failed while solving for a Gram point.
    #[error("failed to bracket Gram point v = {v} in [{lo}, {hi}]")]
    BracketFailure { v: i64, lo: f64, hi: f64 },

    /// A computed result failed its own a-posteriori check.
    #[error("numeric check failed: {0}")]
    Numeric(String),

    /// Invalid configuration value.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit-code class used by the CLI: 2 usage, 3 numeric.
    pub fn exit_class(&self) -> u8 {
        match self {
            Error::Domain(_)
            | Error::InvalidCoefficients(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
