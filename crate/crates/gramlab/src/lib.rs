//! Numerical laboratory for Hecke L-functions of level-one eigenforms.
//!
//! The crate evaluates the L-function attached to a weight-`k` Hecke
//! eigenform for the full modular group on and near its critical line
//! `Re(s) = k/2`, together with the surrounding analytic apparatus:
//!
//! - [`coeffs`]: exact Fourier coefficients (built-in Ramanujan tau for
//!   weight 12, other weights via JSON ingestion) with eigenform
//!   invariant checks.
//! - [`special`]: holomorphic complex log-gamma, digamma and upper
//!   incomplete gamma.
//! - [`lfunc`]: the functional-equation factor and its holomorphic
//!   logarithm, the phase function `theta`, and L / Hardy-type Z
//!   evaluation from the completed-integral representation.
//! - [`gram`]: Gram points `theta(t_v) = v*pi` with certified residuals.
//! - [`gramlaw`]: windowed weighted/unweighted Z-sums at Gram points,
//!   the cumulative sum `S(T)`, and Gram-interval sign scans.
//! - [`verify`]: numerical replay of the contour-residue identity, the
//!   auxiliary cotangent/tangent functions and their residues, and
//!   stationary-phase diagnostics for the oscillatory integral `I(n)`.
//! - [`cli`]: configuration and report plumbing behind the `gramlab`
//!   binary.
//!
//! Every evaluation is pure; contexts are immutable and shareable across
//! threads. Batch reductions use compensated summation in a fixed order,
//! so reports are identical across thread counts.

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod gram;
pub mod gramlaw;
pub mod ksum;
pub mod lfunc;
pub mod quad;
pub mod special;
pub mod verify;

pub use error::{Error, Result};

/// Complex double-precision value used throughout the crate.
pub type Complex = num_complex::Complex64;
