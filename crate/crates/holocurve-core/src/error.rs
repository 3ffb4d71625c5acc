//! Error taxonomy shared by every module.
//!
//! The variants map onto the CLI exit classes: parameter/parse errors are
//! configuration class, domain and degenerate-domain errors are domain
//! class, and non-convergence / uncertified contraction are convergence
//! class.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied value is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Expression or field-file syntax error with source position.
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// A point left the field's domain box. Carries the time coordinate and
    /// how far outside the state component was.
    #[error("domain error: {msg} (t = {t}, distance outside = {distance:.6e})")]
    Domain { msg: String, t: f64, distance: f64 },

    /// A construction that needs interior room found none (graph touching
    /// the boundary, zero safety radius, ...).
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    /// An integrand produced a non-finite value at a quadrature node.
    #[error("evaluation error at quadrature node {node}: {detail}")]
    Evaluation { node: usize, detail: String },

    /// Fixed-point iteration did not reach the tolerance.
    #[error(
        "no convergence after {iterations} iterations \
         (last step {last_diff:.3e}, observed ratio {ratio:.3})"
    )]
    NonConvergence {
        iterations: usize,
        last_diff: f64,
        ratio: f64,
    },

    /// The contraction condition failed on every ladder rung and the caller
    /// did not force the solve.
    #[error(
        "contraction condition not certified: sup-bound {sup_bound:.6e} \
         must be below {needed:.6e} for some tube radius <= {b1_max:.6e}"
    )]
    NotCertified {
        b1_max: f64,
        sup_bound: f64,
        needed: f64,
    },

    /// No coordinate index below the truncation dimension reaches the
    /// requested witness target.
    #[error(
        "witness target {target} unreachable at dimension {dimension}; \
         smallest sufficient dimension is about {suggested_dimension}"
    )]
    WitnessUnreachable {
        target: f64,
        dimension: usize,
        suggested_dimension: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
