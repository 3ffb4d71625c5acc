//! Bundled example fields with closed-form solutions.
//!
//! These are the cases the verification suites and the CLI fall back on;
//! each has an exact solution usable as an independent oracle. Sources are
//! in the field-file grammar so the same files exercise the parser.

use crate::error::{Error, Result};
use crate::fieldexpr::{parse_field_file, Field};
use crate::lincomplex::C64;
use crate::odesolve::Certify;

/// (name, field-file source) of every bundled field.
pub const FIELDS: &[(&str, &str)] = &[
    ("linear", include_str!("../fields/linear.field")),
    ("affine", include_str!("../fields/affine.field")),
    ("riccati", include_str!("../fields/riccati.field")),
    ("rotation2", include_str!("../fields/rotation2.field")),
    ("tlinear", include_str!("../fields/tlinear.field")),
];

pub struct BundledCase {
    pub name: &'static str,
    pub field: Field,
    pub xi: Vec<C64>,
    pub certify: Certify,
    /// Exact solution of y' = phi o [id, y], y(t0) = xi.
    pub exact: fn(f64) -> Vec<C64>,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn exact_linear(t: f64) -> Vec<C64> {
    vec![re((0.5 * t).exp())]
}

fn exact_affine(t: f64) -> Vec<C64> {
    vec![re(1.4 * (0.25 * t).exp() - 0.4)]
}

fn exact_riccati(t: f64) -> Vec<C64> {
    vec![re(0.5 / (1.0 - 0.5 * t))]
}

fn exact_rotation2(t: f64) -> Vec<C64> {
    vec![re(t.cos()), re(t.sin())]
}

fn exact_tlinear(t: f64) -> Vec<C64> {
    vec![re((t * t / 2.0).exp())]
}

/// Parse one bundled field by name.
pub fn field(name: &str) -> Result<Field> {
    let src = FIELDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            Error::Parameter(format!(
                "unknown bundled field '{name}' (available: {})",
                FIELDS
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })?;
    parse_field_file(src)
}

/// All bundled cases with their initial data and oracles.
pub fn cases() -> Vec<BundledCase> {
    let make = |name: &'static str, xi: Vec<C64>, certify: Certify, exact: fn(f64) -> Vec<C64>| {
        BundledCase {
            name,
            field: field(name).expect("bundled fields parse"),
            xi,
            certify,
            exact,
        }
    };
    vec![
        make("linear", vec![re(1.0)], Certify::Require, exact_linear),
        make("affine", vec![re(1.0)], Certify::Require, exact_affine),
        make("riccati", vec![re(0.5)], Certify::Force, exact_riccati),
        make(
            "rotation2",
            vec![re(1.0), re(0.0)],
            Certify::Require,
            exact_rotation2,
        ),
        make("tlinear", vec![re(1.0)], Certify::Require, exact_tlinear),
    ]
}
