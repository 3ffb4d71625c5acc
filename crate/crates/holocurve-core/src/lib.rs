//! Numerical contour calculus for holomorphic vector fields on C^n, at desk
//! scale: Cauchy-formula differentials by circle quadrature, the
//! superposition operator (x, y) -> x o [id, y] with its contour-computed
//! partials, Picard solution of y' = phi o [id, y] with a certified
//! contraction condition, Frechet derivatives of the solution map through
//! the variational equation, and an entire-function testbed on truncated
//! l^p with executable bound chains.

pub mod chifun;
pub mod contour;
pub mod error;
pub mod exec;
pub mod fieldexpr;
pub mod lincomplex;
pub mod odesolve;
pub mod oracle;
pub mod superpose;
pub mod verify;

pub mod bundled;

pub use error::{Error, Result};
pub use lincomplex::{C64, CVector, Curve, DomainBox, Grid, Interval};
