//! The entire function chi(x) = sum_i i x_i^i on truncated l^p, its
//! variation, an unboundedness witness on the open unit ball, and the two
//! quantitative bound chains as executable inequalities.
//!
//! Indices run over 0..n; the i = 0 term is identically zero. Both bound
//! checks compute the cutoff N as the least index past which every entry is
//! below 1/8 in modulus (N = 0 for small inputs, where the head sum is
//! empty and only the tail bound remains).

use crate::error::{Error, Result};
use crate::lincomplex::{C64, CVector};

/// chi(x) = sum_{i >= 1} i x_i^i.
pub fn chi(x: &CVector) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 1..x.dim() {
        acc += (i as f64) * x.get(i).powu(i as u32);
    }
    acc
}

/// The variation delta chi (x; u) = sum_{i >= 1} i^2 x_i^{i-1} u_i.
pub fn dchi(x: &CVector, u: &CVector) -> C64 {
    assert_eq!(x.dim(), u.dim(), "dimension mismatch");
    let mut acc = C64::new(0.0, 0.0);
    for i in 1..x.dim() {
        let coeff = (i * i) as f64;
        acc += coeff * x.get(i).powu((i - 1) as u32) * u.get(i);
    }
    acc
}

/// Witness that chi is unbounded on the open unit ball: the vector
/// x = (1 - 1/i) e_i for the smallest index i < n with i (1 - 1/i)^i above
/// `target`, together with chi(x). Every l^p norm of the witness is below 1.
pub fn unboundedness_witness(target: f64, n: usize) -> Result<(CVector, C64)> {
    for i in 1..n {
        let base = 1.0 - 1.0 / i as f64;
        let value = i as f64 * base.powi(i as i32);
        if value > target {
            let x = CVector::scaled_basis(n, i, C64::new(base, 0.0));
            let chi_x = chi(&x);
            return Ok((x, chi_x));
        }
    }
    // i (1 - 1/i)^i tends to i / e from below, so the first sufficient
    // index sits just past e * target.
    Err(Error::WitnessUnreachable {
        target,
        dimension: n,
        suggested_dimension: (std::f64::consts::E * target).ceil() as usize + 1,
    })
}

/// Least N such that |x_i| < 1/8 for every i >= N.
fn tail_cutoff(xs: &[&CVector]) -> usize {
    let mut n = 0;
    for x in xs {
        for i in 0..x.dim() {
            if x.get(i).norm() >= 0.125 {
                n = n.max(i + 1);
            }
        }
    }
    n
}

#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// The continuity estimate at x:
/// `|chi(x+u) - chi(x)| <= |u| (N^3 M^{N-2} + 2^{3-N} (1+N))` with
/// `M = 1 + |x|`, under the standing assumption `|u| < 1/8`.
pub fn continuity_bound_check(x: &CVector, u: &CVector, p: f64) -> Result<BoundCheck> {
    assert_eq!(x.dim(), u.dim(), "dimension mismatch");
    let u_norm = crate::lincomplex::norm(p, u)?;
    if u_norm >= 0.125 {
        return Err(Error::Parameter(format!(
            "continuity bound needs |u| < 1/8, got {u_norm}"
        )));
    }
    let n_cut = tail_cutoff(&[x]) as f64;
    let m = 1.0 + x.pnorm(p);
    let head = n_cut.powi(3) * m.powf(n_cut - 2.0);
    let tail = 2f64.powf(3.0 - n_cut) * (1.0 + n_cut);
    let rhs = u_norm * (head + tail);
    let lhs = (chi(&x.add(u)) - chi(x)).norm();
    Ok(BoundCheck {
        lhs,
        rhs,
        ok: lhs <= rhs,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct RemainderCheck {
    pub delta: f64,
    pub worst_ratio: f64,
    pub ok: bool,
}

/// The difference-quotient remainder
/// `Delta(t) = sum_i i |t^{-1}((x_i + t u_i)^i - x_i^i) - i x_i^{i-1} u_i|`.
pub fn chi_remainder(x: &CVector, u: &CVector, t: C64) -> f64 {
    assert_eq!(x.dim(), u.dim(), "dimension mismatch");
    let mut acc = 0.0;
    for i in 1..x.dim() {
        let xi = x.get(i);
        let ui = u.get(i);
        let quotient = ((xi + t * ui).powu(i as u32) - xi.powu(i as u32)) / t;
        let linear = (i as f64) * xi.powu((i - 1) as u32) * ui;
        acc += (i as f64) * (quotient - linear).norm();
    }
    acc
}

/// The remainder estimate: with `M = 1 + |x| + |u|` and the cutoff N taken
/// over both x and u, the radius
/// `delta = min(1, M^{-2} (N^3 M^N + 2^7 (1+N))^{-1} eps)`
/// guarantees `Delta(t) < eps` for `0 < |t| < delta`. Sampled on 8
/// directions at moduli delta/2 and delta/4.
pub fn remainder_bound_check(x: &CVector, u: &CVector, p: f64, eps: f64) -> Result<RemainderCheck> {
    assert_eq!(x.dim(), u.dim(), "dimension mismatch");
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!(
            "remainder bound needs eps > 0, got {eps}"
        )));
    }
    let n_cut = tail_cutoff(&[x, u]) as f64;
    let m = 1.0 + crate::lincomplex::norm(p, x)? + crate::lincomplex::norm(p, u)?;
    let denom = n_cut.powi(3) * m.powf(n_cut) + 128.0 * (1.0 + n_cut);
    let delta = 1f64.min(eps / (m * m * denom));
    let mut worst = 0.0f64;
    for &modulus in &[delta / 2.0, delta / 4.0] {
        for k in 0..8 {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
            let t = C64::new(modulus * angle.cos(), modulus * angle.sin());
            worst = worst.max(chi_remainder(x, u, t));
        }
    }
    let worst_ratio = worst / eps;
    Ok(RemainderCheck {
        delta,
        worst_ratio,
        ok: worst_ratio < 1.0,
    })
}
