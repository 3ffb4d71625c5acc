//! chi suite: the entire-function example. The variation against the
//! contour derivative, fuzzed continuity and remainder bound chains (the
//! inequalities are theorems, so any failure is an implementation bug),
//! the unit-ball unboundedness witness, and the truncation and
//! difference-quotient properties.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{rand_cvector, CheckRow, VerifyConfig};
use crate::chifun::{
    chi, continuity_bound_check, dchi, remainder_bound_check, unboundedness_witness,
};
use crate::contour::{kth_differential, ContourSpec};
use crate::error::{Error, Result};
use crate::lincomplex::{C64, CVector};

pub fn rows(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xC41);

    // Variation against the contour derivative of chi (a field constant in
    // time, scalar output), relative error with a small-denominator floor.
    let spec = ContourSpec::new(64, 0.5)?;
    let chi_map = |z: &CVector| Ok(CVector::new(vec![chi(z)]));
    for i in 0..cfg.chi_dchi_samples {
        let x = rand_cvector(&mut rng, 16, 0.45);
        let u = rand_cvector(&mut rng, 16, 0.7);
        let numeric = kth_differential(chi_map, &x, std::slice::from_ref(&u), &spec)?;
        let symbolic = dchi(&x, &u);
        let rel = (numeric.get(0) - symbolic).norm() / symbolic.norm().max(1e-3);
        rows.push(CheckRow::le(
            "dchi_vs_contour",
            format!("sample={i}"),
            rel,
            1e-10,
        ));
    }

    // Exact complex linearity of the variation in u.
    let x = rand_cvector(&mut rng, 16, 0.5);
    let u = rand_cvector(&mut rng, 16, 0.8);
    let rot = C64::new(0.0, 1.0);
    let cr = (dchi(&x, &u.scale(rot)) - rot * dchi(&x, &u)).norm();
    rows.push(CheckRow::le("dchi_cauchy_riemann", "exact".into(), cr, 0.0));

    // Continuity bound fuzz: |u| < 1/8 enforced by rescaling.
    for i in 0..cfg.chi_continuity_samples {
        let p = if i % 2 == 0 { 2.0 } else { 1.0 };
        let x = rand_cvector(&mut rng, 32, 0.35);
        let raw = rand_cvector(&mut rng, 32, 1.0);
        let target = rng.random_range(1e-4..0.1249f64);
        let u = raw.scale(C64::new(target / raw.pnorm(p), 0.0));
        let check = continuity_bound_check(&x, &u, p)?;
        if !check.ok {
            return Err(Error::Parameter(format!(
                "continuity bound failed on sample {i}: lhs {} > rhs {}",
                check.lhs, check.rhs
            )));
        }
        rows.push(CheckRow::le(
            "chi_continuity_bound",
            format!("sample={i};p={p}"),
            check.lhs,
            check.rhs,
        ));
    }

    // Remainder bound fuzz.
    for i in 0..cfg.chi_remainder_samples {
        let x = rand_cvector(&mut rng, 16, 0.3);
        let u = rand_cvector(&mut rng, 16, 0.3);
        let eps = rng.random_range(0.1..1.0f64);
        let check = remainder_bound_check(&x, &u, 2.0, eps)?;
        rows.push(CheckRow::le(
            "chi_remainder_bound",
            format!("sample={i};eps={eps:.3}"),
            check.worst_ratio,
            1.0,
        ));
    }

    // Unboundedness witness inside the open unit ball.
    let (wx, wval) = unboundedness_witness(30.0, 100)?;
    rows.push(CheckRow::ge(
        "witness_value",
        "target=30;n=100".into(),
        wval.re,
        30.0,
    ));
    let norm_max = wx.pnorm(1.0).max(wx.pnorm(2.0));
    rows.push(CheckRow::le(
        "witness_inside_unit_ball",
        "p in 1 and 2".into(),
        norm_max,
        1.0 - 1e-12,
    ));
    match unboundedness_witness(1e6, 100) {
        Err(Error::WitnessUnreachable {
            suggested_dimension,
            ..
        }) => {
            rows.push(CheckRow::le(
                "witness_suggested_dimension",
                "target=1e6".into(),
                (suggested_dimension as f64 - 2_718_283.0).abs(),
                0.0,
            ));
        }
        other => {
            return Err(Error::Parameter(format!(
                "witness at target 1e6, n=100 should be unreachable, got {other:?}"
            )))
        }
    }

    // Truncation monotonicity: padding with zeros never moves chi.
    let mut trunc_gap: f64 = 0.0;
    for _ in 0..20 {
        let x = rand_cvector(&mut rng, 24, 0.8);
        let mut padded = x.entries().to_vec();
        padded.extend(std::iter::repeat(C64::new(0.0, 0.0)).take(8));
        trunc_gap = trunc_gap.max((chi(&x) - chi(&CVector::new(padded))).norm());
    }
    rows.push(CheckRow::le(
        "chi_truncation_monotone",
        "n=24 vs 32".into(),
        trunc_gap,
        0.0,
    ));

    // The difference quotient converges to dchi at first order along a
    // dyadic sequence: each halving of t must cut the error by at least a
    // quarter once past the first step.
    let x = rand_cvector(&mut rng, 12, 0.4);
    let u = rand_cvector(&mut rng, 12, 0.4);
    let d = dchi(&x, &u);
    let mut worst_ratio: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for j in 0..8 {
        let t = C64::new(0.1 * 0.5f64.powi(j), 0.0);
        let err = ((chi(&x.axpy(t, &u)) - chi(&x)) / t - d).norm();
        if j > 0 {
            worst_ratio = worst_ratio.max(err / prev);
        }
        prev = err;
    }
    rows.push(CheckRow::le(
        "chi_quotient_linear_decay",
        "dyadic t".into(),
        worst_ratio,
        0.75,
    ));

    Ok(rows)
}
