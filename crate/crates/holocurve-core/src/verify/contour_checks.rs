//! Contour suite: harmonic exactness, spectral convergence, and the Cauchy
//! differential against the symbolic polynomial oracle.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{rand_cvector, CheckRow, VerifyConfig};
use crate::contour::{circle_integral, kth_differential, mean_value_check, ContourSpec};
use crate::error::Result;
use crate::lincomplex::{C64, CVector};
use crate::oracle::PolyField;

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn rows(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xC04705);

    // Harmonics: the normalized circle integral of zeta^k is [k = -1].
    let unit = ContourSpec::new(32, 1.0)?;
    for k in -8i32..=8 {
        let got = circle_integral(|z| Ok(CVector::new(vec![z.powi(k)])), &unit)?;
        let want = if k == -1 { 1.0 } else { 0.0 };
        let err = (got.get(0) - C64::new(want, 0.0)).norm();
        rows.push(CheckRow::le("circle_harmonic", format!("k={k}"), err, 1e-14));
    }

    // Spectral convergence on oint zeta^{-1} e^zeta d zeta = 1: the error is
    // the alias sum 1/m! + 1/(2m)! + ..., predicted exactly.
    for m in [8usize, 16, 32] {
        let spec = ContourSpec::new(m, 1.0)?;
        let got = circle_integral(|z| Ok(CVector::new(vec![z.exp() / z])), &spec)?;
        let err = (got.get(0) - C64::new(1.0, 0.0)).norm();
        let bound = 1.5 / factorial(m as u32) + 5e-15;
        rows.push(CheckRow::le("spectral_exp", format!("m={m}"), err, bound));
    }

    // Cauchy differentials of random polynomials against the symbolic
    // oracle; relative error with a small-denominator floor.
    let spec = ContourSpec::new(32, 0.75)?;
    for i in 0..cfg.kth_poly_cases {
        let dim = rng.random_range(1..=3);
        let poly = PolyField::random(&mut rng, dim, 5, 0, 5, 1.0);
        let x = rand_cvector(&mut rng, dim, 0.5);
        let k = if i % 10 == 9 { 0 } else { 1 + (i % 2) };
        let dirs: Vec<CVector> = (0..k).map(|_| rand_cvector(&mut rng, dim, 1.0)).collect();
        let numeric = kth_differential(|z| Ok(poly.eval(0.0, z)), &x, &dirs, &spec)?;
        let symbolic = match k {
            0 => poly.eval(0.0, &x),
            1 => poly.dir_derivative(0.0, &x, &dirs[0]),
            _ => poly.dir_derivative2(0.0, &x, &dirs[0], &dirs[1]),
        };
        let rel = numeric.sub(&symbolic).pnorm(2.0) / symbolic.pnorm(2.0).max(1e-3);
        rows.push(CheckRow::le(
            "kth_vs_symbolic",
            format!("case={i};k={k}"),
            rel,
            1e-10,
        ));
    }

    // Linearity in the direction, permutation symmetry, the Cauchy-Riemann
    // rotation, and radius invariance on a few fixed random polynomials.
    for i in 0..3 {
        let dim = rng.random_range(1..=3);
        let poly = PolyField::random(&mut rng, dim, 4, 0, 5, 1.0);
        let f = |z: &CVector| Ok(poly.eval(0.0, z));
        let x = rand_cvector(&mut rng, dim, 0.4);
        let u = rand_cvector(&mut rng, dim, 1.0);
        let v = rand_cvector(&mut rng, dim, 1.0);
        let (alpha, beta) = (C64::new(0.6, -0.3), C64::new(-0.2, 0.8));

        let lin_lhs = kth_differential(
            f,
            &x,
            std::slice::from_ref(&u.scale(alpha).axpy(beta, &v)),
            &spec,
        )?;
        let lin_rhs = kth_differential(f, &x, std::slice::from_ref(&u), &spec)?
            .scale(alpha)
            .add(&kth_differential(f, &x, std::slice::from_ref(&v), &spec)?.scale(beta));
        rows.push(CheckRow::le(
            "kth_linearity",
            format!("case={i}"),
            lin_lhs.sub(&lin_rhs).pnorm(2.0),
            1e-10,
        ));

        let uv = kth_differential(f, &x, &[u.clone(), v.clone()], &spec)?;
        let vu = kth_differential(f, &x, &[v.clone(), u.clone()], &spec)?;
        rows.push(CheckRow::le(
            "kth_symmetry",
            format!("case={i}"),
            uv.sub(&vu).pnorm(2.0),
            1e-10,
        ));

        let du = kth_differential(f, &x, std::slice::from_ref(&u), &spec)?;
        let diu = kth_differential(
            f,
            &x,
            std::slice::from_ref(&u.scale(C64::new(0.0, 1.0))),
            &spec,
        )?;
        rows.push(CheckRow::le(
            "cauchy_riemann_k1",
            format!("case={i}"),
            diu.sub(&du.scale(C64::new(0.0, 1.0))).pnorm(2.0),
            1e-12,
        ));

        let half = spec.with_radius(spec.radius() / 2.0)?;
        let dhalf = kth_differential(f, &x, std::slice::from_ref(&u), &half)?;
        rows.push(CheckRow::le(
            "radius_invariance",
            format!("case={i}"),
            du.sub(&dhalf).pnorm(2.0),
            1e-10,
        ));

        let mv = mean_value_check(f, &x, &u, &ContourSpec::new(32, 0.5)?)?;
        rows.push(CheckRow::le(
            "mean_value_entire",
            format!("case={i}"),
            mv,
            1e-13,
        ));
    }

    // Holomorphy-by-construction audit: every bundled (parsed) field passes
    // the order-zero Cauchy consistency at 20 random interior points.
    for (name, _) in crate::bundled::FIELDS {
        let field = crate::bundled::field(name)?;
        let iv = *field.domain().interval();
        let mut worst: f64 = 0.0;
        for j in 0..20 {
            let t = iv.lo() + (iv.hi() - iv.lo()) * (j as f64 + 0.5) / 20.0;
            let x = field
                .domain()
                .center()
                .add(&rand_cvector(&mut rng, field.dim(), 0.2 * field.domain().radius()));
            let u = rand_cvector(&mut rng, field.dim(), 1.0);
            let margin = field.domain().interior_margin(&x);
            let audit_spec =
                ContourSpec::new(32, 0.5 * margin / u.pnorm(field.domain().norm_p()))?;
            let defect = mean_value_check(|z: &CVector| field.eval(t, z), &x, &u, &audit_spec)?;
            worst = worst.max(defect);
        }
        rows.push(CheckRow::le(
            "field_holomorphy_audit",
            (*name).into(),
            worst,
            1e-10,
        ));
    }

    // The conjugation stub must be flagged: its closed-contour defect is on
    // the order of the radius.
    let radius = 0.5;
    let conj_defect = mean_value_check(
        |z: &CVector| Ok(CVector::new(vec![z.get(0).conj()])),
        &CVector::zero(1),
        &CVector::from_reals(&[1.0]),
        &ContourSpec::new(32, radius)?,
    )?;
    rows.push(CheckRow::ge(
        "mean_value_conj_detects",
        format!("radius={radius}"),
        conj_defect,
        radius / 2.0,
    ));

    Ok(rows)
}
