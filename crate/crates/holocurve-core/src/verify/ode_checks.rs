//! ODE suite: Picard against closed forms and RK4, the contraction
//! condition on constant fields, local Lipschitz bounds, the continuity
//! probe for the operator curve, and the solution-map derivative against
//! central complex difference quotients.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{rand_cvector, CheckRow, VerifyConfig};
use crate::bundled;
use crate::error::Result;
use crate::fieldexpr::{parse_field, Field};
use crate::lincomplex::{C64, CVector, Curve, DomainBox, Grid, Interval};
use crate::odesolve::{
    a_hat_continuity_probe, antiderivative, condition_p, lipschitz_bound, picard_solve,
    rk4_solve, solution_map_derivative, Certify, PicardOptions, TubeSampling,
};
use crate::oracle::PolyField;
use crate::superpose::superpose;

fn field_on(src: &str, n: usize, t0: f64, a: f64, center: &[f64], radius: f64) -> Result<Field> {
    let iv = Interval::new(t0, a)?;
    let dom = DomainBox::new(iv, CVector::from_reals(center), radius, 2.0)?;
    Field::new(parse_field(src, n)?, dom)
}

fn bundled_rows(cfg: &VerifyConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    for case in bundled::cases() {
        let opts = PicardOptions {
            grid_size: cfg.grid_size,
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            certify: case.certify,
            contour: cfg.contour,
            sampling: TubeSampling::default(),
        };
        let xi = CVector::new(case.xi.clone());
        let report = picard_solve(&case.field, &xi, &opts)?;

        let mut err: f64 = 0.0;
        for (k, &t) in report.solution.grid().nodes().iter().enumerate() {
            let exact = CVector::new((case.exact)(t));
            err = err.max(report.solution.value(k).sub(&exact).pnorm(2.0));
        }
        let exact_bound = if case.name == "linear" { 1e-10 } else { 1e-8 };
        rows.push(CheckRow::le(
            "picard_vs_exact",
            case.name.into(),
            err,
            exact_bound,
        ));
        rows.push(CheckRow::le(
            "picard_residual",
            case.name.into(),
            report.residual,
            10.0 * cfg.tol,
        ));

        let rk4 = rk4_solve(&case.field, &xi, 400, cfg.grid_size)?;
        let gap = report.solution.sub(&rk4).sup_norm(2.0);
        rows.push(CheckRow::le(
            "picard_vs_rk4",
            case.name.into(),
            gap,
            1e-8f64.max(10.0 * cfg.tol),
        ));

        let c = report.solution.grid().center_index();
        let ic_err = report.solution.value(c).sub(&xi).pnorm(2.0);
        rows.push(CheckRow::le(
            "initial_condition_exact",
            case.name.into(),
            ic_err,
            0.0,
        ));

        if report.condition_ok {
            rows.push(CheckRow::le(
                "picard_ratio_vs_contraction",
                case.name.into(),
                report.observed_ratio,
                report.contraction + 0.05,
            ));
        }
    }
    Ok(())
}

fn condition_rows(rows: &mut Vec<CheckRow>) -> Result<()> {
    // Constant field on a unit ball: B1_max = 0.9, A = 0.5, so the predicate
    // holds exactly when the fraction A|c| / B1_max is below one half.
    let grid = Grid::new(Interval::new(0.0, 0.5)?, 33)?;
    let sampling = TubeSampling::default();
    for f in [0.2, 0.4, 0.45, 0.49, 0.51, 0.55, 0.6, 0.9] {
        let c = 1.8 * f; // A |c| = f * B1_max
        let phi = field_on(&format!("{c}"), 1, 0.0, 0.5, &[0.0], 1.0)?;
        let (ok, _) = condition_p(&phi, &CVector::zero(1), &grid, &sampling)?;
        rows.push(CheckRow::matches(
            "condition_p_constant",
            format!("fraction={f}"),
            ok,
            f < 0.5,
        ));
    }
    Ok(())
}

fn quadrature_rows(rows: &mut Vec<CheckRow>) -> Result<()> {
    let g = Grid::new(Interval::new(0.0, 1.0)?, 41)?;
    let lin = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));
    let integral = antiderivative(&lin);
    let mut err: f64 = 0.0;
    for (k, &t) in g.nodes().iter().enumerate() {
        err = err.max((integral.value(k).get(0) - C64::new(t * t / 2.0, 0.0)).norm());
    }
    rows.push(CheckRow::le("antiderivative_quadratic", "v=t".into(), err, 1e-12));

    let cubic = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t * t * t]));
    let integral = antiderivative(&cubic);
    let mut err: f64 = 0.0;
    for (k, &t) in g.nodes().iter().enumerate() {
        err = err.max((integral.value(k).get(0) - C64::new(t.powi(4) / 4.0, 0.0)).norm());
    }
    rows.push(CheckRow::le("antiderivative_cubic", "v=t^3".into(), err, 1e-13));
    Ok(())
}

fn lipschitz_rows(cfg: &VerifyConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let spec = cfg.contour;

    let lin = field_on("0.7*z0", 1, 0.0, 0.5, &[0.0], 3.0)?;
    let b = lipschitz_bound(&lin, 0.0, &CVector::from_reals(&[1.0]), 0.05, &spec)?;
    rows.push(CheckRow::le(
        "lipschitz_linear",
        "lambda=0.7".into(),
        (b - 0.7).abs() / 0.7,
        0.05,
    ));

    let cst = field_on("0.9", 1, 0.0, 0.5, &[0.0], 3.0)?;
    let b = lipschitz_bound(&cst, 0.1, &CVector::zero(1), 0.1, &spec)?;
    rows.push(CheckRow::le("lipschitz_constant_field", "c=0.9".into(), b, 1e-10));

    let sq = field_on("z0^2", 1, 0.0, 0.5, &[1.0], 3.0)?;
    let b = lipschitz_bound(&sq, 0.0, &CVector::from_reals(&[1.0]), 0.02, &spec)?;
    rows.push(CheckRow::le(
        "lipschitz_square",
        "xi=1".into(),
        (b - 2.0).abs() / 2.0,
        0.10,
    ));
    Ok(())
}

fn probe_rows(cfg: &VerifyConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let spec = cfg.contour;
    let xi = CVector::from_reals(&[1.0]);

    let lin = field_on("0.5*z0", 1, 0.0, 0.5, &[1.0], 3.0)?;
    let g = Grid::new(*lin.domain().interval(), 33)?;
    let probe = a_hat_continuity_probe(&lin, &Curve::constant(g.clone(), xi.clone()), &spec)?;
    rows.push(CheckRow::le(
        "a_hat_probe_constant_coefficient",
        "m=33".into(),
        probe,
        1e-11,
    ));

    let tfield = field_on("t*z0", 1, 0.0, 0.5, &[1.0], 3.0)?;
    let coarse = a_hat_continuity_probe(&tfield, &Curve::constant(g.clone(), xi.clone()), &spec)?;
    let h = g.spacing();
    rows.push(CheckRow::le(
        "a_hat_probe_matches_spacing",
        format!("h={h}"),
        (coarse - h).abs() / h,
        1.0,
    ));

    let g2 = Grid::new(*tfield.domain().interval(), 65)?;
    let fine = a_hat_continuity_probe(&tfield, &Curve::constant(g2, xi), &spec)?;
    rows.push(CheckRow::le(
        "a_hat_probe_refinement",
        "ratio-0.5".into(),
        (fine / coarse - 0.5).abs(),
        0.125,
    ));
    Ok(())
}

fn variational_closed_form_rows(cfg: &VerifyConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let phi = field_on("0.5*z0", 1, 0.0, 0.5, &[1.0], 3.0)?;
    let xi = CVector::from_reals(&[1.0]);
    let opts = PicardOptions {
        grid_size: cfg.grid_size,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        certify: Certify::Require,
        contour: cfg.contour,
        sampling: TubeSampling::default(),
    };
    let base = picard_solve(&phi, &xi, &opts)?;

    let v = solution_map_derivative(
        &phi,
        &base.solution,
        &CVector::from_reals(&[1.0]),
        None,
        &cfg.contour,
        cfg.tol,
        cfg.max_iter,
    )?;
    let mut err: f64 = 0.0;
    for (k, &t) in v.grid().nodes().iter().enumerate() {
        err = err.max((v.value(k).get(0) - C64::new((0.5 * t).exp(), 0.0)).norm());
    }
    rows.push(CheckRow::le(
        "variational_linear_dxi",
        "lambda=0.5".into(),
        err,
        1e-7,
    ));

    let dphi = phi.with_expr(parse_field("0.3*z0", 1)?)?;
    let v = solution_map_derivative(
        &phi,
        &base.solution,
        &CVector::zero(1),
        Some(&dphi),
        &cfg.contour,
        cfg.tol,
        cfg.max_iter,
    )?;
    let mut err: f64 = 0.0;
    for (k, &t) in v.grid().nodes().iter().enumerate() {
        let want = 0.3 * t * (0.5 * t).exp();
        err = err.max((v.value(k).get(0) - C64::new(want, 0.0)).norm());
    }
    rows.push(CheckRow::le(
        "variational_linear_dphi",
        "mu=0.3".into(),
        err,
        1e-7,
    ));
    Ok(())
}

fn solution_map_rows(cfg: &VerifyConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x50111);
    let h = 1e-4;
    for i in 0..cfg.solution_map_cases {
        let dim = rng.random_range(1..=2);
        let domain = DomainBox::new(Interval::new(0.0, 0.3)?, CVector::zero(dim), 2.5, 2.0)?;
        let phi_poly = PolyField::random(&mut rng, dim, 2, 1, 3, 0.25);
        let dphi_poly = PolyField::random(&mut rng, dim, 2, 1, 3, 0.3);
        let phi = Field::new(phi_poly.to_expr(), domain.clone())?;
        let dphi = Field::new(dphi_poly.to_expr(), domain)?;
        let xi = rand_cvector(&mut rng, dim, 0.4);
        let dxi = rand_cvector(&mut rng, dim, 1.0);

        let opts = PicardOptions {
            grid_size: cfg.grid_size,
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            certify: Certify::Force,
            contour: cfg.contour,
            sampling: TubeSampling::default(),
        };
        let base = picard_solve(&phi, &xi, &opts)?;
        let v = solution_map_derivative(
            &phi,
            &base.solution,
            &dxi,
            Some(&dphi),
            &cfg.contour,
            cfg.tol,
            cfg.max_iter,
        )?;

        // Central complex difference quotient of the solution map.
        let ch = C64::new(h, 0.0);
        let plus = picard_solve(&phi.add_scaled(ch, &dphi)?, &xi.axpy(ch, &dxi), &opts)?;
        let minus = picard_solve(&phi.add_scaled(-ch, &dphi)?, &xi.axpy(-ch, &dxi), &opts)?;
        let quotient = plus
            .solution
            .sub(&minus.solution)
            .scale(C64::new(0.5 / h, 0.0));
        let fd_err = quotient.sub(&v).sup_norm(2.0);
        rows.push(CheckRow::le(
            "solution_map_fd",
            format!("case={i}"),
            fd_err,
            1e-6,
        ));

        // Rotating the direction by i rotates the derivative by i.
        let rot = C64::new(0.0, 1.0);
        let v_rot = solution_map_derivative(
            &phi,
            &base.solution,
            &dxi.scale(rot),
            Some(&dphi.with_expr(dphi.expr().scale(rot))?),
            &cfg.contour,
            cfg.tol,
            cfg.max_iter,
        )?;
        let cr_err = v_rot.sub(&v.scale(rot)).sup_norm(2.0);
        rows.push(CheckRow::le(
            "solution_map_cr",
            format!("case={i}"),
            cr_err,
            1e-9,
        ));
    }
    Ok(())
}

fn forcing_consistency_row(cfg: &VerifyConfig, rows: &mut Vec<CheckRow>) -> Result<()> {
    // The solved v satisfies its own equation: v - dxi - l0(a.v + forcing)
    // is zero at the fixed point; recheck through the stored derivatives.
    let phi = field_on("0.25*z0 + 0.1", 1, 0.0, 0.5, &[1.0], 3.0)?;
    let xi = CVector::from_reals(&[1.0]);
    let opts = PicardOptions {
        grid_size: cfg.grid_size,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        certify: Certify::Require,
        contour: cfg.contour,
        sampling: TubeSampling::default(),
    };
    let base = picard_solve(&phi, &xi, &opts)?;
    let deriv_gap = {
        let stored = base.solution.derivs().unwrap();
        let recomputed = superpose(&phi, &base.solution)?;
        let mut worst: f64 = 0.0;
        for (a, b) in stored.iter().zip(recomputed.values()) {
            worst = worst.max(a.sub(b).pnorm(2.0));
        }
        worst
    };
    rows.push(CheckRow::le(
        "solution_derivative_samples",
        "affine".into(),
        deriv_gap,
        1e-14,
    ));
    Ok(())
}

pub fn rows(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    bundled_rows(cfg, &mut rows)?;
    condition_rows(&mut rows)?;
    quadrature_rows(&mut rows)?;
    lipschitz_rows(cfg, &mut rows)?;
    probe_rows(cfg, &mut rows)?;
    variational_closed_form_rows(cfg, &mut rows)?;
    solution_map_rows(cfg, &mut rows)?;
    forcing_consistency_row(cfg, &mut rows)?;
    Ok(rows)
}
