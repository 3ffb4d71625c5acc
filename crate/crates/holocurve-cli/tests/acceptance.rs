//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line (visible with `cargo test -- --nocapture`). Every
//! tolerance and runtime budget is pinned here.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use holocurve_core::bundled;
use holocurve_core::chifun::{
    chi, continuity_bound_check, dchi, remainder_bound_check, unboundedness_witness,
};
use holocurve_core::contour::{circle_integral, kth_differential, ContourSpec};
use holocurve_core::fieldexpr::Field;
use holocurve_core::lincomplex::{C64, CVector, Curve, DomainBox, Grid, Interval};
use holocurve_core::odesolve::{
    condition_p, picard_solve, rk4_solve, solution_map_derivative, Certify, PicardOptions,
    TubeSampling,
};
use holocurve_core::oracle::PolyField;
use holocurve_core::superpose::{partial2_apply, remainder_norm, safety_radius};

fn conclude(name: &str, ok: bool, detail: &str) {
    println!("{}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

fn within(elapsed: Duration, budget_s: f64, name: &str) {
    let ok = elapsed.as_secs_f64() < budget_s;
    conclude(
        &format!("{name} runtime"),
        ok,
        &format!("{:.2}s of {budget_s}s budget", elapsed.as_secs_f64()),
    );
}

fn rand_cvector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> CVector {
    CVector::new(
        (0..dim)
            .map(|_| C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
            .collect(),
    )
}

#[test]
fn criterion_1_contour_exactness() {
    let start = Instant::now();

    let spec = ContourSpec::new(32, 1.0).unwrap();
    let mut worst_harmonic: f64 = 0.0;
    for k in -8i32..=8 {
        let got = circle_integral(|z| Ok(CVector::new(vec![z.powi(k)])), &spec).unwrap();
        let want = if k == -1 { 1.0 } else { 0.0 };
        worst_harmonic = worst_harmonic.max((got.get(0) - C64::new(want, 0.0)).norm());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let dspec = ContourSpec::new(32, 0.75).unwrap();
    let mut worst_rel: f64 = 0.0;
    for i in 0..50 {
        let dim = rng.random_range(1..=3);
        let poly = PolyField::random(&mut rng, dim, 5, 0, 5, 1.0);
        let x = rand_cvector(&mut rng, dim, 0.5);
        let k = if i % 10 == 9 { 0 } else { 1 + (i % 2) };
        let dirs: Vec<CVector> = (0..k).map(|_| rand_cvector(&mut rng, dim, 1.0)).collect();
        let numeric =
            kth_differential(|z| Ok(poly.eval(0.0, z)), &x, &dirs, &dspec).unwrap();
        let symbolic = match k {
            0 => poly.eval(0.0, &x),
            1 => poly.dir_derivative(0.0, &x, &dirs[0]),
            _ => poly.dir_derivative2(0.0, &x, &dirs[0], &dirs[1]),
        };
        worst_rel = worst_rel
            .max(numeric.sub(&symbolic).pnorm(2.0) / symbolic.pnorm(2.0).max(1e-3));
    }

    conclude(
        "criterion 1: contour exactness",
        worst_harmonic < 1e-14 && worst_rel < 1e-10,
        &format!("harmonics {worst_harmonic:.2e} < 1e-14, 50 polynomials rel {worst_rel:.2e} < 1e-10"),
    );
    within(start.elapsed(), 5.0, "criterion 1");
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[test]
fn criterion_2_superposition_differentiability() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC2);
    let grid = Grid::new(Interval::new(0.0, 0.5).unwrap(), 129).unwrap();
    let spec = ContourSpec::default();
    let dirs4 = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];

    let mut min_order = f64::INFINITY;
    let mut worst_consistency: f64 = 0.0;
    for _ in 0..20 {
        let dim = rng.random_range(1..=3);
        let domain =
            DomainBox::new(*grid.interval(), CVector::zero(dim), 3.0, 2.0).unwrap();
        let x = Field::new(
            PolyField::random(&mut rng, dim, 3, 2, 4, 0.35)
                .with_quadratic_part(0.25)
                .to_expr(),
            domain.clone(),
        )
        .unwrap();
        let u = Field::new(
            PolyField::random(&mut rng, dim, 3, 2, 4, 0.35).to_expr(),
            domain,
        )
        .unwrap();
        let curve = |rng: &mut ChaCha8Rng| {
            let a = rand_cvector(rng, dim, 0.5);
            let b = rand_cvector(rng, dim, 0.25);
            let c = rand_cvector(rng, dim, 0.25);
            Curve::from_fn(grid.clone(), |t| {
                a.axpy(C64::new(t, 0.0), &b).axpy(C64::new(t * t, 0.0), &c)
            })
        };
        let y = curve(&mut rng);
        let v = curve(&mut rng);

        let mut points = Vec::new();
        for j in 0..=8 {
            let modulus = 0.25 * 0.5f64.powi(j);
            for dir in dirs4 {
                let r = remainder_norm(&x, &u, &y, &v, dir * modulus, &spec).unwrap();
                if r > 1e-13 {
                    points.push((modulus, r));
                }
            }
        }
        assert!(points.len() >= 4, "remainder sequence collapsed to roundoff");
        min_order = min_order.min(log_log_slope(&points));

        let av = partial2_apply(&x, &y, &v, &spec).unwrap();
        let eps = safety_radius(&y, x.domain()).unwrap();
        let node_spec = ContourSpec::new(
            spec.m_nodes(),
            0.5 * eps / v.sup_norm(2.0).max(1.0),
        )
        .unwrap();
        for (k, &t) in y.grid().nodes().iter().enumerate() {
            let direct = kth_differential(
                |z: &CVector| x.eval(t, z),
                y.value(k),
                std::slice::from_ref(v.value(k)),
                &node_spec,
            )
            .unwrap();
            worst_consistency = worst_consistency.max(direct.sub(av.value(k)).pnorm(2.0));
        }
    }

    conclude(
        "criterion 2: superposition differentiability",
        min_order >= 0.9 && worst_consistency < 1e-11,
        &format!(
            "min fitted order {min_order:.3} >= 0.9, partial2 vs kth {worst_consistency:.2e} < 1e-11"
        ),
    );
    within(start.elapsed(), 30.0, "criterion 2");
}

#[test]
fn criterion_3_ode_oracles() {
    let start = Instant::now();
    let tol = 1e-12;
    let mut detail = String::new();
    let mut ok = true;

    for case in bundled::cases() {
        let opts = PicardOptions {
            tol,
            certify: case.certify,
            ..PicardOptions::default()
        };
        let xi = CVector::new(case.xi.clone());
        let report = picard_solve(&case.field, &xi, &opts).unwrap();

        let mut exact_err: f64 = 0.0;
        for (k, &t) in report.solution.grid().nodes().iter().enumerate() {
            let exact = CVector::new((case.exact)(t));
            exact_err = exact_err.max(report.solution.value(k).sub(&exact).pnorm(2.0));
        }
        let exact_bound = if case.name == "linear" { 1e-10 } else { 1e-8 };

        let rk4 = rk4_solve(&case.field, &xi, 400, opts.grid_size).unwrap();
        let oracle_gap = report.solution.sub(&rk4).sup_norm(2.0);

        let case_ok = exact_err < exact_bound
            && oracle_gap < 1e-8
            && report.residual < 10.0 * tol;
        ok &= case_ok;
        detail.push_str(&format!(
            "{}: exact {exact_err:.1e}, rk4 {oracle_gap:.1e}, residual {:.1e}; ",
            case.name, report.residual
        ));
    }

    conclude("criterion 3: ODE oracles", ok, detail.trim_end_matches("; "));
    within(start.elapsed(), 10.0, "criterion 3");
}

#[test]
fn criterion_4_contraction_condition() {
    // Constant field on a unit ball around the start: B1_max = 0.9 and
    // A = 0.5, so certification must flip exactly at A|c| = 0.5 B1_max.
    let grid = Grid::new(Interval::new(0.0, 0.5).unwrap(), 33).unwrap();
    let sampling = TubeSampling::default();
    let mut ok = true;
    let mut detail = String::new();
    for fraction in [0.2, 0.4, 0.45, 0.49, 0.51, 0.55, 0.6, 0.9] {
        let c = 1.8 * fraction;
        let iv = Interval::new(0.0, 0.5).unwrap();
        let domain = DomainBox::new(iv, CVector::zero(1), 1.0, 2.0).unwrap();
        let phi = Field::new(
            holocurve_core::fieldexpr::parse_field(&format!("{c}"), 1).unwrap(),
            domain,
        )
        .unwrap();
        let (got, _) = condition_p(&phi, &CVector::zero(1), &grid, &sampling).unwrap();
        let want = fraction < 0.5;
        ok &= got == want;
        detail.push_str(&format!("f={fraction}:{} ", got as u8));

        if got {
            let report = picard_solve(&phi, &CVector::zero(1), &PicardOptions::default())
                .unwrap();
            ok &= report.observed_ratio <= report.contraction + 0.05;
        }
    }

    // A non-trivial contraction: the certified linear field.
    let linear = bundled::field("linear").unwrap();
    let report =
        picard_solve(&linear, &CVector::from_reals(&[1.0]), &PicardOptions::default()).unwrap();
    let ratio_ok = report.observed_ratio <= report.contraction + 0.05;
    ok &= ratio_ok;
    detail.push_str(&format!(
        "linear ratio {:.3} <= estimate {:.3} + 0.05",
        report.observed_ratio, report.contraction
    ));

    conclude("criterion 4: contraction condition", ok, &detail);
}

#[test]
fn criterion_5_solution_map_holomorphy() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC5);
    let h = 1e-4;
    let mut worst_fd: f64 = 0.0;
    let mut worst_cr: f64 = 0.0;

    for _ in 0..10 {
        let dim = rng.random_range(1..=2);
        let domain = DomainBox::new(
            Interval::new(0.0, 0.3).unwrap(),
            CVector::zero(dim),
            2.5,
            2.0,
        )
        .unwrap();
        let phi = Field::new(
            PolyField::random(&mut rng, dim, 2, 1, 3, 0.25).to_expr(),
            domain.clone(),
        )
        .unwrap();
        let dphi = Field::new(
            PolyField::random(&mut rng, dim, 2, 1, 3, 0.3).to_expr(),
            domain,
        )
        .unwrap();
        let xi = rand_cvector(&mut rng, dim, 0.4);
        let dxi = rand_cvector(&mut rng, dim, 1.0);

        let opts = PicardOptions {
            certify: Certify::Force,
            ..PicardOptions::default()
        };
        let spec = opts.contour;
        let base = picard_solve(&phi, &xi, &opts).unwrap();
        let v = solution_map_derivative(
            &phi,
            &base.solution,
            &dxi,
            Some(&dphi),
            &spec,
            opts.tol,
            opts.max_iter,
        )
        .unwrap();

        let ch = C64::new(h, 0.0);
        let plus =
            picard_solve(&phi.add_scaled(ch, &dphi).unwrap(), &xi.axpy(ch, &dxi), &opts)
                .unwrap();
        let minus =
            picard_solve(&phi.add_scaled(-ch, &dphi).unwrap(), &xi.axpy(-ch, &dxi), &opts)
                .unwrap();
        let quotient = plus
            .solution
            .sub(&minus.solution)
            .scale(C64::new(0.5 / h, 0.0));
        worst_fd = worst_fd.max(quotient.sub(&v).sup_norm(2.0));

        let rot = C64::new(0.0, 1.0);
        let v_rot = solution_map_derivative(
            &phi,
            &base.solution,
            &dxi.scale(rot),
            Some(&dphi.with_expr(dphi.expr().scale(rot)).unwrap()),
            &spec,
            opts.tol,
            opts.max_iter,
        )
        .unwrap();
        worst_cr = worst_cr.max(v_rot.sub(&v.scale(rot)).sup_norm(2.0));
    }

    conclude(
        "criterion 5: solution-map holomorphy",
        worst_fd < 1e-6 && worst_cr < 1e-9,
        &format!("fd quotient {worst_fd:.2e} < 1e-6, i-rotation {worst_cr:.2e} < 1e-9"),
    );
    within(start.elapsed(), 60.0, "criterion 5");
}

#[test]
fn criterion_6_entire_function_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC6);

    let spec = ContourSpec::new(64, 0.5).unwrap();
    let chi_map = |z: &CVector| Ok(CVector::new(vec![chi(z)]));
    let mut worst_rel: f64 = 0.0;
    for _ in 0..100 {
        let x = rand_cvector(&mut rng, 16, 0.45);
        let u = rand_cvector(&mut rng, 16, 0.7);
        let numeric = kth_differential(chi_map, &x, std::slice::from_ref(&u), &spec).unwrap();
        let symbolic = dchi(&x, &u);
        worst_rel =
            worst_rel.max((numeric.get(0) - symbolic).norm() / symbolic.norm().max(1e-3));
    }

    let mut continuity_ok = true;
    for i in 0..500 {
        let p = if i % 2 == 0 { 2.0 } else { 1.0 };
        let x = rand_cvector(&mut rng, 32, 0.35);
        let raw = rand_cvector(&mut rng, 32, 1.0);
        let target = rng.random_range(1e-4..0.1249f64);
        let u = raw.scale(C64::new(target / raw.pnorm(p), 0.0));
        continuity_ok &= continuity_bound_check(&x, &u, p).unwrap().ok;
    }

    let mut remainder_ok = true;
    for _ in 0..200 {
        let x = rand_cvector(&mut rng, 16, 0.3);
        let u = rand_cvector(&mut rng, 16, 0.3);
        let eps = rng.random_range(0.1..1.0f64);
        remainder_ok &= remainder_bound_check(&x, &u, 2.0, eps).unwrap().ok;
    }

    let (wx, wval) = unboundedness_witness(30.0, 100).unwrap();
    let witness_ok = wval.re > 30.0 && wx.pnorm(1.0) < 1.0 && wx.pnorm(2.0) < 1.0;

    conclude(
        "criterion 6: entire-function suite",
        worst_rel < 1e-10 && continuity_ok && remainder_ok && witness_ok,
        &format!(
            "dchi rel {worst_rel:.2e} < 1e-10, 500 continuity + 200 remainder samples hold, \
             witness value {:.2} > 30 with norm {:.4} < 1",
            wval.re,
            wx.pnorm(2.0)
        ),
    );
    within(start.elapsed(), 20.0, "criterion 6");
}

#[test]
fn criterion_7_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_holocurve"))
            .args(["verify", "--suite", "all", "--seed", "7", "--out", name])
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "verify run failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    conclude(
        "criterion 7: determinism",
        a == b && !a.is_empty(),
        &format!("two `verify --suite all --seed 7` runs, {} bytes, byte-identical", a.len()),
    );
}
