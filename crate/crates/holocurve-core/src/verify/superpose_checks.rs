//! Superposition suite: directional differentiability at desk scale.
//!
//! Random polynomial quadruples (x, u, y, v) are pushed through
//! `remainder_norm` on dyadic increments in four complex directions; the
//! fitted decay order must be at least 0.9. The contour-computed partial is
//! cross-checked node by node against the generic Cauchy differential, and
//! the algebraic invariants (linearity in x, linearity in v, scale
//! invariance of the delta0 trick) are spot-checked.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{log_log_slope, rand_cvector, CheckRow, VerifyConfig};
use crate::contour::{kth_differential, ContourSpec};
use crate::error::Result;
use crate::fieldexpr::Field;
use crate::lincomplex::{C64, CVector, Curve, DomainBox, Grid, Interval};
use crate::oracle::PolyField;
use crate::superpose::{
    partial2_apply, partial2_apply_scaled, remainder_norm, safety_radius, superpose,
};

struct Case {
    x: Field,
    u: Field,
    poly_x: PolyField,
    y: Curve,
    v: Curve,
}

fn random_curve(rng: &mut ChaCha8Rng, grid: &Grid, dim: usize) -> Curve {
    let a = rand_cvector(rng, dim, 0.5);
    let b = rand_cvector(rng, dim, 0.25);
    let c = rand_cvector(rng, dim, 0.25);
    Curve::from_fn(grid.clone(), |t| {
        a.axpy(C64::new(t, 0.0), &b)
            .axpy(C64::new(t * t, 0.0), &c)
    })
}

fn random_case(rng: &mut ChaCha8Rng, grid: &Grid) -> Result<Case> {
    let dim = rng.random_range(1..=3);
    let domain = DomainBox::new(*grid.interval(), CVector::zero(dim), 3.0, 2.0)?;
    let poly_x = PolyField::random(rng, dim, 3, 2, 4, 0.35).with_quadratic_part(0.25);
    let poly_u = PolyField::random(rng, dim, 3, 2, 4, 0.35);
    let x = Field::new(poly_x.to_expr(), domain.clone())?;
    let u = Field::new(poly_u.to_expr(), domain)?;
    let y = random_curve(rng, grid, dim);
    let v = random_curve(rng, grid, dim);
    Ok(Case { x, u, poly_x, y, v })
}

pub fn rows(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x50DE);
    let grid = Grid::new(Interval::new(0.0, 0.5)?, 129)?;
    let spec = cfg.contour;
    let t0_incr = 0.25;
    let directions = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];

    for case_idx in 0..cfg.superpose_cases {
        let case = random_case(&mut rng, &grid)?;

        // Remainder decay over t = 2^{-j} t0 in four complex directions.
        let mut points = Vec::new();
        let mut first_real = None;
        for j in 0..=8 {
            let modulus = t0_incr * 0.5f64.powi(j);
            for (d, dir) in directions.iter().enumerate() {
                let t = dir * modulus;
                let r = remainder_norm(&case.x, &case.u, &case.y, &case.v, t, &spec)?;
                if d == 0 && first_real.is_none() {
                    first_real = Some(r);
                }
                if case_idx == 0 && d == 0 {
                    // Convergence table for the first case: first-order
                    // envelope from the j = 0 value.
                    let envelope = 4.0 * first_real.unwrap() * 0.5f64.powi(j) + 1e-13;
                    rows.push(CheckRow::le(
                        "remainder_vs_t",
                        format!("t={modulus:.6e}"),
                        r,
                        envelope,
                    ));
                }
                if r > 1e-13 {
                    points.push((modulus, r));
                }
            }
        }
        let order = if points.len() >= 4 {
            log_log_slope(&points)
        } else {
            // Remainder at quadrature floor everywhere: flat in t, which
            // only happens for (numerically) affine data.
            1.0
        };
        rows.push(CheckRow::ge(
            "remainder_order",
            format!("case={case_idx}"),
            order,
            0.9,
        ));

        // partial2_apply against the generic Cauchy differential per node.
        let av = partial2_apply(&case.x, &case.y, &case.v, &spec)?;
        let eps = safety_radius(&case.y, case.x.domain())?;
        let node_radius = 0.5 * eps / case.v.sup_norm(2.0).max(1.0);
        let node_spec = ContourSpec::new(spec.m_nodes(), node_radius)?;
        let mut worst: f64 = 0.0;
        for (k, &t) in case.y.grid().nodes().iter().enumerate() {
            let x_t = |z: &CVector| case.x.eval(t, z);
            let direct = kth_differential(
                x_t,
                case.y.value(k),
                std::slice::from_ref(case.v.value(k)),
                &node_spec,
            )?;
            worst = worst.max(direct.sub(av.value(k)).pnorm(2.0));
        }
        rows.push(CheckRow::le(
            "partial2_vs_kth",
            format!("case={case_idx}"),
            worst,
            1e-11,
        ));

        // Consistency with the symbolic oracle at the nodes.
        let mut sym_worst: f64 = 0.0;
        for (k, &t) in case.y.grid().nodes().iter().enumerate() {
            let sym = case
                .poly_x
                .dir_derivative(t, case.y.value(k), case.v.value(k));
            sym_worst = sym_worst.max(sym.sub(av.value(k)).pnorm(2.0));
        }
        rows.push(CheckRow::le(
            "partial2_vs_symbolic",
            format!("case={case_idx}"),
            sym_worst,
            1e-10,
        ));

        if case_idx < 3 {
            // Linearity of (x, y) -> x o [id, y] in the field slot.
            let (alpha, beta) = (C64::new(0.8, -0.1), C64::new(-0.4, 0.6));
            let combined = case
                .x
                .with_expr(case.x.expr().scale(alpha).add_scaled(beta, case.u.expr())?)?;
            let lhs = superpose(&combined, &case.y)?;
            let rhs = superpose(&case.x, &case.y)?
                .scale(alpha)
                .add(&superpose(&case.u, &case.y)?.scale(beta));
            rows.push(CheckRow::le(
                "superpose_linear_in_x",
                format!("case={case_idx}"),
                lhs.sub(&rhs).sup_norm(2.0),
                1e-13,
            ));

            // Linearity of a.v in v.
            let w = random_curve(&mut rng, &grid, case.x.dim());
            let lhs = partial2_apply(
                &case.x,
                &case.y,
                &case.v.scale(alpha).add(&w.scale(beta)),
                &spec,
            )?;
            let rhs = partial2_apply(&case.x, &case.y, &case.v, &spec)?
                .scale(alpha)
                .add(&partial2_apply(&case.x, &case.y, &w, &spec)?.scale(beta));
            rows.push(CheckRow::le(
                "partial2_linear_in_v",
                format!("case={case_idx}"),
                lhs.sub(&rhs).sup_norm(2.0),
                1e-10,
            ));

            // Halving delta0 must not move the result (holomorphy).
            let delta0 = eps / case.v.sup_norm(2.0).max(1.0);
            let halved =
                partial2_apply_scaled(&case.x, &case.y, &case.v, delta0 / 2.0, &spec)?;
            rows.push(CheckRow::le(
                "partial2_delta0_halving",
                format!("case={case_idx}"),
                av.sub(&halved).sup_norm(2.0),
                1e-10,
            ));
        }
    }

    Ok(rows)
}
