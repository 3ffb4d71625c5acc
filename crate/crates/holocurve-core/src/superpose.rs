//! The superposition operator (x, y) -> x o [id, y] and its contour-computed
//! partial derivatives.
//!
//! `safety_radius` produces the openness certificate: a tube radius eps such
//! that every point within eps of the curve graph stays inside the field
//! domain. The partial derivative along a curve direction v is evaluated
//! pointwise by the scaled contour formula
//!
//! `a.v(t) = delta0^{-1} oint zeta^{-2} x(t, y(t) + zeta delta0 v(t)) d zeta`
//!
//! with `delta0 = eps / max(1, sup|v|)`, which keeps every quadrature sample
//! inside the certified tube; the second partial uses the analogous double
//! contour. `remainder_norm` measures the first-order Taylor defect of the
//! operator under a joint increment (x + t u, y + t v).

use crate::contour::{unit_circle_derivative, unit_circle_second, ContourSpec};
use crate::error::{Error, Result};
use crate::fieldexpr::Field;
use crate::lincomplex::{C64, Curve, DomainBox};

/// The curve z(t) = x(t, y(t)). Every node of the graph of `y` must lie in
/// the domain of `x`; the first offending node aborts the evaluation.
pub fn superpose(x: &Field, y: &Curve) -> Result<Curve> {
    if x.dim() != y.dim() {
        return Err(Error::Parameter(format!(
            "field dimension {} does not match curve dimension {}",
            x.dim(),
            y.dim()
        )));
    }
    Curve::map_nodes(y.grid(), |k, t| x.eval(t, y.value(k)))
}

/// Largest certified tube radius around the graph of `y` inside `domain`,
/// shrunk by the factor 0.9 to absorb interpolation slack between nodes.
pub fn safety_radius(y: &Curve, domain: &DomainBox) -> Result<f64> {
    let mut min_margin = f64::INFINITY;
    for (k, t) in y.grid().nodes().iter().enumerate() {
        if !domain.interval().contains(*t) {
            return Err(Error::Domain {
                msg: "curve interval is not contained in the domain interval".into(),
                t: *t,
                distance: 0.0,
            });
        }
        min_margin = min_margin.min(domain.interior_margin(y.value(k)));
    }
    if min_margin <= 0.0 {
        return Err(Error::DegenerateDomain(format!(
            "curve graph touches or exits the domain boundary (margin {min_margin:.3e})"
        )));
    }
    Ok(0.9 * min_margin)
}

/// The curve t -> (d_2 x)(t, y(t)) . v(t) with an explicit contour scale
/// `delta0`; every sample y(t) + zeta delta0 v(t) must stay inside dom x,
/// which the default wrapper [`partial2_apply`] certifies.
pub fn partial2_apply_scaled(
    x: &Field,
    y: &Curve,
    v: &Curve,
    delta0: f64,
    spec: &ContourSpec,
) -> Result<Curve> {
    if !(delta0 > 0.0) {
        return Err(Error::DegenerateDomain(format!(
            "contour scale delta0 must be positive, got {delta0}"
        )));
    }
    assert!(y.grid().same_as(v.grid()), "y and v must share a grid");
    let m = spec.m_nodes();
    let scale = C64::new(1.0 / delta0, 0.0);
    Curve::map_nodes(y.grid(), |k, t| {
        let yk = y.value(k);
        let vk = v.value(k);
        let d = unit_circle_derivative(
            |w| x.eval(t, &yk.axpy(w * delta0, vk)),
            m,
        )?;
        Ok(d.scale(scale))
    })
}

/// The curve t -> (d_2 x)(t, y(t)) . v(t), the paper's a.v, with the contour
/// scale chosen from the safety radius of `y`.
pub fn partial2_apply(x: &Field, y: &Curve, v: &Curve, spec: &ContourSpec) -> Result<Curve> {
    let eps = safety_radius(y, x.domain())?;
    let p = x.domain().norm_p();
    let delta0 = eps / v.sup_norm(p).max(1.0);
    partial2_apply_scaled(x, y, v, delta0, spec)
}

/// The curve t -> d^2(x(t, .))[y(t); v(t), w(t)] by the double contour with
/// the radius split between the two directions.
pub fn partial2_second(
    x: &Field,
    y: &Curve,
    v: &Curve,
    w: &Curve,
    spec: &ContourSpec,
) -> Result<Curve> {
    assert!(y.grid().same_as(v.grid()) && y.grid().same_as(w.grid()));
    let eps = safety_radius(y, x.domain())?;
    let p = x.domain().norm_p();
    let delta0 = eps / (v.sup_norm(p).max(1.0) + w.sup_norm(p).max(1.0));
    let m = spec.m_nodes();
    let scale = C64::new(1.0 / (delta0 * delta0), 0.0);
    Curve::map_nodes(y.grid(), |k, t| {
        let yk = y.value(k);
        let vk = v.value(k);
        let wk = w.value(k);
        let d = unit_circle_second(
            |wa, wb| {
                let point = yk.axpy(wa * delta0, vk).axpy(wb * delta0, wk);
                x.eval(t, &point)
            },
            m,
        )?;
        Ok(d.scale(scale))
    })
}

/// Sup-norm of the first-order defect
///
/// `Delta = t^{-1} (f(x + t u, y + t v) - f(x, y)) - u o [id,y] - a.v`
///
/// for a complex increment `t`. The perturbed curve y + t v must stay inside
/// the certified tube, which is checked against the safety radius before any
/// field evaluation.
pub fn remainder_norm(
    x: &Field,
    u: &Field,
    y: &Curve,
    v: &Curve,
    t: C64,
    spec: &ContourSpec,
) -> Result<f64> {
    if t.norm() == 0.0 {
        return Err(Error::Parameter("increment t must be nonzero".into()));
    }
    if u.domain() != x.domain() {
        return Err(Error::Parameter(
            "x and u must share the same domain box".into(),
        ));
    }
    let p = x.domain().norm_p();
    let eps = safety_radius(y, x.domain())?;
    let shift = t.norm() * v.sup_norm(p);
    if shift >= eps {
        return Err(Error::Domain {
            msg: "increment pushes the perturbed curve outside the certified tube".into(),
            t: t.norm(),
            distance: shift - eps,
        });
    }
    let z = superpose(x, y)?;
    let perturbed_field = x.add_scaled(t, u)?;
    let perturbed_curve = y.axpy(t, v);
    let z_perturbed = superpose(&perturbed_field, &perturbed_curve)?;
    let u_on_y = superpose(u, y)?;
    let a_v = partial2_apply(x, y, v, spec)?;

    let inv_t = C64::new(1.0, 0.0) / t;
    let delta = z_perturbed
        .sub(&z)
        .scale(inv_t)
        .sub(&u_on_y)
        .sub(&a_v);
    Ok(delta.sup_norm(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldexpr::parse_field;
    use crate::lincomplex::{CVector, Grid, Interval};

    fn field(src: &str, n: usize, radius: f64) -> Field {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let dom = DomainBox::new(iv, CVector::zero(n), radius, 2.0).unwrap();
        Field::new(parse_field(src, n).unwrap(), dom).unwrap()
    }

    fn grid(m: usize) -> Grid {
        Grid::new(Interval::new(0.0, 1.0).unwrap(), m).unwrap()
    }

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn superpose_examples() {
        let g = grid(33);
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));

        let x = field("t*z0", 1, 3.0);
        let z = superpose(&x, &y).unwrap();
        for (k, &t) in g.nodes().iter().enumerate() {
            assert!((z.value(k).get(0) - real(t * t)).norm() < 1e-15);
        }

        let ident = field("z0", 1, 3.0);
        let z = superpose(&ident, &y).unwrap();
        assert_eq!(z.values(), y.values());

        let x2 = field("z0^2, z1", 2, 3.0);
        let y2 = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t, 1.0]));
        let z2 = superpose(&x2, &y2).unwrap();
        for (k, &t) in g.nodes().iter().enumerate() {
            assert!((z2.value(k).get(0) - real(t * t)).norm() < 1e-15);
            assert_eq!(z2.value(k).get(1), real(1.0));
        }
    }

    #[test]
    fn superpose_rejects_escaping_graph() {
        let g = grid(33);
        let y = Curve::from_fn(g, |t| CVector::from_reals(&[t]));
        let tight = field("z0", 1, 0.5);
        assert!(matches!(
            superpose(&tight, &y),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn safety_radius_examples() {
        let g = grid(9);
        let dom = DomainBox::new(
            *g.interval(),
            CVector::zero(2),
            1.0,
            2.0,
        )
        .unwrap();

        let centered = Curve::constant(g.clone(), CVector::zero(2));
        assert!((safety_radius(&centered, &dom).unwrap() - 0.9).abs() < 1e-15);

        let off = Curve::constant(g.clone(), CVector::from_reals(&[0.5, 0.0]));
        assert!((safety_radius(&off, &dom).unwrap() - 0.45).abs() < 1e-15);

        let boundary = Curve::constant(g, CVector::from_reals(&[1.0, 0.0]));
        assert!(matches!(
            safety_radius(&boundary, &dom),
            Err(Error::DegenerateDomain(_))
        ));
    }

    #[test]
    fn partial2_apply_examples() {
        let g = grid(33);
        let spec = ContourSpec::default();
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));

        let sq = field("z0^2", 1, 3.0);
        let ones = Curve::constant(g.clone(), CVector::from_reals(&[1.0]));
        let av = partial2_apply(&sq, &y, &ones, &spec).unwrap();
        for (k, &t) in g.nodes().iter().enumerate() {
            assert!(
                (av.value(k).get(0) - real(2.0 * t)).norm() < 1e-12,
                "node {k}"
            );
        }

        let lin = field("t*z0", 1, 3.0);
        let c = Curve::constant(g.clone(), CVector::new(vec![C64::new(0.3, 0.4)]));
        let av = partial2_apply(&lin, &y, &c, &spec).unwrap();
        for (k, &t) in g.nodes().iter().enumerate() {
            assert!((av.value(k).get(0) - C64::new(0.3 * t, 0.4 * t)).norm() < 1e-12);
        }

        let zero = Curve::constant(g.clone(), CVector::zero(1));
        let av = partial2_apply(&sq, &y, &zero, &spec).unwrap();
        assert!(av.sup_norm(2.0) < 1e-14);
    }

    #[test]
    fn partial2_scale_invariance() {
        let g = grid(17);
        let spec = ContourSpec::default();
        let f = field("z0^3 + t*z0", 1, 3.0);
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[0.5 * t]));
        let v = Curve::from_fn(g, |t| CVector::from_reals(&[1.0 - 0.3 * t]));
        let full = partial2_apply(&f, &y, &v, &spec).unwrap();
        let eps = safety_radius(&y, f.domain()).unwrap();
        let delta0 = eps / v.sup_norm(2.0).max(1.0);
        let halved = partial2_apply_scaled(&f, &y, &v, delta0 / 2.0, &spec).unwrap();
        assert!(full.sub(&halved).sup_norm(2.0) < 1e-10);
    }

    #[test]
    fn partial2_second_examples() {
        let g = grid(17);
        let spec = ContourSpec::default();
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));
        let ones = Curve::constant(g.clone(), CVector::from_reals(&[1.0]));

        let sq = field("z0^2", 1, 3.0);
        let d2 = partial2_second(&sq, &y, &ones, &ones, &spec).unwrap();
        for k in 0..g.len() {
            assert!((d2.value(k).get(0) - real(2.0)).norm() < 1e-12);
        }

        let lin = field("t*z0", 1, 3.0);
        let d2 = partial2_second(&lin, &y, &ones, &ones, &spec).unwrap();
        assert!(d2.sup_norm(2.0) < 1e-12);

        let cube = field("z0^3", 1, 3.0);
        let d2 = partial2_second(&cube, &y, &ones, &ones, &spec).unwrap();
        for (k, &t) in g.nodes().iter().enumerate() {
            assert!((d2.value(k).get(0) - real(6.0 * t)).norm() < 1e-11);
        }
    }

    #[test]
    fn remainder_vanishes_without_curvature() {
        // x affine in the state and u state-free: the quotient cancels the
        // contour term exactly and no cross term is left.
        let g = grid(33);
        let spec = ContourSpec::default();
        let x = field("t*z0 + 0.5*z0 + 0.2", 1, 4.0);
        let u = field("0.25*t - 0.125", 1, 4.0);
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));
        let v = Curve::from_fn(g, |t| CVector::from_reals(&[0.5 + 0.25 * t]));
        let r = remainder_norm(&x, &u, &y, &v, real(0.3), &spec).unwrap();
        assert!(r < 1e-12, "curvature-free remainder {r}");
    }

    #[test]
    fn remainder_carries_the_u_cross_term() {
        // With u linear in the state the defect is exactly t (d u) v.
        let g = grid(33);
        let spec = ContourSpec::default();
        let x = field("t*z0 + 0.5*z0", 1, 4.0);
        let u = field("0.25*z0", 1, 4.0);
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));
        let v = Curve::constant(g, CVector::from_reals(&[1.0]));
        let t = 0.3;
        let r = remainder_norm(&x, &u, &y, &v, real(t), &spec).unwrap();
        assert!((r - t * 0.25).abs() < 1e-12, "cross-term remainder {r}");
    }

    #[test]
    fn remainder_measures_curvature_and_decays_linearly() {
        let g = grid(33);
        let spec = ContourSpec::default();
        let x = field("z0^2", 1, 4.0);
        let u = field("0", 1, 4.0);
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));
        let v = Curve::constant(g, CVector::from_reals(&[1.0]));

        // Exact defect is t * v(t)^2, so sup over the grid is |t|.
        let t1 = 1e-3;
        let r1 = remainder_norm(&x, &u, &y, &v, real(t1), &spec).unwrap();
        assert!(r1 > 0.5 * t1 && r1 < 2.0 * t1, "remainder {r1} vs |t| {t1}");

        let r2 = remainder_norm(&x, &u, &y, &v, real(t1 / 2.0), &spec).unwrap();
        let ratio = r2 / r1;
        assert!((ratio - 0.5).abs() < 0.05, "halving ratio {ratio}");
    }

    #[test]
    fn remainder_rejects_large_increments() {
        let g = grid(9);
        let spec = ContourSpec::default();
        let x = field("z0^2", 1, 2.0);
        let u = field("0", 1, 2.0);
        let y = Curve::from_fn(g.clone(), |t| CVector::from_reals(&[t]));
        let v = Curve::constant(g, CVector::from_reals(&[1.0]));
        assert!(matches!(
            remainder_norm(&x, &u, &y, &v, real(2.0), &spec),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn superpose_is_linear_in_the_field() {
        let g = grid(17);
        let x1 = field("z0^2 + t", 1, 3.0);
        let x2 = field("sin(z0)", 1, 3.0);
        let y = Curve::from_fn(g, |t| CVector::from_reals(&[0.8 * t]));
        let (alpha, beta) = (C64::new(0.7, -0.2), C64::new(-1.1, 0.4));
        let combo = x1
            .with_expr(x1.expr().scale(alpha).add_scaled(beta, x2.expr()).unwrap())
            .unwrap();
        let lhs = superpose(&combo, &y).unwrap();
        let rhs = superpose(&x1, &y)
            .unwrap()
            .scale(alpha)
            .add(&superpose(&x2, &y).unwrap().scale(beta));
        assert!(lhs.sub(&rhs).sup_norm(2.0) < 1e-13);
    }
}
