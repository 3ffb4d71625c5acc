//! Property tests: norm axioms, expression round-tripping through the
//! printer, and the holomorphy-by-construction audit of the grammar.

use proptest::prelude::*;

use holocurve_core::contour::{mean_value_check, ContourSpec};
use holocurve_core::fieldexpr::{parse_field, Expr, FieldExpr, Func};
use holocurve_core::lincomplex::{norm, C64, CVector};

fn complex_in(bound: f64) -> impl Strategy<Value = C64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| C64::new(re, im))
}

fn cvector(dim: usize, bound: f64) -> impl Strategy<Value = CVector> {
    prop::collection::vec(complex_in(bound), dim).prop_map(CVector::new)
}

/// A literal safely away from zero, for use as a denominator.
fn denominator() -> impl Strategy<Value = Expr> {
    (0.3..1.5f64, -1.5..1.5f64, prop::bool::ANY)
        .prop_map(|(re, im, flip)| Expr::Lit(C64::new(if flip { -re } else { re }, im)))
}

fn expr_strategy(dim: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        complex_in(1.5).prop_map(Expr::Lit),
        Just(Expr::Time),
        (0..dim).prop_map(Expr::State),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), denominator())
                .prop_map(|(a, d)| Expr::Div(Box::new(a), Box::new(d))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), 0..4i32).prop_map(|(a, p)| Expr::Pow(Box::new(a), p)),
            (
                prop_oneof![Just(Func::Exp), Just(Func::Sin), Just(Func::Cos)],
                inner
            )
                .prop_map(|(f, a)| Expr::Func(f, Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn norm_triangle_and_homogeneity(
        a in cvector(5, 3.0),
        b in cvector(5, 3.0),
        scale in complex_in(2.0),
        p in 1.0..4.0f64,
    ) {
        let na = norm(p, &a).unwrap();
        let nb = norm(p, &b).unwrap();
        let nsum = norm(p, &a.add(&b)).unwrap();
        prop_assert!(nsum <= na + nb + 1e-12 * (1.0 + na + nb));

        let nscaled = norm(p, &a.scale(scale)).unwrap();
        prop_assert!((nscaled - scale.norm() * na).abs() <= 1e-12 * (1.0 + nscaled));

        prop_assert!(na >= 0.0);
    }

    #[test]
    fn printed_expressions_reparse_to_equivalent_trees(
        coords in prop::collection::vec(expr_strategy(2), 2),
    ) {
        let fe = FieldExpr::new(coords).unwrap();
        let printed = fe.to_string();
        let reparsed = parse_field(&printed, 2)
            .unwrap_or_else(|e| panic!("printed form failed to reparse: {printed}\n{e}"));
        for k in 0..8 {
            let t = -0.8 + 1.6 * k as f64 / 7.0;
            let xi = CVector::new(vec![
                C64::new(0.2 * t, -0.1 + 0.05 * t),
                C64::new(-0.3, 0.2 * t),
            ]);
            let a = fe.eval(t, &xi);
            let b = reparsed.eval(t, &xi);
            if a.is_finite() && b.is_finite() {
                let scale = 1.0 + a.pnorm(2.0);
                prop_assert!(
                    a.sub(&b).pnorm(2.0) <= 1e-12 * scale,
                    "mismatch for printed form {printed}"
                );
            }
        }
    }

    #[test]
    fn parsed_fields_pass_the_holomorphy_audit(
        coords in prop::collection::vec(expr_strategy(2), 2),
        points in prop::collection::vec((cvector(2, 0.3), cvector(2, 1.0)), 4),
    ) {
        // Round-trip through the grammar first: what we audit is exactly
        // what the parser accepts.
        let fe = FieldExpr::new(coords).unwrap();
        let fe = parse_field(&fe.to_string(), 2).unwrap();
        let spec = ContourSpec::new(32, 0.1).unwrap();
        for (x, u) in &points {
            let sample = fe.eval(0.2, x);
            if !sample.is_finite() || sample.pnorm(2.0) > 1e4 {
                continue;
            }
            let f = |z: &CVector| Ok(fe.eval(0.2, z));
            let defect = mean_value_check(f, x, u, &spec);
            if let Ok(d) = defect {
                prop_assert!(d < 1e-10, "holomorphy defect {d} for {fe}");
            }
        }
    }
}
