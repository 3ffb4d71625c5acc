//! Symbolic polynomial fields with exact directional derivatives.
//!
//! This is the independent oracle for the contour machinery: evaluation and
//! differentiation happen monomial by monomial, with no quadrature and no
//! expression trees, so agreement between a contour differential and the
//! symbolic value cross-checks two unrelated code paths. `to_expr` converts
//! a polynomial into the expression language for feeding the same field to
//! the production path.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::fieldexpr::{Expr, FieldExpr};
use crate::lincomplex::{C64, CVector};

#[derive(Debug, Clone)]
pub struct Monomial {
    pub coeff: C64,
    pub t_pow: u32,
    pub z_pows: Vec<u32>,
}

impl Monomial {
    fn eval(&self, t: f64, z: &[C64]) -> C64 {
        let mut acc = self.coeff * C64::new(t, 0.0).powu(self.t_pow);
        for (zj, &pj) in z.iter().zip(&self.z_pows) {
            acc *= zj.powu(pj);
        }
        acc
    }

    /// First partial with respect to z_j, evaluated.
    fn partial(&self, j: usize, t: f64, z: &[C64]) -> C64 {
        let pj = self.z_pows[j];
        if pj == 0 {
            return C64::new(0.0, 0.0);
        }
        let mut acc = self.coeff * (pj as f64) * C64::new(t, 0.0).powu(self.t_pow);
        for (k, (zk, &pk)) in z.iter().zip(&self.z_pows).enumerate() {
            let e = if k == j { pk - 1 } else { pk };
            acc *= zk.powu(e);
        }
        acc
    }

    fn partial2(&self, j: usize, l: usize, t: f64, z: &[C64]) -> C64 {
        let pj = self.z_pows[j];
        let pl = self.z_pows[l];
        let factor = if j == l {
            if pj < 2 {
                return C64::new(0.0, 0.0);
            }
            (pj * (pj - 1)) as f64
        } else {
            if pj == 0 || pl == 0 {
                return C64::new(0.0, 0.0);
            }
            (pj * pl) as f64
        };
        let mut acc = self.coeff * factor * C64::new(t, 0.0).powu(self.t_pow);
        for (k, (zk, &pk)) in z.iter().zip(&self.z_pows).enumerate() {
            let mut e = pk;
            if k == j {
                e -= 1;
            }
            if k == l {
                e -= 1;
            }
            acc *= zk.powu(e);
        }
        acc
    }
}

/// A polynomial map I x C^n -> C^n.
#[derive(Debug, Clone)]
pub struct PolyField {
    coords: Vec<Vec<Monomial>>,
    dim: usize,
}

impl PolyField {
    pub fn new(coords: Vec<Vec<Monomial>>) -> Self {
        let dim = coords.len();
        for coord in &coords {
            for m in coord {
                assert_eq!(m.z_pows.len(), dim, "monomial arity mismatch");
            }
        }
        PolyField { coords, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64, z: &CVector) -> CVector {
        CVector::new(
            self.coords
                .iter()
                .map(|coord| coord.iter().map(|m| m.eval(t, z.entries())).sum())
                .collect(),
        )
    }

    /// d f(t, z)[v] = sum_j (d/dz_j f) v_j, exactly.
    pub fn dir_derivative(&self, t: f64, z: &CVector, v: &CVector) -> CVector {
        CVector::new(
            self.coords
                .iter()
                .map(|coord| {
                    let mut acc = C64::new(0.0, 0.0);
                    for m in coord {
                        for j in 0..self.dim {
                            acc += m.partial(j, t, z.entries()) * v.get(j);
                        }
                    }
                    acc
                })
                .collect(),
        )
    }

    /// d^2 f(t, z)[v, w], exactly.
    pub fn dir_derivative2(&self, t: f64, z: &CVector, v: &CVector, w: &CVector) -> CVector {
        CVector::new(
            self.coords
                .iter()
                .map(|coord| {
                    let mut acc = C64::new(0.0, 0.0);
                    for m in coord {
                        for j in 0..self.dim {
                            for l in 0..self.dim {
                                acc += m.partial2(j, l, t, z.entries()) * v.get(j) * w.get(l);
                            }
                        }
                    }
                    acc
                })
                .collect(),
        )
    }

    /// The same polynomial as an expression tree.
    pub fn to_expr(&self) -> FieldExpr {
        let coords = self
            .coords
            .iter()
            .map(|coord| {
                let mut sum: Option<Expr> = None;
                for m in coord {
                    let mut term = Expr::Lit(m.coeff);
                    if m.t_pow > 0 {
                        term = Expr::Mul(Box::new(term), Box::new(pow_of(Expr::Time, m.t_pow)));
                    }
                    for (j, &pj) in m.z_pows.iter().enumerate() {
                        if pj > 0 {
                            term =
                                Expr::Mul(Box::new(term), Box::new(pow_of(Expr::State(j), pj)));
                        }
                    }
                    sum = Some(match sum {
                        None => term,
                        Some(s) => Expr::Add(Box::new(s), Box::new(term)),
                    });
                }
                sum.unwrap_or(Expr::Lit(C64::new(0.0, 0.0)))
            })
            .collect();
        FieldExpr::new(coords).expect("dimensions are consistent by construction")
    }

    /// Seeded random polynomial with per-coordinate term count up to
    /// `max_terms`, total state degree up to `z_deg`, time degree up to
    /// `t_deg`, and coefficients uniform in the disk of radius `scale`.
    pub fn random(
        rng: &mut ChaCha8Rng,
        dim: usize,
        z_deg: u32,
        t_deg: u32,
        max_terms: usize,
        scale: f64,
    ) -> Self {
        let coords = (0..dim)
            .map(|_| {
                let terms = rng.random_range(1..=max_terms);
                (0..terms)
                    .map(|_| {
                        let total = rng.random_range(0..=z_deg);
                        let mut z_pows = vec![0u32; dim];
                        for _ in 0..total {
                            let j = rng.random_range(0..dim);
                            z_pows[j] += 1;
                        }
                        Monomial {
                            coeff: C64::new(
                                rng.random_range(-scale..scale),
                                rng.random_range(-scale..scale),
                            ),
                            t_pow: rng.random_range(0..=t_deg),
                            z_pows,
                        }
                    })
                    .collect()
            })
            .collect();
        PolyField::new(coords)
    }

    /// Guarantee genuine curvature: add `c z_j^2` to every coordinate.
    pub fn with_quadratic_part(mut self, c: f64) -> Self {
        for (k, coord) in self.coords.iter_mut().enumerate() {
            let mut z_pows = vec![0u32; self.dim];
            z_pows[k % self.dim] = 2;
            coord.push(Monomial {
                coeff: C64::new(c, 0.0),
                t_pow: 0,
                z_pows,
            });
        }
        self
    }
}

fn pow_of(base: Expr, p: u32) -> Expr {
    if p == 1 {
        base
    } else {
        Expr::Pow(Box::new(base), p as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rand_vec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> CVector {
        CVector::new(
            (0..dim)
                .map(|_| C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
                .collect(),
        )
    }

    #[test]
    fn expr_conversion_agrees_with_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let dim = rng.random_range(1..=3);
            let p = PolyField::random(&mut rng, dim, 4, 2, 5, 1.0);
            let e = p.to_expr();
            for _ in 0..10 {
                let t = rng.random_range(-1.0..1.0);
                let z = rand_vec(&mut rng, dim, 0.8);
                let a = p.eval(t, &z);
                let b = e.eval(t, &z);
                assert!(a.sub(&b).pnorm(2.0) < 1e-13 * (1.0 + a.pnorm(2.0)));
            }
        }
    }

    #[test]
    fn directional_derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let dim = rng.random_range(1..=3);
            let p = PolyField::random(&mut rng, dim, 4, 1, 4, 1.0);
            let t = rng.random_range(-0.5..0.5);
            let z = rand_vec(&mut rng, dim, 0.5);
            let v = rand_vec(&mut rng, dim, 1.0);
            let h = 1e-6;
            let fd = p
                .eval(t, &z.axpy(C64::new(h, 0.0), &v))
                .sub(&p.eval(t, &z.axpy(C64::new(-h, 0.0), &v)))
                .scale(C64::new(0.5 / h, 0.0));
            let sym = p.dir_derivative(t, &z, &v);
            assert!(fd.sub(&sym).pnorm(2.0) < 1e-8, "fd mismatch");
        }
    }

    #[test]
    fn second_derivative_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..20 {
            let dim = rng.random_range(1..=3);
            let p = PolyField::random(&mut rng, dim, 5, 1, 4, 1.0);
            let t = rng.random_range(-0.5..0.5);
            let z = rand_vec(&mut rng, dim, 0.5);
            let v = rand_vec(&mut rng, dim, 1.0);
            let w = rand_vec(&mut rng, dim, 1.0);
            let a = p.dir_derivative2(t, &z, &v, &w);
            let b = p.dir_derivative2(t, &z, &w, &v);
            assert!(a.sub(&b).pnorm(2.0) < 1e-12);
        }
    }
}
