//! Circle quadrature for the contour calculus.
//!
//! The basic functional is the normalized circle integral
//! `integral_0^1 g(r e^{2 pi i s}) e^{2 pi i s} ds`, realized by the
//! trapezoid rule on equispaced nodes. For integrands holomorphic on a
//! neighbourhood of the closed disk the rule is exponentially accurate, and
//! it is exact for Laurent polynomials whose degree stays below the node
//! count. The k-th differential of a holomorphic map is the k-fold nested
//! integral with the zeta^{-2} weight; radius powers are folded into the
//! weight so the result does not depend on the circle radius.

use crate::error::{Error, Result};
use crate::exec;
use crate::lincomplex::{C64, CVector};

/// Node count and circle radius for one quadrature contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    m_nodes: usize,
    radius: f64,
}

impl ContourSpec {
    pub fn new(m_nodes: usize, radius: f64) -> Result<Self> {
        if m_nodes < 8 {
            return Err(Error::Parameter(format!(
                "contour needs at least 8 nodes, got {m_nodes}"
            )));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!(
                "contour radius must be positive, got {radius}"
            )));
        }
        Ok(ContourSpec { m_nodes, radius })
    }

    pub fn m_nodes(&self) -> usize {
        self.m_nodes
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.m_nodes, radius)
    }
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            m_nodes: 64,
            radius: 0.5,
        }
    }
}

/// Equispaced unit-circle phases e^{2 pi i j / m}.
pub fn unit_nodes(m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| {
            let s = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            C64::new(s.cos(), s.sin())
        })
        .collect()
}

fn ensure_finite(v: CVector, node: usize) -> Result<CVector> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation {
            node,
            detail: "integrand returned a non-finite value".into(),
        })
    }
}

/// Trapezoid rule for `integral_0^1 g(r e^{2 pi i s}) e^{2 pi i s} ds`:
/// returns `(1/m) sum_j g(zeta_j) (zeta_j / r)` over `zeta_j = r e^{2 pi i j/m}`.
/// Radius scaling beyond the node placement is the caller's business.
///
/// Single integrals run their nodes sequentially: one circle is the inner
/// kernel of the per-grid-node loops, which is where the parallelism lives.
pub fn circle_integral<F>(g: F, spec: &ContourSpec) -> Result<CVector>
where
    F: Fn(C64) -> Result<CVector> + Sync,
{
    let m = spec.m_nodes();
    let phases = unit_nodes(m);
    let r = spec.radius();
    let mut acc: Option<CVector> = None;
    for (j, w) in phases.iter().enumerate() {
        let sample = g(w * r).and_then(|v| ensure_finite(v, j))?;
        acc = Some(match acc {
            None => sample.scale(*w),
            Some(a) => a.axpy(*w, &sample),
        });
    }
    Ok(acc.expect("m >= 8").scale(C64::new(1.0 / m as f64, 0.0)))
}

/// The paper's first-order contour derivative on the unit circle:
/// `oint zeta^{-2} g(zeta) d zeta = (1/m) sum_j conj(w_j) g(w_j)`.
/// Shared by the superposition and ODE modules, which do their own scaling.
pub fn unit_circle_derivative<F>(g: F, m: usize) -> Result<CVector>
where
    F: Fn(C64) -> Result<CVector> + Sync,
{
    let phases = unit_nodes(m);
    let mut acc: Option<CVector> = None;
    for (j, w) in phases.iter().enumerate() {
        let sample = g(*w).and_then(|v| ensure_finite(v, j))?;
        acc = Some(match acc {
            None => sample.scale(w.conj()),
            Some(a) => a.axpy(w.conj(), &sample),
        });
    }
    Ok(acc.expect("m >= 1").scale(C64::new(1.0 / m as f64, 0.0)))
}

/// Double contour with the zeta^{-2} zeta_1^{-2} weight on unit circles.
pub fn unit_circle_second<F>(g: F, m: usize) -> Result<CVector>
where
    F: Fn(C64, C64) -> Result<CVector> + Sync,
{
    let phases = unit_nodes(m);
    let mut acc: Option<CVector> = None;
    for idx in 0..m * m {
        let (a, b) = (idx / m, idx % m);
        let sample = g(phases[a], phases[b]).and_then(|v| ensure_finite(v, idx))?;
        let weight = (phases[a] * phases[b]).conj();
        acc = Some(match acc {
            None => sample.scale(weight),
            Some(s) => s.axpy(weight, &sample),
        });
    }
    Ok(acc.expect("m >= 1").scale(C64::new(1.0 / (m * m) as f64, 0.0)))
}

/// k-th differential of a holomorphic map by the iterated Cauchy formula
/// with the `prod_i zeta_i^{-2}` weight,
///
/// `d^k f(x)(u_1..u_k) = (1/(m r)^k) sum conj(w_{j_1}..w_{j_k})
///                        f(x + r sum_i w_{j_i} u_i)`,
///
/// the nested circle integrals unrolled into one flat sum in row-major
/// order. `f` must be holomorphic on `x` plus the closed polydisk of radius
/// `spec.radius()` in each direction. `k = dirs.len()` is capped at 3.
pub fn kth_differential<F>(
    f: F,
    x: &CVector,
    dirs: &[CVector],
    spec: &ContourSpec,
) -> Result<CVector>
where
    F: Fn(&CVector) -> Result<CVector> + Sync,
{
    let k = dirs.len();
    if k == 0 {
        return f(x);
    }
    if k > 3 {
        return Err(Error::Parameter(format!(
            "iterated contour differentials are capped at order 3, got {k}"
        )));
    }
    let m = spec.m_nodes();
    let r = spec.radius();
    let phases = unit_nodes(m);
    let total = m.pow(k as u32);
    let samples = exec::try_map_range(total, |flat| {
        let mut idx = flat;
        let mut point = x.clone();
        let mut weight = C64::new(1.0, 0.0);
        for dir in dirs {
            let w = phases[idx % m];
            idx /= m;
            point = point.axpy(w * r, dir);
            weight *= w.conj();
        }
        f(&point)
            .and_then(|v| ensure_finite(v, flat))
            .map(|v| v.scale(weight))
    })?;
    let mut acc = CVector::zero(samples[0].dim());
    for s in &samples {
        acc = acc.add(s);
    }
    let scale = 1.0 / (m as f64 * r).powi(k as i32);
    Ok(acc.scale(C64::new(scale, 0.0)))
}

/// Order-zero Cauchy consistency along the direction `u`: combines the
/// mean-value defect `|oint zeta^{-1} f(x + zeta u) d zeta - f(x)|` with the
/// closed-contour defect `|oint f(x + zeta u) d zeta|`. Both vanish for maps
/// holomorphic on the disk; the second one flags anti-holomorphic content
/// that the plain mean (being harmonic-blind) cannot see.
pub fn mean_value_check<F>(f: F, x: &CVector, u: &CVector, spec: &ContourSpec) -> Result<f64>
where
    F: Fn(&CVector) -> Result<CVector> + Sync,
{
    let m = spec.m_nodes();
    let r = spec.radius();
    let phases = unit_nodes(m);
    let samples = exec::try_map_range(m, |j| {
        let point = x.axpy(phases[j] * r, u);
        f(&point).and_then(|v| ensure_finite(v, j))
    })?;
    let dim = samples[0].dim();
    let inv_m = C64::new(1.0 / m as f64, 0.0);
    let mut mean = CVector::zero(dim);
    let mut closed = CVector::zero(dim);
    for (j, s) in samples.iter().enumerate() {
        mean = mean.add(s);
        closed = closed.axpy(phases[j], s);
    }
    mean = mean.scale(inv_m);
    closed = closed.scale(inv_m);
    let center = f(x)?;
    Ok(mean.sub(&center).pnorm(2.0) + closed.pnorm(2.0))
}
