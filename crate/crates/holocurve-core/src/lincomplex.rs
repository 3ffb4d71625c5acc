//! Complex-vector, interval, grid and curve primitives shared by all other
//! modules.
//!
//! The state space is C^n with a selectable l^p norm (1 <= p < infinity).
//! Curves are continuous functions I -> C^n stored on a uniform grid with an
//! odd node count, so the interval midpoint t0 is always a node; cubic
//! interpolation serves points between nodes. A curve that also carries
//! derivative samples represents a C^1 element.

use crate::error::{Error, Result};
use crate::exec;

pub type C64 = num_complex::Complex64;

/// A point of the truncated state space C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<C64>,
}

impl CVector {
    pub fn new(entries: Vec<C64>) -> Self {
        CVector { entries }
    }

    pub fn zero(dim: usize) -> Self {
        CVector {
            entries: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Unit coordinate vector scaled by `value`.
    pub fn scaled_basis(dim: usize, index: usize, value: C64) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = Self::zero(dim);
        v.entries[index] = value;
        v
    }

    pub fn from_reals(reals: &[f64]) -> Self {
        CVector {
            entries: reals.iter().map(|&r| C64::new(r, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> C64 {
        self.entries[i]
    }

    pub fn add(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        CVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        CVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: C64) -> CVector {
        CVector {
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// self + c * other.
    pub fn axpy(&self, c: C64, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        CVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    /// l^p norm; `p` must have been validated (see [`norm`]).
    pub fn pnorm(&self, p: f64) -> f64 {
        debug_assert!(p >= 1.0 && p.is_finite());
        if p == 2.0 {
            self.entries
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        } else if p == 1.0 {
            self.entries.iter().map(|z| z.norm()).sum::<f64>()
        } else {
            self.entries
                .iter()
                .map(|z| z.norm().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// The l^p norm (sum |v_i|^p)^(1/p), with the range check on p.
pub fn norm(p: f64, v: &CVector) -> Result<f64> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::Parameter(format!(
            "norm exponent p must satisfy 1 <= p < infinity, got {p}"
        )));
    }
    Ok(v.pnorm(p))
}

/// Compact real interval [t0 - A, t0 + A].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    t0: f64,
    half_width: f64,
}

impl Interval {
    pub fn new(t0: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() || !t0.is_finite() {
            return Err(Error::Parameter(format!(
                "interval needs finite t0 and half-width > 0, got t0={t0}, A={half_width}"
            )));
        }
        Ok(Interval { t0, half_width })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn lo(&self) -> f64 {
        self.t0 - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.t0 + self.half_width
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo() && t <= self.hi()
    }
}

/// Uniform discretization of an interval with an odd node count, so the
/// midpoint t0 is the exact center node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    interval: Interval,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(interval: Interval, m_grid: usize) -> Result<Self> {
        if m_grid < 3 || m_grid % 2 == 0 {
            return Err(Error::Parameter(format!(
                "grid node count must be odd and >= 3, got {m_grid}"
            )));
        }
        let c = (m_grid - 1) / 2;
        let h = interval.half_width() / c as f64;
        let mut nodes: Vec<f64> = (0..m_grid)
            .map(|k| interval.t0() + (k as isize - c as isize) as f64 * h)
            .collect();
        // Pin the anchors exactly: the initial condition lives at t0 and the
        // endpoints must coincide with the interval boundary.
        nodes[c] = interval.t0();
        nodes[0] = interval.lo();
        nodes[m_grid - 1] = interval.hi();
        Ok(Grid { interval, nodes })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    /// Index of the center node t0.
    pub fn center_index(&self) -> usize {
        (self.nodes.len() - 1) / 2
    }

    /// Nominal spacing between adjacent nodes.
    pub fn spacing(&self) -> f64 {
        self.interval.half_width() / self.center_index() as f64
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.interval == other.interval && self.nodes.len() == other.nodes.len()
    }
}

/// A discretized continuous function y : I -> C^n. With derivative samples
/// present it represents a C^1 element.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    grid: Grid,
    values: Vec<CVector>,
    derivs: Option<Vec<CVector>>,
}

impl Curve {
    pub fn new(grid: Grid, values: Vec<CVector>, derivs: Option<Vec<CVector>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "curve needs one value per node: {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(d) = &derivs {
            if d.len() != grid.len() {
                return Err(Error::Parameter(format!(
                    "derivative samples must match node count: {} for {}",
                    d.len(),
                    grid.len()
                )));
            }
        }
        Ok(Curve {
            grid,
            values,
            derivs,
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> CVector) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Curve {
            grid,
            values,
            derivs: None,
        }
    }

    pub fn constant(grid: Grid, value: CVector) -> Self {
        let values = vec![value; grid.len()];
        Curve {
            grid,
            values,
            derivs: None,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn values(&self) -> &[CVector] {
        &self.values
    }

    pub fn value(&self, k: usize) -> &CVector {
        &self.values[k]
    }

    pub fn derivs(&self) -> Option<&[CVector]> {
        self.derivs.as_deref()
    }

    pub fn with_derivs(mut self, derivs: Vec<CVector>) -> Result<Self> {
        if derivs.len() != self.grid.len() {
            return Err(Error::Parameter(
                "derivative samples must match node count".into(),
            ));
        }
        self.derivs = Some(derivs);
        Ok(self)
    }

    /// Max over grid nodes of the l^p norm of the value.
    pub fn sup_norm(&self, p: f64) -> f64 {
        self.values
            .iter()
            .map(|v| v.pnorm(p))
            .fold(0.0, f64::max)
    }

    /// Point evaluation by local cubic interpolation; exact at nodes and for
    /// polynomial data of degree <= 3 (degree <= 2 on the minimal 3-node
    /// grid).
    pub fn eval(&self, t: f64) -> Result<CVector> {
        let iv = self.grid.interval();
        if !iv.contains(t) {
            let overshoot = if t < iv.lo() { iv.lo() - t } else { t - iv.hi() };
            return Err(Error::Domain {
                msg: "evaluation point outside the curve interval".into(),
                t,
                distance: overshoot,
            });
        }
        let nodes = self.grid.nodes();
        let m = nodes.len();
        let width = 4.min(m);
        let h = self.grid.spacing();
        let j = (((t - nodes[0]) / h).floor() as isize).clamp(0, m as isize - 2) as usize;
        let start = j.saturating_sub(1).min(m - width);
        let pts = &nodes[start..start + width];
        let mut out = CVector::zero(self.dim());
        for (i, &xi) in pts.iter().enumerate() {
            let mut basis = 1.0;
            for (k, &xk) in pts.iter().enumerate() {
                if k != i {
                    basis *= (t - xk) / (xi - xk);
                }
            }
            out = out.axpy(C64::new(basis, 0.0), &self.values[start + i]);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Curve) -> Curve {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Curve) -> Curve {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: C64) -> Curve {
        Curve {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.scale(c)).collect(),
            derivs: self
                .derivs
                .as_ref()
                .map(|d| d.iter().map(|v| v.scale(c)).collect()),
        }
    }

    /// self + c * other, value-wise on a shared grid.
    pub fn axpy(&self, c: C64, other: &Curve) -> Curve {
        self.zip_with(other, |a, b| a.axpy(c, b))
    }

    fn zip_with(&self, other: &Curve, f: impl Fn(&CVector, &CVector) -> CVector) -> Curve {
        assert!(
            self.grid.same_as(&other.grid),
            "curve arithmetic requires a shared grid"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(a, b))
            .collect();
        let derivs = match (&self.derivs, &other.derivs) {
            (Some(da), Some(db)) => {
                Some(da.iter().zip(db).map(|(a, b)| f(a, b)).collect())
            }
            _ => None,
        };
        Curve {
            grid: self.grid.clone(),
            values,
            derivs,
        }
    }

    /// Evaluate a map at every node in parallel, in index order.
    pub fn map_nodes<F>(grid: &Grid, f: F) -> Result<Curve>
    where
        F: Fn(usize, f64) -> Result<CVector> + Sync,
    {
        let nodes = grid.nodes();
        let values = exec::try_map_range(nodes.len(), |k| f(k, nodes[k]))?;
        Ok(Curve {
            grid: grid.clone(),
            values,
            derivs: None,
        })
    }
}

/// A box-shaped field domain O = I x B(center, radius) in the l^p norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    interval: Interval,
    center: CVector,
    radius: f64,
    norm_p: f64,
}

impl DomainBox {
    pub fn new(interval: Interval, center: CVector, radius: f64, norm_p: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!(
                "domain radius must be positive, got {radius}"
            )));
        }
        if !(1.0..f64::INFINITY).contains(&norm_p) {
            return Err(Error::Parameter(format!(
                "domain norm exponent must satisfy 1 <= p < infinity, got {norm_p}"
            )));
        }
        Ok(DomainBox {
            interval,
            center,
            radius,
            norm_p,
        })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn center(&self) -> &CVector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm_p(&self) -> f64 {
        self.norm_p
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Distance from the ball boundary, positive inside.
    pub fn interior_margin(&self, xi: &CVector) -> f64 {
        self.radius - xi.sub(&self.center).pnorm(self.norm_p)
    }

    pub fn contains(&self, t: f64, xi: &CVector) -> bool {
        self.interval.contains(t) && self.interior_margin(xi) >= 0.0
    }

    /// Check membership, reporting how far outside the point lies.
    pub fn check(&self, t: f64, xi: &CVector) -> Result<()> {
        if !self.interval.contains(t) {
            let lo = self.interval.lo();
            let hi = self.interval.hi();
            let overshoot = if t < lo { lo - t } else { t - hi };
            return Err(Error::Domain {
                msg: "time coordinate outside the domain interval".into(),
                t,
                distance: overshoot,
            });
        }
        let margin = self.interior_margin(xi);
        if margin < 0.0 {
            return Err(Error::Domain {
                msg: "state outside the domain ball".into(),
                t,
                distance: -margin,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(reals: &[f64]) -> CVector {
        CVector::from_reals(reals)
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(2.0, &cv(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        let v = CVector::new(vec![C64::new(3.0, 4.0), C64::new(0.0, 0.0)]);
        assert!((norm(1.0, &v).unwrap() - 5.0).abs() < 1e-15);
        assert!((norm(2.0, &cv(&[1.0, 1.0, 1.0, 1.0])).unwrap() - 2.0).abs() < 1e-15);
        assert!(norm(0.5, &cv(&[1.0])).is_err());
        assert!(norm(f64::INFINITY, &cv(&[1.0])).is_err());
    }

    #[test]
    fn grid_anchors_are_exact() {
        let iv = Interval::new(0.3, 0.7).unwrap();
        let g = Grid::new(iv, 41).unwrap();
        assert_eq!(g.node(g.center_index()), 0.3);
        assert_eq!(g.node(0), iv.lo());
        assert_eq!(g.node(40), iv.hi());
        assert!(Grid::new(iv, 4).is_err());
        assert!(Grid::new(iv, 1).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let g = Grid::new(iv, 41).unwrap();
        let c = Curve::constant(g.clone(), cv(&[1.0, 0.0]));
        assert!((c.sup_norm(2.0) - 1.0).abs() < 1e-15);

        let lin = Curve::from_fn(g.clone(), |t| cv(&[t]));
        assert!((lin.sup_norm(2.0) - 1.0).abs() < 1e-15);

        // y(t) = (t, t^2): sup of sqrt(t^2 + t^4) on [-1, 1] is sqrt(2).
        let para = Curve::from_fn(g, |t| cv(&[t, t * t]));
        assert!((para.sup_norm(2.0) - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eval_exact_at_nodes_and_for_cubics() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let g = Grid::new(iv, 41).unwrap();
        let cube = Curve::from_fn(g.clone(), |t| cv(&[t * t * t]));
        for &tn in g.nodes() {
            assert_eq!(cube.eval(tn).unwrap().get(0), C64::new(tn * tn * tn, 0.0));
        }
        for k in 0..200 {
            let t = -1.0 + 2.0 * (k as f64 + 0.37) / 200.0;
            let got = cube.eval(t).unwrap().get(0);
            assert!(
                (got - C64::new(t * t * t, 0.0)).norm() < 1e-12,
                "cubic interpolation error at t={t}: {got}"
            );
        }
        assert!(cube.eval(1.5).is_err());
    }

    #[test]
    fn eval_midpoint_of_linear_data_is_mean() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let g = Grid::new(iv, 5).unwrap();
        let lin = Curve::from_fn(g.clone(), |t| cv(&[2.0 * t + 1.0]));
        let tmid = 0.5 * (g.node(1) + g.node(2));
        let want = 0.5 * (2.0 * g.node(1) + 1.0 + 2.0 * g.node(2) + 1.0);
        assert!((lin.eval(tmid).unwrap().get(0).re - want).abs() < 1e-14);
    }

    #[test]
    fn curve_triangle_inequality() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let g = Grid::new(iv, 21).unwrap();
        let a = Curve::from_fn(g.clone(), |t| cv(&[t, 1.0 - t]));
        let b = Curve::from_fn(g, |t| cv(&[t * t, -t]));
        let lhs = a.add(&b).sup_norm(2.0);
        assert!(lhs <= a.sup_norm(2.0) + b.sup_norm(2.0) + 1e-15);
    }

    #[test]
    fn domain_box_membership() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let b = DomainBox::new(iv, cv(&[0.0, 0.0]), 1.0, 2.0).unwrap();
        assert!(b.contains(0.5, &cv(&[0.6, 0.0])));
        assert!(!b.contains(0.5, &cv(&[1.1, 0.0])));
        let err = b.check(2.0, &cv(&[0.0, 0.0])).unwrap_err();
        match err {
            Error::Domain { t, .. } => assert_eq!(t, 2.0),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(DomainBox::new(iv, cv(&[0.0]), -1.0, 2.0).is_err());
    }
}
