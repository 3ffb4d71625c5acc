//! Picard solution of y' = phi o [id, y], y(t0) = xi, with the contraction
//! condition as an executable certificate, an RK4 cross-oracle, and the
//! derivative of the solution map through the variational equation.
//!
//! The solvability predicate asks for a tube radius B1 with
//! `sup |phi| on the tube < (1/2) B1 / A`; the search resolves the
//! existential over B1 by a geometric ladder descending from 0.9 times the
//! boundary distance. When it holds, the Picard map is run with the
//! contraction estimate `A M / eps`, `eps = B1 / 2`, which is below 1
//! exactly on the certified region. The derivative of the solution map in a
//! direction (dxi, dphi) solves the variational equation
//! `v' = a.v + dphi o [id, y]`, `v(t0) = dxi`, by the same fixed-point
//! machinery, with `a.v` evaluated by the scaled contour formula.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contour::{unit_circle_derivative, ContourSpec};
use crate::error::{Error, Result};
use crate::exec;
use crate::fieldexpr::Field;
use crate::lincomplex::{C64, CVector, Curve, Grid};
use crate::superpose::{partial2_apply, safety_radius, superpose};

/// Sampling density for tube suprema and direction sets.
#[derive(Debug, Clone, Copy)]
pub struct TubeSampling {
    pub directions: usize,
    pub radii: usize,
    pub seed: u64,
}

impl Default for TubeSampling {
    fn default() -> Self {
        TubeSampling {
            directions: 32,
            radii: 4,
            seed: 0x484f4c4f,
        }
    }
}

/// How a solve treats the contraction certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certify {
    /// Fail with [`Error::NotCertified`] when the predicate does not hold.
    Require,
    /// Record the verdict and iterate anyway.
    Force,
    /// Skip the ladder search and use this tube radius.
    ExplicitB1(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    pub grid_size: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub certify: Certify,
    pub contour: ContourSpec,
    pub sampling: TubeSampling,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            grid_size: 257,
            tol: 1e-12,
            max_iter: 200,
            certify: Certify::Require,
            contour: ContourSpec::default(),
            sampling: TubeSampling::default(),
        }
    }
}

/// Solution curve plus diagnostics.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Fixed point with derivative samples phi(t, y(t)) filled in.
    pub solution: Curve,
    pub iterations: usize,
    /// Contraction estimate A M / eps from the certificate data.
    pub contraction: f64,
    /// Sup-norm of y - xi - integral of phi o [id, y]; the fixed-point
    /// residual of the solved relation.
    pub residual: f64,
    pub condition_ok: bool,
    /// Tube radius used (chosen rung, explicit override, or the ladder top
    /// when nothing was certified).
    pub b1: f64,
    /// Largest observed ratio of consecutive iterate distances.
    pub observed_ratio: f64,
}

/// Deterministic unit directions in the l^p norm. Dimension 1 gets the
/// roots of unity (so axis-aligned suprema are hit exactly); higher
/// dimensions get seeded pseudo-random directions.
pub fn unit_directions(dim: usize, count: usize, p: f64, seed: u64) -> Vec<CVector> {
    if dim == 1 {
        return (0..count)
            .map(|j| {
                let s = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                CVector::new(vec![C64::new(s.cos(), s.sin())])
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = Vec::with_capacity(count);
    while dirs.len() < count {
        let entries: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let v = CVector::new(entries);
        let n = v.pnorm(p);
        if n > 1e-3 {
            dirs.push(v.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    dirs
}

/// The antiderivative operator: t -> integral from t0 to t of v, signed for
/// t < t0, realized by a piecewise-cubic Newton-Cotes rule per grid interval
/// (exact for cubic integrands; the minimal 3-node grid falls back to the
/// quadratic pair rule). The result carries v itself as derivative samples.
pub fn antiderivative(v: &Curve) -> Curve {
    let grid = v.grid();
    let m = grid.len();
    let h = grid.spacing();
    let dim = v.dim();
    let vals = v.values();

    let combine = |weights: &[(f64, usize)]| {
        let mut acc = CVector::zero(dim);
        for &(w, idx) in weights {
            acc = acc.axpy(C64::new(w * h / 24.0, 0.0), &vals[idx]);
        }
        acc
    };
    // Integral over [node j, node j+1].
    let piece = |j: usize| -> CVector {
        if m == 3 {
            // Quadratic pair rule on the minimal grid.
            if j == 0 {
                combine(&[(10.0, 0), (16.0, 1), (-2.0, 2)])
            } else {
                combine(&[(-2.0, 0), (16.0, 1), (10.0, 2)])
            }
        } else if j == 0 {
            combine(&[(9.0, 0), (19.0, 1), (-5.0, 2), (1.0, 3)])
        } else if j == m - 2 {
            combine(&[(1.0, m - 4), (-5.0, m - 3), (19.0, m - 2), (9.0, m - 1)])
        } else {
            combine(&[(-1.0, j - 1), (13.0, j), (13.0, j + 1), (-1.0, j + 2)])
        }
    };

    let c = grid.center_index();
    let mut out = vec![CVector::zero(dim); m];
    for k in c..m - 1 {
        out[k + 1] = out[k].add(&piece(k));
    }
    for k in (0..c).rev() {
        out[k] = out[k + 1].sub(&piece(k));
    }
    Curve::new(grid.clone(), out, Some(vals.to_vec())).expect("lengths match by construction")
}

struct TubeCertificate {
    ok: bool,
    b1: f64,
    sup_m: f64,
    b1_max: f64,
    top_sup: f64,
}

/// Sampled sup of |phi| over the tube {(t, xi + xi1) : t in I, |xi1| <= b1}.
fn tube_sup(phi: &Field, xi: &CVector, b1: f64, grid: &Grid, sampling: &TubeSampling) -> Result<f64> {
    let p = phi.domain().norm_p();
    let dirs = unit_directions(phi.dim(), sampling.directions, p, sampling.seed);
    let nodes = grid.nodes();
    let radii: Vec<f64> = (1..=sampling.radii)
        .map(|j| b1 * j as f64 / sampling.radii as f64)
        .collect();
    let mut points = vec![xi.clone()];
    for dir in &dirs {
        for &r in &radii {
            points.push(xi.axpy(C64::new(r, 0.0), dir));
        }
    }
    let sups = exec::try_map_range(points.len(), |i| {
        let mut worst: f64 = 0.0;
        for &t in nodes {
            worst = worst.max(phi.eval(t, &points[i])?.pnorm(p));
        }
        Ok::<f64, Error>(worst)
    })?;
    Ok(sups.into_iter().fold(0.0, f64::max))
}

fn certificate_search(
    phi: &Field,
    xi: &CVector,
    grid: &Grid,
    sampling: &TubeSampling,
) -> Result<TubeCertificate> {
    let half_width = phi.domain().interval().half_width();
    let dist = phi.domain().interior_margin(xi);
    if dist <= 0.0 {
        return Ok(TubeCertificate {
            ok: false,
            b1: 0.0,
            sup_m: f64::INFINITY,
            b1_max: 0.0,
            top_sup: f64::INFINITY,
        });
    }
    let b1_max = 0.9 * dist;
    let mut top_sup = f64::INFINITY;
    for rung in 0..8 {
        let b1 = b1_max * 0.5_f64.powi(rung);
        if xi.sub(phi.domain().center()).pnorm(phi.domain().norm_p()) + b1
            > phi.domain().radius()
        {
            continue;
        }
        let sup_m = tube_sup(phi, xi, b1, grid, sampling)?;
        if rung == 0 {
            top_sup = sup_m;
        }
        if sup_m < 0.5 * b1 / half_width {
            return Ok(TubeCertificate {
                ok: true,
                b1,
                sup_m,
                b1_max,
                top_sup,
            });
        }
    }
    Ok(TubeCertificate {
        ok: false,
        b1: b1_max,
        sup_m: top_sup,
        b1_max,
        top_sup,
    })
}

/// The solvability predicate: search for a tube radius B1 with the tube
/// inside dom phi and `sup |phi| < (1/2) B1 / A`. Returns the verdict and
/// the certified B1 (the ladder top when the verdict is false).
pub fn condition_p(
    phi: &Field,
    xi: &CVector,
    grid: &Grid,
    sampling: &TubeSampling,
) -> Result<(bool, f64)> {
    let cert = certificate_search(phi, xi, grid, sampling)?;
    Ok((cert.ok, cert.b1))
}

/// Fixed-point iteration y -> xi + integral of phi o [id, y] from the
/// constant start y = xi.
pub fn picard_solve(phi: &Field, xi: &CVector, opts: &PicardOptions) -> Result<SolveReport> {
    if xi.dim() != phi.dim() {
        return Err(Error::Parameter(format!(
            "initial value has dimension {} but the field has {}",
            xi.dim(),
            phi.dim()
        )));
    }
    let grid = Grid::new(*phi.domain().interval(), opts.grid_size)?;
    let p = phi.domain().norm_p();
    let half_width = phi.domain().interval().half_width();

    let cert = match opts.certify {
        Certify::Require | Certify::Force => certificate_search(phi, xi, &grid, &opts.sampling)?,
        Certify::ExplicitB1(b1) => {
            let dist = phi.domain().interior_margin(xi);
            if !(b1 > 0.0) || b1 > dist {
                return Err(Error::Parameter(format!(
                    "explicit B1 = {b1} must lie in (0, {dist:.6}], the distance to the \
                     domain boundary"
                )));
            }
            let sup_m = tube_sup(phi, xi, b1, &grid, &opts.sampling)?;
            TubeCertificate {
                ok: sup_m < 0.5 * b1 / half_width,
                b1,
                sup_m,
                b1_max: 0.9 * dist,
                top_sup: sup_m,
            }
        }
    };
    if !cert.ok && opts.certify == Certify::Require {
        return Err(Error::NotCertified {
            b1_max: cert.b1_max,
            sup_bound: cert.top_sup,
            needed: 0.5 * cert.b1_max / half_width,
        });
    }
    let eps = cert.b1 / 2.0;
    let contraction = if eps > 0.0 {
        half_width * cert.sup_m / eps
    } else {
        f64::INFINITY
    };
    let enforce_tube = cert.ok;

    let xi_curve = Curve::constant(grid.clone(), xi.clone());
    let mut y = xi_curve.clone();
    let mut prev_diff: Option<f64> = None;
    let mut observed_ratio: f64 = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    let mut last_diff = f64::INFINITY;

    while iterations < opts.max_iter {
        let rhs = superpose(phi, &y)?;
        let integral = antiderivative(&rhs);
        let next = Curve::new(
            grid.clone(),
            integral
                .values()
                .iter()
                .map(|f| xi.add(f))
                .collect(),
            Some(rhs.values().to_vec()),
        )
        .expect("lengths match");
        if enforce_tube {
            for (k, val) in next.values().iter().enumerate() {
                let drift = val.sub(xi).pnorm(p);
                if drift > cert.b1 {
                    return Err(Error::Domain {
                        msg: "Picard iterate escaped the certified tube".into(),
                        t: grid.node(k),
                        distance: drift - cert.b1,
                    });
                }
            }
        }
        let diff = next.sub(&y).sup_norm(p);
        if let Some(pd) = prev_diff {
            if pd > 0.0 {
                observed_ratio = observed_ratio.max(diff / pd);
            }
        }
        prev_diff = Some(diff);
        last_diff = diff;
        y = next;
        iterations += 1;
        if diff < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            last_diff,
            ratio: observed_ratio,
        });
    }

    let rhs = superpose(phi, &y)?;
    let fixed_point_image = antiderivative(&rhs);
    let mut residual: f64 = 0.0;
    for (k, val) in y.values().iter().enumerate() {
        let want = xi.add(fixed_point_image.value(k));
        residual = residual.max(val.sub(&want).pnorm(p));
    }
    let solution = y.with_derivs(rhs.values().to_vec())?;

    Ok(SolveReport {
        solution,
        iterations,
        contraction,
        residual,
        condition_ok: cert.ok,
        b1: cert.b1,
        observed_ratio,
    })
}

/// Classical fourth-order one-step oracle on the same grid, marching from
/// t0 towards both endpoints with about `steps` stages per half-interval.
pub fn rk4_solve(phi: &Field, xi: &CVector, steps: usize, grid_size: usize) -> Result<Curve> {
    if xi.dim() != phi.dim() {
        return Err(Error::Parameter("initial value dimension mismatch".into()));
    }
    if steps == 0 {
        return Err(Error::Parameter("rk4 needs at least one step".into()));
    }
    let grid = Grid::new(*phi.domain().interval(), grid_size)?;
    let c = grid.center_index();
    let substeps = steps.div_ceil(c);
    let (lo, hi) = (grid.interval().lo(), grid.interval().hi());

    // Stage times are inside I by construction; clamping only shaves the
    // odd ulp of accumulation at the interval ends.
    let step = |t: f64, h: f64, y: &CVector| -> Result<CVector> {
        let tm = (t + h / 2.0).clamp(lo, hi);
        let te = (t + h).clamp(lo, hi);
        let k1 = phi.eval(t.clamp(lo, hi), y)?;
        let k2 = phi.eval(tm, &y.axpy(C64::new(h / 2.0, 0.0), &k1))?;
        let k3 = phi.eval(tm, &y.axpy(C64::new(h / 2.0, 0.0), &k2))?;
        let k4 = phi.eval(te, &y.axpy(C64::new(h, 0.0), &k3))?;
        let mut incr = k1;
        incr = incr.axpy(C64::new(2.0, 0.0), &k2);
        incr = incr.axpy(C64::new(2.0, 0.0), &k3);
        incr = incr.add(&k4);
        Ok(y.axpy(C64::new(h / 6.0, 0.0), &incr))
    };

    let mut values = vec![CVector::zero(xi.dim()); grid.len()];
    values[c] = xi.clone();
    for dir in [1isize, -1] {
        let mut state = xi.clone();
        let mut k = c as isize;
        while (dir > 0 && (k as usize) < grid.len() - 1) || (dir < 0 && k > 0) {
            let from = grid.node(k as usize);
            let to = grid.node((k + dir) as usize);
            let h = (to - from) / substeps as f64;
            for s in 0..substeps {
                let t = from + h * s as f64;
                state = step(t, h, &state)?;
            }
            k += dir;
            values[k as usize] = state.clone();
        }
    }
    Curve::new(grid, values, None)
}

/// Local Lipschitz constant of phi(t, .) near `(t, xi)` from the contour
/// representation of the partial derivative: `delta0^{-1}` times the max of
/// `|oint zeta^{-2} phi(t1, xi4 + zeta xi3) d zeta|` over sampled `t1` near
/// `t`, `xi4` near `xi`, and `|xi3| = delta0`.
pub fn lipschitz_bound(
    phi: &Field,
    t: f64,
    xi: &CVector,
    delta0: f64,
    spec: &ContourSpec,
) -> Result<f64> {
    if !(delta0 > 0.0) {
        return Err(Error::Parameter("delta0 must be positive".into()));
    }
    let margin = phi.domain().interior_margin(xi);
    if 2.0 * delta0 > margin {
        return Err(Error::Domain {
            msg: "ball of radius 2 delta0 around xi is not inside the domain slice".into(),
            t,
            distance: 2.0 * delta0 - margin,
        });
    }
    let p = phi.domain().norm_p();
    let iv = phi.domain().interval();
    let ht = 0.05 * iv.half_width();
    let t_samples: Vec<f64> = [t - ht, t, t + ht]
        .into_iter()
        .filter(|s| iv.contains(*s))
        .collect();
    let centers: Vec<CVector> = std::iter::once(xi.clone())
        .chain(
            unit_directions(phi.dim(), 8, p, 0x4c495053)
                .into_iter()
                .map(|d| xi.axpy(C64::new(0.5 * delta0, 0.0), &d)),
        )
        .collect();
    let dirs: Vec<CVector> = unit_directions(phi.dim(), 16, p, 0x4c495054)
        .into_iter()
        .map(|d| d.scale(C64::new(delta0, 0.0)))
        .collect();

    let mut cases = Vec::new();
    for &t1 in &t_samples {
        for xi4 in &centers {
            for xi3 in &dirs {
                cases.push((t1, xi4.clone(), xi3.clone()));
            }
        }
    }
    let norms = exec::try_map_range(cases.len(), |i| {
        let (t1, xi4, xi3) = &cases[i];
        let d = unit_circle_derivative(|w| phi.eval(*t1, &xi4.axpy(w, xi3)), spec.m_nodes())?;
        Ok::<f64, Error>(d.pnorm(p))
    })?;
    Ok(norms.into_iter().fold(0.0, f64::max) / delta0)
}

/// Directional derivative of the solution map at (xi, phi) in direction
/// (dxi, dphi): the solution v of the variational equation
/// `v' = a.v + dphi o [id, y]`, `v(t0) = dxi`, by Picard iteration
/// `v -> dxi + l0(a.v + forcing)`. `y` is the base solution curve.
pub fn solution_map_derivative(
    phi: &Field,
    y: &Curve,
    dxi: &CVector,
    dphi: Option<&Field>,
    spec: &ContourSpec,
    tol: f64,
    max_iter: usize,
) -> Result<Curve> {
    if dxi.dim() != phi.dim() {
        return Err(Error::Parameter("dxi dimension mismatch".into()));
    }
    let grid = y.grid().clone();
    let p = phi.domain().norm_p();
    let forcing = match dphi {
        Some(d) => {
            if d.domain() != phi.domain() {
                return Err(Error::Parameter(
                    "dphi must share the domain of phi".into(),
                ));
            }
            superpose(d, y)?
        }
        None => Curve::constant(grid.clone(), CVector::zero(phi.dim())),
    };

    let assemble = |rhs: &Curve| -> Curve {
        let integral = antiderivative(rhs);
        Curve::new(
            grid.clone(),
            integral.values().iter().map(|f| dxi.add(f)).collect(),
            Some(rhs.values().to_vec()),
        )
        .expect("lengths match")
    };

    let mut v = Curve::constant(grid.clone(), dxi.clone());
    let mut iterations = 0;
    let mut last_diff;
    let mut prev_diff: Option<f64> = None;
    let mut ratio: f64 = 0.0;
    loop {
        let rhs = partial2_apply(phi, y, &v, spec)?.add(&forcing);
        let next = assemble(&rhs);
        let diff = next.sub(&v).sup_norm(p);
        if let Some(pd) = prev_diff {
            if pd > 0.0 {
                ratio = ratio.max(diff / pd);
            }
        }
        prev_diff = Some(diff);
        last_diff = diff;
        v = next;
        iterations += 1;
        if diff < tol {
            break;
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                iterations,
                last_diff,
                ratio,
            });
        }
    }
    // Refresh the derivative samples at the converged iterate.
    let rhs = partial2_apply(phi, y, &v, spec)?.add(&forcing);
    v.with_derivs(rhs.values().to_vec())
}

/// Modulus-of-continuity probe for the operator curve a(t) = d_2 phi(t, y(t)):
/// the max over adjacent grid nodes of the operator difference estimated on
/// 16 unit directions. Refining the grid should shrink it at first order.
pub fn a_hat_continuity_probe(phi: &Field, y: &Curve, spec: &ContourSpec) -> Result<f64> {
    let delta0 = safety_radius(y, phi.domain())?;
    let p = phi.domain().norm_p();
    let dirs = unit_directions(phi.dim(), 16, p, 0x41484154);
    let m = y.grid().len();
    let nodes = y.grid().nodes();

    let applied = exec::try_map_range(m * dirs.len(), |flat| {
        let (k, d) = (flat / dirs.len(), flat % dirs.len());
        let out = unit_circle_derivative(
            |w| phi.eval(nodes[k], &y.value(k).axpy(w * delta0, &dirs[d])),
            spec.m_nodes(),
        )?;
        Ok::<CVector, Error>(out.scale(C64::new(1.0 / delta0, 0.0)))
    })?;

    let mut probe: f64 = 0.0;
    for k in 0..m - 1 {
        for d in 0..dirs.len() {
            let a = &applied[k * dirs.len() + d];
            let b = &applied[(k + 1) * dirs.len() + d];
            probe = probe.max(b.sub(a).pnorm(p));
        }
    }
    Ok(probe)
}
