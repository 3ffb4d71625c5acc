//! A small expression language for vector fields x(t, xi) on I x C^n.
//!
//! Expressions are holomorphic in the state variables by construction: the
//! grammar has no conjugation, modulus or real/imaginary part, denominators
//! may not contain state variables, and negative powers are restricted to
//! state-free bases. Entire functions exp, sin, cos are evaluated exactly.

mod parse;

pub use parse::{parse_field, parse_field_file};

use std::fmt;

use crate::error::{Error, Result};
use crate::lincomplex::{C64, CVector, DomainBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn apply(self, z: C64) -> C64 {
        match self {
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
        }
    }
}

/// One output coordinate of a field, as an expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(C64),
    Time,
    State(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, t: f64, z: &[C64]) -> C64 {
        match self {
            Expr::Lit(c) => *c,
            Expr::Time => C64::new(t, 0.0),
            Expr::State(i) => z[*i],
            Expr::Neg(e) => -e.eval(t, z),
            Expr::Add(a, b) => a.eval(t, z) + b.eval(t, z),
            Expr::Sub(a, b) => a.eval(t, z) - b.eval(t, z),
            Expr::Mul(a, b) => a.eval(t, z) * b.eval(t, z),
            Expr::Div(a, b) => a.eval(t, z) / b.eval(t, z),
            Expr::Pow(b, e) => b.eval(t, z).powi(*e),
            Expr::Func(f, e) => f.apply(e.eval(t, z)),
        }
    }

    pub fn contains_state(&self) -> bool {
        match self {
            Expr::Lit(_) | Expr::Time => false,
            Expr::State(_) => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Func(_, e) => e.contains_state(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_state() || b.contains_state()
            }
        }
    }

    pub fn contains_time(&self) -> bool {
        match self {
            Expr::Lit(_) | Expr::State(_) => false,
            Expr::Time => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Func(_, e) => e.contains_time(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_time() || b.contains_time()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Neg(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Lit(_) | Expr::Time | Expr::State(_) | Expr::Func(..) => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < parent;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Lit(c) => write_complex(f, *c)?,
            Expr::Time => write!(f, "t")?,
            Expr::State(i) => write!(f, "z{i}")?,
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_at(f, 2)?;
            }
            Expr::Add(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " + ")?;
                b.fmt_at(f, 1)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " - ")?;
                b.fmt_at(f, 1)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "*")?;
                b.fmt_at(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "/")?;
                b.fmt_at(f, 4)?;
            }
            Expr::Pow(b, e) => {
                b.fmt_at(f, 4)?;
                write!(f, "^{e}")?;
            }
            Expr::Func(func, e) => {
                write!(f, "{}(", func.name())?;
                e.fmt_at(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn write_complex(f: &mut fmt::Formatter<'_>, c: C64) -> fmt::Result {
    if c.im == 0.0 {
        if c.re < 0.0 {
            write!(f, "({})", c.re)
        } else {
            write!(f, "{}", c.re)
        }
    } else if c.re == 0.0 {
        if c.im < 0.0 {
            write!(f, "({}i)", c.im)
        } else {
            write!(f, "{}i", c.im)
        }
    } else if c.im < 0.0 {
        write!(f, "({} - {}i)", c.re, -c.im)
    } else {
        write!(f, "({} + {}i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// A field expression: one coordinate tree per output coordinate; the state
/// dimension equals the coordinate count.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    coords: Vec<Expr>,
    dim: usize,
}

impl FieldExpr {
    pub fn new(coords: Vec<Expr>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Parameter("field needs at least one coordinate".into()));
        }
        let dim = coords.len();
        for c in &coords {
            check_state_indices(c, dim)?;
        }
        Ok(FieldExpr { coords, dim })
    }

    pub fn zero(dim: usize) -> Self {
        FieldExpr {
            coords: vec![Expr::Lit(C64::new(0.0, 0.0)); dim],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[Expr] {
        &self.coords
    }

    /// Pointwise evaluation with no domain checking.
    pub fn eval(&self, t: f64, xi: &CVector) -> CVector {
        debug_assert_eq!(xi.dim(), self.dim);
        CVector::new(
            self.coords
                .iter()
                .map(|c| c.eval(t, xi.entries()))
                .collect(),
        )
    }

    pub fn scale(&self, c: C64) -> FieldExpr {
        FieldExpr {
            coords: self
                .coords
                .iter()
                .map(|e| Expr::Mul(Box::new(Expr::Lit(c)), Box::new(e.clone())))
                .collect(),
            dim: self.dim,
        }
    }

    /// Coordinatewise self + c * other.
    pub fn add_scaled(&self, c: C64, other: &FieldExpr) -> Result<FieldExpr> {
        if other.dim != self.dim {
            return Err(Error::Parameter(format!(
                "field dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                Expr::Add(
                    Box::new(a.clone()),
                    Box::new(Expr::Mul(Box::new(Expr::Lit(c)), Box::new(b.clone()))),
                )
            })
            .collect();
        Ok(FieldExpr {
            coords,
            dim: self.dim,
        })
    }
}

fn check_state_indices(e: &Expr, dim: usize) -> Result<()> {
    match e {
        Expr::State(i) => {
            if *i >= dim {
                Err(Error::Parameter(format!(
                    "state variable z{i} out of range for dimension {dim}"
                )))
            } else {
                Ok(())
            }
        }
        Expr::Lit(_) | Expr::Time => Ok(()),
        Expr::Neg(x) | Expr::Pow(x, _) | Expr::Func(_, x) => check_state_indices(x, dim),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            check_state_indices(a, dim)?;
            check_state_indices(b, dim)
        }
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coords.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            c.fmt_at(f, 0)?;
        }
        Ok(())
    }
}

/// A field expression together with its box-shaped domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    expr: FieldExpr,
    domain: DomainBox,
}

impl Field {
    pub fn new(expr: FieldExpr, domain: DomainBox) -> Result<Self> {
        if expr.dim() != domain.dim() {
            return Err(Error::Parameter(format!(
                "field has {} coordinates but the domain center has dimension {}",
                expr.dim(),
                domain.dim()
            )));
        }
        Ok(Field { expr, domain })
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.expr.dim()
    }

    /// Domain-checked evaluation of x(t, xi).
    pub fn eval(&self, t: f64, xi: &CVector) -> Result<CVector> {
        self.domain.check(t, xi)?;
        Ok(self.expr.eval(t, xi))
    }

    /// Same domain, different expression.
    pub fn with_expr(&self, expr: FieldExpr) -> Result<Field> {
        Field::new(expr, self.domain.clone())
    }

    /// self + c * other on the shared domain.
    pub fn add_scaled(&self, c: C64, other: &Field) -> Result<Field> {
        if self.domain != other.domain {
            return Err(Error::Parameter(
                "field combination requires identical domains".into(),
            ));
        }
        self.with_expr(self.expr.add_scaled(c, &other.expr)?)
    }
}

/// Domain-checked evaluation of x(t, xi); the spec-level operation name.
pub fn eval_field(f: &Field, t: f64, xi: &CVector) -> Result<CVector> {
    f.eval(t, xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomplex::Interval;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eval_square_of_one_plus_i() {
        let fe = parse_field("z0^2", 1).unwrap();
        let got = fe.eval(0.0, &CVector::new(vec![c(1.0, 1.0)]));
        assert!((got.get(0) - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_t_weighted_state_at_zero_time() {
        let fe = parse_field("t*z0", 1).unwrap();
        let got = fe.eval(0.0, &CVector::new(vec![c(0.7, -0.3)]));
        assert_eq!(got.get(0), c(0.0, 0.0));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let fe = parse_field("exp(z0)", 1).unwrap();
        let got = fe.eval(0.3, &CVector::zero(1));
        assert!((got.get(0) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_coordinate_field() {
        let fe = parse_field("t*z1, -z0", 2).unwrap();
        assert_eq!(fe.dim(), 2);
        let got = fe.eval(2.0, &CVector::from_reals(&[3.0, 5.0]));
        assert_eq!(got.get(0), c(10.0, 0.0));
        assert_eq!(got.get(1), c(-3.0, 0.0));
    }

    #[test]
    fn field_domain_is_enforced() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let dom = DomainBox::new(iv, CVector::zero(1), 1.0, 2.0).unwrap();
        let f = Field::new(parse_field("z0^2", 1).unwrap(), dom).unwrap();
        assert!(f.eval(0.5, &CVector::from_reals(&[0.5])).is_ok());
        assert!(f.eval(0.5, &CVector::from_reals(&[1.5])).is_err());
        assert!(f.eval(3.0, &CVector::zero(1)).is_err());
    }

    #[test]
    fn display_reparses_to_equivalent_tree() {
        let sources = [
            ("t*z1 + exp(z0)^2 - (1 - 0.5i)*z0, z0*z1/2.5", 2),
            ("-z0^3 + sin(t*z0) - cos(z0)/(t + 4)", 1),
            ("(z0 + z1)^4*1e-2, t/2 - z1", 2),
        ];
        for (src, n) in sources {
            let fe = parse_field(src, n).unwrap();
            let printed = fe.to_string();
            let re = parse_field(&printed, n).unwrap();
            for k in 0..25 {
                let t = -1.0 + 2.0 * (k as f64) / 24.0;
                let xi = CVector::new(vec![c(0.3 * t, 0.1 + 0.05 * t), c(-0.2, 0.4 * t)]);
                let xi = CVector::new(xi.entries()[..n].to_vec());
                let a = fe.eval(t, &xi);
                let b = re.eval(t, &xi);
                assert!(
                    a.sub(&b).pnorm(2.0) < 1e-14,
                    "round-trip mismatch for {src} printed as {printed}"
                );
            }
        }
    }

    #[test]
    fn add_scaled_combines_fields() {
        let a = parse_field("z0^2", 1).unwrap();
        let b = parse_field("z0", 1).unwrap();
        let combo = a.add_scaled(c(0.0, 1.0), &b).unwrap();
        let got = combo.eval(0.0, &CVector::from_reals(&[2.0]));
        assert!((got.get(0) - c(4.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn state_index_out_of_range_is_rejected() {
        assert!(parse_field("z2", 2).is_err());
        assert!(FieldExpr::new(vec![Expr::State(1)]).is_err());
    }
}
