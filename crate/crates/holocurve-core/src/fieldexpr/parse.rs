//! Lexer and recursive-descent parser for field expressions and field files.
//!
//! Grammar:
//!
//! ```text
//! coords  := expr (',' expr)*
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := ('-'|'+') factor | base ('^' ['-'] integer)?
//! base    := number | 't' | 'z' index | '(' expr ')' | func '(' expr ')'
//! func    := 'exp' | 'sin' | 'cos'
//! number  := decimal with optional exponent and optional 'i' suffix
//! ```
//!
//! A field file is `coords` followed by
//! `domain { t0 = ..., A = ..., center = [...], radius = ..., p = ... }`
//! (`p` optional, default 2). `#` starts a line comment. Divisions and
//! negative powers are rejected at parse time whenever the denominator or
//! base contains a state variable, so every accepted expression is entire in
//! the state.

use super::{Expr, Field, FieldExpr, Func};
use crate::error::{Error, Result};
use crate::lincomplex::{C64, CVector, DomainBox, Interval};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, imag: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Equals,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, imag } => {
                if *imag {
                    format!("number {value}i")
                } else {
                    format!("number {value}")
                }
            }
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
            Tok::Equals => "'='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            '+' => {
                out.push(Spanned { tok: Tok::Plus, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '/' => {
                out.push(Spanned { tok: Tok::Slash, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '[' => {
                out.push(Spanned { tok: Tok::LBracket, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            ']' => {
                out.push(Spanned { tok: Tok::RBracket, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '{' => {
                out.push(Spanned { tok: Tok::LBrace, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '}' => {
                out.push(Spanned { tok: Tok::RBrace, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            '=' => {
                out.push(Spanned { tok: Tok::Equals, line: tl, col: tc });
                advance(1, &mut i, &mut col);
            }
            _ if c.is_ascii_digit() || (c == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit()) => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent part; 'e' not followed by digits stays an ident.
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| err_at(tl, tc, format!("malformed number '{text}'")))?;
                let mut imag = false;
                if i < chars.len() && chars[i] == 'i' {
                    let next_is_word = i + 1 < chars.len()
                        && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_');
                    if !next_is_word {
                        imag = true;
                        i += 1;
                    }
                }
                col += i - start;
                out.push(Spanned { tok: Tok::Num { value, imag }, line: tl, col: tc });
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned { tok: Tok::Ident(text), line: tl, col: tc });
            }
            _ => return Err(err_at(tl, tc, format!("unexpected character '{c}'"))),
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    dim: usize,
}

const FORBIDDEN: &[&str] = &["conj", "abs", "re", "im", "Re", "Im", "arg", "norm"];

impl Parser {
    fn new(toks: Vec<Spanned>, dim: usize) -> Self {
        Parser { toks, pos: 0, dim }
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let s = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        s
    }

    fn expect(&mut self, want: Tok) -> Result<Spanned> {
        let s = self.next();
        if s.tok == want {
            Ok(s)
        } else {
            Err(err_at(
                s.line,
                s.col,
                format!("expected {}, found {}", want.describe(), s.tok.describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    let at = self.next();
                    let rhs = self.factor()?;
                    if rhs.contains_state() {
                        return Err(err_at(
                            at.line,
                            at.col,
                            "state variable in denominator breaks holomorphy",
                        ));
                    }
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Tok::Plus => {
                self.next();
                self.factor()
            }
            _ => {
                let base = self.base()?;
                if self.peek().tok == Tok::Caret {
                    let at = self.next();
                    let exponent = self.integer()?;
                    if exponent < 0 && base.contains_state() {
                        return Err(err_at(
                            at.line,
                            at.col,
                            "negative power of a state-dependent base breaks holomorphy",
                        ));
                    }
                    Ok(Expr::Pow(Box::new(base), exponent))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn integer(&mut self) -> Result<i32> {
        let negative = if self.peek().tok == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let s = self.next();
        match s.tok {
            Tok::Num { value, imag: false } if value.fract() == 0.0 && value.abs() <= i32::MAX as f64 => {
                let v = value as i32;
                Ok(if negative { -v } else { v })
            }
            other => Err(err_at(
                s.line,
                s.col,
                format!("expected an integer exponent, found {}", other.describe()),
            )),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let s = self.next();
        match s.tok {
            Tok::Num { value, imag } => Ok(Expr::Lit(if imag {
                C64::new(0.0, value)
            } else {
                C64::new(value, 0.0)
            })),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident_base(&name, s.line, s.col),
            other => Err(err_at(
                s.line,
                s.col,
                format!("expected a value, found {}", other.describe()),
            )),
        }
    }

    fn ident_base(&mut self, name: &str, line: usize, col: usize) -> Result<Expr> {
        if name == "t" {
            return Ok(Expr::Time);
        }
        if let Some(rest) = name.strip_prefix('z') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let idx: usize = rest
                    .parse()
                    .map_err(|_| err_at(line, col, format!("malformed state index '{name}'")))?;
                if idx >= self.dim {
                    return Err(err_at(
                        line,
                        col,
                        format!("state variable {name} out of range for dimension {}", self.dim),
                    ));
                }
                return Ok(Expr::State(idx));
            }
        }
        let func = match name {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        };
        if let Some(func) = func {
            self.expect(Tok::LParen)?;
            let arg = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(Expr::Func(func, Box::new(arg)));
        }
        if FORBIDDEN.contains(&name) {
            return Err(err_at(
                line,
                col,
                format!("'{name}' is not holomorphic and is not part of the grammar"),
            ));
        }
        Err(err_at(
            line,
            col,
            format!("unknown identifier '{name}' (expected t, z<index>, exp, sin or cos)"),
        ))
    }

    fn coords(&mut self) -> Result<Vec<Expr>> {
        let mut coords = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            coords.push(self.expr()?);
        }
        Ok(coords)
    }

    /// A constant expression: no t, no state variables.
    fn constant(&mut self) -> Result<C64> {
        let at = (self.peek().line, self.peek().col);
        let e = self.expr()?;
        if e.contains_state() || e.contains_time() {
            return Err(err_at(at.0, at.1, "expected a constant expression"));
        }
        Ok(e.eval(0.0, &[]))
    }

    fn real_constant(&mut self) -> Result<f64> {
        let at = (self.peek().line, self.peek().col);
        let c = self.constant()?;
        if c.im != 0.0 {
            return Err(err_at(at.0, at.1, "expected a real constant"));
        }
        Ok(c.re)
    }
}

/// Parse a comma-separated coordinate list into a field expression with
/// `n` state variables; the coordinate count must equal `n`.
pub fn parse_field(source: &str, n: usize) -> Result<FieldExpr> {
    if n == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    let mut p = Parser::new(lex(source)?, n);
    let coords = p.coords()?;
    let end = p.peek().clone();
    if end.tok != Tok::Eof {
        return Err(err_at(
            end.line,
            end.col,
            format!("trailing input: {}", end.tok.describe()),
        ));
    }
    if coords.len() != n {
        return Err(Error::Parameter(format!(
            "field has {} coordinates but dimension {n} was requested",
            coords.len()
        )));
    }
    FieldExpr::new(coords)
}

/// Parse a full field file: coordinate list plus domain block. The state
/// dimension is inferred from the coordinate count.
pub fn parse_field_file(source: &str) -> Result<Field> {
    let toks = lex(source)?;
    // The coordinate list ends where the 'domain' keyword starts; split
    // there so state-dimension checking can use the coordinate count.
    let split = toks
        .iter()
        .position(|s| matches!(&s.tok, Tok::Ident(n) if n == "domain"))
        .ok_or_else(|| {
            let last = toks.last().unwrap();
            err_at(last.line, last.col, "missing 'domain { ... }' block")
        })?;

    let mut head: Vec<Spanned> = toks[..split].to_vec();
    let eof_at = toks[split].clone();
    head.push(Spanned { tok: Tok::Eof, line: eof_at.line, col: eof_at.col });
    let mut p = Parser::new(head, usize::MAX);
    let coords = p.coords()?;
    if p.peek().tok != Tok::Eof {
        let s = p.peek();
        return Err(err_at(s.line, s.col, format!("trailing input: {}", s.tok.describe())));
    }
    let dim = coords.len();
    let expr = FieldExpr::new(coords)?;

    let mut q = Parser::new(toks[split..].to_vec(), usize::MAX);
    q.next(); // 'domain'
    q.expect(Tok::LBrace)?;
    let (mut t0, mut half_width, mut radius, mut p_norm) = (None, None, None, None);
    let mut center: Option<Vec<C64>> = None;
    loop {
        let s = q.next();
        let key = match s.tok {
            Tok::RBrace => break,
            Tok::Ident(k) => k,
            other => {
                return Err(err_at(
                    s.line,
                    s.col,
                    format!("expected a domain key or '}}', found {}", other.describe()),
                ))
            }
        };
        q.expect(Tok::Equals)?;
        match key.as_str() {
            "t0" => t0 = Some(q.real_constant()?),
            "A" => half_width = Some(q.real_constant()?),
            "radius" => radius = Some(q.real_constant()?),
            "p" => p_norm = Some(q.real_constant()?),
            "center" => {
                q.expect(Tok::LBracket)?;
                let mut entries = vec![q.constant()?];
                while q.peek().tok == Tok::Comma {
                    q.next();
                    entries.push(q.constant()?);
                }
                q.expect(Tok::RBracket)?;
                center = Some(entries);
            }
            other => {
                return Err(err_at(
                    s.line,
                    s.col,
                    format!("unknown domain key '{other}' (expected t0, A, center, radius, p)"),
                ))
            }
        }
        if q.peek().tok == Tok::Comma {
            q.next();
        }
    }
    let end = q.peek();
    if end.tok != Tok::Eof {
        return Err(err_at(end.line, end.col, format!("trailing input: {}", end.tok.describe())));
    }

    let missing = |what: &str| Error::Parameter(format!("domain block is missing '{what}'"));
    let t0 = t0.ok_or_else(|| missing("t0"))?;
    let half_width = half_width.ok_or_else(|| missing("A"))?;
    let radius = radius.ok_or_else(|| missing("radius"))?;
    let center = center.ok_or_else(|| missing("center"))?;
    let p_norm = p_norm.unwrap_or(2.0);
    if center.len() != dim {
        return Err(Error::Parameter(format!(
            "domain center has {} entries but the field has {} coordinates",
            center.len(),
            dim
        )));
    }
    let interval = Interval::new(t0, half_width)?;
    let domain = DomainBox::new(interval, CVector::new(center), radius, p_norm)?;
    Field::new(expr, domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_state_in_denominator() {
        let err = parse_field("1/z0", 1).unwrap_err();
        match err {
            Error::Parse { msg, .. } => assert!(msg.contains("denominator"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_state_power() {
        assert!(parse_field("z0^-1", 1).is_err());
        assert!(parse_field("(z0 + 1)^-2", 1).is_err());
        assert!(parse_field("t^-1", 1).is_ok());
        assert!(parse_field("2^-3", 1).is_ok());
    }

    #[test]
    fn rejects_forbidden_and_unknown_identifiers() {
        for bad in ["conj(z0)", "abs(z0)", "re(z0)", "im(z0)"] {
            let err = parse_field(bad, 1).unwrap_err();
            match err {
                Error::Parse { msg, .. } => assert!(msg.contains("not holomorphic"), "{msg}"),
                other => panic!("{other:?}"),
            }
        }
        assert!(parse_field("foo(z0)", 1).is_err());
        assert!(parse_field("i", 1).is_err());
    }

    #[test]
    fn reports_positions() {
        let err = parse_field("z0 +\n  conj(z0)", 1).unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn arity_must_match() {
        assert!(parse_field("z0, z0", 1).is_err());
        assert!(parse_field("z0", 2).is_err());
    }

    #[test]
    fn parses_complex_literals() {
        let fe = parse_field("1 + 2i", 1).unwrap();
        let got = fe.eval(0.0, &CVector::zero(1));
        assert_eq!(got.get(0), C64::new(1.0, 2.0));
        let fe = parse_field("0.5e-1i*z0", 1).unwrap();
        let got = fe.eval(0.0, &CVector::from_reals(&[2.0]));
        assert_eq!(got.get(0), C64::new(0.0, 0.1));
    }

    #[test]
    fn parses_field_file() {
        let src = "\
# harmonic oscillator
-z1, z0
domain {
  t0 = 0, A = 0.3,
  center = [0, 0],
  radius = 3,
}";
        let f = parse_field_file(src).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.domain().norm_p(), 2.0);
        assert_eq!(f.domain().interval().t0(), 0.0);
        assert_eq!(f.domain().radius(), 3.0);
        let v = f.eval(0.1, &CVector::from_reals(&[1.0, 2.0])).unwrap();
        assert_eq!(v.get(0), C64::new(-2.0, 0.0));
        assert_eq!(v.get(1), C64::new(1.0, 0.0));
    }

    #[test]
    fn field_file_errors() {
        assert!(parse_field_file("z0").is_err());
        assert!(parse_field_file("z0\ndomain { t0 = 0, A = 1, radius = 1 }").is_err());
        assert!(
            parse_field_file("z0\ndomain { t0 = 0, A = 1, center = [0, 0], radius = 1 }").is_err()
        );
        assert!(parse_field_file("z0\ndomain { t0 = 0, A = 1, center = [0], radius = 1, q = 3 }")
            .is_err());
        // z1 out of range for a 1-coordinate field
        assert!(parse_field_file("z1\ndomain { t0 = 0, A = 1, center = [0], radius = 1 }")
            .is_err());
    }
}
