//! Expression grammar for curve components.
//!
//! Components are entire functions given by a small fixed grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*      -- '/' only by constants
//! factor := '-'? power
//! power  := atom ('^' uint)?
//! atom   := number | 'i' | 'z' | 'exp' '(' expr ')'
//!         | 'interp' '(' uint? ')' | '(' expr ')'
//! ```
//!
//! `interp(k)` is the interpolation series with plateau `k` (see
//! [`super::series`]); `interp()` is the default pattern.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use super::series::{CoefficientPattern, InterpolationSeries, SeriesError};

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone)]
pub enum Expr {
    Const(Complex64),
    Z,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Complex64),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
    Series(Arc<InterpolationSeries>),
}

impl Expr {
    /// Evaluate with an absolute error bound. Closed forms carry only
    /// rounding error (reported relative to magnitude); series components
    /// are truncated with a certified tail below the tolerance.
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<(Complex64, f64), ExprError> {
        Ok(match self {
            Expr::Const(c) => (*c, 0.0),
            Expr::Z => (z, 0.0),
            Expr::Add(a, b) => {
                let (va, ea) = a.eval(z, tol / 2.0)?;
                let (vb, eb) = b.eval(z, tol / 2.0)?;
                (va + vb, ea + eb + (va + vb).norm() * f64::EPSILON)
            }
            Expr::Sub(a, b) => {
                let (va, ea) = a.eval(z, tol / 2.0)?;
                let (vb, eb) = b.eval(z, tol / 2.0)?;
                (va - vb, ea + eb + (va - vb).norm() * f64::EPSILON)
            }
            Expr::Mul(a, b) => {
                let (va, ea) = a.eval(z, tol / 2.0)?;
                let (vb, eb) = b.eval(z, tol / 2.0)?;
                (va * vb, va.norm() * eb + vb.norm() * ea + ea * eb)
            }
            Expr::Div(a, c) => {
                let (va, ea) = a.eval(z, tol * c.norm() / 2.0)?;
                (va / c, ea / c.norm())
            }
            Expr::Pow(a, k) => {
                let (va, ea) = a.eval(z, tol / (2.0 * (*k as f64).max(1.0)))?;
                let v = va.powu(*k);
                let deriv = *k as f64 * va.norm().powi(*k as i32 - 1);
                (v, deriv * ea + v.norm() * f64::EPSILON * *k as f64)
            }
            Expr::Exp(a) => {
                let (va, ea) = a.eval(z, tol / 2.0)?;
                let v = va.exp();
                (v, v.norm() * (ea.exp_m1() + 2.0 * f64::EPSILON))
            }
            Expr::Series(s) => s.eval_complex(z, tol)?,
        })
    }

    /// The interpolation series inside this expression, if the expression is
    /// exactly one (used to expose rational loci).
    pub fn as_series(&self) -> Option<&Arc<InterpolationSeries>> {
        match self {
            Expr::Series(s) => Some(s),
            _ => None,
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Z | Expr::Series(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Div(a, _) => a.is_constant(),
            Expr::Pow(a, _) | Expr::Exp(a) => a.is_constant(),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { bytes: input.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    if !rhs.is_constant() {
                        return Err(self.err("division only by constants"));
                    }
                    let (c, _) = rhs.eval(Complex64::new(0.0, 0.0), 1.0)?;
                    if c.norm() == 0.0 {
                        return Err(self.err("division by zero"));
                    }
                    lhs = Expr::Div(Box::new(lhs), c);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Sub(Box::new(Expr::Const(Complex64::new(0.0, 0.0))), Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.uint()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected atom")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit()
                || self.bytes[self.pos] == b'.'
                || ((self.bytes[self.pos] == b'e' || self.bytes[self.pos] == b'E')
                    && self.pos + 1 < self.bytes.len()
                    && (self.bytes[self.pos + 1].is_ascii_digit()
                        || self.bytes[self.pos + 1] == b'-')))
        {
            if self.bytes[self.pos] == b'e' || self.bytes[self.pos] == b'E' {
                self.pos += 1; // the sign or first digit of the exponent
            }
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| self.err("bad number"))?;
        Ok(Expr::Const(Complex64::new(v, 0.0)))
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match name {
            "z" => Ok(Expr::Z),
            "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            "exp" => {
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after exp"));
                }
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(Expr::Exp(Box::new(inner)))
            }
            "interp" => {
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after interp"));
                }
                self.pos += 1;
                let plateau = if self.peek() == Some(b')') { 0 } else { self.uint()? as usize };
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(Expr::Series(Arc::new(InterpolationSeries::new(CoefficientPattern {
                    plateau,
                }))))
            }
            _ => Err(self.err(&format!("unknown identifier '{name}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ev(src: &str, z: Complex64) -> Complex64 {
        parse(src).unwrap().eval(z, 1e-12).unwrap().0
    }

    #[test]
    fn parses_polynomials() {
        let z = Complex64::new(2.0, -1.0);
        let v = ev("z^3 - 2*z + 1", z);
        let want = z.powu(3) - 2.0 * z + 1.0;
        assert_abs_diff_eq!((v - want).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn parses_exp_and_i() {
        let z = Complex64::new(0.3, 0.4);
        let v = ev("exp(2*z) + i*z", z);
        let want = (2.0 * z).exp() + Complex64::new(0.0, 1.0) * z;
        assert_abs_diff_eq!((v - want).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn division_only_by_constants() {
        assert!(parse("z/2").is_ok());
        assert!(parse("1/z").is_err());
        assert!(parse("z/0").is_err());
    }

    #[test]
    fn reports_parse_position() {
        let err = parse("z + $").unwrap_err();
        assert!(matches!(err, ExprError::Parse { .. }));
    }

    #[test]
    fn interp_atom_builds_series() {
        let e = parse("interp(32)").unwrap();
        assert!(e.as_series().is_some());
        let v = e.eval(Complex64::new(0.0, 0.0), 1e-10).unwrap().0;
        // plateau series is exactly 1 at the node 0
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-10);
    }
}
