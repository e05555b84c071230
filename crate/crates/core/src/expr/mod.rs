//! Expression language for potentials, metric components and map components.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' uint)?
//! atom   := number | 'i' | var | func '(' expr ')' | '(' expr ')'
//! func   := conj | abs2 | log | exp
//! var    := 'z' uint | 'w' uint        (1-based)
//! ```

mod parse;

use std::fmt;

use crate::jet::WirtingerJet;
use crate::{Error, Result, C64};

pub use parse::{parse_expression, parse_map_component};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Conj,
    Abs2,
    Log,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Conj => "conj",
            Func::Abs2 => "abs2",
            Func::Log => "log",
            Func::Exp => "exp",
        }
    }
}

/// A coordinate variable as written, e.g. `z2` is `{ letter: 'z', index: 2 }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub letter: char,
    pub index: usize,
}

impl Var {
    pub fn z(index: usize) -> Self {
        Var { letter: 'z', index }
    }

    /// Zero-based coordinate slot.
    pub fn slot(self) -> usize {
        self.index - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Nonnegative real literal.
    Num(f64),
    /// Complex constant built programmatically; the parser never produces it.
    Const(C64),
    ImagUnit,
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn num(x: f64) -> Expr {
        if x < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-x)))
        } else {
            Expr::Num(x)
        }
    }

    pub fn constant(c: C64) -> Expr {
        if c.im == 0.0 {
            Expr::num(c.re)
        } else {
            Expr::Const(c)
        }
    }

    pub fn z(index: usize) -> Expr {
        Expr::Var(Var::z(index))
    }

    pub fn func(f: Func, e: Expr) -> Expr {
        Expr::Func(f, Box::new(e))
    }

    fn as_constant(&self) -> Option<C64> {
        match self {
            Expr::Num(x) => Some(C64::new(*x, 0.0)),
            Expr::Const(c) => Some(*c),
            Expr::ImagUnit => Some(C64::new(0.0, 1.0)),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_constant().is_some_and(|c| c == C64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c == C64::new(1.0, 0.0))
    }

    // Folding constructors used by differentiation and substitution.

    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
            return Expr::constant(x + y);
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
            return Expr::constant(x - y);
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::Num(0.0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
            return Expr::constant(x * y);
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return Expr::Num(0.0);
        }
        if b.is_one() {
            return a;
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Neg(inner) => *inner,
            other => match other.as_constant() {
                Some(c) => Expr::constant(-c),
                None => Expr::Neg(Box::new(other)),
            },
        }
    }

    pub fn pow(a: Expr, n: u32) -> Expr {
        match n {
            0 => Expr::Num(1.0),
            1 => a,
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    /// True when the expression contains `conj` or `abs2`.
    pub fn has_antiholomorphic(&self) -> bool {
        match self {
            Expr::Func(Func::Conj | Func::Abs2, _) => true,
            Expr::Num(_) | Expr::Const(_) | Expr::ImagUnit | Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.has_antiholomorphic(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.has_antiholomorphic() || b.has_antiholomorphic()
            }
        }
    }

    /// Largest 1-based variable index used, or 0.
    pub fn max_var_index(&self) -> usize {
        match self {
            Expr::Var(v) => v.index,
            Expr::Num(_) | Expr::Const(_) | Expr::ImagUnit => 0,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.max_var_index(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var_index().max(b.max_var_index())
            }
        }
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        Ok(match self {
            Expr::Num(x) => C64::new(*x, 0.0),
            Expr::Const(c) => *c,
            Expr::ImagUnit => C64::new(0.0, 1.0),
            Expr::Var(v) => *z.get(v.slot()).ok_or_else(|| unbound(*v, z.len()))?,
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => a.eval(z)? / b.eval(z)?,
            Expr::Pow(a, n) => a.eval(z)?.powu(*n),
            Expr::Func(f, a) => {
                let x = a.eval(z)?;
                match f {
                    Func::Conj => x.conj(),
                    Func::Abs2 => C64::new(x.norm_sqr(), 0.0),
                    Func::Log => x.ln(),
                    Func::Exp => x.exp(),
                }
            }
        })
    }

    /// Evaluates with coordinate jets substituted for the variables.
    pub fn eval_jet(&self, vars: &[WirtingerJet]) -> Result<WirtingerJet> {
        let first = vars.first().ok_or_else(|| Error::config("no coordinate jets supplied"))?;
        self.eval_jet_inner(vars, first)
    }

    fn eval_jet_inner(&self, vars: &[WirtingerJet], like: &WirtingerJet) -> Result<WirtingerJet> {
        let constant = |c: C64| WirtingerJet::constant(c, like.num_vars(), like.order());
        Ok(match self {
            Expr::Num(x) => constant(C64::new(*x, 0.0))?,
            Expr::Const(c) => constant(*c)?,
            Expr::ImagUnit => constant(C64::new(0.0, 1.0))?,
            Expr::Var(v) => vars.get(v.slot()).ok_or_else(|| unbound(*v, vars.len()))?.clone(),
            Expr::Neg(a) => -a.eval_jet_inner(vars, like)?,
            Expr::Add(a, b) => a.eval_jet_inner(vars, like)? + b.eval_jet_inner(vars, like)?,
            Expr::Sub(a, b) => a.eval_jet_inner(vars, like)? - b.eval_jet_inner(vars, like)?,
            Expr::Mul(a, b) => {
                // constant factors are common after differentiation; skip the full product
                match (a.as_constant(), b.as_constant()) {
                    (Some(c), _) => b.eval_jet_inner(vars, like)?.scale(c),
                    (_, Some(c)) => a.eval_jet_inner(vars, like)?.scale(c),
                    _ => a.eval_jet_inner(vars, like)? * b.eval_jet_inner(vars, like)?,
                }
            }
            Expr::Div(a, b) => match b.as_constant() {
                Some(c) if c.norm() > 0.0 => a.eval_jet_inner(vars, like)?.scale(c.inv()),
                _ => a.eval_jet_inner(vars, like)?.div(&b.eval_jet_inner(vars, like)?)?,
            },
            Expr::Pow(a, n) => a.eval_jet_inner(vars, like)?.powi(*n),
            Expr::Func(f, a) => {
                let x = a.eval_jet_inner(vars, like)?;
                match f {
                    Func::Conj => x.conj(),
                    Func::Abs2 => &x * &x.conj(),
                    Func::Log => x.ln()?,
                    Func::Exp => x.exp(),
                }
            }
        })
    }

    /// Symbolic `∂/∂z^k` (zero-based `k`), treating `z̄` as independent.
    pub fn d_z(&self, k: usize) -> Expr {
        self.wirtinger(k, false)
    }

    /// Symbolic `∂/∂z̄^k` (zero-based `k`).
    pub fn d_zbar(&self, k: usize) -> Expr {
        self.wirtinger(k, true)
    }

    fn wirtinger(&self, k: usize, anti: bool) -> Expr {
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::ImagUnit => Expr::Num(0.0),
            Expr::Var(v) => {
                if !anti && v.slot() == k {
                    Expr::Num(1.0)
                } else {
                    Expr::Num(0.0)
                }
            }
            Expr::Neg(a) => Expr::neg(a.wirtinger(k, anti)),
            Expr::Add(a, b) => Expr::add(a.wirtinger(k, anti), b.wirtinger(k, anti)),
            Expr::Sub(a, b) => Expr::sub(a.wirtinger(k, anti), b.wirtinger(k, anti)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.wirtinger(k, anti), (**b).clone()),
                Expr::mul((**a).clone(), b.wirtinger(k, anti)),
            ),
            Expr::Div(a, b) => {
                let da = a.wirtinger(k, anti);
                let db = b.wirtinger(k, anti);
                let first = Expr::div(da, (**b).clone());
                if db.is_zero() {
                    first
                } else {
                    let second = Expr::div(Expr::mul((**a).clone(), db), Expr::pow((**b).clone(), 2));
                    Expr::sub(first, second)
                }
            }
            Expr::Pow(a, n) => {
                let da = a.wirtinger(k, anti);
                if da.is_zero() {
                    return Expr::Num(0.0);
                }
                Expr::mul(Expr::mul(Expr::Num(*n as f64), Expr::pow((**a).clone(), n - 1)), da)
            }
            Expr::Func(f, a) => match f {
                Func::Conj => Expr::func(Func::Conj, a.wirtinger(k, !anti)),
                Func::Abs2 => {
                    let conj_a = Expr::func(Func::Conj, (**a).clone());
                    Expr::add(
                        Expr::mul(a.wirtinger(k, anti), conj_a.clone()),
                        Expr::mul((**a).clone(), conj_a.wirtinger(k, anti)),
                    )
                }
                Func::Log => Expr::div(a.wirtinger(k, anti), (**a).clone()),
                Func::Exp => Expr::mul(self.clone(), a.wirtinger(k, anti)),
            },
        }
        .simplify_conj()
    }

    // conj of a constant or of zero folds away
    fn simplify_conj(self) -> Expr {
        match self {
            Expr::Func(Func::Conj, inner) => match inner.as_constant() {
                Some(c) => Expr::constant(c.conj()),
                None => Expr::Func(Func::Conj, inner),
            },
            other => other,
        }
    }

    /// Replaces variable slot `k` by `replacements[k]`.
    pub fn substitute(&self, replacements: &[Expr]) -> Result<Expr> {
        Ok(match self {
            Expr::Num(_) | Expr::Const(_) | Expr::ImagUnit => self.clone(),
            Expr::Var(v) => replacements.get(v.slot()).ok_or_else(|| unbound(*v, replacements.len()))?.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(replacements)?),
            Expr::Add(a, b) => Expr::add(a.substitute(replacements)?, b.substitute(replacements)?),
            Expr::Sub(a, b) => Expr::sub(a.substitute(replacements)?, b.substitute(replacements)?),
            Expr::Mul(a, b) => Expr::mul(a.substitute(replacements)?, b.substitute(replacements)?),
            Expr::Div(a, b) => Expr::div(a.substitute(replacements)?, b.substitute(replacements)?),
            Expr::Pow(a, n) => Expr::pow(a.substitute(replacements)?, *n),
            Expr::Func(f, a) => Expr::func(*f, a.substitute(replacements)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn unbound(v: Var, available: usize) -> Error {
    Error::config(format!("variable {}{} is not bound ({available} coordinates available)", v.letter, v.index))
}

struct Paren<'a>(&'a Expr, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Const(c) => {
                let sign = if c.im < 0.0 { '-' } else { '+' };
                if c.re < 0.0 {
                    write!(f, "(-{:?}{sign}{:?}*i)", -c.re, c.im.abs())
                } else {
                    write!(f, "({:?}{sign}{:?}*i)", c.re, c.im.abs())
                }
            }
            Expr::ImagUnit => write!(f, "i"),
            Expr::Var(v) => write!(f, "{}{}", v.letter, v.index),
            Expr::Neg(a) => write!(f, "-{}", Paren(a, a.precedence() < 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", a, Paren(b, b.precedence() < 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, Paren(b, b.precedence() < 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Paren(a, a.precedence() < 2), Paren(b, b.precedence() < 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", Paren(a, a.precedence() < 2), Paren(b, b.precedence() < 3)),
            Expr::Pow(a, n) => write!(f, "{}^{n}", Paren(a, a.precedence() < 5)),
            Expr::Func(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn symbolic_wirtinger_matches_hand_derivative() {
        let phi = parse_expression("-log(1 - abs2(z1) - abs2(z2))").unwrap();
        let g12 = phi.d_z(0).d_zbar(1);
        let z = [c(0.3, 0.1), c(-0.2, 0.25)];
        let t = 1.0 - z[0].norm_sqr() - z[1].norm_sqr();
        // ∂₁∂̄₂ of −log(1−|z|²) is z̄₁z₂/(1−|z|²)²
        let expect = z[0].conj() * z[1] / (t * t);
        assert!((g12.eval(&z).unwrap() - expect).norm() < 1e-14);
        let g11 = phi.d_z(0).d_zbar(0);
        let expect11 = (t + z[0].norm_sqr()) / (t * t);
        assert!((g11.eval(&z).unwrap() - expect11).norm() < 1e-14);
    }

    #[test]
    fn substitution_composes() {
        let e = parse_expression("abs2(z1) + z2").unwrap();
        let out = e
            .substitute(&[parse_expression("2*w1").unwrap(), parse_expression("w1^2").unwrap()])
            .unwrap();
        let w = [c(0.5, -0.5)];
        let expect = 4.0 * w[0].norm_sqr() + w[0] * w[0];
        assert!((out.eval(&w).unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn unbound_variable_is_reported() {
        let e = parse_expression("z3").unwrap();
        assert!(matches!(e.eval(&[c(0.0, 0.0)]), Err(Error::Config(_))));
    }

    #[test]
    fn jet_and_plain_evaluation_agree_on_values() {
        let e = parse_expression("exp(z1*conj(z2))/(2 + abs2(z1))^3").unwrap();
        let z = [c(0.1, 0.2), c(-0.4, 0.3)];
        let jets = WirtingerJet::coordinates(&z, 3).unwrap();
        let j = e.eval_jet(&jets).unwrap();
        assert!((j.value() - e.eval(&z).unwrap()).norm() < 1e-15);
    }
}
