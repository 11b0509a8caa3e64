use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};

use super::coord::{Coordinate, Symbol};
use super::expr::{Atom, Expr, Func, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol {0}")]
    Unbound(String),
    #[error("domain error in {expr}: {reason}")]
    Domain { expr: String, reason: &'static str },
}

/// Numeric values for coordinates and named constants.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    values: BTreeMap<Symbol, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: Symbol, v: f64) -> &mut Self {
        self.values.insert(s, v);
        self
    }

    pub fn set_coord(&mut self, c: Coordinate, v: f64) -> &mut Self {
        self.set(Symbol::Coord(c), v)
    }

    pub fn set_const(&mut self, name: &str, v: f64) -> &mut Self {
        self.set(Symbol::constant(name), v)
    }

    pub fn with(mut self, s: impl Into<Symbol>, v: f64) -> Self {
        self.values.insert(s.into(), v);
        self
    }

    pub fn with_const(mut self, name: &str, v: f64) -> Self {
        self.set_const(name, v);
        self
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.values.get(s).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, f64)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn extend(&mut self, other: &Bindings) {
        for (k, v) in other.iter() {
            self.values.insert(k.clone(), v);
        }
    }
}

impl Expr {
    pub fn evaluate(&self, b: &Bindings) -> Result<f64, EvalError> {
        self.eval_with(&|s| b.get(s))
    }

    /// Evaluates with an arbitrary symbol lookup. Terms are summed in
    /// canonical order, so equal inputs give bit-identical results.
    pub fn eval_with(&self, lookup: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64, EvalError> {
        let mut total = 0.0;
        for (m, c) in self.terms() {
            let mut term = rational_to_f64(c);
            for (a, e) in m.factors() {
                let base = eval_atom(a, lookup)?;
                term *= power(base, e, a)?;
            }
            total += term;
        }
        Ok(total)
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn eval_atom(a: &Atom, lookup: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64, EvalError> {
    match a {
        Atom::Coord(c) => lookup(&Symbol::Coord(*c)).ok_or_else(|| EvalError::Unbound(c.to_string())),
        Atom::Const(n) => lookup(&Symbol::Const(n.clone())).ok_or_else(|| EvalError::Unbound(n.to_string())),
        Atom::Placeholder(p) => Err(EvalError::Unbound(Expr::placeholder(p.clone()).to_string())),
        Atom::Radical(base) => base.eval_with(lookup),
        Atom::Func(f, arg) => {
            let x = arg.eval_with(lookup)?;
            Ok(match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain {
                            expr: Expr::atom(a.clone()).to_string(),
                            reason: "logarithm of a non-positive value",
                        });
                    }
                    x.ln()
                }
            })
        }
    }
}

fn power(base: f64, e: &Rational, a: &Atom) -> Result<f64, EvalError> {
    if e.is_one() {
        return Ok(base);
    }
    let domain = |reason| EvalError::Domain { expr: Expr::atom(a.clone()).pow(e).to_string(), reason };
    if base == 0.0 && *e < Rational::from_integer(0.into()) {
        return Err(domain("division by zero"));
    }
    if e.is_integer() {
        let n = e.to_integer().to_i32().ok_or_else(|| domain("exponent out of range"))?;
        return Ok(base.powi(n));
    }
    if base < 0.0 {
        return Err(domain("fractional power of a negative value"));
    }
    if *e == Rational::new(1.into(), 2.into()) {
        return Ok(base.sqrt());
    }
    if *e == Rational::new((-1).into(), 2.into()) {
        return Ok(1.0 / base.sqrt());
    }
    Ok(base.powf(rational_to_f64(e)))
}
