//! Canonical expression representation.
//!
//! Every [`Expr`] is stored in a normal form: a sum of terms, each an exact
//! rational coefficient times a [`Monomial`], i.e. a product of [`Atom`]s
//! raised to rational exponents. Terms are kept sorted and merged, zero
//! coefficients are dropped, and nonlinear pieces (functions, radicals and
//! reciprocals of sums) become atoms whose arguments are themselves
//! canonical. Structural equality of two `Expr` values is therefore equality
//! of their canonical forms.
//!
//! Normal-form rules:
//! - positive integer powers of sums are expanded;
//! - a sum raised to a negative or fractional power becomes a
//!   [`Atom::Radical`] whose base has its leading coefficient scaled out;
//! - radicals of rational constants are reduced to integer bases greater
//!   than one with exponent in `(0, 1)`, perfect roots are folded;
//! - `sin(0)`, `cos(0)`, `exp(0)` and `ln(1)` fold to constants.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::coord::{Coordinate, Symbol};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            _ => return None,
        })
    }
}

/// An unknown smooth function of a fixed list of coordinates, possibly
/// differentiated. Used for symbolic candidate sections such as
/// `s2_1(q0_1,q1_1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Placeholder {
    pub name: Arc<str>,
    pub args: Arc<[Coordinate]>,
    /// Derivative count with respect to each argument, parallel to `args`.
    pub derivs: Arc<[u32]>,
}

impl Placeholder {
    pub fn new(name: &str, args: Vec<Coordinate>) -> Self {
        let derivs = vec![0; args.len()];
        Placeholder { name: Arc::from(name), args: Arc::from(args), derivs: Arc::from(derivs) }
    }

    pub fn is_differentiated(&self) -> bool {
        self.derivs.iter().any(|&d| d > 0)
    }

    fn differentiated(&self, slot: usize) -> Self {
        let mut derivs = self.derivs.to_vec();
        derivs[slot] += 1;
        Placeholder { name: self.name.clone(), args: self.args.clone(), derivs: Arc::from(derivs) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Coord(Coordinate),
    Placeholder(Placeholder),
    Const(Arc<str>),
    Func(Func, Expr),
    /// A base that cannot be split into atoms (a sum, a signed monomial,
    /// or a rational constant), carried with a non-positive-integer
    /// exponent.
    Radical(Expr),
}

impl Atom {
    fn is_constant(&self) -> bool {
        match self {
            Atom::Const(_) => true,
            Atom::Func(_, a) | Atom::Radical(a) => a.is_constant(),
            Atom::Coord(_) | Atom::Placeholder(_) => false,
        }
    }
}

/// A product of atoms with nonzero rational exponents, sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Atom, Rational)>);

impl Monomial {
    pub fn factors(&self) -> &[(Atom, Rational)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree in coordinate atoms.
    pub fn coord_degree(&self) -> Rational {
        self.0
            .iter()
            .filter(|(a, _)| matches!(a, Atom::Coord(_) | Atom::Placeholder(_)))
            .fold(Rational::zero(), |acc, (_, e)| acc + e)
    }
}

/// Immutable symbolic expression in canonical form. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Vec<(Monomial, Rational)>>);

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Expr({})", self)
    }
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

#[derive(Default)]
struct Accum(BTreeMap<Monomial, Rational>);

impl Accum {
    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_expr(&mut self, e: &Expr, scale: &Rational) {
        for (m, c) in e.terms() {
            self.add_term(m.clone(), c * scale);
        }
    }

    fn finish(self) -> Expr {
        Expr(Arc::new(self.0.into_iter().collect()))
    }
}

enum Product {
    Term(Rational, Monomial),
    Expanded(Expr),
}

impl Expr {
    pub fn zero() -> Self {
        Expr(Arc::new(Vec::new()))
    }

    pub fn one() -> Self {
        Expr::rational(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(rat(n))
    }

    pub fn rational(r: Rational) -> Self {
        if r.is_zero() {
            Expr::zero()
        } else {
            Expr(Arc::new(vec![(Monomial::default(), r)]))
        }
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::rational(ratio(n, d))
    }

    pub fn atom(a: Atom) -> Self {
        Expr(Arc::new(vec![(Monomial(vec![(a, Rational::one())]), Rational::one())]))
    }

    pub fn coord(c: Coordinate) -> Self {
        Expr::atom(Atom::Coord(c))
    }

    pub fn q(order: usize, axis: usize) -> Self {
        Expr::coord(Coordinate::q(order, axis))
    }

    pub fn p(order: usize, axis: usize) -> Self {
        Expr::coord(Coordinate::p(order, axis))
    }

    pub fn constant(name: &str) -> Self {
        Expr::atom(Atom::Const(Arc::from(name)))
    }

    pub fn symbol(s: &Symbol) -> Self {
        match s {
            Symbol::Coord(c) => Expr::coord(*c),
            Symbol::Const(n) => Expr::atom(Atom::Const(n.clone())),
        }
    }

    pub fn placeholder(p: Placeholder) -> Self {
        Expr::atom(Atom::Placeholder(p))
    }

    pub fn func(f: Func, arg: Expr) -> Self {
        if let Some(r) = arg.as_rational() {
            match f {
                Func::Sin | Func::Exp | Func::Cos if r.is_zero() => {
                    return if f == Func::Sin { Expr::zero() } else { Expr::one() };
                }
                Func::Ln if r.is_one() => return Expr::zero(),
                _ => {}
            }
        }
        Expr::atom(Atom::Func(f, arg))
    }

    pub fn sqrt(&self) -> Self {
        self.pow(&ratio(1, 2))
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// `Some(r)` when the expression is the rational constant `r`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.0.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn as_coordinate(&self) -> Option<Coordinate> {
        match self.single_atom()? {
            Atom::Coord(c) => Some(*c),
            _ => None,
        }
    }

    /// The atom when the expression is exactly one atom with unit
    /// coefficient and exponent.
    pub fn single_atom(&self) -> Option<&Atom> {
        match self.0.as_slice() {
            [(m, c)] if c.is_one() => match m.0.as_slice() {
                [(a, e)] if e.is_one() => Some(a),
                _ => None,
            },
            _ => None,
        }
    }

    /// No coordinates or placeholders appear (named constants may).
    pub fn is_constant(&self) -> bool {
        self.terms().iter().all(|(m, _)| m.0.iter().all(|(a, _)| a.is_constant()))
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    /// Highest total degree in coordinates over all terms.
    pub fn degree(&self) -> Rational {
        self.terms().iter().map(|(m, _)| m.coord_degree()).max().unwrap_or_else(Rational::zero)
    }

    fn from_term(c: Rational, m: Monomial) -> Self {
        if c.is_zero() {
            Expr::zero()
        } else {
            Expr(Arc::new(vec![(m, c)]))
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Expr::zero();
        }
        Expr(Arc::new(self.terms().iter().map(|(m, c)| (m.clone(), c * r)).collect()))
    }

    pub fn add(&self, other: &Expr) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b) = (self.terms(), other.terms());
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Expr(Arc::new(out))
    }

    pub fn sub(&self, other: &Expr) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, other: &Expr) -> Self {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(r) = self.as_rational() {
            return other.scale(&r);
        }
        if let Some(r) = other.as_rational() {
            return self.scale(&r);
        }
        let mut acc = Accum::default();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                let c = c1 * c2;
                match multiply_monomials(m1, m2) {
                    Product::Term(k, m) => acc.add_term(m, c * k),
                    Product::Expanded(e) => acc.add_expr(&e, &c),
                }
            }
        }
        acc.finish()
    }

    pub fn recip(&self) -> Self {
        self.pow(&-Rational::one())
    }

    pub fn div(&self, other: &Expr) -> Self {
        self.mul(&other.recip())
    }

    pub fn powi(&self, n: i64) -> Self {
        self.pow(&rat(n))
    }

    /// Canonical `self^e` for a rational exponent.
    pub fn pow(&self, e: &Rational) -> Self {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return self.clone();
        }
        if self.is_zero() {
            if e.is_positive() {
                return Expr::zero();
            }
            return Expr::from_term(Rational::one(), Monomial(vec![(Atom::Radical(Expr::zero()), e.clone())]));
        }
        if e.is_integer() && e.is_positive() {
            let mut n = e.to_integer().to_u64().expect("exponent too large");
            let mut base = self.clone();
            let mut acc = Expr::one();
            while n > 0 {
                if n & 1 == 1 {
                    acc = acc.mul(&base);
                }
                n >>= 1;
                if n > 0 {
                    base = &base * &base;
                }
            }
            return acc;
        }
        if let [(m, c)] = self.terms() {
            if m.is_one() {
                return rational_pow(c, e);
            }
            if e.is_integer() {
                // Integer powers distribute over a single term.
                let factors = m.0.iter().map(|(a, x)| (a.clone(), x * e));
                let coeff = Expr::rational(pow_rational_int(c, e));
                return coeff.mul(&normalize(factors.collect()));
            }
        }
        let lead = self.terms()[0].1.clone();
        let content = if e.is_integer() { lead } else { lead.abs() };
        let base = self.scale(&content.recip());
        let atom = match base.single_atom() {
            Some(a) if !matches!(a, Atom::Radical(_)) => a.clone(),
            _ => Atom::Radical(base),
        };
        rational_pow(&content, e).mul(&normalize(vec![(atom, e.clone())]))
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        for (m, _) in self.terms() {
            for (a, _) in &m.0 {
                match a {
                    Atom::Coord(c) => {
                        out.insert(Symbol::Coord(*c));
                    }
                    Atom::Const(n) => {
                        out.insert(Symbol::Const(n.clone()));
                    }
                    Atom::Placeholder(p) => {
                        out.extend(p.args.iter().map(|c| Symbol::Coord(*c)));
                    }
                    Atom::Func(_, inner) | Atom::Radical(inner) => inner.collect_symbols(out),
                }
            }
        }
    }

    pub fn free_coords(&self) -> BTreeSet<Coordinate> {
        self.free_symbols().into_iter().filter_map(|s| s.as_coord()).collect()
    }

    pub fn free_constants(&self) -> BTreeSet<String> {
        self.free_symbols()
            .into_iter()
            .filter_map(|s| match s {
                Symbol::Const(n) => Some(n.to_string()),
                Symbol::Coord(_) => None,
            })
            .collect()
    }

    pub fn has_placeholders(&self) -> bool {
        self.terms().iter().any(|(m, _)| {
            m.0.iter().any(|(a, _)| match a {
                Atom::Placeholder(_) => true,
                Atom::Func(_, inner) | Atom::Radical(inner) => inner.has_placeholders(),
                _ => false,
            })
        })
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        self.free_symbols().contains(s)
    }

    /// Highest jet order among free coordinates, or `None` if there are none.
    pub fn max_jet_order(&self) -> Option<usize> {
        self.free_coords().iter().filter(|c| c.is_jet()).map(|c| c.order).max()
    }

    pub fn has_momenta(&self) -> bool {
        self.free_coords().iter().any(|c| c.is_momentum())
    }

    /// True when every factor is a coordinate, named constant or unknown
    /// function raised to an integer power. Zero-testing of such
    /// expressions is decided by the canonical form.
    pub fn is_laurent_polynomial(&self) -> bool {
        self.terms().iter().all(|(m, _)| {
            m.0.iter().all(|(a, e)| {
                e.is_integer() && matches!(a, Atom::Coord(_) | Atom::Const(_) | Atom::Placeholder(_))
            })
        })
    }

    /// Exact partial derivative.
    pub fn diff(&self, v: &Coordinate) -> Self {
        self.diff_symbol(&Symbol::Coord(*v))
    }

    pub fn diff_symbol(&self, v: &Symbol) -> Self {
        let mut acc = Accum::default();
        for (m, c) in self.terms() {
            for (idx, (a, e)) in m.0.iter().enumerate() {
                let da = diff_atom(a, v);
                if da.is_zero() {
                    continue;
                }
                let mut factors = m.0.clone();
                factors[idx].1 = e - Rational::one();
                let reduced = normalize(factors);
                acc.add_expr(&reduced.mul(&da), &(c * e));
            }
        }
        acc.finish()
    }

    /// Simultaneous substitution; right-hand sides are not re-substituted.
    ///
    /// A placeholder argument mapped to another coordinate is renamed;
    /// placeholders whose arguments map to anything else are left as is.
    pub fn substitute(&self, rules: &BTreeMap<Symbol, Expr>) -> Self {
        if rules.is_empty() {
            return self.clone();
        }
        let free = self.free_symbols();
        if !rules.keys().any(|k| free.contains(k)) {
            return self.clone();
        }
        let mut acc = Accum::default();
        for (m, c) in self.terms() {
            let mut term = Expr::rational(c.clone());
            for (a, e) in &m.0 {
                let base = substitute_atom(a, rules);
                term = term.mul(&base.pow(e));
                if term.is_zero() {
                    break;
                }
            }
            acc.add_expr(&term, &Rational::one());
        }
        acc.finish()
    }

    pub fn substitute_coords(&self, rules: &BTreeMap<Coordinate, Expr>) -> Self {
        let rules: BTreeMap<Symbol, Expr> = rules.iter().map(|(k, v)| (Symbol::Coord(*k), v.clone())).collect();
        self.substitute(&rules)
    }
}

fn substitute_atom(a: &Atom, rules: &BTreeMap<Symbol, Expr>) -> Expr {
    match a {
        Atom::Coord(c) => rules.get(&Symbol::Coord(*c)).cloned().unwrap_or_else(|| Expr::coord(*c)),
        Atom::Const(n) => rules.get(&Symbol::Const(n.clone())).cloned().unwrap_or_else(|| Expr::atom(a.clone())),
        Atom::Placeholder(p) => {
            let renamed: Option<Vec<Coordinate>> = p
                .args
                .iter()
                .map(|c| match rules.get(&Symbol::Coord(*c)) {
                    None => Some(*c),
                    Some(e) => e.as_coordinate(),
                })
                .collect();
            match renamed {
                Some(args) => Expr::placeholder(Placeholder {
                    name: p.name.clone(),
                    args: Arc::from(args),
                    derivs: p.derivs.clone(),
                }),
                None => Expr::atom(a.clone()),
            }
        }
        Atom::Func(f, inner) => Expr::func(*f, inner.substitute(rules)),
        Atom::Radical(base) => base.substitute(rules),
    }
}

fn diff_atom(a: &Atom, v: &Symbol) -> Expr {
    match (a, v) {
        (Atom::Coord(c), Symbol::Coord(w)) if c == w => Expr::one(),
        (Atom::Const(n), Symbol::Const(w)) if n == w => Expr::one(),
        (Atom::Coord(_), _) | (Atom::Const(_), _) => Expr::zero(),
        (Atom::Placeholder(p), Symbol::Coord(w)) => match p.args.iter().position(|c| c == w) {
            Some(slot) => Expr::placeholder(p.differentiated(slot)),
            None => Expr::zero(),
        },
        (Atom::Placeholder(_), Symbol::Const(_)) => Expr::zero(),
        (Atom::Func(f, inner), _) => {
            let di = inner.diff_symbol(v);
            if di.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Sin => Expr::func(Func::Cos, inner.clone()),
                Func::Cos => Expr::func(Func::Sin, inner.clone()).neg(),
                Func::Exp => Expr::func(Func::Exp, inner.clone()),
                Func::Ln => inner.recip(),
            };
            outer.mul(&di)
        }
        (Atom::Radical(base), _) => base.diff_symbol(v),
    }
}

fn pow_rational_int(c: &Rational, e: &Rational) -> Rational {
    let n = e.to_integer().to_i32().expect("exponent too large");
    num_traits::Pow::pow(c, n)
}

/// Exact `c^e` for a rational constant, leaving irreducible roots as
/// radical atoms over integer bases.
fn rational_pow(c: &Rational, e: &Rational) -> Expr {
    if e.is_integer() {
        if c.is_zero() && e.is_negative() {
            return Expr::from_term(Rational::one(), Monomial(vec![(Atom::Radical(Expr::zero()), e.clone())]));
        }
        return Expr::rational(pow_rational_int(c, e));
    }
    if c.is_zero() {
        return if e.is_positive() {
            Expr::zero()
        } else {
            Expr::from_term(Rational::one(), Monomial(vec![(Atom::Radical(Expr::zero()), e.clone())]))
        };
    }
    if c.is_negative() {
        return normalize(vec![(Atom::Radical(Expr::rational(c.clone())), e.clone())]);
    }
    let numer = integer_pow(c.numer(), e);
    let denom = integer_pow(c.denom(), &-e);
    numer.mul(&denom)
}

fn integer_pow(m: &BigInt, e: &Rational) -> Expr {
    if m.is_one() {
        return Expr::one();
    }
    let q = e.denom().to_u32().expect("root index too large");
    let root = m.nth_root(q);
    if num_traits::Pow::pow(&root, q) == *m {
        let p = Rational::from_integer(e.numer().clone());
        return Expr::rational(pow_rational_int(&Rational::from_integer(root), &p));
    }
    normalize(vec![(Atom::Radical(Expr::rational(Rational::from_integer(m.clone()))), e.clone())])
}

fn multiply_monomials(a: &Monomial, b: &Monomial) -> Product {
    if a.is_one() {
        return Product::Term(Rational::one(), b.clone());
    }
    if b.is_one() {
        return Product::Term(Rational::one(), a.clone());
    }
    let (x, y) = (&a.0, &b.0);
    let mut merged = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => {
                merged.push(x[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                merged.push(y[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                merged.push((x[i].0.clone(), &x[i].1 + &y[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    merged.extend_from_slice(&x[i..]);
    merged.extend_from_slice(&y[j..]);
    normalize_sorted(merged)
}

/// Builds the canonical expression of a product of atom powers.
pub(crate) fn normalize(mut factors: Vec<(Atom, Rational)>) -> Expr {
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(Atom, Rational)> = Vec::with_capacity(factors.len());
    for (a, e) in factors {
        match merged.last_mut() {
            Some((last, x)) if *last == a => *x += e,
            _ => merged.push((a, e)),
        }
    }
    match normalize_sorted(merged) {
        Product::Term(c, m) => Expr::from_term(c, m),
        Product::Expanded(e) => e,
    }
}

fn normalize_sorted(merged: Vec<(Atom, Rational)>) -> Product {
    let mut coeff = Rational::one();
    let mut kept = Vec::with_capacity(merged.len());
    let mut expand: Vec<Expr> = Vec::new();
    for (a, e) in merged {
        if e.is_zero() {
            continue;
        }
        if let Atom::Radical(base) = &a {
            if let Some(c) = base.as_rational() {
                if c > Rational::one() && c.is_integer() {
                    let whole = e.floor();
                    let frac = &e - &whole;
                    coeff *= pow_rational_int(&c, &whole);
                    if !frac.is_zero() {
                        kept.push((a, frac));
                    }
                    continue;
                }
            } else if e >= Rational::one() {
                let whole = e.floor();
                let frac = &e - &whole;
                expand.push(base.pow(&whole));
                if !frac.is_zero() {
                    kept.push((a, frac));
                }
                continue;
            }
        }
        kept.push((a, e));
    }
    let m = Monomial(kept);
    if expand.is_empty() {
        Product::Term(coeff, m)
    } else {
        let mut out = Expr::from_term(coeff, m);
        for x in expand {
            out = out.mul(&x);
        }
        Product::Expanded(out)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inherent:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inherent(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inherent(&self, rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inherent(self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inherent(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Accum::default();
        for e in iter {
            acc.add_expr(&e, &Rational::one());
        }
        acc.finish()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Coordinate> for Expr {
    fn from(c: Coordinate) -> Self {
        Expr::coord(c)
    }
}
