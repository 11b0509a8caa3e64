//! Differential forms of degree one to three in coordinate components.
//!
//! A 2-form is a dense antisymmetric matrix `m` with
//! `omega = sum_{u<v} m[u][v] du^dv`, so `m[u][v]` is the coefficient of
//! `du^dv`. Contraction follows `(i(X) omega)_v = sum_u X^u m[u][v]`.

use std::collections::BTreeMap;
use std::fmt;

use super::VectorField;
use crate::symbolic::{Coordinate, Expr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form1 {
    pub coords: Vec<Coordinate>,
    pub coeffs: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form2 {
    pub coords: Vec<Coordinate>,
    mat: Vec<Vec<Expr>>,
}

/// Only the strictly increasing index triples are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form3 {
    pub coords: Vec<Coordinate>,
    pub coeffs: BTreeMap<(usize, usize, usize), Expr>,
}

fn index(coords: &[Coordinate], c: &Coordinate) -> Option<usize> {
    coords.iter().position(|x| x == c)
}

/// `J[u][a] = d phi_u / d x_a` for a map given by rules on the form's
/// coordinates; coordinates without a rule map to themselves.
fn jacobian(form_coords: &[Coordinate], base: &[Coordinate], rules: &BTreeMap<Coordinate, Expr>) -> Vec<Vec<Expr>> {
    form_coords
        .iter()
        .map(|u| {
            let phi = rules.get(u).cloned().unwrap_or_else(|| Expr::coord(*u));
            base.iter().map(|x| phi.diff(x)).collect()
        })
        .collect()
}

fn write_coeff(f: &mut fmt::Formatter<'_>, first: bool, c: &Expr, basis: &str) -> fmt::Result {
    let negative = c.num_terms() == 1 && c.terms()[0].1 < num_traits::Zero::zero();
    let shown = if negative { c.neg() } else { c.clone() };
    match (first, negative) {
        (true, true) => f.write_str("-")?,
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
        (true, false) => {}
    }
    if shown.is_one() {
        f.write_str(basis)
    } else if shown.num_terms() > 1 {
        write!(f, "({}) {}", shown, basis)
    } else {
        write!(f, "{} {}", shown, basis)
    }
}

impl Form1 {
    pub fn zero(coords: Vec<Coordinate>) -> Self {
        let coeffs = vec![Expr::zero(); coords.len()];
        Form1 { coords, coeffs }
    }

    pub fn new(coords: Vec<Coordinate>, coeffs: Vec<Expr>) -> Self {
        assert_eq!(coords.len(), coeffs.len(), "one coefficient per coordinate");
        Form1 { coords, coeffs }
    }

    /// The exact form `df`.
    pub fn differential(f: &Expr, coords: Vec<Coordinate>) -> Self {
        let coeffs = coords.iter().map(|c| f.diff(c)).collect();
        Form1 { coords, coeffs }
    }

    pub fn coefficient(&self, c: &Coordinate) -> Expr {
        index(&self.coords, c).map(|i| self.coeffs[i].clone()).unwrap_or_default()
    }

    pub fn set(&mut self, c: &Coordinate, value: Expr) {
        let i = index(&self.coords, c).expect("coordinate not in form");
        self.coeffs[i] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    pub fn sub(&self, other: &Form1) -> Form1 {
        assert_eq!(self.coords, other.coords);
        Form1 { coords: self.coords.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn exterior_derivative(&self) -> Form2 {
        let n = self.coords.len();
        let mut out = Form2::zero(self.coords.clone());
        for u in 0..n {
            for v in (u + 1)..n {
                let c = self.coeffs[v].diff(&self.coords[u]).sub(&self.coeffs[u].diff(&self.coords[v]));
                out.set_index(u, v, c);
            }
        }
        out
    }

    /// Pullback along the map `x -> phi(x)` whose components are `rules`;
    /// coefficients are restricted after the Jacobian is formed.
    pub fn pullback(&self, base: &[Coordinate], rules: &BTreeMap<Coordinate, Expr>) -> Form1 {
        let jac = jacobian(&self.coords, base, rules);
        let restricted: Vec<Expr> = self.coeffs.iter().map(|c| c.substitute_coords(rules)).collect();
        let coeffs = (0..base.len())
            .map(|a| {
                restricted
                    .iter()
                    .zip(&jac)
                    .filter(|(c, row)| !c.is_zero() && !row[a].is_zero())
                    .map(|(c, row)| c.mul(&row[a]))
                    .sum()
            })
            .collect();
        Form1 { coords: base.to_vec(), coeffs }
    }

    pub fn evaluate_on(&self, x: &VectorField) -> Expr {
        self.coords
            .iter()
            .zip(&self.coeffs)
            .filter_map(|(c, a)| x.component(c).map(|xc| a.mul(xc)))
            .sum()
    }
}

impl fmt::Display for Form1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, a) in self.coords.iter().zip(&self.coeffs) {
            if a.is_zero() {
                continue;
            }
            write_coeff(f, first, a, &format!("d{}", c))?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Form2 {
    pub fn zero(coords: Vec<Coordinate>) -> Self {
        let n = coords.len();
        Form2 { coords, mat: vec![vec![Expr::zero(); n]; n] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn get_index(&self, u: usize, v: usize) -> &Expr {
        &self.mat[u][v]
    }

    pub fn get(&self, u: &Coordinate, v: &Coordinate) -> Expr {
        match (index(&self.coords, u), index(&self.coords, v)) {
            (Some(i), Some(j)) => self.mat[i][j].clone(),
            _ => Expr::zero(),
        }
    }

    /// Sets the coefficient of `du^dv` and its antisymmetric partner.
    pub fn set_index(&mut self, u: usize, v: usize, value: Expr) {
        assert!(u != v || value.is_zero(), "diagonal of a 2-form is zero");
        self.mat[v][u] = value.neg();
        self.mat[u][v] = value;
    }

    pub fn set(&mut self, u: &Coordinate, v: &Coordinate, value: Expr) {
        let i = index(&self.coords, u).expect("coordinate not in form");
        let j = index(&self.coords, v).expect("coordinate not in form");
        self.set_index(i, j, value);
    }

    pub fn matrix(&self) -> &[Vec<Expr>] {
        &self.mat
    }

    pub fn neg(&self) -> Form2 {
        Form2 { coords: self.coords.clone(), mat: self.mat.iter().map(|r| r.iter().map(Expr::neg).collect()).collect() }
    }

    pub fn sub(&self, other: &Form2) -> Form2 {
        assert_eq!(self.coords, other.coords);
        let mat = self.mat.iter().zip(&other.mat).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.sub(b)).collect()).collect();
        Form2 { coords: self.coords.clone(), mat }
    }

    pub fn is_zero(&self) -> bool {
        self.mat.iter().flatten().all(Expr::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|u| self.mat[u][u].is_zero() && (0..n).all(|v| self.mat[u][v] == self.mat[v][u].neg()))
    }

    /// Coefficients `(u, v, m[u][v])` for `u < v`.
    pub fn upper(&self) -> Vec<(Coordinate, Coordinate, Expr)> {
        let n = self.dim();
        let mut out = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                out.push((self.coords[u], self.coords[v], self.mat[u][v].clone()));
            }
        }
        out
    }

    /// `i(X) omega`.
    pub fn contract(&self, x: &VectorField) -> Form1 {
        let xs: Vec<Expr> = self.coords.iter().map(|c| x.component(c).cloned().unwrap_or_default()).collect();
        let coeffs = (0..self.dim())
            .map(|v| {
                xs.iter()
                    .zip(&self.mat)
                    .filter(|(xu, row)| !xu.is_zero() && !row[v].is_zero())
                    .map(|(xu, row)| xu.mul(&row[v]))
                    .sum()
            })
            .collect();
        Form1 { coords: self.coords.clone(), coeffs }
    }

    /// `omega(X, Y)`.
    pub fn pair(&self, x: &VectorField, y: &VectorField) -> Expr {
        self.contract(x).evaluate_on(y)
    }

    pub fn exterior_derivative(&self) -> Form3 {
        let n = self.dim();
        let c = &self.coords;
        let mut coeffs = BTreeMap::new();
        for u in 0..n {
            for v in (u + 1)..n {
                for w in (v + 1)..n {
                    let e = self.mat[v][w].diff(&c[u]).sub(&self.mat[u][w].diff(&c[v])).add(&self.mat[u][v].diff(&c[w]));
                    coeffs.insert((u, v, w), e);
                }
            }
        }
        Form3 { coords: self.coords.clone(), coeffs }
    }

    /// Pullback along the map given by `rules` (see [`Form1::pullback`]).
    pub fn pullback(&self, base: &[Coordinate], rules: &BTreeMap<Coordinate, Expr>) -> Form2 {
        let jac = jacobian(&self.coords, base, rules);
        let n = self.dim();
        let restricted: Vec<Vec<Expr>> = self.mat.iter().map(|r| r.iter().map(|e| e.substitute_coords(rules)).collect()).collect();
        let mut out = Form2::zero(base.to_vec());
        for a in 0..base.len() {
            for b in (a + 1)..base.len() {
                let mut acc = Expr::zero();
                for u in 0..n {
                    if jac[u][a].is_zero() {
                        continue;
                    }
                    for v in 0..n {
                        if u == v || jac[v][b].is_zero() || restricted[u][v].is_zero() {
                            continue;
                        }
                        acc = acc.add(&jac[u][a].mul(&restricted[u][v]).mul(&jac[v][b]));
                    }
                }
                out.set_index(a, b, acc);
            }
        }
        out
    }
}

impl fmt::Display for Form2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (u, v, c) in self.upper() {
            if c.is_zero() {
                continue;
            }
            write_coeff(f, first, &c, &format!("d{}∧d{}", u, v))?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Form3 {
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(Expr::is_zero)
    }
}
