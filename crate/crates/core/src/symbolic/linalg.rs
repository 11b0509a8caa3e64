//! Exact linear algebra over canonical expressions.

use super::expr::{Expr, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular (no nonzero pivot in column {0})")]
    Singular(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Matrix = Vec<Vec<Expr>>;

fn pivot_key(e: &Expr) -> (Rational, usize) {
    (e.degree(), e.num_terms())
}

/// Solves `a * x = b` by Gaussian elimination. The pivot in each column is
/// the nonzero candidate of lowest degree (then fewest terms, then lowest
/// row), which keeps results deterministic.
pub fn solve(a: &[Vec<Expr>], b: &[Expr]) -> Result<Vec<Expr>, LinalgError> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(LinalgError::Dimension(format!("{}x? system with {} right-hand sides", n, b.len())));
    }
    let mut m: Vec<Vec<Expr>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by(|&r1, &r2| pivot_key(&m[r1][col]).cmp(&pivot_key(&m[r2][col])).then(r1.cmp(&r2)))
            .ok_or(LinalgError::Singular(col))?;
        m.swap(col, pivot_row);
        let inv = m[col][col].recip();
        for j in col..=n {
            m[col][j] = m[col][j].mul(&inv);
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for j in col..=n {
                let delta = factor.mul(&m[col][j]);
                m[r][j] = m[r][j].sub(&delta);
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}

/// Determinant by cofactor expansion; exact and division-free.
pub fn determinant(a: &[Vec<Expr>]) -> Expr {
    let n = a.len();
    let cols: Vec<usize> = (0..n).collect();
    det_minor(a, 0, &cols)
}

fn det_minor(a: &[Vec<Expr>], row: usize, cols: &[usize]) -> Expr {
    if cols.is_empty() {
        return Expr::one();
    }
    if cols.len() == 1 {
        return a[row][cols[0]].clone();
    }
    let mut acc = Expr::zero();
    for (idx, &c) in cols.iter().enumerate() {
        if a[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_minor(a, row + 1, &rest);
        let term = a[row][c].mul(&minor);
        acc = if idx % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::{parse, ParseContext};

    fn p(s: &str) -> Expr {
        parse(s, &ParseContext::permissive()).unwrap()
    }

    #[test]
    fn solves_constant_system() {
        let a = vec![vec![p("2"), p("1")], vec![p("1"), p("3")]];
        let b = vec![p("3"), p("5")];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![p("4/5"), p("7/5")]);
    }

    #[test]
    fn solves_with_symbolic_pivots() {
        let a = vec![vec![p("0"), p("mu")], vec![p("2"), p("q0_1")]];
        let b = vec![p("rho"), p("0")];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x[1], p("rho/mu"));
        assert_eq!(x[0], p("-1/2*q0_1*rho/mu"));
    }

    #[test]
    fn detects_singularity() {
        let a = vec![vec![p("1"), p("2")], vec![p("2"), p("4")]];
        assert!(matches!(solve(&a, &[p("1"), p("1")]), Err(LinalgError::Singular(1))));
        assert!(determinant(&a).is_zero());
    }

    #[test]
    fn determinant_3x3() {
        let a = vec![
            vec![p("a"), p("1"), p("0")],
            vec![p("0"), p("b"), p("1")],
            vec![p("1"), p("0"), p("c")],
        ];
        assert_eq!(determinant(&a), p("a*b*c + 1"));
    }
}
