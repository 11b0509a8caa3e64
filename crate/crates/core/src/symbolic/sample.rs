//! Seeded random sampling of expressions.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coord::Symbol;
use super::eval::Bindings;
use super::expr::Expr;

/// Draws symbol values uniformly from `[-range, range]`. Symbols listed as
/// nonzero are kept at least `min_abs` away from zero; fixed bindings are
/// never resampled.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    pub range: f64,
    pub min_abs: f64,
    pub nonzero: BTreeSet<String>,
    pub fixed: Bindings,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            range: 2.0,
            min_abs: 0.1,
            nonzero: BTreeSet::new(),
            fixed: Bindings::new(),
        }
    }

    pub fn with_nonzero<I: IntoIterator<Item = String>>(mut self, names: I) -> Self {
        self.nonzero.extend(names);
        self
    }

    pub fn with_fixed(mut self, fixed: Bindings) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn draw(&mut self, symbols: &BTreeSet<Symbol>) -> Bindings {
        let mut b = Bindings::new();
        for s in symbols {
            if let Some(v) = self.fixed.get(s) {
                b.set(s.clone(), v);
                continue;
            }
            let needs_gap = matches!(s, Symbol::Const(n) if self.nonzero.contains(n.as_ref()));
            let v = loop {
                let v = self.rng.gen_range(-self.range..=self.range);
                if !needs_gap || v.abs() >= self.min_abs {
                    break v;
                }
            };
            b.set(s.clone(), v);
        }
        b
    }

    /// Evaluates every expression at `count` points where all of them are
    /// defined; points hitting a domain error are redrawn, up to
    /// `50 * count` attempts. Returns the per-expression maximum absolute
    /// value, or `None` if no admissible point was found.
    pub fn max_abs(&mut self, exprs: &[&Expr], count: usize) -> Option<Vec<f64>> {
        let symbols: BTreeSet<Symbol> = exprs.iter().flat_map(|e| e.free_symbols()).collect();
        let mut maxima = vec![0.0f64; exprs.len()];
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < count && attempts < 50 * count.max(1) {
            attempts += 1;
            let b = self.draw(&symbols);
            let values: Result<Vec<f64>, _> = exprs.iter().map(|e| e.evaluate(&b)).collect();
            let Ok(values) = values else { continue };
            if values.iter().any(|v| !v.is_finite()) {
                continue;
            }
            for (m, v) in maxima.iter_mut().zip(values) {
                *m = m.max(v.abs());
            }
            accepted += 1;
        }
        (accepted == count).then_some(maxima)
    }
}

/// Randomised equality test for expressions whose canonical forms differ,
/// e.g. because of radical identities. Agreement at 20 admissible points
/// within relative tolerance 1e-9 counts as equal. Never used implicitly.
pub fn probably_equal(a: &Expr, b: &Expr, seed: u64) -> bool {
    if a == b {
        return true;
    }
    if a.has_placeholders() || b.has_placeholders() {
        return false;
    }
    let diff = a.sub(b);
    let mut sampler = Sampler::new(seed);
    let symbols: BTreeSet<Symbol> = a.free_symbols().union(&b.free_symbols()).cloned().collect();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 20 && attempts < 1000 {
        attempts += 1;
        let pt = sampler.draw(&symbols);
        let (Ok(x), Ok(y), Ok(d)) = (a.evaluate(&pt), b.evaluate(&pt), diff.evaluate(&pt)) else {
            continue;
        };
        if !(x.is_finite() && y.is_finite()) {
            continue;
        }
        let scale = x.abs().max(y.abs()).max(1.0);
        if d.abs() > 1e-9 * scale {
            return false;
        }
        accepted += 1;
    }
    accepted == 20
}

/// Convenience: numeric values for a map of symbol names.
pub fn bindings_from<I: IntoIterator<Item = (Symbol, f64)>>(it: I) -> Bindings {
    let mut b = Bindings::new();
    let m: BTreeMap<Symbol, f64> = it.into_iter().collect();
    for (k, v) in m {
        b.set(k, v);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::{parse, ParseContext};

    fn p(s: &str) -> Expr {
        parse(s, &ParseContext::permissive()).unwrap()
    }

    #[test]
    fn radical_identity_is_probably_equal_but_not_canonical() {
        let a = p("sqrt(q0_1 + 2)*sqrt(q0_1 + 3)");
        let b = p("sqrt(q0_1^2 + 5*q0_1 + 6)");
        assert_ne!(a, b);
        assert!(probably_equal(&a, &b, 7));
    }

    #[test]
    fn distinguishes_different_expressions() {
        assert!(!probably_equal(&p("q0_1^2"), &p("q0_1"), 1));
        assert!(probably_equal(&p("(q0_1+1)*(q0_1-1)"), &p("q0_1^2 - 1"), 1));
    }

    #[test]
    fn sampling_is_seeded() {
        let e = p("q0_1*mu + sqrt(q1_1)");
        let a = Sampler::new(42).max_abs(&[&e], 10).unwrap();
        let b = Sampler::new(42).max_abs(&[&e], 10).unwrap();
        assert_eq!(a, b);
    }
}
