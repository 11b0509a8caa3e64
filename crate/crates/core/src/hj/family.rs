use std::collections::{BTreeMap, BTreeSet};

use super::report::{CheckOptions, ResidualReport, Tag};
use super::{HjError, OneForm};
use crate::hamiltonian::{poisson, HamiltonianSystem};
use crate::symbolic::linalg::{self, Matrix};
use crate::symbolic::{Expr, Sampler, Symbol};

/// A family of one-forms `alpha_lambda` with `k n` parameters, and
/// optionally the functions `lambda = f(q, p)` inverting it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteSolutionFamily {
    pub params: Vec<String>,
    pub form: OneForm,
    pub inverse: Option<BTreeMap<String, Expr>>,
}

impl CompleteSolutionFamily {
    fn jacobian(&self) -> Matrix {
        let fibre = OneForm::fibre(self.form.k, self.form.n);
        fibre
            .iter()
            .map(|p| {
                let a = &self.form.rules()[p];
                self.params.iter().map(|l| a.diff_symbol(&Symbol::constant(l))).collect()
            })
            .collect()
    }

    /// The member with the given parameter values substituted.
    pub fn member(&self, values: &BTreeMap<String, Expr>) -> OneForm {
        let rules = values.iter().map(|(k, v)| (Symbol::constant(k), v.clone())).collect();
        self.form.substitute_constants(&rules)
    }
}

/// Solves `alpha_lambda(q) = p` for `lambda` when the family is affine in
/// its parameters.
pub fn solve_family_inverse(fam: &CompleteSolutionFamily) -> Result<BTreeMap<String, Expr>, HjError> {
    let jac = fam.jacobian();
    let params: BTreeSet<Symbol> = fam.params.iter().map(|l| Symbol::constant(l)).collect();
    if jac.iter().flatten().any(|e| e.free_symbols().iter().any(|s| params.contains(s))) {
        return Err(HjError::FamilyNotSolvable);
    }
    let zero: BTreeMap<Symbol, Expr> = params.iter().map(|s| (s.clone(), Expr::zero())).collect();
    let rhs: Vec<Expr> = OneForm::fibre(fam.form.k, fam.form.n)
        .iter()
        .map(|p| Expr::coord(*p).sub(&fam.form.rules()[p].substitute(&zero)))
        .collect();
    let sol = linalg::solve(&jac, &rhs).map_err(|e| HjError::NonInvertibleFamily(e.to_string()))?;
    Ok(fam.params.iter().cloned().zip(sol).collect())
}

/// Checks the local diffeomorphism property of the family and the pairwise
/// Poisson brackets of the parameter functions.
pub fn involution_check(
    hs: &HamiltonianSystem,
    fam: &CompleteSolutionFamily,
    opts: &CheckOptions,
) -> Result<ResidualReport, HjError> {
    if opts.samples < 1 {
        return Err(HjError::Samples);
    }
    let ps = hs.phase();
    let expected = ps.k * ps.n;
    if fam.params.len() != expected {
        return Err(HjError::ParameterCount { got: fam.params.len(), expected });
    }
    let det = linalg::determinant(&fam.jacobian());
    if det.is_zero() {
        return Err(HjError::NonInvertibleFamily("parameter Jacobian determinant is identically zero".into()));
    }
    let mut report = ResidualReport::new();
    let mut sampler = Sampler::new(opts.seed).with_nonzero(opts.nonzero.iter().cloned()).with_fixed(opts.fixed.clone());
    let symbols = det.free_symbols();
    let mut min_abs = f64::INFINITY;
    let mut accepted = 0;
    for _ in 0..50 * opts.samples {
        if accepted == opts.samples {
            break;
        }
        let b = sampler.draw(&symbols);
        let Ok(v) = det.evaluate(&b) else { continue };
        if !v.is_finite() {
            continue;
        }
        min_abs = min_abs.min(v.abs());
        accepted += 1;
    }
    if accepted == 0 || min_abs <= opts.tol {
        return Err(HjError::NonInvertibleFamily(format!(
            "parameter Jacobian determinant {} vanishes at a sample point",
            det
        )));
    }
    report.notes.push(format!("parameter Jacobian nonzero at {} sample points (min |det| = {:.3e})", accepted, min_abs));
    let inverse = match &fam.inverse {
        Some(inv) => inv.clone(),
        None => {
            let inv = solve_family_inverse(fam)?;
            report.notes.push("parameter functions obtained by solving the affine family".into());
            inv
        }
    };
    for (i, a) in fam.params.iter().enumerate() {
        for b in &fam.params[i + 1..] {
            let bracket = poisson(&inverse[a], &inverse[b], ps);
            report.push(Tag::Involution, format!("{},{}", a, b), bracket, opts);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::PhaseSpace;
    use crate::symbolic::{parse, Coordinate, ParseContext};

    fn p(s: &str) -> Expr {
        parse(s, &ParseContext::permissive()).unwrap()
    }

    fn hs() -> HamiltonianSystem {
        HamiltonianSystem::new(PhaseSpace::new(1, 2), p("(p0_1^2 + p0_2^2)/2"))
    }

    #[test]
    fn translated_closed_forms_are_in_involution() {
        let form = OneForm::new(
            1,
            2,
            BTreeMap::from([(Coordinate::p(0, 1), p("q0_2 + l1")), (Coordinate::p(0, 2), p("q0_1 + l2"))]),
        )
        .unwrap();
        let fam = CompleteSolutionFamily { params: vec!["l1".into(), "l2".into()], form, inverse: None };
        let inv = solve_family_inverse(&fam).unwrap();
        assert_eq!(inv["l1"], p("p0_1 - q0_2"));
        let r = involution_check(&hs(), &fam, &CheckOptions::default()).unwrap();
        assert!(r.all_zero(Tag::Involution, 0.0));
    }

    #[test]
    fn degenerate_family_is_rejected() {
        let form = OneForm::new(
            1,
            2,
            BTreeMap::from([(Coordinate::p(0, 1), p("l1 + l2")), (Coordinate::p(0, 2), p("2*l1 + 2*l2"))]),
        )
        .unwrap();
        let fam = CompleteSolutionFamily { params: vec!["l1".into(), "l2".into()], form, inverse: None };
        assert!(matches!(involution_check(&hs(), &fam, &CheckOptions::default()), Err(HjError::NonInvertibleFamily(_))));
        assert!(matches!(solve_family_inverse(&fam), Err(HjError::NonInvertibleFamily(_))));
    }

    #[test]
    fn sample_count_must_be_positive() {
        let form = OneForm::exact(1, 2, &p("l1*q0_1 + l2*q0_2")).unwrap();
        let fam = CompleteSolutionFamily { params: vec!["l1".into(), "l2".into()], form, inverse: None };
        let opts = CheckOptions { samples: 0, ..CheckOptions::default() };
        assert!(matches!(involution_check(&hs(), &fam, &opts), Err(HjError::Samples)));
    }
}
