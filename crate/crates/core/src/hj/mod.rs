//! Hamilton-Jacobi residual systems, the Legendre transport of solutions
//! and complete-solution checks.

use std::collections::BTreeMap;

use crate::hamiltonian::HamiltonianError;
use crate::jet::{JetError, JetSpace};
use crate::lagrangian::LagrangianError;
use crate::symbolic::{Coordinate, Expr, Placeholder};

mod family;
mod report;
mod residuals;

pub use family::{involution_check, solve_family_inverse, CompleteSolutionFamily};
pub use report::{classify, CheckOptions, Classification, Residual, ResidualReport, ResidualVerdict, Tag, Verdict};
pub use residuals::{
    associated_field_ham, associated_field_lag, gen_ham_residuals, gen_lag_residuals, ham_closedness,
    ham_energy_residuals, hj_equation, hj_on_form, lag_closedness, lag_energy_residuals, lag_genfunc_residuals, transport_to_ham,
    transport_to_lag, HjOutcome,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HjError {
    #[error("{what}: missing component {coord}")]
    Missing { what: &'static str, coord: Coordinate },
    #[error("{what}: unexpected component {coord}")]
    Unexpected { what: &'static str, coord: Coordinate },
    #[error("{what}: component {component} depends on {coord}, outside T^{order}Q")]
    Scope { what: &'static str, component: Coordinate, coord: Coordinate, order: usize },
    #[error("family has {got} parameters, expected {expected}")]
    ParameterCount { got: usize, expected: usize },
    #[error("family is not invertible for its parameters: {0}")]
    NonInvertibleFamily(String),
    #[error("family has no inverse rules and is not affine in its parameters")]
    FamilyNotSolvable,
    #[error("sample count must be at least 1")]
    Samples,
    #[error("energy constant required for a strict verdict")]
    UnboundEnergy,
    #[error(transparent)]
    Lagrangian(#[from] LagrangianError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

fn check_scope(
    what: &'static str,
    k: usize,
    n: usize,
    components: &BTreeMap<Coordinate, Expr>,
    expected: &[Coordinate],
) -> Result<(), HjError> {
    for c in expected {
        if !components.contains_key(c) {
            return Err(HjError::Missing { what, coord: *c });
        }
    }
    if let Some(c) = components.keys().find(|c| !expected.contains(c)) {
        return Err(HjError::Unexpected { what, coord: *c });
    }
    let base = JetSpace::new(k - 1, n);
    for (component, e) in components {
        if let Some(coord) = e.free_coords().into_iter().find(|c| !base.contains(c)) {
            return Err(HjError::Scope { what, component: *component, coord, order: k - 1 });
        }
    }
    Ok(())
}

/// A section of `T^{2k-1} Q -> T^{k-1} Q`: components `s_j^A` for
/// `k <= j <= 2k-1`, functions of `q_0, ..., q_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub k: usize,
    pub n: usize,
    components: BTreeMap<Coordinate, Expr>,
}

impl Section {
    pub fn new(k: usize, n: usize, components: BTreeMap<Coordinate, Expr>) -> Result<Self, HjError> {
        check_scope("section", k, n, &components, &Self::fibre(k, n))?;
        Ok(Section { k, n, components })
    }

    /// Fibre coordinates `q_k .. q_{2k-1}`.
    pub fn fibre(k: usize, n: usize) -> Vec<Coordinate> {
        (k..2 * k).flat_map(|j| (1..=n).map(move |a| Coordinate::q(j, a))).collect()
    }

    /// A section of unknown functions `{prefix}{j}_{A}(q_0, .., q_{k-1})`.
    pub fn placeholder(k: usize, n: usize, prefix: &str) -> Self {
        let args = JetSpace::new(k - 1, n).coords();
        let components = Self::fibre(k, n)
            .into_iter()
            .map(|c| {
                let name = format!("{}{}_{}", prefix, c.order, c.axis);
                (c, Expr::placeholder(Placeholder::new(&name, args.clone())))
            })
            .collect();
        Section { k, n, components }
    }

    pub fn component(&self, c: &Coordinate) -> &Expr {
        &self.components[c]
    }

    /// The substitution `q_j^A -> s_j^A` that restricts to `Im(s)`.
    pub fn rules(&self) -> &BTreeMap<Coordinate, Expr> {
        &self.components
    }

    pub fn base(&self) -> JetSpace {
        JetSpace::new(self.k - 1, self.n)
    }
}

/// A 1-form on `T^{k-1} Q`: components `alpha_A^i`, stored under the
/// momentum coordinate `p_A^i` they replace on `Im(alpha)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    pub k: usize,
    pub n: usize,
    components: BTreeMap<Coordinate, Expr>,
}

impl OneForm {
    pub fn new(k: usize, n: usize, components: BTreeMap<Coordinate, Expr>) -> Result<Self, HjError> {
        check_scope("one-form", k, n, &components, &Self::fibre(k, n))?;
        Ok(OneForm { k, n, components })
    }

    pub fn fibre(k: usize, n: usize) -> Vec<Coordinate> {
        JetSpace::new(k - 1, n).coords().iter().map(Coordinate::conjugate).collect()
    }

    pub fn placeholder(k: usize, n: usize, prefix: &str) -> Self {
        let args = JetSpace::new(k - 1, n).coords();
        let components = Self::fibre(k, n)
            .into_iter()
            .map(|c| {
                let name = format!("{}{}_{}", prefix, c.order, c.axis);
                (c, Expr::placeholder(Placeholder::new(&name, args.clone())))
            })
            .collect();
        OneForm { k, n, components }
    }

    /// `alpha = dW`.
    pub fn exact(k: usize, n: usize, w: &Expr) -> Result<Self, HjError> {
        let components = JetSpace::new(k - 1, n).coords().iter().map(|q| (q.conjugate(), w.diff(q))).collect();
        Self::new(k, n, components)
    }

    /// The component `alpha_A^i` paired with `dq_i^A`.
    pub fn component(&self, q: &Coordinate) -> &Expr {
        &self.components[&q.conjugate()]
    }

    /// The substitution `p_A^i -> alpha_A^i` that restricts to `Im(alpha)`.
    pub fn rules(&self) -> &BTreeMap<Coordinate, Expr> {
        &self.components
    }

    pub fn base(&self) -> JetSpace {
        JetSpace::new(self.k - 1, self.n)
    }

    pub fn substitute_constants(&self, rules: &BTreeMap<crate::symbolic::Symbol, Expr>) -> OneForm {
        OneForm {
            k: self.k,
            n: self.n,
            components: self.components.iter().map(|(c, e)| (*c, e.substitute(rules))).collect(),
        }
    }
}

/// A candidate generating function `W` on `T^{k-1} Q`, with an optional
/// energy value for the Hamilton-Jacobi equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingFunction {
    pub w: Expr,
    pub energy: Option<Expr>,
}
