//! Higher-order Lagrangian systems on `T^k Q`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use crate::jet::{d_t_iter, prolong, Curve, Form1, Form2, JetError, JetSpace, VectorField};
use crate::symbolic::linalg::{self, LinalgError, Matrix};
use crate::symbolic::{Coordinate, Expr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LagrangianError {
    #[error("order and dimension must be positive (k = {k}, n = {n})")]
    Shape { k: usize, n: usize },
    #[error("Lagrangian depends on {coord}, outside T^{k}Q")]
    OutOfRange { coord: Coordinate, k: usize },
    #[error("Lagrangian contains an unknown function")]
    Placeholder,
    #[error("Lagrangian is singular: Hessian determinant is {0}")]
    Singular(String),
    #[error("Euler-Lagrange system is not affine in the top-order coordinates")]
    NotEliminable,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Second derivatives of `L` in the top velocities together with the
/// regularity verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hessian {
    pub matrix: Matrix,
    pub determinant: Expr,
    pub regular: bool,
    pub assumptions: Vec<String>,
}

/// Momenta, Poincare-Cartan forms and energy on `T^{2k-1} Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanData {
    /// `momenta[r][A-1]` is `p^r_A` for `0 <= r < k`.
    pub momenta: Vec<Vec<Expr>>,
    pub theta: Form1,
    pub omega: Form2,
    pub energy: Expr,
}

/// The Euler-Lagrange vector field: a type-1 semispray whose last block is
/// `forces`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemisprayField {
    pub space: JetSpace,
    pub field: VectorField,
    pub forces: Vec<Expr>,
}

#[derive(Debug)]
pub struct LagrangianSystem {
    k: usize,
    n: usize,
    lagrangian: Expr,
    nonzero: BTreeSet<String>,
    hessian: OnceLock<Hessian>,
    cartan: OnceLock<CartanData>,
    field: OnceLock<Result<SemisprayField, LagrangianError>>,
}

impl Clone for LagrangianSystem {
    fn clone(&self) -> Self {
        LagrangianSystem {
            k: self.k,
            n: self.n,
            lagrangian: self.lagrangian.clone(),
            nonzero: self.nonzero.clone(),
            hessian: self.hessian.clone(),
            cartan: self.cartan.clone(),
            field: self.field.clone(),
        }
    }
}

impl LagrangianSystem {
    pub fn new(k: usize, n: usize, lagrangian: Expr) -> Result<Self, LagrangianError> {
        if k == 0 || n == 0 {
            return Err(LagrangianError::Shape { k, n });
        }
        if lagrangian.has_placeholders() {
            return Err(LagrangianError::Placeholder);
        }
        let space = JetSpace::new(k, n);
        if let Some(coord) = lagrangian.free_coords().into_iter().find(|c| !space.contains(c)) {
            return Err(LagrangianError::OutOfRange { coord, k });
        }
        Ok(LagrangianSystem {
            k,
            n,
            lagrangian,
            nonzero: BTreeSet::new(),
            hessian: OnceLock::new(),
            cartan: OnceLock::new(),
            field: OnceLock::new(),
        })
    }

    /// Named constants that may be assumed nonzero, e.g. a stiffness.
    pub fn with_nonzero<I: IntoIterator<Item = String>>(mut self, names: I) -> Self {
        self.nonzero.extend(names);
        self
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    pub fn nonzero_constants(&self) -> &BTreeSet<String> {
        &self.nonzero
    }

    /// `T^{k-1} Q`, where sections and one-forms live.
    pub fn base_space(&self) -> JetSpace {
        JetSpace::new(self.k - 1, self.n)
    }

    /// `T^{2k-1} Q`, where the dynamics lives.
    pub fn velocity_space(&self) -> JetSpace {
        JetSpace::new(2 * self.k - 1, self.n)
    }

    pub fn hessian(&self) -> &Hessian {
        self.hessian.get_or_init(|| {
            let top = JetSpace::new(self.k, self.n).block(self.k);
            let first: Vec<Expr> = top.iter().map(|c| self.lagrangian.diff(c)).collect();
            let matrix: Matrix = first.iter().map(|d| top.iter().map(|c| d.diff(c)).collect()).collect();
            let determinant = linalg::determinant(&matrix);
            let regular = !determinant.is_zero();
            let mut assumptions = Vec::new();
            if regular && determinant.as_rational().is_none() {
                let declared: Vec<String> =
                    determinant.free_constants().into_iter().filter(|c| self.nonzero.contains(c)).collect();
                if declared.is_empty() {
                    assumptions.push(format!("Hessian determinant {} assumed nonzero", determinant));
                } else {
                    assumptions.push(format!(
                        "Hessian determinant {} assumed nonzero (declared nonzero: {})",
                        determinant,
                        declared.join(", ")
                    ));
                }
            }
            Hessian { matrix, determinant, regular, assumptions }
        })
    }

    pub fn is_regular(&self) -> bool {
        self.hessian().regular
    }

    /// `p^{r-1}_A = sum_{i=0}^{k-r} (-1)^i d_T^i (dL/dq_{r+i}^A)`, then
    /// `theta = sum p^r_A dq_r^A`, `omega = -d theta` and
    /// `E = sum q_r^A p^{r-1}_A - L`.
    pub fn cartan(&self) -> &CartanData {
        self.cartan.get_or_init(|| {
            let (k, n) = (self.k, self.n);
            let momenta: Vec<Vec<Expr>> = (1..=k)
                .map(|r| {
                    (1..=n)
                        .map(|a| {
                            (0..=(k - r))
                                .map(|i| {
                                    let d = self.lagrangian.diff(&Coordinate::q(r + i, a));
                                    let term = d_t_iter(&d, i);
                                    if i % 2 == 0 {
                                        term
                                    } else {
                                        term.neg()
                                    }
                                })
                                .sum()
                        })
                        .collect()
                })
                .collect();
            let space = self.velocity_space();
            let mut theta = Form1::zero(space.coords());
            for (r, row) in momenta.iter().enumerate() {
                for (a, p) in row.iter().enumerate() {
                    theta.set(&Coordinate::q(r, a + 1), p.clone());
                }
            }
            let omega = theta.exterior_derivative().neg();
            let mut energy = self.lagrangian.neg();
            for (r, row) in momenta.iter().enumerate() {
                for (a, p) in row.iter().enumerate() {
                    energy = energy.add(&Expr::q(r + 1, a + 1).mul(p));
                }
            }
            CartanData { momenta, theta, omega, energy }
        })
    }

    /// `b_A = sum_{l=0}^k (-1)^l d_T^l (dL/dq_l^A)`, on `T^{2k} Q`.
    pub fn euler_lagrange_expressions(&self) -> Vec<Expr> {
        (1..=self.n)
            .map(|a| {
                (0..=self.k)
                    .map(|l| {
                        let term = d_t_iter(&self.lagrangian.diff(&Coordinate::q(l, a)), l);
                        if l % 2 == 0 {
                            term
                        } else {
                            term.neg()
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// Solves the Euler-Lagrange equations for the formal coordinates
    /// `q_{2k}^B` and returns the resulting semispray on `T^{2k-1} Q`.
    pub fn euler_lagrange_field(&self) -> Result<&SemisprayField, LagrangianError> {
        self.field.get_or_init(|| self.build_field()).as_ref().map_err(Clone::clone)
    }

    fn build_field(&self) -> Result<SemisprayField, LagrangianError> {
        let hess = self.hessian();
        if !hess.regular {
            return Err(LagrangianError::Singular(hess.determinant.to_string()));
        }
        let (k, n) = (self.k, self.n);
        let formal = JetSpace::new(2 * k, n).block(2 * k);
        let b = self.euler_lagrange_expressions();
        let coeff: Matrix = b.iter().map(|ba| formal.iter().map(|c| ba.diff(c)).collect()).collect();
        if coeff.iter().flatten().any(|c| c.free_coords().iter().any(|x| formal.contains(x))) {
            return Err(LagrangianError::NotEliminable);
        }
        let at_zero: BTreeMap<Coordinate, Expr> = formal.iter().map(|c| (*c, Expr::zero())).collect();
        let rhs: Vec<Expr> = b.iter().map(|ba| ba.substitute_coords(&at_zero).neg()).collect();
        let forces = linalg::solve(&coeff, &rhs)?;
        let space = self.velocity_space();
        let mut comps: Vec<Expr> = space.coords().iter().filter(|c| c.order < 2 * k - 1).map(|c| Expr::coord(c.raised())).collect();
        comps.extend(forces.iter().cloned());
        let field = VectorField::on(&space, comps)?;
        Ok(SemisprayField { space, field, forces })
    }

    /// Euler-Lagrange residual along a symbolic curve, one entry per axis.
    pub fn euler_lagrange_residual(&self, c: &Curve) -> Vec<Expr> {
        let levels = prolong(c, self.k);
        let rules: BTreeMap<Coordinate, Expr> = levels
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(a, e)| (Coordinate::q(i, a + 1), e.clone())))
            .collect();
        let t = c.time();
        (1..=self.n)
            .map(|a| {
                (0..=self.k)
                    .map(|l| {
                        let mut term = self.lagrangian.diff(&Coordinate::q(l, a)).substitute_coords(&rules);
                        for _ in 0..l {
                            term = term.diff_symbol(&t);
                        }
                        if l % 2 == 0 {
                            term
                        } else {
                            term.neg()
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// `i(X_L) omega_L - dE_L`; zero for a correctly constructed field.
    pub fn dynamics_defect(&self) -> Result<Form1, LagrangianError> {
        let x = self.euler_lagrange_field()?;
        let c = self.cartan();
        let de = Form1::differential(&c.energy, self.velocity_space().coords());
        Ok(c.omega.contract(&x.field).sub(&de))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{parse, ParseContext};

    fn p(s: &str) -> Expr {
        parse(s, &ParseContext::permissive()).unwrap()
    }

    fn beam() -> LagrangianSystem {
        LagrangianSystem::new(2, 1, p("mu*q2_1^2/2 + rho*q0_1")).unwrap().with_nonzero(["mu".to_string()])
    }

    #[test]
    fn free_particle() {
        let sys = LagrangianSystem::new(1, 1, p("q1_1^2/2")).unwrap();
        let c = sys.cartan();
        assert_eq!(c.theta.to_string(), "q1_1 dq0_1");
        assert_eq!(c.energy, p("q1_1^2/2"));
        assert_eq!(c.omega.get_index(0, 1), &p("1"));
        assert_eq!(c.omega.get_index(1, 0), &p("-1"));
        let x = sys.euler_lagrange_field().unwrap();
        assert_eq!(x.forces, vec![p("0")]);
        assert_eq!(x.field.to_string(), "q1_1 ∂q0_1 + 0 ∂q1_1");
    }

    #[test]
    fn beam_objects() {
        let sys = beam();
        let h = sys.hessian();
        assert_eq!(h.matrix, vec![vec![p("mu")]]);
        assert!(h.regular);
        assert_eq!(h.assumptions.len(), 1);
        let c = sys.cartan();
        assert_eq!(c.momenta, vec![vec![p("-mu*q3_1")], vec![p("mu*q2_1")]]);
        assert_eq!(c.energy, p("-rho*q0_1 + mu*q2_1^2/2 - mu*q1_1*q3_1"));
        assert_eq!(c.omega.to_string(), "-mu dq0_1∧dq3_1 + mu dq1_1∧dq2_1");
        assert_eq!(sys.euler_lagrange_field().unwrap().forces, vec![p("-rho/mu")]);
        assert!(sys.dynamics_defect().unwrap().is_zero());
    }

    #[test]
    fn singular_lagrangian() {
        let sys = LagrangianSystem::new(2, 1, p("q1_1*q2_1")).unwrap();
        assert!(!sys.hessian().regular);
        assert!(matches!(sys.euler_lagrange_field(), Err(LagrangianError::Singular(_))));
    }

    #[test]
    fn rejects_out_of_range_coordinates() {
        assert!(matches!(LagrangianSystem::new(1, 1, p("q2_1")), Err(LagrangianError::OutOfRange { .. })));
        assert!(matches!(LagrangianSystem::new(1, 1, p("q0_2")), Err(LagrangianError::OutOfRange { .. })));
        assert!(LagrangianSystem::new(1, 1, p("p0_1")).is_err());
    }

    #[test]
    fn euler_lagrange_residual_on_curves() {
        let sys = beam();
        let quartic = Curve::new(vec![p("-rho/(24*mu)*t^4")]);
        assert_eq!(sys.euler_lagrange_residual(&quartic), vec![p("0")]);
        let plain = LagrangianSystem::new(2, 1, p("q2_1^2/2 + q0_1")).unwrap();
        assert_eq!(plain.euler_lagrange_residual(&Curve::new(vec![p("t^4")])), vec![p("25")]);
    }
}
