//! The Legendre-Ostrogradsky map and the Hamiltonian side on
//! `T*(T^{k-1} Q)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::jet::{Form1, Form2, JetSpace, VectorField};
use crate::lagrangian::{LagrangianError, LagrangianSystem};
use crate::symbolic::linalg::{self, Matrix};
use crate::symbolic::{Coordinate, Expr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HamiltonianError {
    #[error("Legendre map has no symbolic inverse: {0}")]
    NoInverse(String),
    #[error(transparent)]
    Lagrangian(#[from] LagrangianError),
}

/// `T*(T^{k-1} Q)` with coordinates `(q_i^A, p_A^i)`, `0 <= i < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseSpace {
    pub k: usize,
    pub n: usize,
}

impl PhaseSpace {
    pub fn new(k: usize, n: usize) -> Self {
        assert!(k >= 1 && n >= 1);
        PhaseSpace { k, n }
    }

    pub fn dimension(&self) -> usize {
        2 * self.k * self.n
    }

    pub fn base(&self) -> JetSpace {
        JetSpace::new(self.k - 1, self.n)
    }

    pub fn positions(&self) -> Vec<Coordinate> {
        self.base().coords()
    }

    pub fn momenta(&self) -> Vec<Coordinate> {
        self.positions().iter().map(Coordinate::conjugate).collect()
    }

    /// Positions first, then momenta.
    pub fn coords(&self) -> Vec<Coordinate> {
        let mut c = self.positions();
        c.extend(self.momenta());
        c
    }

    pub fn contains(&self, c: &Coordinate) -> bool {
        c.order < self.k && (1..=self.n).contains(&c.axis)
    }

    /// `theta_{k-1} = p_A^i dq_i^A`.
    pub fn canonical_theta(&self) -> Form1 {
        let mut theta = Form1::zero(self.coords());
        for q in self.positions() {
            theta.set(&q, Expr::coord(q.conjugate()));
        }
        theta
    }

    /// `omega_{k-1} = dq_i^A ^ dp_A^i`.
    pub fn canonical_omega(&self) -> Form2 {
        let mut omega = Form2::zero(self.coords());
        for q in self.positions() {
            omega.set(&q, &q.conjugate(), Expr::one());
        }
        omega
    }
}

/// Forward rules `p_A^i <- p^i_A(q)` and, when available, the inverse
/// rules `q_j^A <- (q, p)` for `k <= j <= 2k-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegendreMap {
    pub phase: PhaseSpace,
    pub forward: BTreeMap<Coordinate, Expr>,
    pub inverse: Option<BTreeMap<Coordinate, Expr>>,
    pub hyperregular: bool,
    pub diagnostic: Option<String>,
}

impl LegendreMap {
    pub fn inverse(&self) -> Result<&BTreeMap<Coordinate, Expr>, HamiltonianError> {
        self.inverse
            .as_ref()
            .ok_or_else(|| HamiltonianError::NoInverse(self.diagnostic.clone().unwrap_or_default()))
    }

    /// Substitutes the inverse into the forward rules; the identity on
    /// momenta when the inverse is correct.
    pub fn round_trip(&self) -> Option<BTreeMap<Coordinate, Expr>> {
        let inv = self.inverse.as_ref()?;
        Some(self.forward.iter().map(|(p, e)| (*p, e.substitute_coords(inv))).collect())
    }

    /// Pullback of a phase-space function to `T^{2k-1} Q`.
    pub fn pull_function(&self, f: &Expr) -> Expr {
        f.substitute_coords(&self.forward)
    }

    /// Pullback of a phase-space form to `T^{2k-1} Q`.
    pub fn pull_form1(&self, f: &Form1) -> Form1 {
        let target = JetSpace::new(2 * self.phase.k - 1, self.phase.n).coords();
        f.pullback(&target, &self.forward)
    }

    pub fn pull_form2(&self, f: &Form2) -> Form2 {
        let target = JetSpace::new(2 * self.phase.k - 1, self.phase.n).coords();
        f.pullback(&target, &self.forward)
    }

    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (p, e) in &self.forward {
            let _ = writeln!(out, "{} = {}", p, e);
        }
        match &self.inverse {
            Some(inv) => {
                for (q, e) in inv {
                    let _ = writeln!(out, "{} = {}", q, e);
                }
            }
            None => {
                let _ = writeln!(out, "inverse unavailable: {}", self.diagnostic.as_deref().unwrap_or(""));
            }
        }
        out
    }
}

/// Builds the Legendre map and inverts it by back-substitution: `p^{k-1}`
/// fixes `q_k`, then `p^{k-2}` fixes `q_{k+1}`, and so on.
pub fn legendre(sys: &LagrangianSystem) -> Result<LegendreMap, HamiltonianError> {
    let hess = sys.hessian();
    if !hess.regular {
        return Err(LagrangianError::Singular(hess.determinant.to_string()).into());
    }
    let (k, n) = (sys.order(), sys.dim());
    let phase = PhaseSpace::new(k, n);
    let cartan = sys.cartan();
    let mut forward = BTreeMap::new();
    for (r, row) in cartan.momenta.iter().enumerate() {
        for (a, e) in row.iter().enumerate() {
            forward.insert(Coordinate::p(r, a + 1), e.clone());
        }
    }
    let mut inverse: BTreeMap<Coordinate, Expr> = BTreeMap::new();
    let mut diagnostic = None;
    for r in (0..k).rev() {
        let unknowns: Vec<Coordinate> = (1..=n).map(|a| Coordinate::q(2 * k - 1 - r, a)).collect();
        let reduced: Vec<Expr> = cartan.momenta[r].iter().map(|e| e.substitute_coords(&inverse)).collect();
        let coeff: Matrix = reduced.iter().map(|e| unknowns.iter().map(|u| e.diff(u)).collect()).collect();
        if coeff.iter().flatten().any(|c| c.free_coords().iter().any(|x| unknowns.contains(x))) {
            diagnostic = Some(format!("momentum p{} is not affine in the order-{} velocities", r, 2 * k - 1 - r));
            break;
        }
        let zero: BTreeMap<Coordinate, Expr> = unknowns.iter().map(|u| (*u, Expr::zero())).collect();
        let rhs: Vec<Expr> = reduced
            .iter()
            .enumerate()
            .map(|(a, e)| Expr::p(r, a + 1).sub(&e.substitute_coords(&zero)))
            .collect();
        match linalg::solve(&coeff, &rhs) {
            Ok(sol) => inverse.extend(unknowns.into_iter().zip(sol)),
            Err(err) => {
                diagnostic = Some(format!("solving for the order-{} velocities: {}", 2 * k - 1 - r, err));
                break;
            }
        }
    }
    let ok = diagnostic.is_none();
    Ok(LegendreMap { phase, forward, inverse: ok.then_some(inverse), hyperregular: ok, diagnostic })
}

#[derive(Debug)]
pub struct HamiltonianSystem {
    phase: PhaseSpace,
    h: Expr,
    field: OnceLock<VectorField>,
}

impl Clone for HamiltonianSystem {
    fn clone(&self) -> Self {
        HamiltonianSystem { phase: self.phase, h: self.h.clone(), field: self.field.clone() }
    }
}

impl HamiltonianSystem {
    pub fn new(phase: PhaseSpace, h: Expr) -> Self {
        HamiltonianSystem { phase, h, field: OnceLock::new() }
    }

    pub fn phase(&self) -> &PhaseSpace {
        &self.phase
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.h
    }

    /// `X_h = dh/dp d/dq - dh/dq d/dp`.
    pub fn field(&self) -> &VectorField {
        self.field.get_or_init(|| {
            let coords = self.phase.coords();
            let comps = coords
                .iter()
                .map(|c| {
                    let d = self.h.diff(&c.conjugate());
                    if c.is_jet() {
                        d
                    } else {
                        d.neg()
                    }
                })
                .collect();
            VectorField::new(coords, comps).expect("one component per coordinate")
        })
    }

    /// `i(X_h) omega_{k-1} - dh`.
    pub fn dynamics_defect(&self) -> Form1 {
        let dh = Form1::differential(&self.h, self.phase.coords());
        self.phase.canonical_omega().contract(self.field()).sub(&dh)
    }
}

/// `h = (FL^{-1})^* E_L`.
pub fn hamiltonian(sys: &LagrangianSystem, fl: &LegendreMap) -> Result<HamiltonianSystem, HamiltonianError> {
    let inv = fl.inverse()?;
    let h = sys.cartan().energy.substitute_coords(inv);
    Ok(HamiltonianSystem::new(fl.phase, h))
}

pub fn hamiltonian_field(hs: &HamiltonianSystem) -> &VectorField {
    hs.field()
}

/// `{f, g} = sum df/dq dg/dp - df/dp dg/dq`.
pub fn poisson(f: &Expr, g: &Expr, ps: &PhaseSpace) -> Expr {
    ps.positions()
        .iter()
        .map(|q| {
            let p = q.conjugate();
            f.diff(q).mul(&g.diff(&p)).sub(&f.diff(&p).mul(&g.diff(q)))
        })
        .sum()
}
