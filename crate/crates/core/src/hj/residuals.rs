use std::collections::BTreeMap;

use super::report::{CheckOptions, ResidualReport, Tag};
use super::{HjError, OneForm, Section};
use crate::hamiltonian::{HamiltonianSystem, LegendreMap};
use crate::jet::{Form1, VectorField};
use crate::lagrangian::LagrangianSystem;
use crate::symbolic::{Coordinate, Expr};

fn pair_id(u: &Coordinate, v: &Coordinate) -> String {
    format!("{},{}", u, v)
}

fn with_assumptions(sys: &LagrangianSystem, mut report: ResidualReport) -> ResidualReport {
    report.assumptions.extend(sys.hessian().assumptions.iter().cloned());
    report
}

/// `T rho^{2k-1}_{k-1} . X_L . s`, a field on `T^{k-1} Q`.
pub fn associated_field_lag(sys: &LagrangianSystem, s: &Section) -> Result<VectorField, HjError> {
    let x = sys.euler_lagrange_field()?;
    Ok(x.field.substitute_coords(s.rules()).project(sys.order() - 1)?)
}

/// `T pi . X_h . alpha`, a field on `T^{k-1} Q`.
pub fn associated_field_ham(hs: &HamiltonianSystem, alpha: &OneForm) -> Result<VectorField, HjError> {
    let k = hs.phase().k;
    Ok(hs.field().substitute_coords(alpha.rules()).project(k - 1)?)
}

/// `R_j^A = X_L(q_j^A - s_j^A)` on `Im(s)`, for `k <= j <= 2k-1`. The
/// derivatives of `s` are taken first and the restriction applied after.
pub fn gen_lag_residuals(sys: &LagrangianSystem, s: &Section, opts: &CheckOptions) -> Result<ResidualReport, HjError> {
    let x = &sys.euler_lagrange_field()?.field;
    let base = s.base().coords();
    let mut report = ResidualReport::new();
    for c in Section::fibre(sys.order(), sys.dim()) {
        let sj = s.component(&c);
        let mut r = x.component(&c).expect("fibre coordinate in field").clone();
        for b in &base {
            let ds = sj.diff(b);
            if !ds.is_zero() {
                r = r.sub(&x.component(b).expect("base coordinate in field").mul(&ds));
            }
        }
        report.push(Tag::LagGen, c.to_string(), r.substitute_coords(s.rules()), opts);
    }
    Ok(with_assumptions(sys, report))
}

/// Coefficients of `s^* omega_L`.
pub fn lag_closedness(sys: &LagrangianSystem, s: &Section, opts: &CheckOptions) -> ResidualReport {
    let base = s.base().coords();
    let pulled = sys.cartan().omega.pullback(&base, s.rules());
    let mut report = ResidualReport::new();
    for (u, v, c) in pulled.upper() {
        report.push(Tag::LagClosed, pair_id(&u, &v), c, opts);
    }
    with_assumptions(sys, report)
}

/// Coefficients of `d(s^* E_L)`.
pub fn lag_energy_residuals(sys: &LagrangianSystem, s: &Section, opts: &CheckOptions) -> ResidualReport {
    let de = Form1::differential(&sys.cartan().energy, sys.velocity_space().coords());
    let base = s.base().coords();
    let pulled = de.pullback(&base, s.rules());
    let mut report = ResidualReport::new();
    for (q, c) in base.iter().zip(pulled.coeffs) {
        report.push(Tag::LagEnergy, q.to_string(), c, opts);
    }
    with_assumptions(sys, report)
}

/// `dW - s^* theta_L`, componentwise.
pub fn lag_genfunc_residuals(sys: &LagrangianSystem, s: &Section, w: &Expr, opts: &CheckOptions) -> ResidualReport {
    let base = s.base().coords();
    let pulled = sys.cartan().theta.pullback(&base, s.rules());
    let mut report = ResidualReport::new();
    for (q, c) in base.iter().zip(pulled.coeffs) {
        report.push(Tag::LagGenfunc, q.to_string(), w.diff(q).sub(&c), opts);
    }
    with_assumptions(sys, report)
}

fn h_derivatives(hs: &HamiltonianSystem, alpha: &OneForm) -> (Vec<Coordinate>, BTreeMap<Coordinate, Expr>) {
    let base = alpha.base().coords();
    let mut d = BTreeMap::new();
    for q in &base {
        d.insert(*q, hs.hamiltonian().diff(q).substitute_coords(alpha.rules()));
        let p = q.conjugate();
        d.insert(p, hs.hamiltonian().diff(&p).substitute_coords(alpha.rules()));
    }
    (base, d)
}

/// `-dh/dq_i^A - dh/dp_B^j d alpha_A^i / dq_j^B` on `Im(alpha)`.
pub fn gen_ham_residuals(hs: &HamiltonianSystem, alpha: &OneForm, opts: &CheckOptions) -> ResidualReport {
    let (base, d) = h_derivatives(hs, alpha);
    let mut report = ResidualReport::new();
    for qi in &base {
        let ai = alpha.component(qi);
        let mut r = d[qi].neg();
        for qj in &base {
            r = r.sub(&d[&qj.conjugate()].mul(&ai.diff(qj)));
        }
        report.push(Tag::HamGen, qi.to_string(), r, opts);
    }
    report
}

/// `d alpha`: `d alpha_u / dq_v - d alpha_v / dq_u` for `u < v`.
pub fn ham_closedness(alpha: &OneForm, opts: &CheckOptions) -> ResidualReport {
    let base = alpha.base().coords();
    let mut report = ResidualReport::new();
    for (i, u) in base.iter().enumerate() {
        for v in &base[i + 1..] {
            let c = alpha.component(u).diff(v).sub(&alpha.component(v).diff(u));
            report.push(Tag::HamClosed, pair_id(u, v), c, opts);
        }
    }
    report
}

/// `dh/dq_i^A + dh/dp_B^j d alpha_B^j / dq_i^A`, the coefficients of
/// `d(alpha^* h)`.
pub fn ham_energy_residuals(hs: &HamiltonianSystem, alpha: &OneForm, opts: &CheckOptions) -> ResidualReport {
    let (base, d) = h_derivatives(hs, alpha);
    let mut report = ResidualReport::new();
    for qi in &base {
        let mut r = d[qi].clone();
        for qj in &base {
            r = r.add(&d[&qj.conjugate()].mul(&alpha.component(qj).diff(qi)));
        }
        report.push(Tag::HamEnergy, qi.to_string(), r, opts);
    }
    report
}

/// Outcome of substituting `p = dW` into `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct HjOutcome {
    pub report: ResidualReport,
    /// `h(q, dW/dq)` in canonical form.
    pub value: Expr,
    /// Whether the value is free of coordinates.
    pub constant: bool,
}

/// `h(q, dW/dq) - E`. Without `E` the residual is the gradient of the
/// substituted Hamiltonian, which vanishes iff it is constant.
pub fn hj_equation(hs: &HamiltonianSystem, w: &Expr, energy: Option<&Expr>, opts: &CheckOptions) -> Result<HjOutcome, HjError> {
    let phase = hs.phase();
    let alpha = OneForm::exact(phase.k, phase.n, w)?;
    Ok(hj_on_form(hs, &alpha, energy, opts))
}

/// Same as [`hj_equation`] for a one-form given by its components.
pub fn hj_on_form(hs: &HamiltonianSystem, alpha: &OneForm, energy: Option<&Expr>, opts: &CheckOptions) -> HjOutcome {
    let value = hs.hamiltonian().substitute_coords(alpha.rules());
    let constant = value.free_coords().is_empty();
    let mut report = ResidualReport::new();
    match energy {
        Some(e) => report.push(Tag::Hj, "h-E", value.sub(e), opts),
        None => {
            for q in alpha.base().coords() {
                report.push(Tag::Hj, format!("d(h)/d{}", q), value.diff(&q), opts);
            }
        }
    }
    HjOutcome { report, value, constant }
}

/// `alpha = FL . s`: `alpha_A^i = p^i_A` restricted to `Im(s)`.
pub fn transport_to_ham(fl: &LegendreMap, s: &Section) -> Result<OneForm, HjError> {
    let comps = fl.forward.iter().map(|(p, e)| (*p, e.substitute_coords(s.rules()))).collect();
    OneForm::new(s.k, s.n, comps)
}

/// `s = FL^{-1} . alpha`.
pub fn transport_to_lag(fl: &LegendreMap, alpha: &OneForm) -> Result<Section, HjError> {
    let inv = fl.inverse()?;
    let comps = inv.iter().map(|(q, e)| (*q, e.substitute_coords(alpha.rules()))).collect();
    Section::new(alpha.k, alpha.n, comps)
}
