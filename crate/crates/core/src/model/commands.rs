use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{ModelError, ModelFile};
use crate::hamiltonian::{hamiltonian, legendre, HamiltonianError, HamiltonianSystem, LegendreMap};
use crate::hj::{
    associated_field_ham, associated_field_lag, classify, gen_ham_residuals, gen_lag_residuals, ham_closedness,
    ham_energy_residuals, hj_on_form, involution_check, lag_closedness, lag_energy_residuals, lag_genfunc_residuals,
    transport_to_ham, transport_to_lag, CheckOptions, OneForm, ResidualReport, Section, Tag, Verdict,
};
use crate::lagrangian::{LagrangianError, LagrangianSystem};
use crate::numeric::{self, NumericError, Trajectory};
use crate::symbolic::{Bindings, Coordinate, Expr, Symbol};

/// Default tolerance of the lifting comparison.
pub const LIFT_TOL: f64 = 1e-6;

impl From<LagrangianError> for ModelError {
    fn from(e: LagrangianError) -> Self {
        match e {
            LagrangianError::Shape { .. } | LagrangianError::OutOfRange { .. } | LagrangianError::Placeholder => {
                ModelError::Invalid(e.to_string())
            }
            _ => ModelError::Precondition(e.to_string()),
        }
    }
}

impl From<HamiltonianError> for ModelError {
    fn from(e: HamiltonianError) -> Self {
        match e {
            HamiltonianError::Lagrangian(l) => l.into(),
            other => ModelError::Precondition(other.to_string()),
        }
    }
}

impl From<NumericError> for ModelError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::Hj(h) => h.into(),
            NumericError::Domain { .. } => ModelError::Precondition(e.to_string()),
            other => ModelError::Usage(other.to_string()),
        }
    }
}

/// Command output: human-readable lines followed by a tab-separated
/// machine block of `TAG id value numeric verdict` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub settings: Vec<String>,
    pub lines: Vec<String>,
    pub machine: Vec<[String; 5]>,
    pub passed: bool,
    pub csv: Option<String>,
}

pub const MACHINE_BEGIN: &str = "#--BEGIN-MACHINE--#";
pub const MACHINE_END: &str = "#--END-MACHINE--#";

impl Report {
    fn new(title: String) -> Self {
        Report { title, settings: Vec::new(), lines: Vec::new(), machine: Vec::new(), passed: true, csv: None }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn row(&mut self, tag: &str, id: impl Into<String>, value: impl Into<String>, numeric: impl Into<String>, verdict: impl Into<String>) {
        self.machine.push([tag.to_string(), id.into(), value.into(), numeric.into(), verdict.into()]);
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn machine_block(&self) -> String {
        let mut out = format!("{}\n", MACHINE_BEGIN);
        for r in &self.machine {
            let _ = writeln!(out, "{}", r.join("\t"));
        }
        out.push_str(MACHINE_END);
        out.push('\n');
        out
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for s in &self.settings {
            let _ = writeln!(out, "# {}", s);
        }
        for l in &self.lines {
            let _ = writeln!(out, "{}", l);
        }
        out.push_str(&self.machine_block());
        out
    }
}

/// Extracts the rows between the machine delimiters of rendered output.
pub fn machine_rows(text: &str) -> Option<Vec<Vec<String>>> {
    let start = text.find(MACHINE_BEGIN)? + MACHINE_BEGIN.len();
    let end = text[start..].find(MACHINE_END)? + start;
    Some(
        text[start..end]
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.split('\t').map(str::to_string).collect())
            .collect(),
    )
}

fn num(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{:.3e}", v))
}

fn system(m: &ModelFile) -> Result<LagrangianSystem, ModelError> {
    Ok(LagrangianSystem::new(m.k, m.n, m.lagrangian.clone())?.with_nonzero(m.nonzero.iter().cloned()))
}

fn ham_system(sys: &LagrangianSystem) -> Result<(LegendreMap, HamiltonianSystem), ModelError> {
    let fl = legendre(sys)?;
    let hs = hamiltonian(sys, &fl)?;
    Ok((fl, hs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeriveWhat {
    All,
    Cartan,
    Energy,
    Field,
    Legendre,
    Hamiltonian,
    Hamfield,
}

impl FromStr for DeriveWhat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "all" => DeriveWhat::All,
            "cartan" => DeriveWhat::Cartan,
            "energy" => DeriveWhat::Energy,
            "field" => DeriveWhat::Field,
            "legendre" => DeriveWhat::Legendre,
            "hamiltonian" => DeriveWhat::Hamiltonian,
            "hamfield" => DeriveWhat::Hamfield,
            _ => return Err(format!("unknown derive target {:?}", s)),
        })
    }
}

/// Prints the canonical Lagrangian and Hamiltonian objects of the model.
pub fn cmd_derive(m: &ModelFile, what: DeriveWhat) -> Result<Report, ModelError> {
    let sys = system(m)?;
    let all = what == DeriveWhat::All;
    let mut rep = Report::new(format!("derive {}", m.name));
    rep.settings.push(format!("k = {}, n = {}", m.k, m.n));
    rep.line(format!("L = {}", m.lagrangian));
    let hess = sys.hessian();
    if all || what == DeriveWhat::Cartan {
        let rows: Vec<String> = hess
            .matrix
            .iter()
            .map(|r| format!("[{}]", r.iter().map(Expr::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        rep.line(format!("hessian = [{}]", rows.join(", ")));
        rep.line(format!("det = {} ({})", hess.determinant, if hess.regular { "regular" } else { "singular" }));
        for (i, row) in hess.matrix.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                rep.row("HESSIAN", format!("{},{}", i + 1, j + 1), e.to_string(), "-", "-");
            }
        }
        for a in &hess.assumptions {
            rep.line(format!("assumption: {}", a));
        }
    }
    if all || matches!(what, DeriveWhat::Cartan | DeriveWhat::Energy) {
        let c = sys.cartan();
        if what != DeriveWhat::Energy {
            rep.line(format!("theta_L = {}", c.theta));
            rep.line(format!("omega_L = {}", c.omega));
            for (u, e) in c.theta.coords.iter().zip(&c.theta.coeffs) {
                if !e.is_zero() {
                    rep.row("THETA", format!("d{}", u), e.to_string(), "-", "-");
                }
            }
            for (u, v, e) in c.omega.upper() {
                if !e.is_zero() {
                    rep.row("OMEGA", format!("d{}^d{}", u, v), e.to_string(), "-", "-");
                }
            }
        }
        rep.line(format!("E_L = {}", c.energy));
        rep.row("ENERGY", "E_L", c.energy.to_string(), "-", "-");
    }
    if all || what == DeriveWhat::Field {
        let x = &sys.euler_lagrange_field()?.field;
        rep.line(format!("X_L = {}", x));
        for (c, e) in x.coords.iter().zip(&x.components) {
            rep.row("FIELD-L", c.to_string(), e.to_string(), "-", "-");
        }
    }
    let needs_ham = all || matches!(what, DeriveWhat::Legendre | DeriveWhat::Hamiltonian | DeriveWhat::Hamfield);
    if needs_ham {
        let fl = legendre(&sys)?;
        if all || what == DeriveWhat::Legendre {
            rep.line("FL:");
            for (p, e) in &fl.forward {
                rep.line(format!("  {} = {}", p, e));
                rep.row("FL", p.to_string(), e.to_string(), "-", "-");
            }
        }
        let inv = fl.inverse()?;
        if all || what == DeriveWhat::Legendre {
            rep.line("FL^-1:");
            for (q, e) in inv {
                rep.line(format!("  {} = {}", q, e));
                rep.row("FL-INV", q.to_string(), e.to_string(), "-", "-");
            }
        }
        let hs = hamiltonian(&sys, &fl)?;
        if all || what == DeriveWhat::Hamiltonian {
            rep.line(format!("h = {}", hs.hamiltonian()));
            rep.row("HAM", "h", hs.hamiltonian().to_string(), "-", "-");
        }
        if all || what == DeriveWhat::Hamfield {
            let x = hs.field();
            rep.line(format!("X_h = {}", x));
            for (c, e) in x.coords.iter().zip(&x.components) {
                rep.row("FIELD-H", c.to_string(), e.to_string(), "-", "-");
            }
        }
    }
    Ok(rep)
}

/// Which verdict `check` must reach to succeed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    None,
    Generalized,
    Strict,
}

impl FromStr for Requirement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "none" => Requirement::None,
            "generalized" => Requirement::Generalized,
            "strict" => Requirement::Strict,
            _ => return Err(format!("unknown requirement {:?}", s)),
        })
    }
}

impl Requirement {
    fn met(self, v: Option<Verdict>) -> bool {
        match (self, v) {
            (Requirement::None, _) | (_, None) => true,
            (Requirement::Generalized, Some(v)) => v.is_solution(),
            (Requirement::Strict, Some(v)) => v == Verdict::StrictSolution,
        }
    }
}

fn option_lines(rep: &mut Report, opts: &CheckOptions) {
    rep.settings.push(format!("tol = {:e}, samples = {}, seed = {}, lift-tol = {:e}", opts.tol, opts.samples, opts.seed, LIFT_TOL));
}

fn validate(opts: &CheckOptions) -> Result<(), ModelError> {
    if !(opts.tol > 0.0) {
        return Err(ModelError::Usage(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if opts.samples == 0 {
        return Err(ModelError::Usage("sample count must be at least 1".into()));
    }
    Ok(())
}

fn lag_battery(report: &mut ResidualReport, sys: &LagrangianSystem, s: &Section, opts: &CheckOptions) -> Result<(), ModelError> {
    report.extend(gen_lag_residuals(sys, s, opts)?);
    report.extend(lag_closedness(sys, s, opts));
    report.extend(lag_energy_residuals(sys, s, opts));
    Ok(())
}

fn ham_battery(report: &mut ResidualReport, hs: &HamiltonianSystem, alpha: &OneForm, opts: &CheckOptions) {
    report.extend(gen_ham_residuals(hs, alpha, opts));
    report.extend(ham_closedness(alpha, opts));
    report.extend(ham_energy_residuals(hs, alpha, opts));
}

fn component_lines(rep: &mut Report, label: &str, rules: &BTreeMap<Coordinate, Expr>) {
    rep.line(format!("{}:", label));
    for (c, e) in rules {
        rep.line(format!("  {} = {}", c, e));
    }
}

/// Runs the residual battery on a named section, one-form or generating
/// function, transporting it through the Legendre map when it is
/// invertible.
pub fn cmd_check(m: &ModelFile, name: &str, opts: &CheckOptions, require: Requirement) -> Result<Report, ModelError> {
    validate(opts)?;
    let opts = &opts.clone().with_nonzero(m.nonzero.iter().cloned());
    let hits = [m.sections.contains_key(name), m.oneforms.contains_key(name), m.genfuncs.contains_key(name)];
    match hits.iter().filter(|&&h| h).count() {
        0 => return Err(ModelError::Unknown { kind: "candidate", name: name.to_string() }),
        1 => {}
        _ => return Err(ModelError::Usage(format!("candidate name {:?} is ambiguous", name))),
    }
    let sys = system(m)?;
    let mut rep = Report::new(format!("check {} {}", m.name, name));
    option_lines(&mut rep, opts);
    let mut report = ResidualReport::new();
    if let Some(cand) = m.sections.get(name) {
        let s = cand.resolve(m.k, m.n);
        component_lines(&mut rep, "section", s.rules());
        rep.line(format!("associated field = {}", associated_field_lag(&sys, &s)?));
        lag_battery(&mut report, &sys, &s, opts)?;
        let fl = legendre(&sys)?;
        if fl.inverse.is_some() {
            let hs = hamiltonian(&sys, &fl)?;
            let alpha = transport_to_ham(&fl, &s)?;
            component_lines(&mut rep, "transported one-form", alpha.rules());
            ham_battery(&mut report, &hs, &alpha, opts);
            let hj = hj_on_form(&hs, &alpha, None, opts);
            rep.line(format!("h on the image = {}{}", hj.value, if hj.constant { " (constant)" } else { "" }));
            report.extend(hj.report);
        } else {
            rep.line(format!("Hamiltonian side skipped: {}", fl.diagnostic.as_deref().unwrap_or("no inverse")));
        }
    } else {
        let (fl, hs) = ham_system(&sys)?;
        let (alpha, w) = match m.oneforms.get(name) {
            Some(cand) => (cand.resolve(m.k, m.n), None),
            None => {
                let g = &m.genfuncs[name];
                rep.line(format!("W = {}", g.w));
                (OneForm::exact(m.k, m.n, &g.w)?, Some(g))
            }
        };
        component_lines(&mut rep, "one-form", alpha.rules());
        rep.line(format!("associated field = {}", associated_field_ham(&hs, &alpha)?));
        ham_battery(&mut report, &hs, &alpha, opts);
        let hj = hj_on_form(&hs, &alpha, w.and_then(|g| g.energy.as_ref()), opts);
        rep.line(format!("h on the image = {}{}", hj.value, if hj.constant { " (constant)" } else { "" }));
        report.extend(hj.report);
        let s = transport_to_lag(&fl, &alpha)?;
        component_lines(&mut rep, "transported section", s.rules());
        lag_battery(&mut report, &sys, &s, opts)?;
        if let Some(g) = w {
            report.extend(lag_genfunc_residuals(&sys, &s, &g.w, opts));
        }
    }
    let class = classify(&report, opts.tol);
    for r in &report.entries {
        rep.line(format!("{} {}: {} [{}]", r.tag, r.id, r.expr, r.verdict.as_str()));
        rep.row(r.tag.as_str(), r.id.clone(), r.expr.to_string(), num(r.numeric_max), r.verdict.as_str());
    }
    for a in &report.assumptions {
        rep.line(format!("assumption: {}", a));
    }
    for n in &report.notes {
        rep.line(format!("note: {}", n));
    }
    for (side, v) in [("lagrangian", class.lagrangian), ("hamiltonian", class.hamiltonian)] {
        let v = v.map_or("-", Verdict::as_str);
        rep.line(format!("verdict ({}): {}", side, v));
        rep.row("VERDICT", side, "-", "-", v);
    }
    let hj_ok = require != Requirement::Strict || report.all_zero(Tag::Hj, opts.tol);
    rep.passed = require.met(class.lagrangian) && require.met(class.hamiltonian) && hj_ok;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldChoice {
    Lagrangian,
    Hamiltonian,
    /// Field associated with the named section or one-form.
    Associated(String),
}

impl FromStr for FieldChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lagrangian" => Ok(FieldChoice::Lagrangian),
            "hamiltonian" => Ok(FieldChoice::Hamiltonian),
            _ => match s.strip_prefix("associated:") {
                Some(n) if !n.is_empty() => Ok(FieldChoice::Associated(n.to_string())),
                _ => Err(format!("unknown field {:?}", s)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub field: FieldChoice,
    pub initial: String,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub lift: Option<String>,
    pub tol: f64,
}

enum Solution {
    Section(Section),
    Form(OneForm),
}

fn solution(m: &ModelFile, name: &str) -> Result<Solution, ModelError> {
    let resolved = match (m.sections.get(name), m.oneforms.get(name)) {
        (Some(s), None) => Solution::Section(s.resolve(m.k, m.n)),
        (None, Some(a)) => Solution::Form(a.resolve(m.k, m.n)),
        (Some(_), Some(_)) => return Err(ModelError::Usage(format!("{:?} names both a section and a one-form", name))),
        (None, None) => return Err(ModelError::Unknown { kind: "section or one-form", name: name.to_string() }),
    };
    let unknown = match &resolved {
        Solution::Section(s) => s.rules().values().any(Expr::has_placeholders),
        Solution::Form(a) => a.rules().values().any(Expr::has_placeholders),
    };
    if unknown {
        return Err(ModelError::Usage(format!("{:?} has unknown functions and cannot be integrated", name)));
    }
    Ok(resolved)
}

fn initial_state(state: &BTreeMap<Symbol, f64>, coords: &[Coordinate], name: &str) -> Result<Vec<f64>, ModelError> {
    let given: Vec<Coordinate> = state.keys().filter_map(Symbol::as_coord).collect();
    let mut want = coords.to_vec();
    want.sort();
    let mut have = given.clone();
    have.sort();
    if want != have {
        let list = |v: &[Coordinate]| v.iter().map(Coordinate::to_string).collect::<Vec<_>>().join(", ");
        return Err(ModelError::Usage(format!(
            "state {:?} gives ({}) but the field needs ({})",
            name,
            list(&have),
            list(coords)
        )));
    }
    Ok(coords.iter().map(|c| state[&Symbol::Coord(*c)]).collect())
}

fn final_lines(rep: &mut Report, traj: &Trajectory) {
    rep.line(format!("steps = {}, t = {}", traj.len() - 1, traj.times.last().copied().unwrap_or_default()));
    for (c, v) in traj.coords.iter().zip(traj.last()) {
        rep.line(format!("  {}(t1) = {:.16e}", c, v));
        rep.row("FINAL", c.to_string(), format!("{:.16e}", v), "-", "-");
    }
}

/// Integrates the chosen field from a named state and, with `lift`, runs
/// the lifting comparison for the named solution.
pub fn cmd_simulate(m: &ModelFile, o: &SimulateOptions) -> Result<Report, ModelError> {
    if !(o.dt > 0.0) {
        return Err(ModelError::Usage(format!("step must be positive, got {}", o.dt)));
    }
    if !(o.t1 > o.t0) {
        return Err(ModelError::Usage(format!("empty interval [{}, {}]", o.t0, o.t1)));
    }
    if !(o.tol > 0.0) {
        return Err(ModelError::Usage(format!("tolerance must be positive, got {}", o.tol)));
    }
    let state = m.states.get(&o.initial).ok_or_else(|| ModelError::Unknown { kind: "state", name: o.initial.clone() })?;
    let mut constants = Bindings::new();
    for c in &m.constants {
        let v = state
            .get(&Symbol::constant(c))
            .ok_or_else(|| ModelError::Usage(format!("state {:?} does not bind constant {}", o.initial, c)))?;
        constants.set_const(c, *v);
    }
    let sys = system(m)?;
    let mut rep = Report::new(format!("simulate {} from {}", m.name, o.initial));
    rep.settings.push(format!("t0 = {}, t1 = {}, dt = {}, lift-tol = {:e}", o.t0, o.t1, o.dt, o.tol));
    let (traj, drift) = match &o.field {
        FieldChoice::Lagrangian => {
            let x = &sys.euler_lagrange_field()?.field;
            let z0 = initial_state(state, &x.coords, &o.initial)?;
            rep.line(format!("field = {}", x));
            let mut t = numeric::integrate(x, &z0, &constants, o.t0, o.t1, o.dt)?;
            t.provenance = format!("X_L from {}", o.initial);
            let d = numeric::max_drift(&t, &sys.cartan().energy, &constants)?;
            (t, Some(("E_L", d)))
        }
        FieldChoice::Hamiltonian => {
            let (fl, hs) = ham_system(&sys)?;
            let x = hs.field();
            let jet = sys.velocity_space().coords();
            let z0 = if state.keys().any(|s| s.as_coord().is_some_and(|c| c.is_jet() && c.order >= m.k)) {
                let v = initial_state(state, &jet, &o.initial)?;
                let start = Trajectory { coords: jet.clone(), times: vec![o.t0], states: vec![v], provenance: String::new() };
                let mapped = numeric::map_trajectory(&start, &x.coords, &fl.forward, &constants)?;
                rep.line("initial state mapped through FL");
                mapped.states[0].clone()
            } else {
                initial_state(state, &x.coords, &o.initial)?
            };
            rep.line(format!("field = {}", x));
            let mut t = numeric::integrate(x, &z0, &constants, o.t0, o.t1, o.dt)?;
            t.provenance = format!("X_h from {}", o.initial);
            let d = numeric::max_drift(&t, hs.hamiltonian(), &constants)?;
            (t, Some(("h", d)))
        }
        FieldChoice::Associated(name) => {
            let x = match solution(m, name)? {
                Solution::Section(s) => associated_field_lag(&sys, &s)?,
                Solution::Form(a) => associated_field_ham(&ham_system(&sys)?.1, &a)?,
            };
            let z0 = initial_state(state, &x.coords, &o.initial)?;
            rep.line(format!("field = {}", x));
            let mut t = numeric::integrate(&x, &z0, &constants, o.t0, o.t1, o.dt)?;
            t.provenance = format!("field associated with {} from {}", name, o.initial);
            (t, None)
        }
    };
    rep.line(format!("trajectory: {}", traj.provenance));
    final_lines(&mut rep, &traj);
    if let Some((f, d)) = drift {
        rep.line(format!("max drift of {} = {:.3e}", f, d));
        rep.row("DRIFT", f, "-", format!("{:.3e}", d), "-");
    }
    if let Some(name) = &o.lift {
        let base = sys.base_space().coords();
        let z0 = initial_state(
            &state.iter().filter(|(s, _)| s.as_coord().map_or(true, |c| base.contains(&c))).map(|(s, v)| (s.clone(), *v)).collect(),
            &base,
            &o.initial,
        )?;
        let out = match solution(m, name)? {
            Solution::Section(s) => numeric::verify_lifting_lag(&sys, &s, &z0, &constants, (o.t0, o.t1, o.dt), o.tol)?,
            Solution::Form(a) => {
                numeric::verify_lifting_ham(&ham_system(&sys)?.1, &a, &z0, &constants, (o.t0, o.t1, o.dt), o.tol)?
            }
        };
        let d = &out.deviation;
        let verdict = if out.pass { "pass" } else { "fail" };
        let at = d.coord.map_or_else(|| "-".to_string(), |c| c.to_string());
        rep.line(format!("lifting of {}: max deviation {:.3e} at t = {} in {} ({})", name, d.max, d.time, at, verdict));
        rep.row("LIFT", name.clone(), at, format!("{:.3e}", d.max), verdict);
        rep.passed = out.pass;
    }
    rep.csv = Some(traj.to_csv());
    Ok(rep)
}

/// Checks that a family is a local diffeomorphism and that its parameter
/// functions are pairwise in involution.
pub fn cmd_involution(m: &ModelFile, name: &str, opts: &CheckOptions) -> Result<Report, ModelError> {
    validate(opts)?;
    let opts = &opts.clone().with_nonzero(m.nonzero.iter().cloned());
    let fam = m.families.get(name).ok_or_else(|| ModelError::Unknown { kind: "family", name: name.to_string() })?;
    let sys = system(m)?;
    let (_, hs) = ham_system(&sys)?;
    let mut rep = Report::new(format!("involution {} {}", m.name, name));
    option_lines(&mut rep, opts);
    rep.line(format!("parameters: {}", fam.params.join(", ")));
    component_lines(&mut rep, "one-form", fam.form.rules());
    let brackets = involution_check(&hs, fam, opts)?;
    let mut members = ResidualReport::new();
    members.extend(gen_ham_residuals(&hs, &fam.form, opts));
    members.extend(ham_closedness(&fam.form, opts));
    let mut ok = true;
    for r in members.entries.iter().chain(&brackets.entries) {
        let bracket = r.tag == Tag::Involution;
        let label = if bracket { format!("{{{}}}", r.id.replace(',', ", ")) } else { format!("{} {}", r.tag, r.id) };
        rep.line(format!("{} = {} [{}]", label, r.expr, r.verdict.as_str()));
        rep.row(r.tag.as_str(), r.id.clone(), r.expr.to_string(), num(r.numeric_max), r.verdict.as_str());
        ok &= r.is_zero_at(opts.tol);
    }
    for n in &brackets.notes {
        rep.line(format!("note: {}", n));
    }
    rep.line(format!("verdict: {}", if ok { "in involution" } else { "not in involution" }));
    rep.passed = ok;
    Ok(rep)
}
