//! Fixed-step integration of vector fields and numeric checks of the
//! lifting property.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::hamiltonian::HamiltonianSystem;
use crate::hj::{associated_field_ham, associated_field_lag, HjError, OneForm, Section};
use crate::jet::VectorField;
use crate::lagrangian::LagrangianSystem;
use crate::symbolic::{Bindings, Coordinate, EvalError, Expr, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("step must be positive, got {0}")]
    Step(f64),
    #[error("empty interval [{0}, {1}]")]
    Interval(f64, f64),
    #[error("initial state has {got} entries, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("evaluation failed at t = {t} (state {state:?}): {source}")]
    Domain { t: f64, state: Vec<f64>, source: EvalError },
    #[error("{len} samples cannot give {order} derivatives")]
    TooShort { len: usize, order: usize },
    #[error(transparent)]
    Hj(#[from] HjError),
}

/// States on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub coords: Vec<Coordinate>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub provenance: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn column(&self, c: &Coordinate) -> Option<Vec<f64>> {
        let i = self.coords.iter().position(|x| x == c)?;
        Some(self.states.iter().map(|s| s[i]).collect())
    }

    /// Rows `t,<coords...>` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for c in &self.coords {
            let _ = write!(out, ",{}", c);
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{:.16e}", t);
            for v in s {
                let _ = write!(out, ",{:.16e}", v);
            }
            out.push('\n');
        }
        out
    }
}

fn lookup<'a>(coords: &'a BTreeMap<Coordinate, usize>, state: &'a [f64], constants: &'a Bindings) -> impl Fn(&Symbol) -> Option<f64> + 'a {
    move |s| match s {
        Symbol::Coord(c) => coords.get(c).map(|&i| state[i]).or_else(|| constants.get(s)),
        Symbol::Const(_) => constants.get(s),
    }
}

fn eval_all(exprs: &[Expr], index: &BTreeMap<Coordinate, usize>, state: &[f64], constants: &Bindings) -> Result<Vec<f64>, EvalError> {
    let f = lookup(index, state, constants);
    exprs.iter().map(|e| e.eval_with(&f)).collect()
}

/// Number of steps for `[t0, t1]` at step `h`; the last step is shortened
/// when `h` does not divide the interval.
fn step_count(t0: f64, t1: f64, h: f64) -> usize {
    let ratio = (t1 - t0) / h;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Classical fourth-order Runge-Kutta with fixed step `h`.
pub fn integrate(
    x: &VectorField,
    z0: &[f64],
    constants: &Bindings,
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<Trajectory, NumericError> {
    if !(h > 0.0) {
        return Err(NumericError::Step(h));
    }
    if !(t1 > t0) {
        return Err(NumericError::Interval(t0, t1));
    }
    let dim = x.coords.len();
    if z0.len() != dim {
        return Err(NumericError::Dimension { expected: dim, got: z0.len() });
    }
    let index: BTreeMap<Coordinate, usize> = x.coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let f = |t: f64, z: &[f64]| {
        eval_all(&x.components, &index, z, constants).map_err(|source| NumericError::Domain { t, state: z.to_vec(), source })
    };
    let n = step_count(t0, t1, h);
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(t0);
    states.push(z0.to_vec());
    let mut z = z0.to_vec();
    for i in 0..n {
        let ta = times[i];
        let tb = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
        let dt = tb - ta;
        let k1 = f(ta, &z)?;
        let y: Vec<f64> = z.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k2 = f(ta + 0.5 * dt, &y)?;
        let y: Vec<f64> = z.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k3 = f(ta + 0.5 * dt, &y)?;
        let y: Vec<f64> = z.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let k4 = f(tb, &y)?;
        for j in 0..dim {
            z[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        times.push(tb);
        states.push(z.clone());
    }
    Ok(Trajectory { coords: x.coords.clone(), times, states, provenance: String::new() })
}

/// Evaluates `targets` (a rule per coordinate, identity when absent) at
/// every state of the trajectory.
pub fn map_trajectory(
    traj: &Trajectory,
    targets: &[Coordinate],
    rules: &BTreeMap<Coordinate, Expr>,
    constants: &Bindings,
) -> Result<Trajectory, NumericError> {
    let index: BTreeMap<Coordinate, usize> = traj.coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let exprs: Vec<Expr> = targets.iter().map(|c| rules.get(c).cloned().unwrap_or_else(|| Expr::coord(*c))).collect();
    let mut states = Vec::with_capacity(traj.len());
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let v = eval_all(&exprs, &index, s, constants).map_err(|source| NumericError::Domain { t: *t, state: s.clone(), source })?;
        states.push(v);
    }
    Ok(Trajectory { coords: targets.to_vec(), times: traj.times.clone(), states, provenance: traj.provenance.clone() })
}

/// Largest `|f(z(t)) - f(z(t0))|` along the trajectory.
pub fn max_drift(traj: &Trajectory, f: &Expr, constants: &Bindings) -> Result<f64, NumericError> {
    let index: BTreeMap<Coordinate, usize> = traj.coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut first = None;
    let mut drift = 0.0f64;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let v = f
            .eval_with(&lookup(&index, s, constants))
            .map_err(|source| NumericError::Domain { t: *t, state: s.clone(), source })?;
        let v0 = *first.get_or_insert(v);
        drift = drift.max((v - v0).abs());
    }
    Ok(drift)
}

/// Maximum deviation between two trajectories on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub max: f64,
    pub time: f64,
    pub coord: Option<Coordinate>,
}

pub fn max_deviation(a: &Trajectory, b: &Trajectory) -> Deviation {
    let mut dev = Deviation { max: 0.0, time: a.times.first().copied().unwrap_or(0.0), coord: None };
    for ((t, sa), sb) in a.times.iter().zip(&a.states).zip(&b.states) {
        for ((c, x), y) in a.coords.iter().zip(sa).zip(sb) {
            let d = (x - y).abs();
            if d > dev.max {
                dev = Deviation { max: d, time: *t, coord: Some(*c) };
            }
        }
    }
    dev
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftingOutcome {
    pub pass: bool,
    pub deviation: Deviation,
    pub tol: f64,
    pub base: Trajectory,
    pub lifted: Trajectory,
    pub direct: Trajectory,
}

fn lift_and_compare(
    full: &VectorField,
    base_field: &VectorField,
    lift: &BTreeMap<Coordinate, Expr>,
    z0: &[f64],
    constants: &Bindings,
    span: (f64, f64, f64),
    tol: f64,
) -> Result<LiftingOutcome, NumericError> {
    let (t0, t1, h) = span;
    let mut base = integrate(base_field, z0, constants, t0, t1, h)?;
    base.provenance = "associated field".into();
    let mut lifted = map_trajectory(&base, &full.coords, lift, constants)?;
    lifted.provenance = "lifted associated trajectory".into();
    let mut direct = integrate(full, &lifted.states[0], constants, t0, t1, h)?;
    direct.provenance = "dynamics from the lifted initial state".into();
    let deviation = max_deviation(&lifted, &direct);
    Ok(LiftingOutcome { pass: deviation.max <= tol, deviation, tol, base, lifted, direct })
}

/// Integrates the field associated with `s`, lifts it through `s`, and
/// compares with the integral curve of `X_L` from `s(z0)`.
pub fn verify_lifting_lag(
    sys: &LagrangianSystem,
    s: &Section,
    z0: &[f64],
    constants: &Bindings,
    span: (f64, f64, f64),
    tol: f64,
) -> Result<LiftingOutcome, NumericError> {
    let x = &sys.euler_lagrange_field().map_err(HjError::from)?.field;
    let base_field = associated_field_lag(sys, s)?;
    lift_and_compare(x, &base_field, s.rules(), z0, constants, span, tol)
}

/// Hamiltonian counterpart of [`verify_lifting_lag`].
pub fn verify_lifting_ham(
    hs: &HamiltonianSystem,
    alpha: &OneForm,
    z0: &[f64],
    constants: &Bindings,
    span: (f64, f64, f64),
    tol: f64,
) -> Result<LiftingOutcome, NumericError> {
    let base_field = associated_field_ham(hs, alpha)?;
    lift_and_compare(hs.field(), &base_field, alpha.rules(), z0, constants, span, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub coord: Coordinate,
    pub symbolic: f64,
    pub numeric: f64,
    pub pass: bool,
}

/// Compares `de/dc` with central differences for every coordinate bound
/// in `point`; relative tolerance with unit floor.
pub fn fd_gradient_check(e: &Expr, point: &Bindings, step: f64, tol: f64) -> Result<Vec<GradientCheck>, NumericError> {
    if !(step > 0.0) {
        return Err(NumericError::Step(step));
    }
    let domain = |source| NumericError::Domain { t: 0.0, state: point.iter().map(|(_, v)| v).collect(), source };
    let mut out = Vec::new();
    for (s, v) in point.iter() {
        let Some(c) = s.as_coord() else { continue };
        let symbolic = e.diff(&c).evaluate(point).map_err(domain)?;
        let mut plus = point.clone();
        plus.set(s.clone(), v + step);
        let mut minus = point.clone();
        minus.set(s.clone(), v - step);
        let numeric = (e.evaluate(&plus).map_err(domain)? - e.evaluate(&minus).map_err(domain)?) / (2.0 * step);
        let scale = symbolic.abs().max(numeric.abs()).max(1.0);
        out.push(GradientCheck { coord: c, symbolic, numeric, pass: (symbolic - numeric).abs() <= tol * scale });
    }
    Ok(out)
}

/// Numeric prolongation of a sampled curve: `levels[i]` approximates the
/// `i`-th derivative, by repeated second-order differences.
pub fn prolong_samples(values: &[f64], h: f64, k: usize) -> Result<Vec<Vec<f64>>, NumericError> {
    if !(h > 0.0) {
        return Err(NumericError::Step(h));
    }
    if values.len() < 2 * k + 1 {
        return Err(NumericError::TooShort { len: values.len(), order: k });
    }
    let mut levels = vec![values.to_vec()];
    for _ in 0..k {
        let prev = levels.last().expect("nonempty");
        levels.push(gradient(prev, h));
    }
    Ok(levels)
}

fn gradient(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}
