use std::collections::BTreeSet;
use std::fmt;

use crate::symbolic::{Bindings, Expr, Sampler};

/// Which residual system an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    LagGen,
    LagClosed,
    LagEnergy,
    LagGenfunc,
    HamGen,
    HamClosed,
    HamEnergy,
    Hj,
    Involution,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::LagGen => "LAG-GEN",
            Tag::LagClosed => "LAG-CLOSED",
            Tag::LagEnergy => "LAG-ENERGY",
            Tag::LagGenfunc => "LAG-GENFUNC",
            Tag::HamGen => "HAM-GEN",
            Tag::HamClosed => "HAM-CLOSED",
            Tag::HamEnergy => "HAM-ENERGY",
            Tag::Hj => "HJ",
            Tag::Involution => "INVOLUTION",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResidualVerdict {
    ExactZero,
    NumericZero,
    Nonzero,
    /// Involves unknown functions; no numeric decision is possible.
    Symbolic,
}

impl ResidualVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ResidualVerdict::ExactZero => "exact-zero",
            ResidualVerdict::NumericZero => "numeric-zero",
            ResidualVerdict::Nonzero => "nonzero",
            ResidualVerdict::Symbolic => "symbolic",
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ResidualVerdict::ExactZero | ResidualVerdict::NumericZero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub nonzero: BTreeSet<String>,
    /// Values held fixed while sampling, e.g. physical constants.
    pub fixed: Bindings,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { tol: 1e-9, samples: 40, seed: 42, nonzero: BTreeSet::new(), fixed: Bindings::new() }
    }
}

impl CheckOptions {
    pub fn with_nonzero<I: IntoIterator<Item = String>>(mut self, names: I) -> Self {
        self.nonzero.extend(names);
        self
    }

    fn sampler(&self) -> Sampler {
        Sampler::new(self.seed).with_nonzero(self.nonzero.iter().cloned()).with_fixed(self.fixed.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub tag: Tag,
    pub id: String,
    pub expr: Expr,
    pub numeric_max: Option<f64>,
    pub verdict: ResidualVerdict,
    /// Whether a numeric-zero verdict is admissible for this entry.
    pub numeric_fallback: bool,
}

impl Residual {
    pub fn is_zero_at(&self, tol: f64) -> bool {
        match self.verdict {
            ResidualVerdict::ExactZero => true,
            ResidualVerdict::Symbolic => false,
            _ => self.numeric_fallback && self.numeric_max.is_some_and(|m| m <= tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualReport {
    pub entries: Vec<Residual>,
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry, sampling it numerically unless it is exactly zero or
    /// involves unknown functions. Numeric zero is accepted only for
    /// expressions outside the Laurent-polynomial class, where the
    /// canonical form does not decide zero.
    pub fn push(&mut self, tag: Tag, id: impl Into<String>, expr: Expr, opts: &CheckOptions) {
        let id = id.into();
        let numeric_fallback = !expr.is_laurent_polynomial();
        let (numeric_max, verdict) = if expr.is_zero() {
            (Some(0.0), ResidualVerdict::ExactZero)
        } else if expr.has_placeholders() {
            (None, ResidualVerdict::Symbolic)
        } else {
            let max = opts.sampler().max_abs(&[&expr], opts.samples).map(|v| v[0]);
            let verdict = match max {
                Some(m) if numeric_fallback && m <= opts.tol => ResidualVerdict::NumericZero,
                _ => ResidualVerdict::Nonzero,
            };
            if max.is_none() {
                self.notes.push(format!("{} {}: no admissible sample points", tag, id));
            }
            (max, verdict)
        };
        if verdict == ResidualVerdict::NumericZero {
            self.notes.push(format!(
                "{} {}: numeric-zero fallback over {} samples (tol {:e}, seed {})",
                tag, id, opts.samples, opts.tol, opts.seed
            ));
        }
        self.entries.push(Residual { tag, id, expr, numeric_max, verdict, numeric_fallback });
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.entries.extend(other.entries);
        for a in other.assumptions {
            if !self.assumptions.contains(&a) {
                self.assumptions.push(a);
            }
        }
        self.notes.extend(other.notes);
    }

    pub fn with_tag(&self, tag: Tag) -> impl Iterator<Item = &Residual> {
        self.entries.iter().filter(move |r| r.tag == tag)
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.with_tag(tag).next().is_some()
    }

    /// True when every entry with this tag is zero. Vacuous for no entries.
    pub fn all_zero(&self, tag: Tag, tol: f64) -> bool {
        self.with_tag(tag).all(|r| r.is_zero_at(tol))
    }

    pub fn get(&self, tag: Tag, id: &str) -> Option<&Residual> {
        self.entries.iter().find(|r| r.tag == tag && r.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    StrictSolution,
    GeneralizedSolution,
    NotASolution,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::StrictSolution => "strict-solution",
            Verdict::GeneralizedSolution => "generalized-solution",
            Verdict::NotASolution => "not-a-solution",
            Verdict::Undetermined => "undetermined",
        }
    }

    pub fn is_solution(self) -> bool {
        matches!(self, Verdict::StrictSolution | Verdict::GeneralizedSolution)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict per formalism; `None` when the report has no residuals for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub lagrangian: Option<Verdict>,
    pub hamiltonian: Option<Verdict>,
}

fn classify_one(report: &ResidualReport, gen: Tag, closed: Tag, tol: f64) -> Option<Verdict> {
    if !report.has_tag(gen) {
        return None;
    }
    let gens: Vec<&Residual> = report.with_tag(gen).collect();
    if gens.iter().any(|r| !r.is_zero_at(tol) && r.verdict != ResidualVerdict::Symbolic) {
        return Some(Verdict::NotASolution);
    }
    if gens.iter().any(|r| r.verdict == ResidualVerdict::Symbolic) {
        return Some(Verdict::Undetermined);
    }
    if report.all_zero(closed, tol) {
        Some(Verdict::StrictSolution)
    } else {
        Some(Verdict::GeneralizedSolution)
    }
}

/// Strict requires the generalized residuals and the closedness residuals
/// to vanish; generalized requires only the former.
pub fn classify(report: &ResidualReport, tol: f64) -> Classification {
    Classification {
        lagrangian: classify_one(report, Tag::LagGen, Tag::LagClosed, tol),
        hamiltonian: classify_one(report, Tag::HamGen, Tag::HamClosed, tol),
    }
}
