//! Model files and the commands run on them.
//!
//! A model file is line oriented: `[block]` or `[block NAME]` headers
//! followed by `key = value` pairs. Expressions are double-quoted strings
//! in the expression grammar; `#` starts a comment line.
//!
//! ```text
//! [model]
//! name = "beam"
//! k = 2
//! n = 1
//! constants = "mu, rho"
//! nonzero = "mu"
//!
//! [lagrangian]
//! L = "mu*q2_1^2/2 + rho*q0_1"
//!
//! [section rest]
//! q2_1 = "0"
//! q3_1 = "0"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::hj::{CompleteSolutionFamily, GeneratingFunction, HjError, OneForm, Section};
use crate::symbolic::{Coordinate, Expr, ParseContext, ParseError, Symbol};

mod commands;

pub use commands::{
    cmd_check, cmd_derive, cmd_involution, cmd_simulate, machine_rows, DeriveWhat, FieldChoice, Report, Requirement,
    SimulateOptions, LIFT_TOL, MACHINE_BEGIN, MACHINE_END,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Expression { line: usize, source: ParseError },
    #[error("{0}")]
    Invalid(String),
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Precondition(String),
}

impl ModelError {
    /// 2 for malformed input or usage, 3 for violated mathematical
    /// preconditions.
    pub fn exit_code(&self) -> i32 {
        match self {
            ModelError::Precondition(_) => 3,
            _ => 2,
        }
    }
}

impl From<HjError> for ModelError {
    fn from(e: HjError) -> Self {
        match e {
            HjError::Missing { .. } | HjError::Unexpected { .. } | HjError::Scope { .. } | HjError::ParameterCount { .. } => {
                ModelError::Invalid(e.to_string())
            }
            HjError::Samples => ModelError::Usage(e.to_string()),
            _ => ModelError::Precondition(e.to_string()),
        }
    }
}

/// A section or one-form given either by components or as unknown
/// functions with a name prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate<T> {
    Explicit(T),
    Placeholder(String),
}

impl Candidate<Section> {
    pub fn resolve(&self, k: usize, n: usize) -> Section {
        match self {
            Candidate::Explicit(s) => s.clone(),
            Candidate::Placeholder(p) => Section::placeholder(k, n, p),
        }
    }
}

impl Candidate<OneForm> {
    pub fn resolve(&self, k: usize, n: usize) -> OneForm {
        match self {
            Candidate::Explicit(a) => a.clone(),
            Candidate::Placeholder(p) => OneForm::placeholder(k, n, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub name: String,
    pub k: usize,
    pub n: usize,
    pub constants: Vec<String>,
    pub nonzero: BTreeSet<String>,
    pub lagrangian: Expr,
    pub sections: BTreeMap<String, Candidate<Section>>,
    pub oneforms: BTreeMap<String, Candidate<OneForm>>,
    pub genfuncs: BTreeMap<String, GeneratingFunction>,
    pub families: BTreeMap<String, CompleteSolutionFamily>,
    /// Numeric values for coordinates and constants.
    pub states: BTreeMap<String, BTreeMap<Symbol, f64>>,
}

#[derive(Debug)]
struct Block {
    kind: String,
    name: Option<String>,
    line: usize,
    entries: Vec<(String, Value, usize)>,
}

#[derive(Debug, Clone)]
enum Value {
    Quoted(String),
    Bare(String),
}

impl Value {
    fn text(&self) -> &str {
        match self {
            Value::Quoted(s) | Value::Bare(s) => s,
        }
    }
}

fn lex(src: &str) -> Result<Vec<Block>, ModelError> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(inner) = t.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| ModelError::Syntax { line, msg: "unterminated block header".into() })?;
            let mut parts = inner.split_whitespace();
            let kind = parts.next().ok_or_else(|| ModelError::Syntax { line, msg: "empty block header".into() })?;
            let name = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return Err(ModelError::Syntax { line, msg: "block names cannot contain spaces".into() });
            }
            blocks.push(Block { kind: kind.to_string(), name, line, entries: Vec::new() });
            continue;
        }
        let (key, value) = t
            .split_once('=')
            .ok_or_else(|| ModelError::Syntax { line, msg: format!("expected `key = value`, found {:?}", t) })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ModelError::Syntax { line, msg: "empty key".into() });
        }
        let value = if let Some(rest) = value.strip_prefix('"') {
            let body = rest
                .strip_suffix('"')
                .ok_or_else(|| ModelError::Syntax { line, msg: "unterminated string".into() })?;
            if body.contains('"') {
                return Err(ModelError::Syntax { line, msg: "stray quote".into() });
            }
            Value::Quoted(body.to_string())
        } else {
            Value::Bare(value.to_string())
        };
        let block = blocks
            .last_mut()
            .ok_or_else(|| ModelError::Syntax { line, msg: "entry before the first block header".into() })?;
        if block.entries.iter().any(|(k, _, _)| k == key) {
            return Err(ModelError::Syntax { line, msg: format!("duplicate key {:?}", key) });
        }
        block.entries.push((key.to_string(), value, line));
    }
    Ok(blocks)
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::to_string).collect()
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn expr(v: &Value, line: usize, ctx: &ParseContext) -> Result<Expr, ModelError> {
    crate::symbolic::parse(v.text(), ctx).map_err(|source| ModelError::Expression { line, source })
}

fn coordinate_key(key: &str, line: usize) -> Result<Coordinate, ModelError> {
    key.parse().map_err(|_| ModelError::Syntax { line, msg: format!("{:?} is not a coordinate", key) })
}

fn unique<'a>(
    map_has: impl Fn(&str) -> bool,
    b: &'a Block,
) -> Result<&'a str, ModelError> {
    let name = b
        .name
        .as_deref()
        .ok_or_else(|| ModelError::Syntax { line: b.line, msg: format!("[{}] needs a name", b.kind) })?;
    if map_has(name) {
        return Err(ModelError::Syntax { line: b.line, msg: format!("duplicate {} {:?}", b.kind, name) });
    }
    Ok(name)
}

impl ModelFile {
    pub fn parse(src: &str) -> Result<ModelFile, ModelError> {
        let blocks = lex(src)?;
        let header = blocks
            .iter()
            .find(|b| b.kind == "model")
            .ok_or_else(|| ModelError::Invalid("missing [model] block".into()))?;
        if blocks.iter().filter(|b| b.kind == "model").count() > 1 {
            return Err(ModelError::Invalid("more than one [model] block".into()));
        }
        let get = |key: &str| header.entries.iter().find(|(k, _, _)| k == key);
        for (key, _, line) in &header.entries {
            if !["name", "k", "n", "constants", "nonzero"].contains(&key.as_str()) {
                return Err(ModelError::Syntax { line: *line, msg: format!("unknown [model] key {:?}", key) });
            }
        }
        let name = get("name").map(|(_, v, _)| v.text().to_string()).unwrap_or_default();
        let int = |key: &str| -> Result<usize, ModelError> {
            let (_, v, line) =
                get(key).ok_or_else(|| ModelError::Invalid(format!("[model] is missing `{}`", key)))?;
            match v.text().parse::<usize>() {
                Ok(x) if x >= 1 => Ok(x),
                _ => Err(ModelError::Syntax { line: *line, msg: format!("`{}` must be a positive integer", key) }),
            }
        };
        let k = int("k")?;
        let n = int("n")?;
        let constants = get("constants").map(|(_, v, _)| split_names(v.text())).unwrap_or_default();
        for c in &constants {
            if !is_identifier(c) || c.parse::<Coordinate>().is_ok() {
                return Err(ModelError::Invalid(format!("bad constant name {:?}", c)));
            }
        }
        let nonzero: BTreeSet<String> = get("nonzero").map(|(_, v, _)| split_names(v.text())).unwrap_or_default().into_iter().collect();
        if let Some(c) = nonzero.iter().find(|c| !constants.contains(c)) {
            return Err(ModelError::Invalid(format!("nonzero constant {:?} is not declared", c)));
        }
        let consts = constants.clone();
        let jet = |order: usize| ParseContext::jet(order, n).with_constants(consts.clone());

        let mut lagrangian = None;
        let mut model = ModelFile {
            name,
            k,
            n,
            constants: constants.clone(),
            nonzero,
            lagrangian: Expr::zero(),
            sections: BTreeMap::new(),
            oneforms: BTreeMap::new(),
            genfuncs: BTreeMap::new(),
            families: BTreeMap::new(),
            states: BTreeMap::new(),
        };
        for b in &blocks {
            match b.kind.as_str() {
                "model" => {}
                "lagrangian" => {
                    if lagrangian.is_some() {
                        return Err(ModelError::Syntax { line: b.line, msg: "duplicate [lagrangian]".into() });
                    }
                    let mut l = None;
                    for (key, v, line) in &b.entries {
                        if key != "L" {
                            return Err(ModelError::Syntax { line: *line, msg: format!("unknown [lagrangian] key {:?}", key) });
                        }
                        l = Some(expr(v, *line, &jet(k))?);
                    }
                    lagrangian = Some(l.ok_or_else(|| ModelError::Invalid("[lagrangian] has no `L`".into()))?);
                }
                "section" => {
                    let name = unique(|x| model.sections.contains_key(x), b)?;
                    let cand = candidate(b, k, n, &jet(k - 1), |c| c.is_jet(), Section::new)?;
                    model.sections.insert(name.to_string(), cand);
                }
                "oneform" => {
                    let name = unique(|x| model.oneforms.contains_key(x), b)?;
                    let cand = candidate(b, k, n, &jet(k - 1), |c| c.is_momentum(), OneForm::new)?;
                    model.oneforms.insert(name.to_string(), cand);
                }
                "genfunc" => {
                    let name = unique(|x| model.genfuncs.contains_key(x), b)?;
                    let mut w = None;
                    let mut energy = None;
                    for (key, v, line) in &b.entries {
                        match key.as_str() {
                            "W" => w = Some(expr(v, *line, &jet(k - 1))?),
                            "E" => energy = Some(expr(v, *line, &ParseContext::jet(0, n).with_constants(consts.clone()))?),
                            _ => return Err(ModelError::Syntax { line: *line, msg: format!("unknown [genfunc] key {:?}", key) }),
                        }
                    }
                    if energy.as_ref().is_some_and(|e: &Expr| !e.free_coords().is_empty()) {
                        return Err(ModelError::Invalid(format!("genfunc {:?}: E must be constant", name)));
                    }
                    let w = w.ok_or_else(|| ModelError::Invalid(format!("genfunc {:?} has no `W`", name)))?;
                    model.genfuncs.insert(name.to_string(), GeneratingFunction { w, energy });
                }
                "family" => {
                    let name = unique(|x| model.families.contains_key(x), b)?;
                    let fam = family(b, k, n, &constants)?;
                    model.families.insert(name.to_string(), fam);
                }
                "state" => {
                    let name = unique(|x| model.states.contains_key(x), b)?;
                    let mut values = BTreeMap::new();
                    for (key, v, line) in &b.entries {
                        let sym = match key.parse::<Coordinate>() {
                            Ok(c) => Symbol::Coord(c),
                            Err(_) if constants.contains(key) => Symbol::constant(key),
                            Err(_) => {
                                return Err(ModelError::Syntax { line: *line, msg: format!("{:?} is neither a coordinate nor a constant", key) })
                            }
                        };
                        let x: f64 = v
                            .text()
                            .parse()
                            .map_err(|_| ModelError::Syntax { line: *line, msg: format!("{:?} is not a number", v.text()) })?;
                        values.insert(sym, x);
                    }
                    model.states.insert(name.to_string(), values);
                }
                other => return Err(ModelError::Syntax { line: b.line, msg: format!("unknown block [{}]", other) }),
            }
        }
        model.lagrangian = lagrangian.ok_or_else(|| ModelError::Invalid("missing [lagrangian] block".into()))?;
        Ok(model)
    }

    /// Canonical text of the model; `parse(print(m)) == m`.
    pub fn print(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[model]");
        let _ = writeln!(out, "name = \"{}\"", self.name);
        let _ = writeln!(out, "k = {}", self.k);
        let _ = writeln!(out, "n = {}", self.n);
        if !self.constants.is_empty() {
            let _ = writeln!(out, "constants = \"{}\"", self.constants.join(", "));
        }
        if !self.nonzero.is_empty() {
            let nz: Vec<&str> = self.nonzero.iter().map(String::as_str).collect();
            let _ = writeln!(out, "nonzero = \"{}\"", nz.join(", "));
        }
        let _ = writeln!(out, "\n[lagrangian]\nL = \"{}\"", self.lagrangian);
        let rules = |out: &mut String, m: &BTreeMap<Coordinate, Expr>| {
            for (c, e) in m {
                let _ = writeln!(out, "{} = \"{}\"", c, e);
            }
        };
        for (name, s) in &self.sections {
            let _ = writeln!(out, "\n[section {}]", name);
            match s {
                Candidate::Explicit(s) => rules(&mut out, s.rules()),
                Candidate::Placeholder(p) => {
                    let _ = writeln!(out, "placeholder = \"{}\"", p);
                }
            }
        }
        for (name, a) in &self.oneforms {
            let _ = writeln!(out, "\n[oneform {}]", name);
            match a {
                Candidate::Explicit(a) => rules(&mut out, a.rules()),
                Candidate::Placeholder(p) => {
                    let _ = writeln!(out, "placeholder = \"{}\"", p);
                }
            }
        }
        for (name, g) in &self.genfuncs {
            let _ = writeln!(out, "\n[genfunc {}]\nW = \"{}\"", name, g.w);
            if let Some(e) = &g.energy {
                let _ = writeln!(out, "E = \"{}\"", e);
            }
        }
        for (name, f) in &self.families {
            let _ = writeln!(out, "\n[family {}]\nparams = \"{}\"", name, f.params.join(", "));
            rules(&mut out, f.form.rules());
            if let Some(inv) = &f.inverse {
                for (p, e) in inv {
                    let _ = writeln!(out, "inverse.{} = \"{}\"", p, e);
                }
            }
        }
        for (name, st) in &self.states {
            let _ = writeln!(out, "\n[state {}]", name);
            for (s, v) in st {
                let _ = writeln!(out, "{} = {:?}", s, v);
            }
        }
        out
    }

    pub fn constants_context(&self) -> ParseContext {
        ParseContext::jet(0, self.n).with_constants(self.constants.clone())
    }
}

fn candidate<T>(
    b: &Block,
    k: usize,
    n: usize,
    ctx: &ParseContext,
    key_ok: impl Fn(&Coordinate) -> bool,
    build: impl Fn(usize, usize, BTreeMap<Coordinate, Expr>) -> Result<T, HjError>,
) -> Result<Candidate<T>, ModelError> {
    let what = &b.kind;
    if let Some((_, v, line)) = b.entries.iter().find(|(key, _, _)| key == "placeholder") {
        if b.entries.len() > 1 {
            return Err(ModelError::Syntax { line: *line, msg: format!("placeholder {} takes no components", what) });
        }
        if !is_identifier(v.text()) {
            return Err(ModelError::Syntax { line: *line, msg: format!("bad placeholder prefix {:?}", v.text()) });
        }
        return Ok(Candidate::Placeholder(v.text().to_string()));
    }
    let mut comps = BTreeMap::new();
    for (key, v, line) in &b.entries {
        let c = coordinate_key(key, *line)?;
        if !key_ok(&c) {
            return Err(ModelError::Syntax { line: *line, msg: format!("{} is not a {} component", c, what) });
        }
        comps.insert(c, expr(v, *line, ctx)?);
    }
    let name = b.name.clone().unwrap_or_default();
    build(k, n, comps)
        .map(Candidate::Explicit)
        .map_err(|e| ModelError::Invalid(format!("{} {:?}: {}", what, name, e)))
}

fn family(b: &Block, k: usize, n: usize, constants: &[String]) -> Result<CompleteSolutionFamily, ModelError> {
    let name = b.name.clone().unwrap_or_default();
    let params = b
        .entries
        .iter()
        .find(|(key, _, _)| key == "params")
        .map(|(_, v, _)| split_names(v.text()))
        .ok_or_else(|| ModelError::Invalid(format!("family {:?} has no `params`", name)))?;
    for p in &params {
        if !is_identifier(p) || p.parse::<Coordinate>().is_ok() {
            return Err(ModelError::Invalid(format!("family {:?}: bad parameter name {:?}", name, p)));
        }
    }
    let others: Vec<String> = constants.iter().filter(|c| !params.contains(c)).cloned().collect();
    let with_params: Vec<String> = others.iter().chain(&params).cloned().collect();
    let form_ctx = ParseContext::jet(k - 1, n).with_constants(with_params);
    let inv_ctx = ParseContext::phase(k, n).with_constants(others);
    let mut comps = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    for (key, v, line) in &b.entries {
        if key == "params" {
            continue;
        }
        if let Some(p) = key.strip_prefix("inverse.") {
            if !params.iter().any(|x| x == p) {
                return Err(ModelError::Syntax { line: *line, msg: format!("inverse rule for unknown parameter {:?}", p) });
            }
            inverse.insert(p.to_string(), expr(v, *line, &inv_ctx)?);
            continue;
        }
        let c = coordinate_key(key, *line)?;
        if !c.is_momentum() {
            return Err(ModelError::Syntax { line: *line, msg: format!("{} is not a one-form component", c) });
        }
        comps.insert(c, expr(v, *line, &form_ctx)?);
    }
    let form = OneForm::new(k, n, comps).map_err(|e| ModelError::Invalid(format!("family {:?}: {}", name, e)))?;
    let inverse = if inverse.is_empty() {
        None
    } else if inverse.len() == params.len() {
        Some(inverse)
    } else {
        return Err(ModelError::Invalid(format!("family {:?}: inverse rules must cover every parameter", name)));
    };
    Ok(CompleteSolutionFamily { params, form, inverse })
}
