#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use hjkit::hj::Section;
use hjkit::model::ModelFile;
use hjkit::symbolic::{rat, ratio, Expr, Func};
use hjkit::{parse, Coordinate, Form1, Form2, JetSpace, LagrangianSystem, ParseContext};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn p(s: &str) -> Expr {
    parse(s, &ParseContext::permissive()).unwrap_or_else(|e| panic!("{}: {}", s, e))
}

pub fn c(s: &str) -> Coordinate {
    s.parse().unwrap()
}

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn model_path(name: &str) -> PathBuf {
    root().join("models").join(format!("{}.hjm", name))
}

pub fn model(name: &str) -> ModelFile {
    ModelFile::parse(&std::fs::read_to_string(model_path(name)).unwrap()).unwrap()
}

pub fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e))
}

pub fn system(name: &str) -> LagrangianSystem {
    let m = model(name);
    LagrangianSystem::new(m.k, m.n, m.lagrangian).unwrap().with_nonzero(m.nonzero)
}

pub fn form1(coords: Vec<Coordinate>, entries: &[(&str, &str)]) -> Form1 {
    let mut f = Form1::zero(coords);
    for (u, e) in entries {
        f.set(&c(u), p(e));
    }
    f
}

/// Adds `e du^dv` to the form, so repeated pairs accumulate.
pub fn add_term(f: &mut Form2, u: &Coordinate, v: &Coordinate, e: &Expr) {
    if u == v {
        return;
    }
    let old = f.get(u, v);
    f.set(u, v, old.add(e));
}

pub fn form2(coords: Vec<Coordinate>, entries: &[(&str, &str, &str)]) -> Form2 {
    let mut f = Form2::zero(coords);
    for (u, v, e) in entries {
        add_term(&mut f, &c(u), &c(v), &p(e));
    }
    f
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial with small rational coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, vars: &[Coordinate], degree: u32, terms: usize) -> Expr {
    let mut e = Expr::zero();
    for _ in 0..terms {
        let mut m = Expr::rational(ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
        let d = rng.gen_range(0..=degree);
        for _ in 0..d {
            m = m.mul(&Expr::coord(*vars.choose(rng).unwrap()));
        }
        e = e.add(&m);
    }
    e
}

/// Smooth expression built from polynomials, `sin`, `cos`, `exp` and the
/// square root of a positive quantity.
pub fn random_smooth(rng: &mut ChaCha8Rng, vars: &[Coordinate]) -> Expr {
    let mut e = random_poly(rng, vars, 3, 3);
    for _ in 0..rng.gen_range(1..=3) {
        let arg = random_poly(rng, vars, 2, 2);
        let piece = match rng.gen_range(0..4) {
            0 => Expr::func(Func::Sin, arg),
            1 => Expr::func(Func::Cos, arg),
            2 => Expr::func(Func::Exp, arg.scale(&ratio(1, 4))),
            _ => arg.mul(&arg).add(&Expr::int(1)).sqrt(),
        };
        let weight = random_poly(rng, vars, 1, 2);
        e = e.add(&if rng.gen_bool(0.5) { piece } else { piece.mul(&weight) });
    }
    e
}

/// `L = 1/2 q_k^T M q_k + g(q_<k) . q_k + V(q_<k)` with `M` constant,
/// symmetric and diagonally dominant.
pub fn random_lagrangian(rng: &mut ChaCha8Rng, k: usize, n: usize) -> LagrangianSystem {
    let lower = JetSpace::new(k - 1, n).coords();
    let top: Vec<Expr> = (1..=n).map(|a| Expr::q(k, a)).collect();
    let mut l = Expr::zero();
    for a in 0..n {
        let d = rng.gen_range(2..=4) * if rng.gen_bool(0.5) { 1 } else { -1 };
        l = l.add(&top[a].mul(&top[a]).scale(&ratio(d, 2)));
        for b in a + 1..n {
            let m = rng.gen_range(-1..=1);
            l = l.add(&top[a].mul(&top[b]).scale(&rat(m)));
        }
        l = l.add(&random_poly(rng, &lower, 2, 2).mul(&top[a]));
    }
    l = l.add(&random_poly(rng, &lower, 3, 3));
    LagrangianSystem::new(k, n, l).unwrap()
}

/// Random polynomial section of `T^{2k-1}Q -> T^{k-1}Q`.
pub fn random_section(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Section {
    let base = JetSpace::new(k - 1, n).coords();
    let mut comps = BTreeMap::new();
    for c in Section::fibre(k, n) {
        let terms = rng.gen_range(0..=3);
        comps.insert(c, random_poly(rng, &base, 2, terms));
    }
    Section::new(k, n, comps).unwrap()
}
