mod common;

use std::collections::BTreeMap;

use common::*;
use hjkit::hamiltonian::{hamiltonian, legendre, poisson, PhaseSpace};
use hjkit::hj::{
    associated_field_ham, associated_field_lag, classify, gen_ham_residuals, gen_lag_residuals, ham_closedness,
    lag_closedness, transport_to_ham, transport_to_lag, CheckOptions,
};
use hjkit::jet::total_derivative;
use hjkit::numeric::{integrate, max_deviation};
use hjkit::symbolic::{ratio, Func};
use hjkit::{parse, Bindings, Coordinate, Expr, Form1, JetSpace, ParseContext, VectorField};
use proptest::prelude::*;

const VARS: [(usize, usize); 4] = [(0, 1), (0, 2), (1, 1), (1, 2)];

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Expr::frac(n, d)),
        (0..VARS.len()).prop_map(|i| Expr::q(VARS[i].0, VARS[i].1)),
        (0usize..2).prop_map(|a| Expr::p(0, a + 1)),
        Just(Expr::constant("a")),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), 0i64..=3).prop_map(|(a, n)| a.powi(n)),
            inner.clone().prop_map(|a| Expr::func(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::func(Func::Cos, a)),
            inner.clone().prop_map(|a| Expr::func(Func::Exp, a)),
            inner.prop_map(|a| a.mul(&a).add(&Expr::int(1)).sqrt()),
        ]
    })
}

/// Polynomial in jet coordinates only.
fn jet_poly() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        (0..VARS.len()).prop_map(|i| Expr::q(VARS[i].0, VARS[i].1)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.mul(&b)),
        ]
    })
}

fn phase_coords() -> Vec<Coordinate> {
    PhaseSpace::new(2, 1).coords()
}

/// Polynomial on `T*(TQ)` with `n = 1`.
fn phase_poly() -> impl Strategy<Value = Expr> {
    let coords = phase_coords();
    let leaf = prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        (0..coords.len()).prop_map(move |i| Expr::coord(coords[i])),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.mul(&b)),
        ]
    })
}

fn point() -> impl Strategy<Value = Bindings> {
    proptest::collection::vec(-1.5f64..1.5, 7).prop_map(|v| {
        let mut b = Bindings::new();
        for (i, (o, a)) in VARS.iter().enumerate() {
            b.set_coord(Coordinate::q(*o, *a), v[i]);
        }
        b.set_coord(Coordinate::p(0, 1), v[4]);
        b.set_coord(Coordinate::p(0, 2), v[5]);
        b.set_const("a", v[6]);
        b
    })
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-8 * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printing_then_parsing_is_identity(e in expr()) {
        let text = e.to_string();
        let back = parse(&text, &ParseContext::permissive()).unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn canonical_form_is_stable(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(a.add(&Expr::zero()), a.clone());
        prop_assert_eq!(a.mul(&Expr::one()), a.clone());
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn differentiation_is_linear_and_leibniz(a in expr(), b in expr(), i in 0..VARS.len(), n in -3i64..=3) {
        let v = Coordinate::q(VARS[i].0, VARS[i].1);
        prop_assert_eq!(a.add(&b).diff(&v), a.diff(&v).add(&b.diff(&v)));
        prop_assert_eq!(a.scale(&ratio(n, 2)).diff(&v), a.diff(&v).scale(&ratio(n, 2)));
        prop_assert_eq!(a.mul(&b).diff(&v), a.diff(&v).mul(&b).add(&a.mul(&b.diff(&v))));
    }

    #[test]
    fn mixed_partials_commute(e in expr(), i in 0..VARS.len(), j in 0..VARS.len()) {
        let u = Coordinate::q(VARS[i].0, VARS[i].1);
        let v = Coordinate::q(VARS[j].0, VARS[j].1);
        prop_assert_eq!(e.diff(&u).diff(&v), e.diff(&v).diff(&u));
    }

    #[test]
    fn evaluation_respects_arithmetic(a in expr(), b in expr(), at in point()) {
        if let (Ok(x), Ok(y)) = (a.evaluate(&at), b.evaluate(&at)) {
            prop_assume!(x.is_finite() && y.is_finite() && x.abs() < 1e6 && y.abs() < 1e6);
            prop_assert!(close(a.add(&b).evaluate(&at).unwrap(), x + y));
            prop_assert!(close(a.mul(&b).evaluate(&at).unwrap(), x * y));
        }
    }

    #[test]
    fn substituting_numbers_matches_binding(e in expr(), at in point()) {
        let v = Coordinate::q(0, 1);
        let x = at.get(&v.into()).unwrap();
        let r = num_rational::BigRational::from_float(x).unwrap();
        let rules = BTreeMap::from([(v, Expr::rational(r))]);
        let direct = e.evaluate(&at);
        let replaced = e.substitute_coords(&rules);
        prop_assert!(!replaced.depends_on(&v.into()));
        if let Ok(x) = direct {
            prop_assume!(x.is_finite() && x.abs() < 1e6);
            prop_assert!(close(replaced.evaluate(&at).unwrap(), x));
        }
    }

    #[test]
    fn total_derivative_is_a_derivation(a in jet_poly(), b in jet_poly()) {
        let d = |e: &Expr| total_derivative(e, 2).unwrap();
        prop_assert_eq!(d(&a.mul(&b)), d(&a).mul(&b).add(&a.mul(&d(&b))));
        prop_assert_eq!(d(&a.add(&b)), d(&a).add(&d(&b)));
        prop_assert!(d(&Expr::constant("a")).is_zero());
    }

    #[test]
    fn exterior_derivative_squares_to_zero(cs in proptest::collection::vec(jet_poly(), 4)) {
        let coords: Vec<Coordinate> = VARS.iter().map(|(o, a)| Coordinate::q(*o, *a)).collect();
        let f = Form1::new(coords.clone(), cs.clone());
        let df = f.exterior_derivative();
        prop_assert!(df.is_antisymmetric());
        prop_assert!(df.exterior_derivative().is_zero());
        prop_assert!(Form1::differential(&cs[0], coords).exterior_derivative().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poisson_bracket_is_a_lie_bracket(f in phase_poly(), g in phase_poly(), h in phase_poly()) {
        let ps = PhaseSpace::new(2, 1);
        let br = |x: &Expr, y: &Expr| poisson(x, y, &ps);
        prop_assert!(br(&f, &g).add(&br(&g, &f)).is_zero());
        let jacobi = br(&f, &br(&g, &h)).add(&br(&g, &br(&h, &f))).add(&br(&h, &br(&f, &g)));
        prop_assert!(jacobi.is_zero());
        prop_assert_eq!(br(&f, &g.mul(&h)), br(&f, &g).mul(&h).add(&g.mul(&br(&f, &h))));
    }

    #[test]
    fn rk4_is_exact_on_cubic_quadrature(c in proptest::collection::vec(-3i64..=3, 4), t1 in 0.1f64..2.0) {
        let tau = Expr::q(0, 1);
        let mut rhs = Expr::zero();
        for (i, ci) in c.iter().enumerate() {
            rhs = rhs.add(&tau.powi(i as i64).scale(&ratio(*ci, 1)));
        }
        let x = VectorField::on(&JetSpace::new(0, 2), vec![Expr::one(), rhs]).unwrap();
        let traj = integrate(&x, &[0.0, 0.0], &Bindings::new(), 0.0, t1, t1 / 3.0).unwrap();
        let exact: f64 = c.iter().enumerate().map(|(i, ci)| *ci as f64 * t1.powi(i as i32 + 1) / (i + 1) as f64).sum();
        prop_assert!((traj.last()[1] - exact).abs() <= 1e-12 * exact.abs().max(1.0));
        prop_assert_eq!(*traj.times.last().unwrap(), t1);
        prop_assert_eq!(max_deviation(&traj, &traj).max, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn legendre_pulls_back_canonical_forms(seed in any::<u64>(), k in 1usize..=3, n in 1usize..=2) {
        let sys = random_lagrangian(&mut rng(seed), k, n);
        let fl = legendre(&sys).unwrap();
        let ps = PhaseSpace::new(k, n);
        let cartan = sys.cartan();
        prop_assert!(fl.pull_form1(&ps.canonical_theta()).sub(&cartan.theta).is_zero());
        prop_assert!(fl.pull_form2(&ps.canonical_omega()).sub(&cartan.omega).is_zero());
        let hs = hamiltonian(&sys, &fl).unwrap();
        prop_assert!(fl.pull_function(hs.hamiltonian()).sub(&cartan.energy).is_zero());
    }

    #[test]
    fn solution_verdicts_agree_across_legendre(seed in any::<u64>(), which in 0usize..3, perturb in any::<bool>()) {
        let mut r = rng(seed);
        let (sys, base) = match which {
            0 => (system("javelin"), model("javelin").sections["static"].resolve(2, 3)),
            1 => (system("beam"), random_section(&mut r, 2, 1)),
            _ => (system("javelin1d"), model("javelin1d").sections["static"].resolve(2, 1)),
        };
        let (k, n) = (sys.order(), sys.dim());
        let s = if perturb {
            let noise = random_section(&mut r, k, n);
            let comps = base.rules().iter().map(|(c, e)| (*c, e.add(noise.component(c)))).collect();
            hjkit::Section::new(k, n, comps).unwrap()
        } else {
            base
        };
        let fl = legendre(&sys).unwrap();
        let hs = hamiltonian(&sys, &fl).unwrap();
        let opts = CheckOptions { seed, ..CheckOptions::default() }.with_nonzero(sys.nonzero_constants().iter().cloned());
        let mut lag = gen_lag_residuals(&sys, &s, &opts).unwrap();
        lag.extend(lag_closedness(&sys, &s, &opts));
        let alpha = transport_to_ham(&fl, &s).unwrap();
        let mut ham = gen_ham_residuals(&hs, &alpha, &opts);
        ham.extend(ham_closedness(&alpha, &opts));
        prop_assert_eq!(classify(&lag, opts.tol).lagrangian, classify(&ham, opts.tol).hamiltonian);
        let xl = associated_field_lag(&sys, &s).unwrap();
        let xh = associated_field_ham(&hs, &alpha).unwrap();
        prop_assert_eq!(xl, xh);
        prop_assert_eq!(transport_to_lag(&fl, &alpha).unwrap(), s);
    }
}
