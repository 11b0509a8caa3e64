mod common;

use common::*;
use hjkit::hamiltonian::{hamiltonian, legendre};
use hjkit::numeric::{
    fd_gradient_check, integrate, map_trajectory, max_deviation, max_drift, verify_lifting_ham, verify_lifting_lag,
    NumericError,
};
use hjkit::{Bindings, Coordinate, JetSpace, VectorField};

fn constants(pairs: &[(&str, f64)]) -> Bindings {
    let mut b = Bindings::new();
    for (n, v) in pairs {
        b.set_const(n, *v);
    }
    b
}

#[test]
fn javelin_field_oscillates() {
    let sys = system("javelin");
    let x = &sys.euler_lagrange_field().unwrap().field;
    let mut z0 = vec![0.0; 12];
    for a in 0..3 {
        z0[6 + a] = 1.0;
    }
    let t = integrate(x, &z0, &Bindings::new(), 0.0, 1.0, 1e-3).unwrap();
    let q3 = t.column(&c("q3_2")).unwrap();
    assert!((q3.last().unwrap() + 1f64.sin()).abs() <= 1e-6);
    let q2 = t.column(&c("q2_1")).unwrap();
    assert!((q2.last().unwrap() - 1f64.cos()).abs() <= 1e-6);

    // From (q0, q1, q2, q3) = (0, 1, 0, 0) the higher jets stay at rest.
    let mut z0 = vec![0.0; 12];
    for a in 0..3 {
        z0[3 + a] = 1.0;
    }
    let t = integrate(x, &z0, &Bindings::new(), 0.0, 1.0, 1e-3).unwrap();
    assert!(t.column(&c("q3_1")).unwrap().iter().all(|v| *v == 0.0));
    assert!((t.column(&c("q0_1")).unwrap().last().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn beam_quartic_is_integrated_exactly() {
    let sys = system("beam");
    let x = &sys.euler_lagrange_field().unwrap().field;
    let k = constants(&[("mu", 1.0), ("rho", 24.0)]);
    let t = integrate(x, &[0.0; 4], &k, 0.0, 1.0, 1e-3).unwrap();
    assert!((t.last()[0] + 1.0).abs() <= 1e-9);
    let coarse = integrate(x, &[0.0; 4], &k, 0.0, 1.0, 0.25).unwrap();
    assert!((coarse.last()[0] + 1.0).abs() <= 1e-12);
}

#[test]
fn static_javelin_section_lifts_exactly() {
    let m = model("javelin");
    let sys = system("javelin");
    let s = m.sections["static"].resolve(2, 3);
    let z0 = [0.3, 0.0, -0.5, 0.0, 0.0, 0.0];
    let out = verify_lifting_lag(&sys, &s, &z0, &Bindings::new(), (0.0, 1.0, 1e-3), 1e-6).unwrap();
    assert!(out.pass);
    assert!(out.deviation.max <= 1e-12);
}

#[test]
fn radical_solution_lifts_on_both_sides() {
    let m = model("javelin1d");
    let sys = system("javelin1d");
    let fl = legendre(&sys).unwrap();
    let hs = hamiltonian(&sys, &fl).unwrap();
    let k = constants(&[("c1", -1.0), ("c2", 0.0)]);
    let alpha = m.oneforms["dW"].resolve(2, 1);
    let out = verify_lifting_ham(&hs, &alpha, &[0.0, 0.0], &k, (0.0, 0.5, 1e-3), 1e-6).unwrap();
    assert!(out.pass, "{:?}", out.deviation);
    let s = m.sections["radical"].resolve(2, 1);
    let out = verify_lifting_lag(&sys, &s, &[0.0, 0.0], &k, (0.0, 0.5, 1e-3), 1e-6).unwrap();
    assert!(out.pass, "{:?}", out.deviation);
}

#[test]
fn broken_beam_section_fails_in_q3() {
    let m = model("beam");
    let sys = system("beam");
    let s = m.sections["rest"].resolve(2, 1);
    let (mu, rho) = (1.0, 24.0);
    let k = constants(&[("mu", mu), ("rho", rho)]);
    let out = verify_lifting_lag(&sys, &s, &[0.0, 0.0], &k, (0.0, 1.0, 1e-3), 1e-6).unwrap();
    assert!(!out.pass);
    assert_eq!(out.deviation.coord, Some(c("q3_1")));
    assert!((out.deviation.max - rho / mu).abs() <= 1e-9);
    let gap = out.direct.column(&c("q2_1")).unwrap();
    for (t, g) in out.direct.times.iter().zip(gap) {
        assert!((g + rho / (2.0 * mu) * t * t).abs() <= 1e-9);
    }
}

#[test]
fn energy_is_conserved_along_both_flows() {
    for (name, z0, k) in [
        ("javelin", vec![0.1, -0.2, 0.3, 0.5, 0.0, -0.4, 1.0, 0.2, 0.0, 0.0, -0.3, 0.7], Bindings::new()),
        ("beam", vec![0.1, 0.2, -0.3, 0.4], constants(&[("mu", 2.0), ("rho", 3.0)])),
    ] {
        let sys = system(name);
        let x = &sys.euler_lagrange_field().unwrap().field;
        let t = integrate(x, &z0, &k, 0.0, 1.0, 1e-3).unwrap();
        assert!(max_drift(&t, &sys.cartan().energy, &k).unwrap() <= 1e-6, "{}", name);
        let fl = legendre(&sys).unwrap();
        let hs = hamiltonian(&sys, &fl).unwrap();
        let phase = hs.phase().coords();
        let start = map_trajectory(&t, &phase, &fl.forward, &k).unwrap();
        let th = integrate(hs.field(), &start.states[0], &k, 0.0, 1.0, 1e-3).unwrap();
        assert!(max_drift(&th, hs.hamiltonian(), &k).unwrap() <= 1e-6, "{}", name);
        // The Lagrangian flow pushed through FL is the Hamiltonian flow.
        assert!(max_deviation(&start, &th).max <= 1e-6, "{}", name);
    }
}

#[test]
fn radical_gradient_matches_finite_differences() {
    let m = model("javelin1d");
    let a1 = m.oneforms["dW"].resolve(2, 1).component(&c("q1_1")).clone();
    let mut point = constants(&[("c1", -1.0), ("c2", 0.3)]);
    point.set_coord(c("q0_1"), 0.2);
    point.set_coord(c("q1_1"), 0.4);
    let checks = fd_gradient_check(&a1, &point, 1e-5, 1e-6).unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|g| g.pass), "{:?}", checks);
    assert!(matches!(fd_gradient_check(&a1, &point, -1.0, 1e-6), Err(NumericError::Step(_))));
}

#[test]
fn leaving_the_domain_reports_time_and_state() {
    let m = model("javelin1d");
    let sys = system("javelin1d");
    let s = m.sections["radical"].resolve(2, 1);
    let k = constants(&[("c1", -1.0), ("c2", 0.0)]);
    let err = verify_lifting_lag(&sys, &s, &[0.0, 0.0], &k, (0.0, 3.0, 1e-2), 1e-6).unwrap_err();
    match err {
        NumericError::Domain { t, state, .. } => {
            assert!(t > 1.0 && t < 2.0, "{}", t);
            assert!(state[1] < -1.3);
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let x = VectorField::on(&JetSpace::new(0, 2), vec![p("1"), p("q0_1")]).unwrap();
    let t = integrate(&x, &[0.0, 0.0], &Bindings::new(), 0.0, 0.3, 0.1).unwrap();
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,q0_1,q0_2"));
    let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 3);
    let mantissa = row[1].split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(row[1].parse::<f64>().unwrap(), t.states[1][0]);
    assert_eq!(t.coords, vec![Coordinate::q(0, 1), Coordinate::q(0, 2)]);
}
