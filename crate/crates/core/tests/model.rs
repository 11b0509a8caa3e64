mod common;

use common::*;
use hjkit::model::{
    cmd_check, cmd_derive, cmd_involution, cmd_simulate, machine_rows, DeriveWhat, FieldChoice, ModelError,
    ModelFile, Requirement, SimulateOptions, LIFT_TOL,
};
use hjkit::CheckOptions;

const MODELS: [&str; 5] = ["javelin", "javelin1d", "beam", "free_particle", "degenerate"];

fn sim(field: FieldChoice, initial: &str, lift: Option<&str>) -> SimulateOptions {
    SimulateOptions {
        field,
        initial: initial.to_string(),
        t0: 0.0,
        t1: 0.5,
        dt: 1e-3,
        lift: lift.map(str::to_string),
        tol: LIFT_TOL,
    }
}

#[test]
fn shipped_models_round_trip() {
    for name in MODELS {
        let m = model(name);
        let text = m.print();
        let back = ModelFile::parse(&text).unwrap();
        assert_eq!(back, m, "{}", name);
        assert_eq!(back.print(), text, "{}", name);
    }
}

#[test]
fn machine_blocks_are_byte_stable() {
    let opts = CheckOptions::default();
    for _ in 0..2 {
        let a = cmd_check(&model("javelin"), "generic", &opts, Requirement::None).unwrap().render();
        let b = cmd_check(&model("javelin"), "generic", &opts, Requirement::None).unwrap().render();
        assert_eq!(a, b);
        assert_eq!(machine_rows(&a).unwrap(), machine_rows(&b).unwrap());
    }
    let run = || cmd_simulate(&model("javelin1d"), &sim(FieldChoice::Associated("dW".into()), "start", Some("dW"))).unwrap();
    assert_eq!(run().render(), run().render());
    assert_eq!(run().csv, run().csv);
}

#[test]
fn machine_rows_have_five_fields() {
    let out = cmd_derive(&model("beam"), DeriveWhat::All).unwrap().render();
    let rows = machine_rows(&out).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().any(|r| r[0] == "HAM"));
    let lines: Vec<&str> = out.lines().collect();
    let start = lines.iter().position(|l| *l == hjkit::model::MACHINE_BEGIN).unwrap();
    let end = lines.iter().position(|l| *l == hjkit::model::MACHINE_END).unwrap();
    assert_eq!(end - start - 1, rows.len());
    for l in &lines[start + 1..end] {
        assert_eq!(l.split('\t').count(), 5, "{}", l);
    }
}

#[test]
fn verdicts_decide_exit_codes() {
    let opts = CheckOptions::default();
    let strict = cmd_check(&model("javelin1d"), "dW", &opts, Requirement::Strict).unwrap();
    assert_eq!(strict.exit_code(), 0);
    let generalized = cmd_check(&model("javelin"), "static", &opts, Requirement::Generalized).unwrap();
    assert_eq!(generalized.exit_code(), 0);
    let demanding = cmd_check(&model("javelin"), "static", &opts, Requirement::Strict).unwrap();
    assert_eq!(demanding.exit_code(), 1);
    let broken = cmd_check(&model("beam"), "rest", &opts, Requirement::Generalized).unwrap();
    assert_eq!(broken.exit_code(), 1);
    let lenient = cmd_check(&model("beam"), "rest", &opts, Requirement::None).unwrap();
    assert_eq!(lenient.exit_code(), 0);
    let genfunc = cmd_check(&model("free_particle"), "momentum", &opts, Requirement::Strict).unwrap();
    assert_eq!(genfunc.exit_code(), 0);
}

#[test]
fn simulate_reports_lift_failures() {
    let ok = cmd_simulate(&model("javelin1d"), &sim(FieldChoice::Associated("radical".into()), "start", Some("radical"))).unwrap();
    assert_eq!(ok.exit_code(), 0);
    let bad = cmd_simulate(&model("beam"), &sim(FieldChoice::Associated("rest".into()), "base", Some("rest"))).unwrap();
    assert_eq!(bad.exit_code(), 1);
    let plain = cmd_simulate(&model("javelin1d"), &sim(FieldChoice::Lagrangian, "moving", None)).unwrap();
    assert_eq!(plain.exit_code(), 0);
    assert!(plain.csv.as_deref().unwrap().starts_with("t,"));
    let ham = cmd_simulate(&model("javelin1d"), &sim(FieldChoice::Hamiltonian, "moving", None)).unwrap();
    assert_eq!(ham.exit_code(), 0);
}

#[test]
fn involution_exit_codes() {
    let opts = CheckOptions::default();
    assert_eq!(cmd_involution(&model("javelin1d"), "complete", &opts).unwrap().exit_code(), 0);
    let err = cmd_involution(&model("degenerate"), "collapsed", &opts).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{}", err);
}

#[test]
fn command_errors_map_to_exit_codes() {
    let opts = CheckOptions::default();
    let unknown = cmd_check(&model("javelin"), "nothing", &opts, Requirement::None).unwrap_err();
    assert!(matches!(unknown, ModelError::Unknown { .. }));
    assert_eq!(unknown.exit_code(), 2);
    let tol = CheckOptions { tol: 0.0, ..CheckOptions::default() };
    assert_eq!(cmd_check(&model("javelin"), "static", &tol, Requirement::None).unwrap_err().exit_code(), 2);
    let samples = CheckOptions { samples: 0, ..CheckOptions::default() };
    assert_eq!(cmd_involution(&model("javelin1d"), "complete", &samples).unwrap_err().exit_code(), 2);
    assert_eq!(cmd_involution(&model("javelin1d"), "missing", &opts).unwrap_err().exit_code(), 2);

    let mut o = sim(FieldChoice::Lagrangian, "moving", None);
    o.dt = 0.0;
    assert_eq!(cmd_simulate(&model("javelin1d"), &o).unwrap_err().exit_code(), 2);
    let o = sim(FieldChoice::Lagrangian, "start", None);
    assert_eq!(cmd_simulate(&model("javelin1d"), &o).unwrap_err().exit_code(), 2);
    let o = sim(FieldChoice::Associated("generic".into()), "rest", None);
    assert_eq!(cmd_simulate(&model("javelin"), &o).unwrap_err().exit_code(), 2);
    let o = sim(FieldChoice::Lagrangian, "nowhere", None);
    assert_eq!(cmd_simulate(&model("javelin"), &o).unwrap_err().exit_code(), 2);

    // Leaving the domain of the square root is a precondition failure.
    let mut o = sim(FieldChoice::Associated("radical".into()), "start", Some("radical"));
    o.t1 = 3.0;
    assert_eq!(cmd_simulate(&model("javelin1d"), &o).unwrap_err().exit_code(), 3);
}

#[test]
fn malformed_models_are_rejected() {
    let base = std::fs::read_to_string(model_path("javelin1d")).unwrap();
    let cases = [
        base.replace("q3_1 = \"c2 - q1_1\"", "q3_1 = \"c2 - q4_1\""),
        base.replace("k = 2", "k = 0"),
        base.replace("[lagrangian]", "[lagrangian"),
        base.replace("inverse.c2 = \"p0_1\"\n", ""),
        base.replace("c1 = -1\n", "c1 = minus one\n"),
        base.replace("q2_1 = \"0\"", "q2_1 = \"0\"\nq2_1 = \"1\""),
        base.replace("[state start]", "[state start]\nzeta = 1"),
    ];
    for (i, text) in cases.iter().enumerate() {
        assert_ne!(text, &base, "case {} did not change the model", i);
        let err = ModelFile::parse(text).unwrap_err();
        assert_eq!(err.exit_code(), 2, "case {}: {}", i, err);
    }
}

#[test]
fn unsolvable_family_is_a_precondition_failure() {
    let mut m = model("javelin1d");
    let fam = m.families.get_mut("complete").unwrap();
    fam.inverse = None;
    let err = cmd_involution(&m, "complete", &CheckOptions::default()).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{}", err);
}
