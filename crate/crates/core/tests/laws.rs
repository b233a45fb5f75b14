use monadwl_core::laws::{HanoiGen, ListGen, MaybeGen};
use monadwl_core::stdlib;
use monadwl_core::{check_laws, generator_for, Engine, EvalConfig, Law, LawGen};

const CASES: usize = 1000;

fn check(engine: &Engine, m: &str, gen: &mut dyn LawGen) -> monadwl_core::LawReport {
    check_laws(engine, m, gen, CASES, 7, &EvalConfig::default())
}

#[test]
fn maybe_is_lawful() {
    let report = check(&stdlib::engine(), "maybe", &mut MaybeGen);
    assert!(report.passed(), "{report}");
    assert!(report.results.iter().all(|r| r.cases == CASES));
}

#[test]
fn list_is_lawful() {
    let report = check(&stdlib::engine(), "list", &mut ListGen);
    assert!(report.passed(), "{report}");
}

#[test]
fn hanoi_writer_is_lawful() {
    let report = check(&stdlib::engine(), "hT", &mut HanoiGen);
    assert!(report.passed(), "{report}");
    assert_eq!(report.results.len(), 3);
}

#[test]
fn dropping_the_arrow_log_breaks_left_identity() {
    let mut engine = Engine::new();
    engine
        .load("bind[hT][ma_, aTomb_] := With[{val = aTomb[grab[ma]]}, hT[grab[val], rest[ma]]]")
        .unwrap();
    stdlib::install(&mut engine).unwrap();
    let report = check(&engine, "hT", &mut HanoiGen);
    assert!(!report.passed());
    let left = report.result(Law::LeftIdentity);
    assert!(left.failures > 0);
    let cx = left.first.as_ref().expect("a counterexample is kept");
    let (Ok(l), Ok(r)) = (&cx.left_value, &cx.right_value) else {
        panic!("both sides evaluate: {cx}");
    };
    assert_ne!(l, r);
    assert!(report.to_string().contains("left-identity"));
}

#[test]
fn user_monad_through_rules() {
    let box_monad =
        "pattern[box] := box[_]\nreturn[box][x_] := box[x]\nbind[box][box[x_], f_] := f[x]";
    let mut engine = stdlib::engine();
    engine.load(box_monad).unwrap();
    let report = check(&engine, "box", generator_for("box").as_mut());
    assert!(report.passed(), "{report}");

    let broken =
        "pattern[box] := box[_]\nreturn[box][x_] := box[x]\nbind[box][box[x_], f_] := box[x]";
    let mut engine = stdlib::engine();
    engine.load(broken).unwrap();
    let report = check(&engine, "box", generator_for("box").as_mut());
    assert!(report.result(Law::LeftIdentity).failures > 0, "{report}");
}

#[test]
fn reports_are_reproducible() {
    let engine = stdlib::engine();
    let a = check_laws(
        &engine,
        "list",
        &mut ListGen,
        200,
        42,
        &EvalConfig::default(),
    );
    let b = check_laws(
        &engine,
        "list",
        &mut ListGen,
        200,
        42,
        &EvalConfig::default(),
    );
    assert_eq!(a, b);
}
