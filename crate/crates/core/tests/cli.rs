mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::fixture_path;

fn lscheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lscheck"))
        .args(args)
        .output()
        .unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn temp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn sequential_inputs_report() {
    let web = fixture_path("web_order.lsc");
    let out = lscheck(&[
        "check", "--model", &web, "--eesl", "(createOrder·(createAbort+createConfirm))*",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("sequential.txt"));
}

#[test]
fn abort_after_confirm_report() {
    let (web, anti) = (fixture_path("web_order.lsc"), fixture_path("anti_scenario.lsc"));
    let out = lscheck(&[
        "check", "--model", &web, "--model", &anti,
        "--eesl", "(createOrder+createAbort+createConfirm)*",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("abort_after_confirm.txt"));
}

#[test]
fn property_report_and_dot() {
    let (web, props) = (fixture_path("web_order.lsc"), fixture_path("properties.lsc"));
    let expr = temp("parallel.eesl");
    std::fs::write(&expr, "(createOrder.(createAbort || createConfirm))*\n").unwrap();
    let dot = temp("properties.dot");
    let run = || {
        lscheck(&[
            "check", "--model", &web, "--model", &props,
            "--eesl-file", expr.to_str().unwrap(), "--testing",
            "--ctl", "AG", "--property", "conf_agree",
            "--ctl", "EF", "--property", "abort_then_confirm",
            "--dot", dot.to_str().unwrap(),
        ])
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(String::from_utf8(first.stdout.clone()).unwrap(), golden("properties.txt"));
    let dot_first = std::fs::read_to_string(&dot).unwrap();
    assert!(dot_first.starts_with("digraph transitions {"));
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(dot_first, std::fs::read_to_string(&dot).unwrap());
}

#[test]
fn error_statuses() {
    let web = fixture_path("web_order.lsc");
    let missing = lscheck(&["check", "--model", "no/such/file.lsc", "--eesl", "createOrder"]);
    assert_eq!(missing.status.code(), Some(2));
    let ctl = lscheck(&[
        "check", "--model", &web, "--eesl", "createOrder", "--ctl", "AG", "--property", "x",
    ]);
    assert_eq!(ctl.status.code(), Some(2));
    let unknown = lscheck(&["check", "--model", &web, "--eesl", "shipIt"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8(unknown.stderr).unwrap().contains("shipIt"));
    let usage = lscheck(&["check", "--model", &web]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn divergence_status() {
    let model = temp("echo.lsc");
    std::fs::write(
        &model,
        "object A { var x in {n} init n; }\nobject B { var x in {n} init n; }\nexternal go;\n\
         chart start { instances: A, B; prechart: msg Env->A go cold; main: msg A->B ping hot; }\n\
         chart echo { instances: A, B; prechart: msg A->B ping cold; main: msg A->B ping hot; }\n",
    )
    .unwrap();
    let out = lscheck(&["check", "--model", model.to_str().unwrap(), "--eesl", "go"]);
    assert_eq!(out.status.code(), Some(3));
}
