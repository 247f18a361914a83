use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn intcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intcx"))
        .args(args)
        .output()
        .expect("run intcx")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("intcx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn table_files() {
    let path = scratch("t5000.icx");
    let out = intcx(&["table", "--limit", "5000", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 5013);
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["f"], 26);

    let one = scratch("t1.icx");
    let out = intcx(&["table", "--limit", "1", "--out", one.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&one).unwrap().len(), 14);
    assert_eq!(json_lines(&out)[0]["f"], 1);

    let w = intcx(&["witness", "82944", "--table", path.to_str().unwrap()]);
    assert_eq!(w.status.code(), Some(2), "table of 5000 cannot cover 82944");
}

#[test]
fn dbr_records() {
    let out = intcx(&["dbr", "--base-limit", "2"]);
    assert!(out.status.success());
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 1);
    let alpha = recs[0]["alpha"].as_f64().unwrap();
    assert!((alpha - 1.3448).abs() < 1e-3);
    for key in [
        "b",
        "i",
        "j",
        "dsum",
        "m0",
        "m1",
        "m2",
        "cavg_ln",
        "cavg_log3",
    ] {
        assert!(recs[0].get(key).is_some(), "missing {key}");
    }

    let empty = intcx(&["dbr", "--base-limit", "1"]);
    assert!(empty.status.success());
    assert!(stdout(&empty).is_empty());

    let best = intcx(&["dbr", "--base-limit", "12", "--best"]);
    let last = json_lines(&best).pop().unwrap();
    assert_eq!(last["best_b"], 12);

    let csv = intcx(&["dbr", "--base-limit", "4", "--format", "csv"]);
    assert_eq!(stdout(&csv).lines().next(), Some("b,r,d"));
    assert!(stdout(&csv).contains("\n4,3,6\n"));
}

#[test]
fn experiments() {
    let out = intcx(&["experiment", "--limit", "200000"]);
    assert!(out.status.success());
    assert_eq!(json_lines(&out)[0]["improved"], 7153);

    let tiny = intcx(&["experiment", "--limit", "10", "--mode", "greedy"]);
    assert_eq!(json_lines(&tiny)[0]["improved"], 0);

    let bad = intcx(&[
        "experiment",
        "--limit",
        "10",
        "--mode",
        "uniform",
        "--c",
        "2.5",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let missing = intcx(&["experiment", "--limit", "10", "--mode", "theoretical"]);
    assert_eq!(missing.status.code(), Some(1));

    let csv = intcx(&["experiment", "--limit", "20", "--format", "csv"]);
    let text = stdout(&csv);
    assert_eq!(text.lines().next(), Some("n,limitm,up_to"));
    assert_eq!(text.lines().count(), 20);
}

#[test]
fn explore_traces() {
    let out = intcx(&["explore", "2^102-2^100-2"]);
    assert!(out.status.success());
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 4);
    for (i, step) in lines[..3].iter().enumerate() {
        assert_eq!(step["i"], i);
        for key in ["bits", "ones", "fraction", "r_mod_d", "r_mod_3"] {
            assert!(step.get(key).is_some());
        }
    }
    assert_eq!(lines[3]["summary"]["iterations"], 2);

    let nine = json_lines(&intcx(&["explore", "2^3000-2^2975-2^2807-1"]));
    let summary = &nine.last().unwrap()["summary"];
    assert_eq!(summary["iterations"], 9);
    assert_eq!(summary["leading_twos_mod3"], 8);
    assert_eq!(summary["residues"]["5"], 4);
    assert_eq!(summary["residues"]["7"], 6);
    assert_eq!(summary["residues"]["11"], 5);

    let seven = json_lines(&intcx(&["explore", "7", "--threshold", "0.9"]));
    assert_eq!(seven.last().unwrap()["summary"]["iterations"], 1);

    let bad = intcx(&["explore", "2^^3"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains("offset 2"), "{err}");
    assert!(err.contains("    ^"), "{err}");

    let cmp = json_lines(&intcx(&["explore", "2^102-2^100-2", "--compare", "2,3,5"]));
    assert_eq!(cmp.len(), 3);
}

#[test]
fn verification_and_witness() {
    let out = intcx(&["verify-thm21", "--base-limit", "1000"]);
    assert!(out.status.success());
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["fail"], 0);
    assert_eq!(rec["dbr_mismatch"], 0);

    let w = json_lines(&intcx(&["witness", "82944"]));
    assert_eq!(w[0]["f"], 32);

    let g = json_lines(&intcx(&["greedy", "11"]));
    assert_eq!(g[0]["greedy"], 8);
    assert_eq!(g[0]["f"], 8);
}

#[test]
fn balance_reports() {
    let out = intcx(&[
        "balance", "--eps", "0.1", "--base", "3", "--limit", "531441",
    ]);
    let rec = &json_lines(&out)[0];
    assert!(rec["empirical"].as_f64().unwrap() <= rec["bound"].as_f64().unwrap());
    assert_eq!(rec["convention"], "true-length");

    let kl = json_lines(&intcx(&["balance", "--p1", "0.54"]));
    assert!((kl[0]["kl_bits"].as_f64().unwrap() - 0.004622).abs() < 2e-6);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(intcx(&[]).status.code(), Some(1));
    assert_eq!(intcx(&["table"]).status.code(), Some(1));
    assert_eq!(intcx(&["nonsense"]).status.code(), Some(1));
    assert_eq!(intcx(&["table", "--limit", "x"]).status.code(), Some(1));
    assert_eq!(intcx(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let missing = intcx(&["witness", "10", "--table", "/nonexistent/t.icx"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8(missing.stderr)
        .unwrap()
        .contains("/nonexistent/t.icx"));

    let junk = scratch("junk.icx");
    std::fs::write(&junk, b"not a table").unwrap();
    let bad = intcx(&["witness", "10", "--table", junk.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let runs = [
        intcx(&["dbr", "--base-limit", "500"]),
        intcx(&["dbr", "--base-limit", "500", "--threads", "1"]),
        intcx(&["dbr", "--base-limit", "500", "--threads", "3"]),
    ];
    for r in &runs {
        assert!(r.status.success());
        assert_eq!(r.stdout, runs[0].stdout);
    }
    let a = intcx(&["balance", "--eps", "0.2", "--limit", "100000"]);
    let b = intcx(&[
        "balance",
        "--eps",
        "0.2",
        "--limit",
        "100000",
        "--threads",
        "1",
    ]);
    assert_eq!(a.stdout, b.stdout);
}
