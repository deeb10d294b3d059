use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn qfrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfrac"))
        .args(args)
        .env_remove("QFRAC_REL_TOL")
        .env_remove("QFRAC_MAX_TERMS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_value(o: &Output) -> f64 {
    let text = stdout(o);
    let row = text.lines().last().unwrap();
    row.rsplit(',').next().unwrap().parse().unwrap()
}

#[test]
fn eval_examples() {
    let g = qfrac(&["eval", "gamma", "--q", "0.5", "--alpha", "1"]);
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(stdout(&g), "target,q,alpha,point,value\ngamma,0.5,1,,1\n");

    let ml = qfrac(&["eval", "ml", "--q", "0.5", "--alpha", "1", "--beta", "1", "--lambda", "0", "--z", "1", "--z0", "0"]);
    assert_eq!(last_value(&ml), 1.0);

    let fi = qfrac(&["eval", "fracint", "--side", "left", "--q", "0.5", "--alpha", "1", "--a", "0", "--t", "1", "--f", "s"]);
    assert!((last_value(&fi) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn eval_streams_json_lines() {
    let o = qfrac(&["eval", "eq", "--q", "0.5", "--t", "0.1", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["point"], 0.5);
    assert!((lines[1]["value"].as_f64().unwrap() - 1.731373309727532).abs() < 1e-12);
}

#[test]
fn eval_right_operators_accept_infinite_b() {
    // int_t^inf s^-2 nabla s = q / t
    let o = qfrac(&["eval", "fracint", "--side", "right", "--q", "0.5", "--alpha", "1", "--b", "inf", "--t", "0.5", "--f", "s^-2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((last_value(&o) - 1.0).abs() < 1e-10);
    for target in ["fracder", "caputo"] {
        let o = qfrac(&["eval", target, "--side", "right", "--q", "0.5", "--alpha", "0.5", "--b", "1", "--t", "0.25", "--f", "1+s"]);
        assert_eq!(o.status.code(), Some(0), "{target}");
    }
}

#[test]
fn exit_code_contract() {
    // usage errors
    assert_eq!(qfrac(&["eval", "gamma", "--q", "0.5"]).status.code(), Some(3));
    assert_eq!(qfrac(&["eval", "fracint", "--q", "0.5", "--alpha", "0.5", "--t", "1", "--f", "exp(s)"]).status.code(), Some(3));
    assert_eq!(qfrac(&["eval", "gamma", "--q", "1.5", "--alpha", "1"]).status.code(), Some(3));
    assert_eq!(qfrac(&["check", "everything"]).status.code(), Some(3));
    assert_eq!(qfrac(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(qfrac(&["eval", "gamma", "-q", "0.5", "--alpha", "1"]).status.code(), Some(3));
    // numeric errors
    assert_eq!(qfrac(&["eval", "gamma", "--q", "0.5", "--alpha", "-2"]).status.code(), Some(2));
    assert_eq!(qfrac(&["eval", "eq", "--q", "0.5", "--t", "0.5", "--max-terms", "5"]).status.code(), Some(2));
    // help
    assert_eq!(qfrac(&["--help"]).status.code(), Some(0));
    assert_eq!(qfrac(&["--version"]).status.code(), Some(0));
}

#[test]
fn flags_beat_environment() {
    let bin = env!("CARGO_BIN_EXE_qfrac");
    let run = |extra: &[&str]| {
        Command::new(bin)
            .args(["eval", "eq", "--q", "0.5", "--t", "0.5"])
            .args(extra)
            .env("QFRAC_MAX_TERMS", "5")
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run(&[]), Some(2));
    assert_eq!(run(&["--max-terms", "1000"]), Some(0));
}

#[test]
fn check_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = qfrac(&["check", "frac", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(report["suite"], "frac");
    assert_eq!(report["status"], "pass");
    let recs = report["records"].as_array().unwrap();
    assert!(!recs.is_empty());
    for key in ["identity_id", "q", "value_lhs", "value_rhs", "rel_err", "terms", "status"] {
        assert!(recs[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn check_csv_columns() {
    let o = qfrac(&["check", "special", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "identity_id,q,alpha,beta,a,b,t,value_lhs,value_rhs,rel_err,terms,status"
    );
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn every_suite_finishes_within_a_minute() {
    for suite in ["core", "special", "frac", "ivp"] {
        let start = Instant::now();
        let o = qfrac(&["check", suite, "--out", "-"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
        assert!(start.elapsed() < Duration::from_secs(60), "{suite} took {:?}", start.elapsed());
    }
}

#[test]
fn explore_default_grid() {
    let o = qfrac(&["explore", "--f", "1", "--q", "0.5", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 16 * 3);
    let integer_sum = rows.iter().any(|r| {
        let s: f64 = r[0].parse::<f64>().unwrap() + r[1].parse::<f64>().unwrap();
        s == s.round()
    });
    assert!(integer_sum);
}

#[test]
fn explore_single_pair_and_empty_grid() {
    let o = qfrac(&["explore", "--f", "1", "--q", "0.5", "--b", "1", "--pairs", "0.5:0.5", "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let residual: f64 = rows[0][7].parse().unwrap();
    assert!(residual.is_finite() && residual >= 0.0);

    let e = qfrac(&["explore", "--pairs", ""]);
    assert_eq!(e.status.code(), Some(0));
    assert_eq!(stdout(&e), "alpha,beta,q,b,t,value_lhs,value_rhs,abs_residual,rel_residual,error\n");
}

#[test]
fn explore_rejects_off_grid_b() {
    assert_eq!(qfrac(&["explore", "--b", "0.7"]).status.code(), Some(3));
}
