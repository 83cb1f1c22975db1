use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multlab"))
        .args(args)
        .env("MULTLAB_THREADS", "2")
        .output()
        .expect("spawn multlab")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn cantor_series_is_the_powers_of_two_indicator() {
    let v = json(&["series", "--config", &cfg("cantor.json"), "--N", "17"]);
    let coeffs: Vec<&str> = v["point"]["series"][0].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let expect: Vec<&str> = (0..17usize).map(|k| if k > 0 && k.is_power_of_two() { "1" } else { "0" }).collect();
    assert_eq!(coeffs, expect);
    assert_eq!(v["residual"][0], "AtLeast(17)");
}

#[test]
fn scan_writes_a_csv_grid() {
    let out = run(&["scan", "--config", &cfg("cantor.json"), "--amax", "3", "--bmax", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("a,b,lambda_kind,lambda_value"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 16);
    let cell11 = rows.iter().find(|r| r[0] == "1" && r[1] == "1").unwrap();
    assert_eq!((cell11[2], cell11[3]), ("Finite", "3"));
    assert!(rows.iter().all(|r| r[2] == "Finite" && r[5] == "true"));
}

#[test]
fn geometry_subcommands_reproduce_desk_values() {
    let l = json(&["liouville", "--q", "X1^2", "--cycle", &cfg("cycle_graph.json")]);
    assert_eq!((l["holds"].as_bool(), l["slack"].as_i64()), (Some(true), Some(0)));

    let d = json(&["delta", "--config", &cfg("cantor.json"), "--cycle", &cfg("cycle_graph.json")]);
    assert_eq!((d["delta0"].as_u64(), d["delta1"].as_u64()), (Some(1), Some(1)));
    assert_eq!(d["witness"], "X0'*X1 - X1'*X0");

    // Vanishing at (1:z) and (1:z³) in X forces bidegree (4, 2):
    // (X0·X1' − X1·X0')·(X0·X1'^3 − X1·X0'^3) up to units.
    let d = json(&["delta", "--config", &cfg("cantor.json"), "--cycle", &cfg("cycle_two_points.json")]);
    assert_eq!((d["delta0"].as_u64(), d["delta1"].as_u64()), (Some(4), Some(2)));
}

#[test]
fn stability_reports_the_pullback_witness() {
    let args = |ideal: &str| {
        json(&["stability", "--ideal", &cfg(ideal), "--map", &cfg("cantor_pullback.json")])
    };
    assert_eq!(args("ideal_x1prime.json")["stable"], true);
    let r = args("ideal_x0_minus_x1.json");
    assert_eq!(r["stable"], false);
    assert_eq!(r["witness"]["image"], "X0'*X0 - X0'*X1 + X1'*X0");
}

#[test]
fn constants_match_exact_values() {
    let c = json(&["constants", "--n", "1", "--mu", "1", "--nu0", "1"]);
    assert_eq!(c["c_n"], "26244");
    assert_eq!(c["rho"][2]["exact"], "17496");
    assert_eq!(c["c_m"]["exact"], (17496u64.pow(3)).to_string());
}

#[test]
fn exit_codes_separate_domain_and_config_errors() {
    let ok = run(&["bezout", "--deg1", "1", "--deg0", "1", "--r", "2", "--rp", "1", "--a", "3", "--b", "3"]);
    assert_eq!(ok.status.code(), Some(0));

    let domain = run(&["threshold", "--kind", "lmgp_rhs", "--param", "K=1"]);
    assert_eq!(domain.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&domain.stderr).unwrap();
    assert_eq!(err["error"], "MissingParam");

    let missing = run(&["series", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = std::env::temp_dir().join(format!("multlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"system": {"kind": "mahler", "n": 1, "A": ["1"], "seed": []}, "extra": 1}"#).unwrap();
    let malformed = run(&["series", "--config", bad.to_str().unwrap()]);
    assert_eq!(malformed.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["scan", "--config", &cfg("thue_morse.json"), "--amax", "2", "--bmax", "2", "--json"],
        vec!["growth", "--config", &cfg("cantor.json"), "--map", &cfg("cantor_pullback.json"), "--samples", "20"],
        vec!["auxpoly", "--config", &cfg("exp.json"), "--a", "2", "--b", "2"],
    ] {
        let first = run(&args);
        assert!(first.status.success(), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        assert_eq!(first.stdout, run(&args).stdout, "{args:?}");
    }
}
