use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perron-eig")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("perron-eig-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn estimate_on_jordan_fixture() {
    let m = fixture("jordan5.mtx");
    let v = json(&["estimate", "--matrix", &m, "--n", "100"]);
    assert_eq!(v["schema"], "perron-eig/1");
    assert_eq!(v["command"], "estimate");
    assert_eq!(v["inputs"]["n"], 100);
    let s = v["result"]["s_n"].as_f64().unwrap();
    assert!((s - 2.0203).abs() < 1e-4, "{s}");
}

#[test]
fn cyclic_order_on_defective_fixture() {
    let m = fixture("defective7.mtx");
    let v = json(&["cyclic-order", "--matrix", &m, "--grid", "4,5,6,7,8"]);
    assert_eq!(v["result"]["detected_nu"], 3);
    assert_eq!(v["result"]["j"], 7);
}

#[test]
fn oracle_on_defective_fixture() {
    let m = fixture("defective7.mtx");
    let v = json(&["oracle", "--matrix", &m]);
    let r = &v["result"];
    assert!((r["s"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(r["nu_true"], 3);
    assert_eq!(r["alg_multiplicity"], 5);
    assert_eq!(r["is_perron_like"], true);
}

#[test]
fn refine_reports_trajectory_and_warns_on_large_steps() {
    let m = fixture("jordan5.mtx");
    let v = json(&["refine", "--matrix", &m]);
    let s = v["result"]["s_refined"].as_f64().unwrap();
    assert!((s - 2.0).abs() < 1e-3);
    assert_eq!(v["result"]["nu"], 3);

    let out = run(&["refine", "--matrix", &m, "--gamma", "1.0", "--dt", "1", "--t-end", "2"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning") || !out.status.success(), "{err}");
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let m = fixture("symmetric4.mtx");
    let out = run(&["estimate", "--matrix", &m, "--n", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"s_n\"")).unwrap();
    let num = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = num.split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.replace('.', "").len(), 17, "{num}");
}

#[test]
fn output_is_deterministic_apart_from_wall_clock() {
    let m = fixture("defective7.mtx");
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_clock_seconds").unwrap();
        v
    };
    for cmd in ["estimate", "cyclic-order", "refine", "oracle"] {
        let a = strip(json(&[cmd, "--matrix", &m]));
        let b = strip(json(&[cmd, "--matrix", &m]));
        assert_eq!(a, b, "{cmd}");
    }
}

#[test]
fn eigenspace_writes_basis_file_that_round_trips() {
    let m = fixture("defective7.mtx");
    let out = scratch("eig.json");
    let o = run(&["eigenspace", "--matrix", &m, "--t-end", "150", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["basis"]["dim_estimate"], 5);

    let basis = perron_core::io::read_matrix(&out.with_extension("mtx")).unwrap().unwrap();
    assert_eq!((basis.rows(), basis.cols()), (7, 5));
    let again = perron_core::io::parse_matrix(&perron_core::io::to_matrix_market(&basis)).unwrap();
    assert_eq!(basis, again);
}

#[test]
fn eigenspace_accepts_explicit_shift() {
    let m = fixture("jordan5.mtx");
    let v = json(&["eigenspace", "--matrix", &m, "--s-bar", "2.0", "--nu", "3", "--n", "40"]);
    assert_eq!(v["result"]["basis"]["dim_estimate"], 3);
    assert!(v["result"]["refinement"].is_null());
}

#[test]
fn trace_emits_csv_series() {
    let m = fixture("jordan5.mtx");
    let out = run(&["trace", "--matrix", &m, "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,tau"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (t, tau) = l.split_once(',').unwrap();
            (t.parse().unwrap(), tau.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 101);
    assert!((rows.last().unwrap().1 - 2.0).abs() < 1e-3);

    let out = run(&["trace", "--matrix", &m, "--series", "rayleigh", "--n", "5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,rayleigh\n0,"), "{text}");
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn exit_codes_distinguish_io_from_domain_errors() {
    let missing = run(&["estimate", "--matrix", "/definitely/not/here.mtx"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad = scratch("bad.csv");
    std::fs::write(&bad, "1,2\n3\n").unwrap();
    assert_eq!(run(&["oracle", "--matrix", bad.to_str().unwrap()]).status.code(), Some(2));

    let rect = scratch("rect.csv");
    std::fs::write(&rect, "1,2\n3,4\n5,6\n").unwrap();
    assert_eq!(run(&["estimate", "--matrix", rect.to_str().unwrap()]).status.code(), Some(1));

    let m = fixture("jordan5.mtx");
    assert_eq!(run(&["cyclic-order", "--matrix", &m, "--eps", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["estimate", "--matrix", &m, "--n", "0"]).status.code(), Some(1));
    assert_eq!(run(&["estimate"]).status.code(), Some(2));
}

#[test]
fn csv_input_matches_matrix_market_input() {
    let a = perron_core::io::read_matrix(fixture("jordan5.mtx").as_ref()).unwrap().unwrap();
    let csv = scratch("jordan5.csv");
    std::fs::write(&csv, perron_core::io::to_csv(&a)).unwrap();
    let mut x = json(&["estimate", "--matrix", &fixture("jordan5.mtx")])["result"].clone();
    let mut y = json(&["estimate", "--matrix", csv.to_str().unwrap()])["result"].clone();
    x.as_object_mut().unwrap().remove("matrix");
    y.as_object_mut().unwrap().remove("matrix");
    assert_eq!(x, y);
}
