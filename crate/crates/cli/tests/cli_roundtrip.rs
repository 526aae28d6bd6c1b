//! End-to-end CLI behavior: exit codes, the machine-readable error object,
//! spectra round-trips, and the thread-cap environment variable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jspec_core::fixtures;
use jspec_core::json::{SpectrumJson, SpectrumKind, TupleJson};
use jspec_core::koszul::taylor_spectrum;
use jspec_core::spectra::point_spectrum;
use jspec_core::ToleranceConfig;

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jspec-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn jspec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jspec"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_f1(dir: &Path) {
    let json = TupleJson::from_tuple(&fixtures::f1());
    std::fs::write(dir.join("f1.json"), serde_json::to_string(&json).unwrap()).unwrap();
}

#[test]
fn valid_tuple_exits_zero() {
    let dir = workdir("ok");
    write_f1(&dir);
    let out = jspec(&dir, &["validate", "--in", "f1.json"]);
    assert!(out.status.success());
}

#[test]
fn non_commuting_tuple_exits_two_with_error_object() {
    let dir = workdir("pauli");
    std::fs::write(
        dir.join("bad.json"),
        r#"{"n":2,"d":2,"matrices":[[[0,0],[1,0],[1,0],[0,0]],[[1,0],[0,0],[0,0],[-1,0]]]}"#,
    )
    .unwrap();
    let out = jspec(&dir, &["validate", "--in", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let obj: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(obj["error"]["kind"], "validation");
    assert!(obj["error"]["message"]
        .as_str()
        .unwrap()
        .contains("commutation residual exceeded"));
}

#[test]
fn malformed_json_exits_two() {
    let dir = workdir("malformed");
    std::fs::write(dir.join("broken.json"), "{not json").unwrap();
    let out = jspec(&dir, &["spectra", "--in", "broken.json", "--out", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let obj: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(obj["error"]["kind"], "parse");
}

#[test]
fn invalid_bernstein_exits_two() {
    let dir = workdir("badpsi");
    write_f1(&dir);
    std::fs::write(
        dir.join("psi.json"),
        r#"{"c0":1.0,"c1":[0.0,0.0],"mu":[]}"#,
    )
    .unwrap();
    let out = jspec(&dir, &["validate", "--psi", "psi.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = jspec(
        &dir,
        &["bernstein", "--in", "f1.json", "--psi", "psi.json", "--out", "r.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectra_json_round_trips_exactly() {
    let dir = workdir("roundtrip");
    write_f1(&dir);
    let out = jspec(
        &dir,
        &["spectra", "--in", "f1.json", "--kinds", "point,taylor", "--out", "spec.json"],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("spec.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let cfg = ToleranceConfig::default();
    for entry in value["spectra"].as_array().unwrap() {
        let parsed: SpectrumJson = serde_json::from_value(entry.clone()).unwrap();
        let reference = match parsed.kind {
            SpectrumKind::Point => point_spectrum(&fixtures::f1(), &cfg).unwrap(),
            SpectrumKind::Taylor => taylor_spectrum(&fixtures::f1(), &cfg).unwrap(),
            other => panic!("unexpected kind {other:?}"),
        };
        let set = parsed.to_set(cfg.tau_dedup).unwrap();
        // bitwise equality against the in-memory computation
        assert_eq!(set.points(), reference.points());
        assert_eq!(set.multiplicities(), reference.multiplicities());
    }
}

#[test]
fn thread_cap_is_honored() {
    let dir = workdir("threads");
    write_f1(&dir);
    let out = Command::new(env!("CARGO_BIN_EXE_jspec"))
        .current_dir(&dir)
        .env("JSPEC_THREADS", "1")
        .args(["spectra", "--in", "f1.json", "--kinds", "all", "--out", "a.json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let single = std::fs::read(dir.join("a.json")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_jspec"))
        .current_dir(&dir)
        .env("JSPEC_THREADS", "4")
        .args(["spectra", "--in", "f1.json", "--kinds", "all", "--out", "b.json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let multi = std::fs::read(dir.join("b.json")).unwrap();
    // results must not depend on the worker count
    assert_eq!(single, multi);
}

#[test]
fn taylor_audit_reports_ranks_and_kernels() {
    let dir = workdir("audit");
    write_f1(&dir);
    let out = jspec(
        &dir,
        &["taylor", "--in", "f1.json", "--lambda", "0,0;0,0", "--out", "audit.json"],
    );
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("audit.json")).unwrap()).unwrap();
    let audits = value["audits"].as_array().unwrap();
    // 4 candidates plus the explicit regular point
    assert_eq!(audits.len(), 5);
    let regular = audits.last().unwrap();
    assert_eq!(regular["member"], false);
    assert_eq!(regular["space_dims"], serde_json::json!([2, 4, 2]));
    // joint eigenvalues are members
    let members = audits
        .iter()
        .filter(|a| a["member"] == true)
        .count();
    assert_eq!(members, 2);
}

#[test]
fn cascade_csv_has_provenance_and_fit() {
    let dir = workdir("cascade");
    let json = TupleJson::from_tuple(&fixtures::f5());
    std::fs::write(dir.join("f5.json"), serde_json::to_string(&json).unwrap()).unwrap();
    std::fs::write(
        dir.join("cone.json"),
        r#"{"n":2,"rays":[[1.0,1.0]],"sample_count":2}"#,
    )
    .unwrap();
    let out = jspec(
        &dir,
        &[
            "cascade", "--in", "f5.json", "--v0", "ones", "--grid", "20x20", "--t1-max", "8",
            "--t2-max", "8", "--cone", "cone.json", "--out", "casc.csv",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("casc.csv")).unwrap();
    assert!(text.starts_with("# tool=jspec"));
    let omega_line = text
        .lines()
        .find(|l| l.starts_with("# fitted_omega="))
        .expect("fitted omega comment");
    let omega: f64 = omega_line.trim_start_matches("# fitted_omega=").parse().unwrap();
    assert!((omega + 1.0).abs() < 0.05, "fitted omega {omega}");
    // data rows parse as full-precision floats
    let data_rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data_rows.len(), 1 + 400);
    for row in &data_rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 4);
        fields[0].parse::<f64>().unwrap();
        fields[2].parse::<f64>().unwrap();
    }
}
