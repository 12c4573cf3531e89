use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn photopol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photopol"))
        .args(args)
        .env_remove("PHOTOPOL_ORACLE_TOL")
        .env_remove("PHOTOPOL_DEGENERATE_TOL")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr has a line");
    serde_json::from_str(line).expect("last stderr line is JSON")
}

fn scene(outputs: &str, ensembles: &str) -> String {
    format!(
        r#"{{
  "schema": "photopol-scene/1",
  "seed": 7,
  "grid": {{"kind": "explicit", "modes": [{{"k": [0, 0, 1]}}]}},
  "states": [
    {{"name": "h", "kind": "plane_wave", "mode": 0, "pol": [[1, 0], [0, 0]]}},
    {{"name": "circ", "kind": "plane_wave", "mode": 0,
      "pol": [[0.7071067811865476, 0], [0, 0.7071067811865476]]}}
  ],
  "ensembles": [{ensembles}],
  "outputs": [{outputs}]
}}"#
    )
}

fn complex_at(doc: &Value, idx: usize) -> (f64, f64) {
    let d = &doc["data"][idx];
    (d[0].as_f64().unwrap(), d[1].as_f64().unwrap())
}

#[test]
fn rho_eff_of_horizontal_plane_wave() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "s.json",
        &scene(r#"{"kind": "rho_eff", "state": "h", "name": "r"}"#, ""),
    );
    let out = photopol(&["run", "--scene", &path]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&out);
    assert_eq!(doc["schema"], "photopol-result/1");
    assert!(doc["conventions"]["pauli"].is_string());
    let m = &doc["outputs"][0]["matrix"];
    let expect = [1.0, 0.0, 0.0, 0.0];
    for (i, e) in expect.iter().enumerate() {
        let (re, im) = complex_at(m, i);
        assert!((re - e).abs() < 1e-12 && im.abs() < 1e-12);
    }
}

#[test]
fn polarizer_halves_circular_light() {
    let dir = tempfile::tempdir().unwrap();
    let text = scene(
        r#"{"kind": "scatter", "ensemble": "pol", "state": "circ"}"#,
        r#"{"name": "pol", "kind": "polarizer", "angle": 0}"#,
    );
    let path = write(dir.path(), "s.json", &text);
    let out = photopol(&["run", "--scene", &path]);
    assert!(out.status.success());
    let doc = json(&out);
    let trace = doc["outputs"][0]["trace"].as_f64().unwrap();
    assert!((trace - 0.5).abs() < 1e-12);
    assert_eq!(doc["ensembles"][0]["trace_preserving"], false);
}

#[test]
fn depolarizer_reduces_to_intensity_only() {
    let dir = tempfile::tempdir().unwrap();
    let text = scene(
        r#"{"kind": "reduced_mueller", "ensemble": "dep", "name": "dep_m"}"#,
        r#"{"name": "dep", "kind": "pauli_depolarizer"}"#,
    );
    let path = write(dir.path(), "s.json", &text);
    let csv_dir = dir.path().join("csv");
    let out = photopol(&["run", "--scene", &path, "--csv", csv_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json(&out);
    let m = &doc["outputs"][0]["matrix"];
    for a in 0..4 {
        for b in 0..4 {
            let e = if a == 0 && b == 0 { 1.0 } else { 0.0 };
            assert!((m[a][b].as_f64().unwrap() - e).abs() < 1e-12);
        }
    }
    let table = std::fs::read_to_string(csv_dir.join("dep_m.csv")).unwrap();
    assert_eq!(table.lines().count(), 5);
}

#[test]
fn output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "schema": "photopol-scene/1",
  "seed": 3,
  "grid": {"kind": "cap", "half_angle": 0.3, "rings": 1, "per_ring": 3},
  "states": [{"name": "r", "kind": "random", "rank": 2}],
  "ensembles": [{"name": "u", "kind": "random_unitary", "n": 5}],
  "outputs": [
    {"kind": "stokes", "state": "r", "two_mode": true},
    {"kind": "mueller", "ensemble": "u"},
    {"kind": "scatter", "ensemble": "u", "state": "r"}
  ]
}"#;
    let path = write(dir.path(), "s.json", text);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(
        photopol(&["run", "--scene", &path, "--out", a.to_str().unwrap()])
            .status
            .success()
    );
    assert!(
        photopol(&["run", "--scene", &path, "--out", b.to_str().unwrap()])
            .status
            .success()
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = dir.path().join("c.json");
    assert!(photopol(&[
        "run",
        "--scene",
        &path,
        "--seed",
        "4",
        "--out",
        c.to_str().unwrap()
    ])
    .status
    .success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn pair_selector_limits_mueller_entries() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "schema": "photopol-scene/1",
  "grid": {"kind": "explicit", "modes": [{"k": [0, 0, 1]}, {"k": [0, 1, 1]}]},
  "ensembles": [{"name": "id", "kind": "identity"}],
  "outputs": [{"kind": "mueller", "ensemble": "id"}]
}"#;
    let path = write(dir.path(), "s.json", text);
    let full = json(&photopol(&["run", "--scene", &path]));
    assert_eq!(full["outputs"][0]["entries"].as_array().unwrap().len(), 16);
    let some = json(&photopol(&[
        "run",
        "--scene",
        &path,
        "--pairs",
        "0,0,0,0;1,1,0,0",
    ]));
    let entries = some["outputs"][0]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[1]["pair"], serde_json::json!([1, 1, 0, 0]));
}

#[test]
fn detected_flag_restricts_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "schema": "photopol-scene/1",
  "grid": {"kind": "explicit", "modes": [{"k": [0, 0, 1]}, {"k": [1, 0, 0]}]},
  "states": [{"name": "p", "kind": "wave_packet",
    "amplitudes": [[1, 0], [1, 0]], "pols": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}],
  "outputs": [{"kind": "correlation", "state": "p"}]
}"#;
    let path = write(dir.path(), "s.json", text);
    let all = json(&photopol(&["run", "--scene", &path]));
    let one = json(&photopol(&["run", "--scene", &path, "--detected", "1"]));
    let n_all = all["outputs"][0]["detected_trace"].as_f64().unwrap();
    let n_one = one["outputs"][0]["detected_trace"].as_f64().unwrap();
    assert!((n_all - 1.0).abs() < 1e-12);
    assert!((n_one - 0.5).abs() < 1e-12);
    assert_eq!(one["outputs"][0]["photon_number"], 1.0);
}

#[test]
fn exit_codes_and_error_json() {
    let dir = tempfile::tempdir().unwrap();

    let bad = write(dir.path(), "bad.json", "{ not json");
    let out = photopol(&["run", "--scene", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["kind"], "parse");

    let unresolved = write(
        dir.path(),
        "u.json",
        &scene(r#"{"kind": "rho_eff", "state": "nope"}"#, ""),
    );
    let out = photopol(&["run", "--scene", &unresolved]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"]["exit_code"], 3);

    // polarization along e(3): nothing left in the transverse 2x2 block
    let degenerate = r#"{
  "schema": "photopol-scene/1",
  "grid": {"kind": "explicit", "modes": [{"k": [0, 0, 1]}]},
  "basis": {"kind": "vectors", "vectors": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]},
  "states": [{"name": "h", "kind": "plane_wave", "mode": 0, "pol": [[1, 0], [0, 0]]}],
  "outputs": [{"kind": "rho_eff", "state": "h"}]
}"#;
    let path = write(dir.path(), "d.json", degenerate);
    let out = photopol(&["run", "--scene", &path]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(error_json(&out)["error"]["kind"], "degenerate_beam");

    let out = photopol(&["run"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_flags_unphysical_state() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "schema": "photopol-scene/1",
  "grid": {"kind": "explicit", "modes": [{"k": [0, 0, 1]}]},
  "states": [{"name": "neg", "kind": "density",
    "rho": {"rows": 2, "cols": 2, "data": [[1.5, 0], [0, 0], [0, 0], [-0.5, 0]]}}]
}"#;
    let path = write(dir.path(), "s.json", text);
    let out = photopol(&["validate", "--scene", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["valid"], false);

    let ok = write(dir.path(), "ok.json", &scene("", ""));
    let out = photopol(&["validate", "--scene", &ok]);
    assert!(out.status.success());
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn elements_list_names_every_kind() {
    let out = photopol(&["elements", "list"]);
    assert!(out.status.success());
    let kinds: Vec<String> = json(&out)
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["kind"].as_str().unwrap().to_owned())
        .collect();
    for k in [
        "identity",
        "polarizer",
        "pauli_depolarizer",
        "random_unitary",
        "raw",
    ] {
        assert!(kinds.iter().any(|x| x == k));
    }
}

#[test]
fn oracle_default_passes() {
    let out = photopol(&["oracle", "--trials", "20"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report = json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 0);
}

#[test]
fn oracle_tampered_tolerance_fails() {
    let out = photopol(&["oracle", "--trials", "3", "--tol", "1e-16"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["passed"], false);
    assert!(report["worst_offender"].is_string());

    let out = Command::new(env!("CARGO_BIN_EXE_photopol"))
        .args(["oracle", "--trials", "3"])
        .env("PHOTOPOL_ORACLE_TOL", "1e-16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_zero_trials_is_empty_pass() {
    let out = photopol(&["oracle", "--trials", "0"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["checks"].as_array().unwrap().len(), 0);
    assert_eq!(report["passed"], true);
}

#[test]
fn oracle_rejects_large_scene_grid() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"schema": "photopol-scene/1",
      "grid": {"kind": "sphere", "rings": 3, "per_ring": 4}}"#;
    let path = write(dir.path(), "s.json", text);
    let out = photopol(&["oracle", "--scene", &path, "--trials", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let small = r#"{"schema": "photopol-scene/1",
      "grid": {"kind": "cap", "half_angle": 0.4, "rings": 1, "per_ring": 3}}"#;
    let path = write(dir.path(), "t.json", small);
    let out = photopol(&["oracle", "--scene", &path, "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0));
}
