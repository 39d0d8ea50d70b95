//! End-to-end runs of the `optomech` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn optomech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optomech")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn meta(path: &Path) -> Value {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta.json");
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn preset_writes_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = optomech(&["effective-sweep", "--preset", "fig2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("V,omega_eff,g_eff,ratio,gamma_eff,warning"));
    assert!(text.contains(",inf,"), "the singular coupling is on the grid");

    let m = meta(&out);
    assert_eq!(m["command"], "effective-sweep");
    assert_eq!(m["preset"], "fig2");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(m["rows"].as_u64().unwrap() as usize, text.lines().count() - 1);
    let v0 = m["summary"]["omega_eff_zero_v"].as_f64().unwrap();
    assert!((v0 - 1e-3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn same_config_same_hash_and_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = optomech(&["convert", "--preset", "convert", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        (std::fs::read(&out).unwrap(), meta(&out)["config_hash"].clone())
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn json_output_and_companion_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mp.toml",
        r#"
        schema_version = 1
        [multipath]
        hops = [0.2]
        beta = [1.0, 0.0]
        time = { end = 20.0, points = 201 }
        [[multipath.ports]]
        omega_eff = 1.0
        g_eff = 1.0
        [[multipath.ports]]
        omega_eff = 1.0
        g_eff = 1.0
        "#,
    );
    let out = dir.path().join("mp.json");
    let o = optomech(&["multipath", "--config", &cfg, "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 201);
    assert!(rows[0].get("F_C1").is_some());
    assert!(dir.path().join("mp.peaks.json").exists());
    assert!(dir.path().join("mp.peaks.json.meta.json").exists());
}

#[test]
fn stdout_when_no_output_path() {
    let o = optomech(&["validate-effective", "--preset", "validate"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("separation,omega_m2,V,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("version.toml", "schema_version = 2\n"),
        ("unknown.toml", "schema_version = 1\nbogus = 1\n"),
        (
            "missing.toml",
            "schema_version = 1\n[cpf]\ntime = { end = 1.0, points = 3 }\n",
        ),
        (
            "negative.toml",
            r#"
            schema_version = 1
            [effective_sweep]
            device = { g = 1e-4, omega_m1 = 1.0, omega_m2 = 1e-3, gamma1 = -1.0 }
            axis = { start = 0.0, stop = 0.01, count = 3 }
            "#,
        ),
    ];
    for (name, text) in cases {
        let cfg = write(dir.path(), name, text);
        let cmd = if name == "missing.toml" { "cpf-dynamics" } else { "effective-sweep" };
        let o = optomech(&[cmd, "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(optomech(&["convert", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(optomech(&["convert"]).status.code(), Some(2));
}

#[test]
fn failed_convergence_exits_with_4_and_keeps_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hot.toml",
        r#"
        schema_version = 1
        check_convergence = true
        [multipath]
        hops = []
        beta = [1.0, 0.0]
        time = { end = 40.0, points = 81 }
        [[multipath.ports]]
        omega_eff = 1.0
        g_eff = 0.5
        gamma_eff = 0.05
        n_th = 5.0
        dims = [2, 6]
        "#,
    );
    let out = dir.path().join("hot.csv");
    let o = optomech(&["multipath", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.exists());
    assert!(dir.path().join("hot.convergence.csv").exists());
}

#[test]
fn thread_pool_does_not_change_results() {
    let a = optomech(&["effective-sweep", "--preset", "fig2", "--threads", "1"]);
    let b = optomech(&["effective-sweep", "--preset", "fig2", "--threads", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(optomech(&["effective-sweep", "--preset", "fig2", "--threads", "0"]).status.code(), Some(2));
}
