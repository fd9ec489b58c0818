use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nklab(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nklab"));
    c.args(args).env_remove("NKLAB_OUT_DIR");
    if let Some(d) = out_dir {
        c.env("NKLAB_OUT_DIR", d);
    }
    c.output().expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn algebra_suite_succeeds_and_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alg.json");
    let o = nklab(&["verify", "algebra", "--seed", "3", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = read_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["config"]["seed"], 3);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["anchor"].as_str().is_some_and(|a| !a.is_empty())));
    let csv = std::fs::read_to_string(dir.path().join("alg.csv")).unwrap();
    assert!(csv.starts_with("suite,name,entry,residual,tolerance,status"));
}

#[test]
fn unknown_suite_is_a_usage_error_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = nklab(&["verify", "everything", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn invalid_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = out.to_str().unwrap();
    for args in [
        vec!["verify", "cone", "--nodes", "48", "--out", o],
        vec!["verify", "cone", "--catalog", "no-such-surface", "--out", o],
        vec!["verify", "cone", "--tol-tier", "fd9=1e-3", "--out", o],
        vec!["verify", "cone", "--tol-tier", "fd1=-1", "--out", o],
        vec!["verify"],
    ] {
        let r = nklab(&args, None);
        assert_eq!(r.status.code(), Some(2), "{args:?}");
    }
    assert!(!out.exists());
}

#[test]
fn failed_check_exits_one_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nk.json");
    let o = nklab(&["verify", "nk-identities", "--tol-tier", "fd1=1e-15", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let v = read_json(&out);
    assert!(v["summary"]["failed"].as_u64().unwrap() > 0);
    let text = stdout(&o);
    assert!(text.contains("FAIL") && text.contains("checks: dω = 3 Im Υ"), "{text}");
}

#[test]
fn catalog_list_and_dump() {
    let o = nklab(&["catalog", "list"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for id in ["geodesic-s2-assoc", "geodesic-s2-nonholo", "halfsphere-freeboundary", "halfsphere-lag"] {
        assert!(text.contains(id), "{id}");
    }
    let d = nklab(&["catalog", "dump", "halfsphere-lag"], None);
    assert_eq!(d.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&d.stdout).unwrap();
    assert_eq!(v["id"], "halfsphere-lag");
    assert!(v["lagrangian"].is_object());
    assert_eq!(nklab(&["catalog", "dump", "nope"], None).status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = nklab(&["verify", "algebra", "--out", "nested/alg.json"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("alg.json").exists());
    assert!(dir.path().join("alg.csv").exists());
}

#[test]
fn config_file_with_command_line_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "suite = algebra\nseed = 11\nnodes = 16\ntol.fd1 = 3e-5\n").unwrap();
    let out = dir.path().join("c.json");
    let o = nklab(
        &["verify", "curve", "--config", cfg.to_str().unwrap(), "--seed", "12", "--catalog", "small-sphere", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = read_json(&out);
    assert_eq!(v["config"]["suite"], "curve");
    assert_eq!(v["config"]["seed"], 12);
    assert_eq!(v["config"]["quadrature"]["interior"], 16);
    assert_eq!(v["config"]["tolerances"]["fd1"], 3e-5);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["entry"] == "small-sphere"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let bad = nklab(&["verify", "algebra", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn index_run_embeds_bound_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ix.json");
    let o = nklab(&["verify", "index", "--catalog", "halfsphere-lag", "--nodes", "32", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = read_json(&out);
    let ix = &v["index"];
    assert!(ix["verdict"].is_string());
    let neg = ix["negative_count"].as_i64().unwrap();
    let mu = ix["maslov_total"].as_i64().unwrap();
    assert_eq!(ix["bound_satisfied"].as_bool().unwrap(), neg >= mu);
    assert!(dir.path().join("ix-eigenvalues.csv").exists());
}

#[test]
fn identical_runs_give_identical_reports_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &Path| {
        let mut v = read_json(p);
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&v).unwrap()
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = nklab(&["verify", "cone", "--seed", "5", "--out", p.to_str().unwrap()], None);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(strip(&a), strip(&b));
}
