//! End-to-end checks of the command-line verbs, exit codes and output layout.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#"{
  "schema_version": 1,
  "example": "1a",
  "alphas": [0.5, 0.25],
  "levels": [2, 3, 4],
  "aggregation": {"kind": "at_time", "t": 1.0},
  "tolerances": {"reference_truncation": 256}
}"#;

fn fracfem(args: &[&str], env_out: Option<&Path>, cwd: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fracfem"));
    cmd.args(args).current_dir(cwd).env_remove("FRACFEM_OUT");
    if let Some(dir) = env_out {
        cmd.env("FRACFEM_OUT", dir);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("study.json");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn ml_eval_prints_value() {
    let tmp = TempDir::new().unwrap();
    let o = fracfem(
        &["ml-eval", "--alpha", "0.5", "--beta", "1", "--x", "1", "--oracle"],
        None,
        tmp.path(),
    );
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    // E_{1/2}(-1) = e erfc(1)
    assert!(out.contains("4.275835761558"), "{out}");
    assert!(out.contains("relative error"));
}

#[test]
fn validation_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let o = fracfem(
        &["ml-eval", "--alpha", "2.5", "--beta", "1", "--x", "1"],
        None,
        tmp.path(),
    );
    assert_eq!(code(&o), 2);

    let bad = SMALL.replace("\"levels\"", "\"colour\": 1, \"levels\"");
    let cfg = write_config(tmp.path(), &bad);
    let o = fracfem(&["study", "--config", &cfg], None, tmp.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let o = fracfem(
        &[
            "study",
            "--config",
            &write_config(tmp.path(), &SMALL.replace("[2, 3, 4]", "[]")),
        ],
        None,
        tmp.path(),
    );
    assert_eq!(code(&o), 2);

    let o = fracfem(
        &["study", "--config", &write_config(tmp.path(), SMALL), "--workers", "0"],
        None,
        tmp.path(),
    );
    assert_eq!(code(&o), 2);

    let o = fracfem(&["emit", "--format", "svg"], None, tmp.path());
    assert_eq!(code(&o), 2);

    let o = fracfem(&["emit", "--format", "csv", "--out", "nothing-here"], None, tmp.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    let o = fracfem(&["study", "--config", "missing.json"], None, tmp.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));
}

#[test]
fn study_writes_artifacts_and_emit_reproduces_them() {
    let tmp = TempDir::new().unwrap();
    let env_dir = tmp.path().join("from-env");
    let cfg = write_config(tmp.path(), SMALL);

    let o = fracfem(
        &["study", "--config", &cfg, "--workers", "2"],
        Some(&env_dir),
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv_path = env_dir.join("1a_t.csv");
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha,norm,k,h,error,rate,degraded");
    assert_eq!(lines.len(), 1 + 2 * 2 * 3);
    assert!(lines[1].starts_with("0.25,H1,2,0.25,"));
    assert!(!csv.contains('\r'));
    assert!(env_dir.join("1a_t.artifact.json").exists());

    // --out beats the environment
    let cli_dir = tmp.path().join("from-cli");
    let o = fracfem(
        &[
            "study",
            "--config",
            &cfg,
            "--out",
            cli_dir.to_str().unwrap(),
            "--sequential",
        ],
        Some(&env_dir),
        tmp.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(cli_dir.join("1a_t.artifact.json")).unwrap(),
        fs::read(env_dir.join("1a_t.artifact.json")).unwrap()
    );

    fs::remove_file(&csv_path).unwrap();
    let o = fracfem(&["emit", "--format", "csv"], Some(&env_dir), tmp.path());
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&csv_path).unwrap(), csv);

    let o = fracfem(&["emit", "--format", "plot"], Some(&env_dir), tmp.path());
    assert_eq!(code(&o), 0);
    let script = fs::read_to_string(env_dir.join("1a_t.gp")).unwrap();
    assert!(script.contains("logscale"));
    let data = fs::read_to_string(env_dir.join("1a_t_alpha0.5.dat")).unwrap();
    assert!(data.contains("# h error"));
}

#[test]
fn solve_writes_nodal_values() {
    let tmp = TempDir::new().unwrap();
    let o = fracfem(
        &["solve", "--example", "2a", "--alpha", "0.5", "--level", "3"],
        None,
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("L2 error"));
    let csv = fs::read_to_string(tmp.path().join("out/solve_2a_alpha0.5_k3_t1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 49);

    let o = fracfem(
        &[
            "solve",
            "--example",
            "1c",
            "--alpha",
            "0.5",
            "--level",
            "3",
            "--tau",
            "0.01",
        ],
        None,
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let o = fracfem(
        &["solve", "--example", "3z", "--alpha", "0.5", "--level", "3"],
        None,
        tmp.path(),
    );
    assert_eq!(code(&o), 2);
}
