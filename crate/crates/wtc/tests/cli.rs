use std::process::Command;

fn wtc(dir: &std::path::Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wtc")).arg("--store-dir").arg(dir).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn build_verify_hecke() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = wtc(dir.path(), &["build", "--n", "2", "--ell", "2,3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("built")).count(), 4);
    let (code, out, _) = wtc(dir.path(), &["build", "--n", "2", "--ell", "2"]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.starts_with("loaded")));

    let (code, out, _) = wtc(dir.path(), &["verify", "--n", "2", "--ell", "2,3"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("FAIL"));

    let (code, out, _) = wtc(dir.path(), &["hecke", "--n", "2", "--ell", "2,3", "--level", "11", "--degrees", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("(11.2.a.a) (dim 2)"), "{out}");
    assert!(!out.contains("H^0 dim"));
}

#[test]
fn prime_dividing_level_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = wtc(dir.path(), &["hecke", "--n", "2", "--ell", "2", "--level", "4"]);
    assert_ne!(code, 0);
    assert!(err.contains("divides the level"), "{err}");
}

#[test]
fn corrupted_store_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(wtc(dir.path(), &["build", "--n", "2", "--ell", "2", "--k", "1"]).0, 0);
    let path = dir.path().join("wtc-n2-l2-k1.wtc");
    let text = std::fs::read_to_string(&path).unwrap().replacen("ORBITS", "ORBITS ", 1);
    std::fs::write(&path, text).unwrap();
    let (code, _, err) = wtc(dir.path(), &["verify", "--n", "2", "--ell", "2", "--k", "1"]);
    assert_ne!(code, 0);
    assert!(err.contains("hash mismatch"), "{err}");
}

#[test]
fn json_table() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = wtc(dir.path(), &["--json", "table", "--n", "2", "--ell", "3", "--levels", "1,2,4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["problems"].as_array().unwrap().is_empty()));
}
