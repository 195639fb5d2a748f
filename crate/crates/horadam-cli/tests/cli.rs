//! End-to-end tests of the command-line interface: flags, exit codes,
//! output schemas, and byte-level reproducibility.

use std::process::{Command, Output};

fn horadam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horadam"))
        .args(args)
        .env_remove("HORADAM_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

#[test]
fn validate_preset_ok() {
    let o = horadam(&["validate", "--preset", "fibonacci"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], true);
}

#[test]
fn validate_boundary_fails_with_exit_one() {
    let o = horadam(&["validate", "-a", "0", "-b", "1", "-p", "1", "-q", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], false);
    assert_eq!(v["failed_first"], "beta_modulus_lt_1");
}

#[test]
fn usage_errors_exit_two() {
    // unknown flag
    let o = horadam(&["validate", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    // preset and explicit params are mutually exclusive
    let o = horadam(&["validate", "--preset", "fibonacci", "-a", "0"]);
    assert_eq!(o.status.code(), Some(2));
    // missing seed components
    let o = horadam(&["validate", "-a", "0", "-b", "1"]);
    assert_eq!(o.status.code(), Some(2));
    // unknown preset
    let o = horadam(&["validate", "--preset", "tribonacci"]);
    assert_eq!(o.status.code(), Some(2));
    // unknown crosscheck case
    let o = horadam(&["crosscheck", "--case", "lee_d7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn terms_block() {
    let o = horadam(&["terms", "--preset", "pell", "--count", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,term\n0,0\n1,1\n2,2\n3,5\n4,12\n");
}

#[test]
fn tail_inverse_matches_reference() {
    let o = horadam(&[
        "tail", "--preset", "fibonacci", "--m", "1", "--l", "0", "--d", "1", "--n", "10",
        "--eps", "1e-20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let inv = v["inverse"].as_str().unwrap();
    assert!(inv.starts_with("2.100909027833956447"), "inverse = {inv}");
    assert!(v["tail"]["terms_used"].as_u64().unwrap() > 50);
}

#[test]
fn estimate_variant_override() {
    let o = horadam(&["estimate", "--preset", "fibonacci", "--d", "3", "--n", "10"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["breakdown"]["variant"], "statement_C,expansion_D");
    let o2 = horadam(&[
        "estimate", "--preset", "fibonacci", "--d", "3", "--n", "10", "--variant", "proof_C",
    ]);
    let v2: serde_json::Value = serde_json::from_str(&stdout(&o2)).unwrap();
    assert_eq!(v2["breakdown"]["variant"], "proof_C,expansion_D");
    assert_ne!(
        v["breakdown"]["corrections"][0]["value"],
        v2["breakdown"]["corrections"][0]["value"]
    );
}

#[test]
fn library_errors_are_machine_parsable_with_exit_one() {
    // W_2 = 0 for these seeds; the tail must refuse
    let o = horadam(&["tail", "-a", "1", "-b", "-1", "-p", "1", "-q", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o);
    assert_eq!(line.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert!(v["error"].as_str().unwrap().contains("W_2"));
}

#[test]
fn converge_csv_schema_and_exit_codes() {
    let o = horadam(&[
        "converge", "--preset", "fibonacci", "--d", "2", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,inverse_tail,inverse_error_bound,estimate_total,error,ratio,flags\n"));
    assert_eq!(text.lines().count(), 12);

    // d=1 cannot lose three orders of magnitude over [6,16]: exit 3
    let o = horadam(&["converge", "--preset", "fibonacci", "--d", "1"]);
    assert_eq!(o.status.code(), Some(3));
    // but it can over [6,26]
    let o = horadam(&["converge", "--preset", "fibonacci", "--d", "1", "--n-to", "26"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn byte_identical_reruns() {
    for args in [
        vec!["tail", "--preset", "fibonacci", "--d", "2", "--n", "8"],
        vec!["estimate", "--preset", "pell", "--d", "4", "--n", "9", "--alternating"],
        vec!["converge", "--preset", "lucas", "--d", "2", "--format", "csv"],
    ] {
        let a = horadam(&args);
        let b = horadam(&args);
        assert_eq!(stdout(&a), stdout(&b), "args: {args:?}");
        assert!(!stdout(&a).is_empty());
    }
}

#[test]
fn crosscheck_and_resolve() {
    let o = horadam(&["crosscheck", "--case", "lee_d2_m1", "--n-from", "8", "--n-to", "18"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["decreasing"], true);

    let o = horadam(&[
        "crosscheck", "--remark", "--preset", "fibonacci", "--m", "1", "--d", "2", "--n-to",
        "26",
    ]);
    assert_eq!(o.status.code(), Some(0));

    let o = horadam(&[
        "resolve", "--preset", "fibonacci", "--d", "3", "--candidates", "statement_C,proof_C",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["chosen"], "statement_C");
}

#[test]
fn precision_env_var_is_honored() {
    let o = Command::new(env!("CARGO_BIN_EXE_horadam"))
        .args(["tail", "--preset", "fibonacci", "--n", "8"])
        .env("HORADAM_PRECISION_BITS", "128")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tail"]["precision_bits"], 128);
}

#[test]
fn output_file_and_sweep_sample() {
    let dir = std::env::temp_dir().join("horadam-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let o = horadam(&[
        "sweep", "--step", "997", "--format", "csv", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("a,b,p,q,m,l,d,alternating,"));
    assert!(text.lines().count() > 10);
    std::fs::remove_file(&path).ok();
}
