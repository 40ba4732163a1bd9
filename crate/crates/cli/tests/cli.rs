use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn undertone(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_undertone"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("UNDERTONE_OUT")
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn sieve_to_100_lists_25_primes() {
    let dir = tempfile::tempdir().unwrap();
    let o = undertone(dir.path(), &["sieve", "--limit", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "primes.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p"));
    let primes: Vec<u64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(primes.len(), 25);
    assert_eq!(primes.first(), Some(&2));
    assert_eq!(primes.last(), Some(&97));
    assert!(!csv.contains('\r'));
    assert!(read(dir.path(), "marks.csv").starts_with("value,x,cofactor,branch,seq\n"));

    let s = summary(dir.path());
    assert_eq!(s["status"], "ok");
    assert_eq!(s["input"]["command"]["subcommand"], "sieve");
    assert_eq!(s["input"]["command"]["limit"], 100);
    assert!(s["versions"]["undertone-core"].is_string());
    assert!(s["timings"]["total_seconds"].is_number());
}

#[test]
fn argand_flags_ten_origin_approaches() {
    let dir = tempfile::tempdir().unwrap();
    let o = undertone(dir.path(), &["argand", "--sigma", "0.5", "--t", "9:50", "--step", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(dir.path());
    assert_eq!(s["results"]["origin_approaches"].as_array().unwrap().len(), 10);
    let csv = read(dir.path(), "argand.csv");
    assert!(csv.starts_with("t,re,im\n"));
    assert_eq!(csv.lines().count(), 1 + 4101);
    let svg = read(dir.path(), "argand.svg");
    assert!(svg.starts_with("<svg") && svg.contains("10 origin approaches"));
}

#[test]
fn phase_and_zeros_agree() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        undertone(dir.path(), &["phase", "--sigma", "0.5", "--t", "0:50", "--step", "0.01"]).status.code(),
        Some(0)
    );
    let jumps = summary(dir.path())["results"]["jumps"].as_array().unwrap().clone();
    assert!(read(dir.path(), "phase.csv").starts_with("t,theta,jump_flag\n"));
    assert_eq!(undertone(dir.path(), &["zeros", "--t", "0:50"]).status.code(), Some(0));
    let zeros = read(dir.path(), "zeros.csv");
    assert!(zeros.starts_with("t_zero,bracket_lo,bracket_hi\n"));
    assert_eq!(zeros.lines().count(), 1 + 10);
    assert_eq!(jumps.len(), 10);
}

#[test]
fn atlas_writes_graph_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = undertone(dir.path(), &["atlas", "--host", "2", "--limit", "400", "--table", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(dir.path(), "graph.csv").starts_with("parent,child,class,origin_value\n"));
    let table = read(dir.path(), "table7.csv");
    assert!(table.starts_with("value,host,path,label,class\n"));
    assert!(table.contains("1225,SQ2,5*5*49,5x 5x 49,further\n"));
    assert_eq!(summary(dir.path())["results"]["coverage_holds"], true);
}

#[test]
fn xray_writes_lines_and_strips() {
    let dir = tempfile::tempdir().unwrap();
    let o = undertone(dir.path(), &["xray", "--t-max", "12", "--sigma", "-1:2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lines = read(dir.path(), "lines.csv");
    assert!(lines.starts_with("label,parity,escapes,asym_index,sq_class,t_at_reference\n"));
    assert_eq!(lines.lines().count(), 1 + 3);
    assert!(read(dir.path(), "xray.svg").starts_with("<svg"));
    assert_eq!(summary(dir.path())["results"]["escaping_labels"], serde_json::json!([2, 3]));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["xray", "--t-max", "0"][..],
        &["sieve", "--limit", "10", "--bogus"],
        &["sieve"],
        &["zeros", "--t", "50:9"],
        &["atlas", "--host", "3", "--limit", "10"],
        &["argand", "--sigma", "0.5", "--t", "9:50", "--step", "0"],
        &["frobnicate"],
    ] {
        let o = undertone(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_1_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["zeros", "--t", "0:600"][..],
        &["xray", "--t-max", "900"],
        &["phase", "--sigma", "1", "--t", "-1:1", "--step", "0.5"],
    ] {
        let o = undertone(dir.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert_eq!(summary(dir.path())["status"], "error");
    }
}

#[test]
fn csv_outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(undertone(a.path(), &["sieve", "--limit", "200000", "--segment-size", "4096"]).status.code(), Some(0));
    assert_eq!(undertone(b.path(), &["sieve", "--limit", "200000", "--segment-size", "65536"]).status.code(), Some(0));
    for name in ["primes.csv", "marks.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    for args in [&["argand", "--sigma", "0.5", "--t", "9:20", "--step", "0.05"][..], &["xray", "--t-max", "20"]] {
        assert_eq!(undertone(a.path(), args).status.code(), Some(0));
        assert_eq!(undertone(b.path(), args).status.code(), Some(0));
    }
    for name in ["argand.csv", "lines.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested/out");
    let o = Command::new(env!("CARGO_BIN_EXE_undertone"))
        .args(["zeros", "--t", "10:30"])
        .env("UNDERTONE_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(target.join("zeros.csv").is_file());
    assert!(target.join("summary.json").is_file());
}

#[test]
fn emit_selects_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = undertone(dir.path(), &["--emit", "svg", "phase", "--sigma", "0.5", "--t", "0:20", "--step", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("phase.svg").is_file());
    assert!(!dir.path().join("phase.csv").exists());
}
