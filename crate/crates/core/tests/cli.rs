use std::fs;
use std::io::BufReader;
use std::process::{Command, Output};

use beamtrain::codebook::{generate, import_codebook, Method};

fn beamtrain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamtrain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_status_follows_the_checks() {
    let ok = beamtrain(&["codebook", "--method", "deact", "--n", "2", "--validate"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("overall: PASS"));

    let bad = beamtrain(&["codebook", "--method", "bmw-ss", "--n", "64", "--validate"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("criterion1 layer 0"));
}

#[test]
fn exported_codebook_reimports_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cb.txt");
    let o = beamtrain(&[
        "codebook",
        "--method",
        "bmw-ss",
        "--n",
        "16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let cb = import_codebook(BufReader::new(fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(cb, generate(Method::BmwSs, 16).unwrap());
}

#[test]
fn success_csv_has_one_row_per_combination() {
    let o = beamtrain(&[
        "mc-success",
        "--n",
        "16",
        "--realizations",
        "10",
        "--snr-db",
        "-10,0,10",
        "--policies",
        "match-exhaustive",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("snr_db,method,policy,success,stderr"));
    // Three SNR points times two methods.
    assert_eq!(lines.count(), 6);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# small run\nn = 8\nrealizations = 5\nsnr_db = 0\nmethods = deact\n",
    )
    .unwrap();
    let o = beamtrain(&[
        "mc-power",
        "--config",
        cfg.to_str().unwrap(),
        "--methods",
        "bmw-ss",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    // log2(8) stages per side.
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("bmw-ss")));
}

#[test]
fn invalid_arguments_fail() {
    for args in [
        &["mc-success", "--n", "12"][..],
        &["mc-success", "--channel", "rician"][..],
        &["mc-power", "--snr-db", "0,10"][..],
        &["codebook", "--n", "0"][..],
        &["codebook", "--method", "dft", "--n", "8"][..],
        &["mc-success", "--realizations", "0"][..],
    ] {
        let o = beamtrain(args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn pattern_csv_lists_requested_codewords() {
    let o = beamtrain(&[
        "pattern",
        "--method",
        "deact",
        "--n",
        "8",
        "--layers",
        "1",
        "--grid-points",
        "16",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("omega,"));
    assert!(header.contains("w(1,1)") && header.contains("w(1,2)"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn search_prints_trace_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = beamtrain(&[
        "search",
        "--n",
        "16",
        "--methods",
        "deact",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("stage,side,candidate_1,candidate_2,winner"));
    // Four stages per side.
    assert_eq!(csv.lines().count(), 9);
}
