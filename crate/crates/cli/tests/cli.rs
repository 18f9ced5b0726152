use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qsynth_cli::report::{read_csv, CompileRow, ScanRecord, VqeRow, COMPILE_CSV, SCAN_CSV, VQE_CSV};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn qsynth(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_qsynth")).args(args).output().expect("spawn qsynth");
    assert!(out.status.success(), "qsynth {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn jw_reproduces_the_fifteen_term_h2_hamiltonian() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h2.pauli");
    let text = stdout(&qsynth(&["jw", "--integrals", path(&fixture("h2.integrals")), "--out", path(&out)]));
    assert!(text.starts_with("15 terms on 4 qubits"), "{text}");

    let exact = stdout(&qsynth(&["exact", "--hamiltonian", path(&out), "--occupation", "2", "--dt", "1"]));
    let direct = stdout(&qsynth(&["exact", "--hamiltonian", path(&fixture("h2.integrals")), "--occupation", "2", "--dt", "1"]));
    assert_eq!(exact, direct);
    assert!(exact.contains("non_triviality_subspace"));
}

#[test]
fn vqe_run_writes_ten_rows_and_a_best_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vqe");
    qsynth(&["vqe", "--hamiltonian", path(&fixture("h2.integrals")), "--occupation", "2", "--molecule", "H2", "--out", path(&out)]);
    let rows: Vec<VqeRow> = read_csv(&out.join(VQE_CSV)).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().any(|r| r.success));
    assert!(rows.iter().all(|r| r.molecule == "H2"));
    for name in ["manifest.json", "best.circuit.json", "best_state.json", "circuits/trial_0.json"] {
        assert!(out.join(name).exists(), "{name}");
    }

    let schmidt = stdout(&qsynth(&["schmidt", "--from-vqe", path(&out)]));
    let ebits: f64 = schmidt.trim().parse().unwrap();
    assert!((0.0..=2.0).contains(&ebits));

    let plots = dir.path().join("plots");
    qsynth(&["plot-data", "--results", path(&out), "--out", path(&plots)]);
    let whiskers = fs::read_to_string(plots.join("vqe_whiskers.csv")).unwrap();
    assert_eq!(whiskers.lines().count(), 2);
    assert!(whiskers.lines().nth(1).unwrap().starts_with("H2,"));
}

#[test]
fn omitting_timing_makes_runs_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        qsynth(&[
            "vqe",
            "--hamiltonian",
            path(&fixture("h2.integrals")),
            "--occupation",
            "2",
            "--trials",
            "3",
            "--seed",
            "11",
            "--jobs",
            jobs,
            "--omit-timing",
            "--trace",
            "--out",
            path(&out),
        ]);
        out
    };
    let (a, b, c) = (run("a", "1"), run("b", "1"), run("c", "2"));
    for file in [VQE_CSV, "manifest.json", "best.circuit.json", "traces/trial_2.csv"] {
        let bytes = fs::read(a.join(file)).unwrap();
        assert_eq!(bytes, fs::read(b.join(file)).unwrap(), "{file}");
        assert_eq!(bytes, fs::read(c.join(file)).unwrap(), "{file} with two workers");
    }
}

#[test]
fn single_trial_seed_matches_its_batch_row() {
    let dir = tempfile::tempdir().unwrap();
    let h = fixture("h2.integrals");
    let batch = dir.path().join("batch");
    let single = dir.path().join("single");
    let common = ["vqe", "--hamiltonian", path(&h), "--occupation", "2", "--seed", "4", "--omit-timing"];
    qsynth(&[&common[..], &["--trials", "3", "--out", path(&batch)]].concat());
    qsynth(&[&common[..], &["--trial-seed", "6", "--out", path(&single)]].concat());
    let rows: Vec<VqeRow> = read_csv(&batch.join(VQE_CSV)).unwrap();
    let one: Vec<VqeRow> = read_csv(&single.join(VQE_CSV)).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0], rows[2]);
}

#[test]
fn compiling_a_zero_duration_needs_no_gates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("compile");
    qsynth(&["compile", "--hamiltonian", path(&fixture("h2.integrals")), "--dt", "0", "--trials", "2", "--out", path(&out)]);
    let rows: Vec<CompileRow> = read_csv(&out.join(COMPILE_CSV)).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r.success && r.gate_count == 0 && r.mode == "subspace");
        assert!(r.subspace_error <= 1e-12 && r.fullspace_error <= 1e-12);
    }
}

#[test]
fn trotter_scan_covers_the_requested_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan");
    qsynth(&[
        "trotter-scan",
        "--hamiltonian",
        path(&fixture("h2.integrals")),
        "--dt-grid",
        "0.5,2",
        "--orders",
        "1,2",
        "--max-steps",
        "6,4",
        "--out",
        path(&out),
    ]);
    let rows: Vec<ScanRecord> = read_csv(&out.join(SCAN_CSV)).unwrap();
    assert_eq!(rows.len(), 2 * (6 + 4));
    for r in &rows {
        assert!(r.subspace_error <= r.full_space_error + 1e-12);
        assert!(r.two_qubit_count <= r.gate_count);
    }
    let first: Vec<&ScanRecord> = rows.iter().filter(|r| r.order == 1 && r.dt == 2.0).collect();
    assert!(first.windows(2).all(|w| w[1].full_space_error < w[0].full_space_error));

    let plots = dir.path().join("plots");
    qsynth(&["plot-data", "--results", path(&out), "--out", path(&plots)]);
    assert!(plots.join("trotter_best.csv").exists());
}

#[test]
fn bad_input_fails_cleanly() {
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_qsynth")).args(args).output().unwrap();
    let h = fixture("h2.integrals");
    let out = run(&["vqe", "--hamiltonian", path(&h), "--occupation", "2", "--set", "seed=3", "--out", "/nonexistent/x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let out = run(&["exact", "--hamiltonian", "/nonexistent.integrals"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
