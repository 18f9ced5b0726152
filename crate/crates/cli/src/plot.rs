//! Aggregated, plot-ready tables built from result CSVs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use serde::Serialize;

use crate::report::{read_csv, write_csv, CompileRow, ScanRecord, VqeRow, COMPILE_CSV, SCAN_CSV, VQE_CSV};

/// Full-space error a Trotter circuit must reach to count in `trotter_best.csv`.
pub const TROTTER_TARGET: f64 = 1e-3;

/// Five-number summary, quartiles by linear interpolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Whisker {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Whisker {
    pub fn of(values: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let at = |q: f64| {
            let pos = q * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Self { min: v[0], q1: at(0.25), median: at(0.5), q3: at(0.75), max: v[v.len() - 1] })
    }
}

#[derive(Serialize)]
struct WhiskerRow {
    group: String,
    trials: usize,
    success_rate: f64,
    gates_min: f64,
    gates_q1: f64,
    gates_median: f64,
    gates_q3: f64,
    gates_max: f64,
    iterations_min: f64,
    iterations_q1: f64,
    iterations_median: f64,
    iterations_q3: f64,
    iterations_max: f64,
}

impl WhiskerRow {
    fn new(group: String, success: &[bool], gates: &[f64], iterations: &[f64]) -> Self {
        let nan = Whisker { min: f64::NAN, q1: f64::NAN, median: f64::NAN, q3: f64::NAN, max: f64::NAN };
        let g = Whisker::of(gates).unwrap_or(nan);
        let i = Whisker::of(iterations).unwrap_or(nan);
        Self {
            group,
            trials: success.len(),
            success_rate: success.iter().filter(|&&s| s).count() as f64 / success.len().max(1) as f64,
            gates_min: g.min,
            gates_q1: g.q1,
            gates_median: g.median,
            gates_q3: g.q3,
            gates_max: g.max,
            iterations_min: i.min,
            iterations_q1: i.q1,
            iterations_median: i.median,
            iterations_q3: i.q3,
            iterations_max: i.max,
        }
    }
}

#[derive(Serialize)]
struct CompileBestRow {
    dt: f64,
    mode: String,
    trials: usize,
    successes: usize,
    best_gate_count: Option<usize>,
    best_error: f64,
}

#[derive(Serialize)]
struct TrotterBestRow {
    dt: f64,
    order: u8,
    min_gate_count: Option<usize>,
    n_steps: Option<usize>,
    best_full_space_error: f64,
}

/// `dir/name` and `dir/*/name`, sorted.
fn find(dir: &Path, name: &str) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    if dir.join(name).is_file() {
        found.push(dir.join(name));
    }
    let mut subdirs: Vec<PathBuf> =
        fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    subdirs.sort();
    found.extend(subdirs.into_iter().map(|d| d.join(name)).filter(|p| p.is_file()));
    Ok(found)
}

fn gather<R: serde::de::DeserializeOwned>(dir: &Path, name: &str) -> Result<Vec<R>> {
    let mut rows = Vec::new();
    for p in find(dir, name)? {
        rows.extend(read_csv::<R>(&p)?);
    }
    Ok(rows)
}

fn vqe_whiskers(rows: &[VqeRow]) -> Vec<WhiskerRow> {
    let mut groups: BTreeMap<&str, Vec<&VqeRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(&r.molecule).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(m, rs)| {
            let success: Vec<bool> = rs.iter().map(|r| r.success).collect();
            let gates: Vec<f64> = rs.iter().map(|r| r.gate_count as f64).collect();
            let iters: Vec<f64> = rs.iter().map(|r| r.iterations as f64).collect();
            WhiskerRow::new(m.to_string(), &success, &gates, &iters)
        })
        .collect()
}

fn compile_groups(rows: &[CompileRow]) -> Vec<((f64, String), Vec<&CompileRow>)> {
    let mut groups: Vec<((f64, String), Vec<&CompileRow>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(k, _)| k.0 == r.dt && k.1 == r.mode) {
            Some((_, v)) => v.push(r),
            None => groups.push(((r.dt, r.mode.clone()), vec![r])),
        }
    }
    groups.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then_with(|| a.0 .1.cmp(&b.0 .1)));
    groups
}

fn judged_error(r: &CompileRow) -> f64 {
    if r.mode == "fullspace" {
        r.fullspace_error
    } else {
        r.subspace_error
    }
}

fn compile_tables(rows: &[CompileRow]) -> (Vec<WhiskerRow>, Vec<CompileBestRow>) {
    let mut whiskers = Vec::new();
    let mut best = Vec::new();
    for ((dt, mode), rs) in compile_groups(rows) {
        let success: Vec<bool> = rs.iter().map(|r| r.success).collect();
        let gates: Vec<f64> = rs.iter().map(|r| r.gate_count as f64).collect();
        let iters: Vec<f64> = rs.iter().map(|r| r.iterations as f64).collect();
        whiskers.push(WhiskerRow::new(format!("{dt}/{mode}"), &success, &gates, &iters));
        let winners: Vec<&&CompileRow> = rs.iter().filter(|r| r.success).collect();
        best.push(CompileBestRow {
            dt,
            mode,
            trials: rs.len(),
            successes: winners.len(),
            best_gate_count: winners.iter().map(|r| r.gate_count).min(),
            best_error: rs.iter().map(|r| judged_error(r)).filter(|e| !e.is_nan()).fold(f64::INFINITY, f64::min),
        });
    }
    (whiskers, best)
}

fn trotter_table(rows: &[ScanRecord]) -> Vec<TrotterBestRow> {
    let mut keys: Vec<(f64, u8)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|k| k.0 == r.dt && k.1 == r.order) {
            keys.push((r.dt, r.order));
        }
    }
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.into_iter()
        .map(|(dt, order)| {
            let rs = rows.iter().filter(|r| r.dt == dt && r.order == order);
            let cheapest = rs
                .clone()
                .filter(|r| r.full_space_error <= TROTTER_TARGET)
                .min_by_key(|r| (r.gate_count, r.n_steps));
            TrotterBestRow {
                dt,
                order,
                min_gate_count: cheapest.map(|r| r.gate_count),
                n_steps: cheapest.map(|r| r.n_steps),
                best_full_space_error: rs.map(|r| r.full_space_error).fold(f64::INFINITY, f64::min),
            }
        })
        .collect()
}

/// Reads `vqe.csv`, `compile.csv` and `trotter_scan.csv` from `results` and
/// its immediate subdirectories, and writes the aggregates into `out`.
pub fn emit_plot_data(results: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    if !results.is_dir() {
        bail!("results directory {} does not exist", results.display());
    }
    let vqe: Vec<VqeRow> = gather(results, VQE_CSV)?;
    let compile: Vec<CompileRow> = gather(results, COMPILE_CSV)?;
    let scan: Vec<ScanRecord> = gather(results, SCAN_CSV)?;
    if vqe.is_empty() && compile.is_empty() && scan.is_empty() {
        bail!("no result CSVs under {}", results.display());
    }
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    if !vqe.is_empty() {
        let p = out.join("vqe_whiskers.csv");
        write_csv(&p, &vqe_whiskers(&vqe))?;
        written.push(p);
    }
    if !compile.is_empty() {
        let (whiskers, best) = compile_tables(&compile);
        let p = out.join("compile_whiskers.csv");
        write_csv(&p, &whiskers)?;
        written.push(p);
        let p = out.join("compile_best.csv");
        write_csv(&p, &best)?;
        written.push(p);
    }
    if !scan.is_empty() {
        let p = out.join("trotter_best.csv");
        write_csv(&p, &trotter_table(&scan))?;
        written.push(p);
    }
    Ok(written)
}
