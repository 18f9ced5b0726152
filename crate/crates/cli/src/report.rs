//! Result rows and their CSV files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use qsynth_core::tasks::{CompileReport, VqeReport};
use qsynth_core::trotter::ScanRow;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const VQE_CSV: &str = "vqe.csv";
pub const COMPILE_CSV: &str = "compile.csv";
pub const SCAN_CSV: &str = "trotter_scan.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeRow {
    pub molecule: String,
    pub trial: usize,
    pub seed: u64,
    pub energy: f64,
    pub error: f64,
    pub success: bool,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub param_count: usize,
    pub iterations: usize,
    pub wall_ms: u64,
}

impl VqeRow {
    pub fn from_report(molecule: &str, r: &VqeReport<f64>, omit_timing: bool) -> Self {
        Self {
            molecule: molecule.to_string(),
            trial: r.trial,
            seed: r.seed,
            energy: r.energy,
            error: r.error,
            success: r.success,
            gate_count: r.gate_count,
            two_qubit_count: r.two_qubit_count,
            param_count: r.param_count,
            iterations: r.iterations,
            wall_ms: if omit_timing { 0 } else { r.wall_ms as u64 },
        }
    }

    /// Row for a trial that ended in a numerical error.
    pub fn failed(molecule: &str, trial: usize, seed: u64) -> Self {
        Self {
            molecule: molecule.to_string(),
            trial,
            seed,
            energy: f64::NAN,
            error: f64::NAN,
            success: false,
            gate_count: 0,
            two_qubit_count: 0,
            param_count: 0,
            iterations: 0,
            wall_ms: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileRow {
    pub dt: f64,
    pub mode: String,
    pub trial: usize,
    pub seed: u64,
    pub cost: f64,
    pub subspace_error: f64,
    pub fullspace_error: f64,
    pub success: bool,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub iterations: usize,
    pub wall_ms: u64,
}

impl CompileRow {
    pub fn from_report(r: &CompileReport<f64>, omit_timing: bool) -> Self {
        Self {
            dt: r.dt,
            mode: r.mode.to_string(),
            trial: r.trial,
            seed: r.seed,
            cost: r.cost,
            subspace_error: r.subspace_error,
            fullspace_error: r.fullspace_error,
            success: r.success,
            gate_count: r.gate_count,
            two_qubit_count: r.two_qubit_count,
            iterations: r.iterations,
            wall_ms: if omit_timing { 0 } else { r.wall_ms as u64 },
        }
    }

    pub fn failed(dt: f64, mode: &str, trial: usize, seed: u64) -> Self {
        Self {
            dt,
            mode: mode.to_string(),
            trial,
            seed,
            cost: f64::NAN,
            subspace_error: f64::NAN,
            fullspace_error: f64::NAN,
            success: false,
            gate_count: 0,
            two_qubit_count: 0,
            iterations: 0,
            wall_ms: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub dt: f64,
    pub order: u8,
    pub n_steps: usize,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub full_space_error: f64,
    pub subspace_error: f64,
}

impl From<&ScanRow<f64>> for ScanRecord {
    fn from(r: &ScanRow<f64>) -> Self {
        Self {
            dt: r.dt,
            order: r.order,
            n_steps: r.n_steps,
            gate_count: r.gate_count,
            two_qubit_count: r.two_qubit_count,
            full_space_error: r.full_space_error,
            subspace_error: r.subspace_error,
        }
    }
}

/// Serialises rows with a header line.
pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?)
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    fs::write(path, to_csv(rows)?).with_context(|| format!("writing {}", path.display()))
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize().map(|row| row.with_context(|| format!("parsing {}", path.display()))).collect()
}
