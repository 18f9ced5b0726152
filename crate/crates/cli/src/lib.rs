//! Run orchestration, configuration files and report emission behind the
//! `qsynth` binary.

pub mod config;
pub mod manifest;
pub mod plot;
pub mod report;

use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use qsynth_core::fermion::{build_hamiltonian, jordan_wigner, IntegralTable};
use qsynth_core::tasks::trial_seed;
use qsynth_core::{PauliSum64, Statevector64, C};
use serde::{Deserialize, Serialize};

/// Reads a Pauli-sum file, or an integral file (extension `.integrals`)
/// mapped through Jordan–Wigner.
pub fn load_hamiltonian(path: &Path) -> Result<PauliSum64> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let reader = BufReader::new(file);
    let h = if path.extension().is_some_and(|e| e == "integrals") {
        jordan_wigner(&build_hamiltonian(&IntegralTable::read(reader)?))?
    } else {
        PauliSum64::read_text(reader, None)?
    };
    Ok(h)
}

/// Statevector file: `{"n":2,"amps":[[re,im],...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    n: usize,
    amps: Vec<[f64; 2]>,
}

pub fn state_to_json(psi: &Statevector64) -> String {
    let record = StateRecord { n: psi.n(), amps: psi.amps().iter().map(|a| [a.re, a.im]).collect() };
    serde_json::to_string(&record).expect("plain data serialises")
}

pub fn state_from_json(text: &str) -> Result<Statevector64> {
    let r: StateRecord = serde_json::from_str(text)?;
    Ok(Statevector64::from_amps(r.n, r.amps.iter().map(|a| C::new(a[0], a[1])).collect())?)
}

/// `(trial index, seed)` pairs of a run: `trials` seeds from `base`, or the
/// single trial that `trial_seed` reproduces.
pub fn plan_trials(trials: usize, base: u64, single: Option<u64>) -> Result<Vec<(usize, u64)>> {
    if let Some(seed) = single {
        return Ok(vec![(seed.wrapping_sub(base) as usize, seed)]);
    }
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    Ok((0..trials).map(|t| (t, trial_seed(base, t))).collect())
}

/// Maps `f` over `items` on `jobs` threads; output order follows `items`.
pub fn parallel_map<I: Sync, O: Send>(jobs: usize, items: &[I], f: impl Fn(&I) -> O + Sync) -> Vec<O> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<O>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs.min(items.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let out = f(&items[i]);
                *slots[i].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every slot filled")).collect()
}
