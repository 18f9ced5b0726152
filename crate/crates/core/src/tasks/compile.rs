//! Training a circuit `C(θ)` so that `C(θ)† ≈ U(Δt)` on a subspace.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::exact::{exact_propagator, CompileTarget};
use super::metrics::distance;
use super::subspace::SubspaceSpec;
use super::{trial_seed, TaskConfig};
use crate::circuit::Circuit;
use crate::error::{ensure_dim, Error, Result};
use crate::optimizer::{cost_value, CostFunction, Trace};
use crate::pauli::PauliSum;
use crate::scalar::{czero, Real, C};
use crate::search::search;
use crate::state::Statevector;

/// Success threshold on the phase-minimised distance.
pub const COMPILE_TOLERANCE: f64 = 1e-3;

/// `1 − |⟨Φ|(U ⊗ I)(C ⊗ I)|Φ⟩|²` for the probe over the basis of `s`.
///
/// The probe overlap equals `(1/d) Σ_j ⟨s_j|U C|s_j⟩`, so the cost runs the
/// circuit on the `d` basis states of the register alone.
#[derive(Clone, Debug)]
pub struct CompileCost<T> {
    inputs: Vec<Statevector<T>>,
    /// Row `s_j` of `U` for every basis state.
    rows: Vec<Vec<C<T>>>,
}

impl<T: Real> CompileCost<T> {
    pub fn new(target: &CompileTarget<T>, s: &SubspaceSpec) -> Result<Self> {
        ensure_dim(1 << s.n, target.u.rows())?;
        let inputs = s.basis.iter().map(|&b| Statevector::basis(s.n, b)).collect::<Result<Vec<_>>>()?;
        let rows = s.basis.iter().map(|&b| target.u.row(b).to_vec()).collect();
        Ok(Self { inputs, rows })
    }

    fn weight(&self) -> T {
        T::one() / T::from_usize(self.inputs.len()).expect("basis size")
    }

    fn overlap(&self, outputs: &[Statevector<T>]) -> C<T> {
        let mut f = czero();
        for (row, out) in self.rows.iter().zip(outputs) {
            f += dot(row, out.amps());
        }
        f * self.weight()
    }
}

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(czero(), |acc, (x, y)| acc + x * y)
}

impl<T: Real> CostFunction<T> for CompileCost<T> {
    fn inputs(&self) -> &[Statevector<T>] {
        &self.inputs
    }

    fn cost(&self, outputs: &[Statevector<T>]) -> Result<T> {
        Ok(T::one() - self.overlap(outputs).norm_sqr())
    }

    fn gradient(&self, outputs: &[Statevector<T>], derivatives: &[Vec<Statevector<T>>]) -> Result<Vec<T>> {
        let f = self.overlap(outputs);
        let p = derivatives.first().map_or(0, Vec::len);
        let w = self.weight();
        let scale = T::lit(-2.0);
        Ok((0..p)
            .map(|i| {
                let mut df = czero();
                for (row, d) in self.rows.iter().zip(derivatives) {
                    df += dot(row, d[i].amps());
                }
                scale * (f.conj() * df * w).re
            })
            .collect())
    }
}

/// `compileCost(target, c, θ, s)`.
pub fn compile_cost<T: Real>(target: &CompileTarget<T>, c: &Circuit<T>, theta: &[T], s: &SubspaceSpec) -> Result<T> {
    cost_value(&CompileCost::new(target, s)?, &c.with_params(theta)?)
}

/// Which basis the probe spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompileMode {
    Subspace,
    Fullspace,
}

impl fmt::Display for CompileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompileMode::Subspace => "subspace",
            CompileMode::Fullspace => "fullspace",
        })
    }
}

impl FromStr for CompileMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subspace" => Ok(CompileMode::Subspace),
            "fullspace" => Ok(CompileMode::Fullspace),
            other => Err(Error::Config(format!("unknown compile mode `{other}`"))),
        }
    }
}

/// One compilation trial.
#[derive(Clone, Debug)]
pub struct CompileReport<T> {
    pub dt: T,
    pub mode: CompileMode,
    pub trial: usize,
    pub seed: u64,
    pub cost: T,
    pub subspace_error: T,
    pub fullspace_error: T,
    pub success: bool,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub param_count: usize,
    pub iterations: usize,
    pub rounds: usize,
    pub wall_ms: u128,
    /// `C(θ)`; the propagator estimate is its inverse.
    pub circuit: Circuit<T>,
    pub trace: Trace,
}

/// Runs a single compilation trial; `sector` is the occupation subspace used
/// for the subspace error in either mode.
#[allow(clippy::too_many_arguments)]
pub fn run_compile_trial<T: Real>(
    target: &CompileTarget<T>,
    mode: CompileMode,
    sector: &SubspaceSpec,
    cfg: &TaskConfig<T>,
    trial: usize,
    seed: u64,
    record_trace: bool,
) -> Result<CompileReport<T>> {
    let started = Instant::now();
    let full = SubspaceSpec::full(sector.n)?;
    let space = match mode {
        CompileMode::Subspace => sector,
        CompileMode::Fullspace => &full,
    };
    let cost = CompileCost::new(target, space)?;
    let cfg = cfg.seeded(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trace = if record_trace { Trace::recording() } else { Trace::default() };
    let out = search(&cost, Circuit::new(sector.n), &cfg.search, &cfg.optimizer, &cfg.limits, &mut rng, trace)?;
    let estimate = out.best.circuit.dense_unitary_current()?.adjoint();
    let subspace_error = distance(&estimate, &target.u, sector)?;
    let fullspace_error = distance(&estimate, &target.u, &full)?;
    let judged = match mode {
        CompileMode::Subspace => subspace_error,
        CompileMode::Fullspace => fullspace_error,
    };
    Ok(CompileReport {
        dt: target.dt,
        mode,
        trial,
        seed,
        cost: out.best.cost,
        subspace_error,
        fullspace_error,
        success: judged <= T::lit(COMPILE_TOLERANCE),
        gate_count: out.best.circuit.gate_count(),
        two_qubit_count: out.best.circuit.two_qubit_count(),
        param_count: out.best.circuit.param_count(),
        iterations: out.trace.evaluations,
        rounds: out.rounds,
        wall_ms: started.elapsed().as_millis(),
        circuit: out.best.circuit,
        trace: out.trace,
    })
}

/// `trials` compilations of `exp(-i dt H)`, seeds `base_seed + trial`.
#[allow(clippy::too_many_arguments)]
pub fn run_compile<T: Real>(
    h: &PauliSum<T>,
    dt: T,
    mode: CompileMode,
    occupation: usize,
    cfg: &TaskConfig<T>,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<CompileReport<T>>> {
    let target = exact_propagator(h, dt)?;
    let sector = SubspaceSpec::occupation(h.n(), occupation)?;
    (0..trials)
        .map(|t| run_compile_trial(&target, mode, &sector, cfg, t, trial_seed(base_seed, t), false))
        .collect()
}
