//! Variational ground-state search.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::exact::ground_state_oracle;
use super::{trial_seed, TaskConfig};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::optimizer::{CostFunction, Trace};
use crate::pauli::{PauliOperator, PauliSum};
use crate::scalar::Real;
use crate::search::search;
use crate::state::{inner, Statevector};

/// 1 kcal/mol in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.59e-3;

/// Energy expectation of the circuit applied to a fixed reference state.
#[derive(Clone, Debug)]
pub struct VqeCost<T> {
    op: PauliOperator<T>,
    inputs: Vec<Statevector<T>>,
}

impl<T: Real> VqeCost<T> {
    pub fn new(h: &PauliSum<T>, psi0: Statevector<T>) -> Result<Self> {
        if psi0.n() != h.n() {
            return Err(Error::Dimension { expected: h.n(), found: psi0.n() });
        }
        Ok(Self { op: h.compile(), inputs: vec![psi0] })
    }

    /// Reference state with the lowest `k` qubits occupied.
    pub fn with_occupation(h: &PauliSum<T>, k: usize) -> Result<Self> {
        if k > h.n() {
            return Err(Error::Range(format!("occupation {k} exceeds {} qubits", h.n())));
        }
        Self::new(h, Statevector::basis(h.n(), (1usize << k) - 1)?)
    }
}

impl<T: Real> CostFunction<T> for VqeCost<T> {
    fn inputs(&self) -> &[Statevector<T>] {
        &self.inputs
    }

    fn cost(&self, outputs: &[Statevector<T>]) -> Result<T> {
        outputs[0].expectation_op(&self.op)
    }

    fn gradient(&self, outputs: &[Statevector<T>], derivatives: &[Vec<Statevector<T>>]) -> Result<Vec<T>> {
        let hpsi = self.op.apply(&outputs[0])?;
        let two = T::lit(2.0);
        Ok(derivatives[0].iter().map(|d| two * inner(d.amps(), hpsi.amps()).re).collect())
    }
}

/// One VQE trial.
#[derive(Clone, Debug)]
pub struct VqeReport<T> {
    pub trial: usize,
    pub seed: u64,
    pub energy: T,
    pub error: T,
    pub success: bool,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub param_count: usize,
    /// Gradient evaluations, including candidate training and deletions.
    pub iterations: usize,
    pub rounds: usize,
    pub wall_ms: u128,
    pub circuit: Circuit<T>,
    pub trace: Trace,
}

/// Runs a single trial with the given seed against a known exact energy.
pub fn run_vqe_trial<T: Real>(
    cost: &VqeCost<T>,
    exact: T,
    cfg: &TaskConfig<T>,
    trial: usize,
    seed: u64,
    record_trace: bool,
) -> Result<VqeReport<T>> {
    let started = Instant::now();
    let cfg = cfg.seeded(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trace = if record_trace { Trace::recording() } else { Trace::default() };
    let n = cost.inputs()[0].n();
    let out = search(cost, Circuit::new(n), &cfg.search, &cfg.optimizer, &cfg.limits, &mut rng, trace)?;
    let energy = out.best.cost;
    let error = energy - exact;
    Ok(VqeReport {
        trial,
        seed,
        energy,
        error,
        success: error <= T::lit(CHEMICAL_ACCURACY),
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

/// `trials` independent searches from the `k`-particle reference state,
/// seeds `base_seed + trial`. Errors are measured against the lowest energy
/// in the `k`-particle sector.
pub fn run_vqe<T: Real>(
    h: &PauliSum<T>,
    occupation: usize,
    cfg: &TaskConfig<T>,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<VqeReport<T>>> {
    let cost = VqeCost::with_occupation(h, occupation)?;
    let (exact, _) = ground_state_oracle(h, Some(occupation), base_seed)?;
    (0..trials).map(|t| run_vqe_trial(&cost, exact, cfg, t, trial_seed(base_seed, t), false)).collect()
}
