//! End-to-end workloads: ground-state VQE and propagator compilation, with
//! the metrics and exact references they are judged by.

mod compile;
mod exact;
mod metrics;
mod subspace;
mod vqe;

pub use compile::{compile_cost, run_compile, run_compile_trial, CompileCost, CompileMode, CompileReport};
pub use exact::{exact_propagator, ground_state_oracle, CompileTarget, TargetSource, PROPAGATOR_QUBIT_CAP};
pub use metrics::{distance, min_over_phase, non_triviality, schmidt_measure};
pub use subspace::{entangled_probe, reduced_density_matrix, subspace_basis, SubspaceSpec};
pub use vqe::{run_vqe, run_vqe_trial, VqeCost, VqeReport, CHEMICAL_ACCURACY};

use crate::optimizer::OptimizerConfig;
use crate::scalar::Real;
use crate::search::{SearchConfig, SearchLimits};

/// Everything a search-driven task needs besides its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskConfig<T> {
    pub search: SearchConfig,
    pub optimizer: OptimizerConfig<T>,
    pub limits: SearchLimits<T>,
}

impl<T: Real> TaskConfig<T> {
    /// Ground-state defaults: `δ = 1e-6`, no cost floor, 60 stalled rounds
    /// before giving up.
    pub fn vqe() -> Self {
        Self {
            search: SearchConfig::default(),
            optimizer: OptimizerConfig { delta_conv: T::lit(1e-6), ..OptimizerConfig::default() },
            limits: SearchLimits { round_patience: 60, ..SearchLimits::default() },
        }
    }

    /// Compilation defaults: `δ = 1e-7`, a cost floor of 1e-9 and a deletion
    /// budget of 1e-8, small enough to keep the distance below 1e-3. Blocks of
    /// up to 20 gates, 100 re-optimisation steps per deletion and a patience
    /// of 400 rounds let trials climb off the plateaus of the unitary cost.
    pub fn compile() -> Self {
        Self {
            search: SearchConfig { delete_cost_budget: 1e-8, max_insert: 20, reopt_iters: 100, ..SearchConfig::default() },
            optimizer: OptimizerConfig { delta_conv: T::lit(1e-7), max_iters: 40_000, ..OptimizerConfig::default() },
            limits: SearchLimits { cost_floor: T::lit(1e-9), round_patience: 400, max_rounds: 100_000 },
        }
    }

    /// Copy whose seeds are set to `seed`.
    pub fn seeded(&self, seed: u64) -> Self {
        let mut cfg = self.clone();
        cfg.search.seed = seed;
        cfg.optimizer.seed = seed;
        cfg
    }
}

/// Seed of trial `index` under base seed `base`.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}
