//! Adaptive ansatz growth: random gate blocks, candidate selection and pruning.

use rand::Rng;

use crate::circuit::{Circuit, GateEntry};
use crate::error::{Error, Result};
use crate::optimizer::{converged, cost_value, optimize, CostFunction, Event, OptimizerConfig, Trace};
use crate::scalar::Real;
use crate::state::{GateKind, GateOp};

/// Hyperparameters of the structural search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub n_candidates: usize,
    pub max_insert: usize,
    pub p_two_qubit: f64,
    pub delete_tol_angle: f64,
    pub delete_cost_budget: f64,
    pub reopt_iters: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_candidates: 6,
            max_insert: 3,
            p_two_qubit: 0.5,
            delete_tol_angle: 1e-2,
            delete_cost_budget: 1e-5,
            reopt_iters: 30,
            seed: 0,
        }
    }
}

/// Largest block size the stall response will grow to.
pub const MAX_INSERT_CAP: usize = 8;

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_two_qubit) {
            return Err(Error::Config(format!("p_two_qubit {} outside [0, 1]", self.p_two_qubit)));
        }
        if self.n_candidates == 0 || self.max_insert == 0 {
            return Err(Error::Config("n_candidates and max_insert must be at least 1".into()));
        }
        if self.delete_tol_angle < 0.0 || self.delete_cost_budget < 0.0 {
            return Err(Error::Config("deletion tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

/// Draws `1..=max_insert` parametric rotations, each controlled with
/// probability `p_two_qubit`, angles uniform in `(-π, π]`.
pub fn sample_gate_block<T: Real, R: Rng + ?Sized>(n: usize, cfg: &SearchConfig, rng: &mut R) -> Result<Vec<GateEntry<T>>> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Config("cannot sample gates on zero qubits".into()));
    }
    if n == 1 && cfg.p_two_qubit >= 1.0 {
        return Err(Error::Config("controlled gates need at least two qubits".into()));
    }
    let len = rng.gen_range(1..=cfg.max_insert);
    let mut block = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = GateKind::ROTATIONS[rng.gen_range(0..3)];
        let controlled = n > 1 && rng.gen_bool(cfg.p_two_qubit);
        let target = rng.gen_range(0..n);
        let theta = T::PI() - T::lit(2.0) * T::PI() * T::lit(rng.gen::<f64>());
        let gate = if controlled {
            let mut control = rng.gen_range(0..n - 1);
            if control >= target {
                control += 1;
            }
            GateOp::controlled(kind, control, target, theta)
        } else {
            GateOp::rotation(kind, target, theta)
        };
        block.push(GateEntry::parametric(gate));
    }
    Ok(block)
}

/// A circuit together with its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Scored<T> {
    pub circuit: Circuit<T>,
    pub cost: T,
}

/// Result of one growth round.
#[derive(Clone, Debug, PartialEq)]
pub struct Round<T> {
    pub best: Scored<T>,
    pub improved: bool,
}

/// Extends the circuit with `n_candidates` random blocks, trains each briefly,
/// keeps the cheapest (ties by index) and trains it for up to `polish_iters`.
/// Falls back to `current` when no candidate beats it.
#[allow(clippy::too_many_arguments)]
pub fn evolve_round<T: Real, F: CostFunction<T> + ?Sized, R: Rng + ?Sized>(
    current: &Scored<T>,
    f: &F,
    cfg: &SearchConfig,
    opt: &OptimizerConfig<T>,
    polish_iters: usize,
    rng: &mut R,
    trace: &mut Trace,
) -> Result<Round<T>> {
    let mut best: Option<Scored<T>> = None;
    for _ in 0..cfg.n_candidates {
        let mut cand = current.circuit.clone();
        for g in sample_gate_block::<T, R>(cand.n(), cfg, rng)? {
            cand.push(g)?;
        }
        let res = optimize(f, &mut cand, opt, cfg.reopt_iters, trace)?;
        trace.push(&cand, res.cost, T::zero(), T::zero(), Event::Insert);
        if best.as_ref().is_none_or(|b| res.cost < b.cost) {
            best = Some(Scored { circuit: cand, cost: res.cost });
        }
    }
    let mut best = best.expect("at least one candidate");
    let res = optimize(f, &mut best.circuit, opt, polish_iters, trace)?;
    best.cost = res.cost;
    if best.cost < current.cost {
        Ok(Round { best, improved: true })
    } else {
        trace.push(&current.circuit, current.cost, T::zero(), T::zero(), Event::Stall);
        Ok(Round { best: current.clone(), improved: false })
    }
}

/// Whether a rotation acts as the identity up to a global phase: angles
/// near a multiple of 2π for plain rotations, of 4π for controlled ones.
fn near_identity<T: Real>(g: &GateOp<T>, tol: T) -> bool {
    let period = if g.control.is_some() { T::lit(4.0) * T::PI() } else { T::lit(2.0) * T::PI() };
    let r = g.theta - (g.theta / period).floor() * period;
    r.min(period - r) <= tol
}

fn removed<T: Real>(c: &Circuit<T>, index: usize) -> Circuit<T> {
    let mut out = c.clone();
    out.remove_gate(index);
    out
}

/// Prunes gates while staying within `delete_cost_budget` of the input cost.
///
/// Adjacent mergeable rotations are fused first (see [`Circuit::simplify`]).
/// Pass one drops near-identity rotations outright. Pass two ranks the
/// remaining gates by how much zeroing each one costs, cheapest first, and
/// tries each removal followed by a short retraining.
pub fn judicious_delete<T: Real, F: CostFunction<T> + ?Sized>(
    current: &Scored<T>,
    f: &F,
    cfg: &SearchConfig,
    opt: &OptimizerConfig<T>,
    trace: &mut Trace,
) -> Result<Scored<T>> {
    let ceiling = current.cost + T::lit(cfg.delete_cost_budget);
    let tol = T::lit(cfg.delete_tol_angle);
    let mut best = current.clone();
    loop {
        let merged = best.circuit.simplify();
        if merged.len() < best.circuit.len() {
            let cost = cost_value(f, &merged)?;
            if cost <= ceiling {
                best = Scored { circuit: merged, cost };
            }
        }
        let before = best.circuit.len();
        let mut i = 0;
        while i < best.circuit.len() {
            let g = best.circuit.gates()[i];
            if g.parametric && near_identity(&g.gate, tol) {
                let trial = removed(&best.circuit, i);
                let cost = cost_value(f, &trial)?;
                if cost < ceiling {
                    best = Scored { circuit: trial, cost };
                    trace.push(&best.circuit, cost, T::zero(), T::zero(), Event::Delete);
                    continue;
                }
            }
            i += 1;
        }

        let mut ranking = Vec::new();
        for (i, g) in best.circuit.gates().iter().enumerate() {
            if !g.parametric {
                continue;
            }
            let mut zeroed = best.circuit.clone();
            let mut entries = zeroed.gates().to_vec();
            entries[i].gate.theta = T::zero();
            zeroed = Circuit::from_entries(zeroed.n(), entries)?;
            ranking.push((cost_value(f, &zeroed)? - best.cost, i));
        }
        ranking.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        let mut alive: Vec<usize> = (0..best.circuit.len()).collect();
        for (_, id) in ranking {
            let pos = alive.iter().position(|&k| k == id).expect("ranked gate is alive");
            let mut trial = removed(&best.circuit, pos);
            let res = optimize(f, &mut trial, opt, cfg.reopt_iters, trace)?;
            if res.cost <= ceiling {
                best = Scored { circuit: trial, cost: res.cost };
                alive.remove(pos);
                trace.push(&best.circuit, res.cost, T::zero(), T::zero(), Event::Delete);
            }
        }
        if best.circuit.len() == before {
            return Ok(best);
        }
    }
}

/// Tries removing two parametric gates that share a qubit at once, each
/// attempt followed by a short retraining, and keeps any removal that stays
/// within `delete_cost_budget`. Pairs that only cancel together survive
/// single-gate deletion.
pub fn prune_pairs<T: Real, F: CostFunction<T> + ?Sized>(
    current: &Scored<T>,
    f: &F,
    cfg: &SearchConfig,
    opt: &OptimizerConfig<T>,
    trace: &mut Trace,
) -> Result<Scored<T>> {
    let ceiling = current.cost + T::lit(cfg.delete_cost_budget);
    let mut best = current.clone();
    'scan: loop {
        let gates = best.circuit.gates().to_vec();
        for i in 0..gates.len() {
            for j in i + 1..gates.len() {
                if !(gates[i].parametric && gates[j].parametric) || !gates[j].gate.qubits().any(|q| gates[i].gate.touches(q)) {
                    continue;
                }
                let mut trial = best.circuit.clone();
                trial.remove_gate(j);
                trial.remove_gate(i);
                let res = optimize(f, &mut trial, opt, cfg.reopt_iters, trace)?;
                if res.cost <= ceiling {
                    best = Scored { circuit: trial, cost: res.cost };
                    trace.push(&best.circuit, res.cost, T::zero(), T::zero(), Event::Delete);
                    continue 'scan;
                }
            }
        }
        return Ok(best);
    }
}

/// Budgets and stopping rules of the outer growth loop.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchLimits<T> {
    pub max_rounds: usize,
    /// Stop as soon as the cost drops to this value.
    pub cost_floor: T,
    /// Consecutive rounds with improvement below `delta_conv` before stopping.
    pub round_patience: usize,
}

impl<T: Real> Default for SearchLimits<T> {
    fn default() -> Self {
        Self { max_rounds: 200, cost_floor: T::neg_infinity(), round_patience: 10 }
    }
}

/// Outcome of [`search`].
#[derive(Clone, Debug)]
pub struct SearchOutcome<T> {
    pub best: Scored<T>,
    pub rounds: usize,
    pub converged: bool,
    pub trace: Trace,
}

/// Alternates growth rounds and pruning from `start` until the cost
/// converges, reaches the floor, or `opt.max_iters` gradient evaluations
/// are spent. A stalled round doubles the block size, up to
/// [`MAX_INSERT_CAP`]. The result goes through [`prune_pairs`] last.
pub fn search<T: Real, F: CostFunction<T> + ?Sized, R: Rng + ?Sized>(
    f: &F,
    start: Circuit<T>,
    cfg: &SearchConfig,
    opt: &OptimizerConfig<T>,
    limits: &SearchLimits<T>,
    rng: &mut R,
    mut trace: Trace,
) -> Result<SearchOutcome<T>> {
    cfg.validate()?;
    opt.validate()?;
    let mut cfg = cfg.clone();
    let cost = cost_value(f, &start)?;
    let mut best = Scored { circuit: start, cost };
    let mut history = vec![best.cost];
    let mut rounds = 0;
    let mut done = best.cost <= limits.cost_floor;
    while !done && rounds < limits.max_rounds && trace.evaluations < opt.max_iters {
        rounds += 1;
        let polish = opt.max_iters.saturating_sub(trace.evaluations);
        let round = evolve_round(&best, f, &cfg, opt, polish, rng, &mut trace)?;
        if !round.improved {
            cfg.max_insert = (cfg.max_insert * 2).min(MAX_INSERT_CAP.max(cfg.max_insert));
        }
        // a stalled round hands back the already pruned circuit
        if round.improved {
            best = judicious_delete(&round.best, f, &cfg, opt, &mut trace)?;
        }
        history.push(best.cost);
        done = best.cost <= limits.cost_floor || converged(&history, opt.delta_conv, limits.round_patience);
    }
    let pruned = prune_pairs(&best, f, &cfg, opt, &mut trace)?;
    if pruned.circuit.len() < best.circuit.len() {
        best = judicious_delete(&pruned, f, &cfg, opt, &mut trace)?;
    }
    Ok(SearchOutcome { best, rounds, converged: done, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn block_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = SearchConfig { p_two_qubit: 0.0, max_insert: 1, ..SearchConfig::default() };
        for _ in 0..100 {
            let b = sample_gate_block::<f64, _>(3, &cfg, &mut rng).unwrap();
            assert_eq!(b.len(), 1);
            assert!(b[0].gate.control.is_none());
            assert!(b[0].parametric);
        }
    }

    #[test]
    fn single_qubit_cannot_host_controlled_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = SearchConfig { p_two_qubit: 1.0, ..SearchConfig::default() };
        assert!(matches!(sample_gate_block::<f64, _>(1, &cfg, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn identity_detection_respects_control_period() {
        let tol = 1e-2;
        assert!(near_identity(&GateOp::rx(0, 1e-9), tol));
        assert!(near_identity(&GateOp::rx(0, 2.0 * std::f64::consts::PI - 1e-3), tol));
        assert!(!near_identity(&GateOp::controlled(GateKind::Rx, 1, 0, 2.0 * std::f64::consts::PI), tol));
        assert!(near_identity(&GateOp::controlled(GateKind::Rx, 1, 0, -4.0 * std::f64::consts::PI), tol));
    }
}
