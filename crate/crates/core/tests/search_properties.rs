mod common;

use common::*;
use qsynth_core::circuit::{Circuit, GateEntry};
use qsynth_core::optimizer::{cost_value, optimize, OptimizerConfig, Trace};
use qsynth_core::pauli::{PauliString, PauliSum};
use qsynth_core::search::{evolve_round, judicious_delete, sample_gate_block, search, Scored, SearchConfig, SearchLimits};
use qsynth_core::state::{GateKind, GateOp, Statevector};
use qsynth_core::tasks::{
    ground_state_oracle, run_vqe_trial, CompileCost, CompileTarget, SubspaceSpec, TargetSource, TaskConfig, VqeCost,
    CHEMICAL_ACCURACY,
};
use qsynth_core::Circuit64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_in_pool(c: &Circuit64) {
    for e in c.gates() {
        assert!(e.parametric);
        assert!(GateKind::ROTATIONS.contains(&e.gate.kind));
        assert!(e.gate.target < c.n());
        if let Some(ctrl) = e.gate.control {
            assert!(ctrl < c.n() && ctrl != e.gate.target);
        }
    }
}

#[test]
fn controlled_fraction_concentrates() {
    let cfg = SearchConfig { max_insert: 1, ..SearchConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut controlled = 0;
    for _ in 0..10_000 {
        let block = sample_gate_block::<f64, _>(4, &cfg, &mut rng).unwrap();
        controlled += block.iter().filter(|g| g.gate.control.is_some()).count();
    }
    let frac = controlled as f64 / 10_000.0;
    assert!((0.48..=0.52).contains(&frac), "{frac}");
}

#[test]
fn sampled_blocks_stay_in_the_pool() {
    let cfg = SearchConfig { max_insert: 5, ..SearchConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let mut lengths = [0usize; 6];
    for _ in 0..2000 {
        let block = sample_gate_block::<f64, _>(3, &cfg, &mut rng).unwrap();
        lengths[block.len()] += 1;
        for g in &block {
            assert!(g.gate.theta > -std::f64::consts::PI && g.gate.theta <= std::f64::consts::PI);
        }
        assert_in_pool(&Circuit::from_entries(3, block).unwrap());
    }
    assert_eq!(lengths[0], 0);
    assert!(lengths[1..].iter().all(|&k| k > 300), "{lengths:?}");
    let one_qubit = SearchConfig { p_two_qubit: 1.0, ..SearchConfig::default() };
    assert!(sample_gate_block::<f64, _>(1, &one_qubit, &mut rng).is_err());
}

#[test]
fn vqe_trials_are_deterministic_and_variational() {
    let h = h2();
    let cost = VqeCost::with_occupation(&h, 2).unwrap();
    let (exact, _) = ground_state_oracle(&h, Some(2), 0).unwrap();
    let cfg = TaskConfig::vqe();
    for seed in 0..3 {
        let a = run_vqe_trial(&cost, exact, &cfg, 0, seed, true).unwrap();
        let b = run_vqe_trial(&cost, exact, &cfg, 0, seed, true).unwrap();
        assert_eq!(a.circuit, b.circuit);
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!((a.iterations, a.rounds), (b.iterations, b.rounds));
        assert_eq!(a.trace.rows.len(), b.trace.rows.len());
        assert!(a.energy >= exact - 1e-8);
        assert!(a.trace.rows.iter().all(|r| r.cost >= exact - 1e-8));
        assert_in_pool(&a.circuit);
    }
}

#[test]
fn round_never_raises_the_cost() {
    let h = PauliSum::from_terms(1, vec![(-1.0, PauliString::parse(1, "Z0").unwrap())]).unwrap();
    let f = VqeCost::new(&h, Statevector::zero_state(1).unwrap()).unwrap();
    let start = Scored { circuit: Circuit::new(1), cost: -1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let round = evolve_round(&start, &f, &SearchConfig::default(), &OptimizerConfig::default(), 100, &mut rng, &mut Trace::default())
        .unwrap();
    assert!(round.best.cost <= -1.0 + 1e-12);

    let h = h2();
    let f = VqeCost::with_occupation(&h, 2).unwrap();
    let mut current = Scored { circuit: Circuit::new(4), cost: cost_value(&f, &Circuit::new(4)).unwrap() };
    for _ in 0..4 {
        let round =
            evolve_round(&current, &f, &SearchConfig::default(), &OptimizerConfig::default(), 200, &mut rng, &mut Trace::default())
                .unwrap();
        assert!(round.best.cost <= current.cost);
        current = round.best;
    }
}

#[test]
fn some_seed_beats_hartree_fock_in_three_rounds() {
    let h = h2();
    let f = VqeCost::with_occupation(&h, 2).unwrap();
    let hf = Statevector::basis(4, 0b0011).unwrap().expectation(&h).unwrap();
    let mut below = Vec::new();
    for seed in 0..10 {
        let cfg = TaskConfig::<f64>::vqe().seeded(seed);
        let limits = SearchLimits { max_rounds: 3, ..cfg.limits.clone() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = search(&f, Circuit::new(4), &cfg.search, &cfg.optimizer, &limits, &mut rng, Trace::default()).unwrap();
        assert!(out.rounds <= 3);
        assert!(out.best.cost <= hf + 1e-12);
        below.push(out.best.cost < hf - 1e-6);
    }
    assert!(below.iter().any(|&b| b), "{below:?}");
}

#[test]
fn single_rotation_target_compiles_in_two_rounds() {
    let rz = Circuit::from_entries(1, vec![GateEntry::frozen(GateOp::rz(0, 0.7))]).unwrap();
    let target = CompileTarget { u: rz.dense_unitary_current().unwrap(), dt: 0.0, source: TargetSource::ExactExpm };
    let f = CompileCost::new(&target, &SubspaceSpec::full(1).unwrap()).unwrap();
    let cfg = TaskConfig::<f64>::compile();
    let limits = SearchLimits { max_rounds: 2, cost_floor: 1e-7, ..cfg.limits.clone() };
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = search(&f, Circuit::new(1), &cfg.search, &cfg.optimizer, &limits, &mut rng, Trace::default()).unwrap();
        assert!(out.rounds <= 2);
        assert!(out.best.cost < 1e-6, "seed {seed}: {}", out.best.cost);
    }
}

#[test]
fn deletion_examples() {
    let h = h2();
    let f = VqeCost::with_occupation(&h, 2).unwrap();
    let cfg = SearchConfig::default();
    let opt = OptimizerConfig::default();

    // a near-zero rotation goes
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let mut c = random_parametric(4, 4, &mut rng);
    c.push_parametric(GateOp::rx(0, 1e-9)).unwrap();
    let before = cost_value(&f, &c).unwrap();
    let out = judicious_delete(&Scored { circuit: c.clone(), cost: before }, &f, &cfg, &opt, &mut Trace::default()).unwrap();
    assert!(out.circuit.len() < c.len());
    assert!(!out.circuit.gates().iter().any(|g| g.gate.theta.abs() < 1e-6));
    assert!(out.cost <= before + cfg.delete_cost_budget);

    // a cancelling pair goes entirely
    let pair = Circuit::from_entries(4, vec![GateEntry::parametric(GateOp::rx(0, 0.8)), GateEntry::parametric(GateOp::rx(0, -0.8))])
        .unwrap();
    let cost = cost_value(&f, &pair).unwrap();
    let out = judicious_delete(&Scored { circuit: pair, cost }, &f, &cfg, &opt, &mut Trace::default()).unwrap();
    assert!(out.circuit.is_empty());
}

#[test]
fn deletion_respects_its_budget() {
    let h = h2();
    let f = VqeCost::with_occupation(&h, 2).unwrap();
    let cfg = SearchConfig { reopt_iters: 10, ..SearchConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..10 {
        let c = random_parametric(4, 10, &mut rng);
        let cost = cost_value(&f, &c).unwrap();
        let out = judicious_delete(&Scored { circuit: c.clone(), cost }, &f, &cfg, &OptimizerConfig::default(), &mut Trace::default())
            .unwrap();
        assert!(out.circuit.len() <= c.len());
        assert!(out.cost <= cost + cfg.delete_cost_budget);
        assert_eq!(cost_value(&f, &out.circuit).unwrap(), out.cost);
    }
}

#[test]
fn hundred_gate_circuit_prunes_to_a_handful() {
    let h = h2();
    let f = VqeCost::with_occupation(&h, 2).unwrap();
    let (exact, _) = ground_state_oracle(&h, Some(2), 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    let mut c = random_parametric(4, 100, &mut rng);
    let opt = OptimizerConfig { delta_conv: 1e-9, patience: 5, ..OptimizerConfig::default() };
    let trained = optimize(&f, &mut c, &opt, 400, &mut Trace::default()).unwrap();
    assert!(trained.cost - exact <= CHEMICAL_ACCURACY, "training reached {}", trained.cost - exact);
    let out = judicious_delete(&Scored { circuit: c, cost: trained.cost }, &f, &SearchConfig::default(), &opt, &mut Trace::default())
        .unwrap();
    assert!(out.circuit.len() <= 15, "{} gates left", out.circuit.len());
    assert!(out.cost - exact <= CHEMICAL_ACCURACY);
}
