//! Helpers shared by the integration tests. Dense references here are built
//! from textbook matrices, independently of the simulator's kernels.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qsynth_core::circuit::{Circuit, GateEntry};
use qsynth_core::fermion::{build_hamiltonian, jordan_wigner, IntegralTable};
use qsynth_core::state::{GateKind, GateOp};
use qsynth_core::{CMatrix64, PauliSum64};
use rand::Rng;

mod oracles;
#[allow(unused_imports)]
pub use oracles::*;

pub type M = DMatrix<Complex64>;

pub fn fixture(name: &str) -> PauliSum64 {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let table = IntegralTable::<f64>::read(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap();
    jordan_wigner(&build_hamiltonian(&table)).unwrap()
}

pub fn h2() -> PauliSum64 {
    fixture("h2.integrals")
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `cos(θ/2) I − i sin(θ/2) σ` written out per axis.
pub fn single_qubit(kind: GateKind, theta: f64) -> [[Complex64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match kind {
        GateKind::Rx => [[cx(c, 0.0), cx(0.0, -s)], [cx(0.0, -s), cx(c, 0.0)]],
        GateKind::Ry => [[cx(c, 0.0), cx(-s, 0.0)], [cx(s, 0.0), cx(c, 0.0)]],
        GateKind::Rz => [[cx(c, -s), cx(0.0, 0.0)], [cx(0.0, 0.0), cx(c, s)]],
        GateKind::H => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            [[cx(r, 0.0), cx(r, 0.0)], [cx(r, 0.0), cx(-r, 0.0)]]
        }
        GateKind::Cnot => [[cx(0.0, 0.0), cx(1.0, 0.0)], [cx(1.0, 0.0), cx(0.0, 0.0)]],
    }
}

/// Full `2^n` matrix of one gate, entry by entry over basis labels.
pub fn gate_matrix(n: usize, g: &GateOp<f64>) -> M {
    let dim = 1 << n;
    let u = single_qubit(g.kind, g.theta);
    let t = g.target;
    M::from_fn(dim, dim, |row, col| {
        let active = g.control.is_none_or(|c| col >> c & 1 == 1);
        let rest_equal = (row & !(1 << t)) == (col & !(1 << t));
        if !rest_equal {
            return cx(0.0, 0.0);
        }
        if !active {
            return if row == col { cx(1.0, 0.0) } else { cx(0.0, 0.0) };
        }
        u[row >> t & 1][col >> t & 1]
    })
}

pub fn circuit_matrix(c: &Circuit<f64>) -> M {
    let dim = 1 << c.n();
    let mut u = M::identity(dim, dim);
    for e in c.gates() {
        u = gate_matrix(c.n(), &e.gate) * u;
    }
    u
}

pub fn to_nalgebra(m: &CMatrix64) -> M {
    M::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_rotation<R: Rng>(n: usize, rng: &mut R) -> GateOp<f64> {
    let kind = GateKind::ROTATIONS[rng.gen_range(0..3)];
    let target = rng.gen_range(0..n);
    let theta = rng.gen_range(-7.0..7.0);
    if n > 1 && rng.gen_bool(0.4) {
        let mut control = rng.gen_range(0..n - 1);
        if control >= target {
            control += 1;
        }
        GateOp::controlled(kind, control, target, theta)
    } else {
        GateOp::rotation(kind, target, theta)
    }
}

/// Random parametric circuit over the variational pool.
pub fn random_parametric<R: Rng>(n: usize, len: usize, rng: &mut R) -> Circuit<f64> {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        c.push_parametric(random_rotation(n, rng)).unwrap();
    }
    c
}

/// Random circuit rich in cancellation opportunities: repeated gates,
/// negated angles, Hadamard and CNOT pairs, multiples of π.
pub fn random_mixed<R: Rng>(n: usize, len: usize, rng: &mut R) -> Circuit<f64> {
    let mut gates: Vec<GateEntry<f64>> = Vec::new();
    while gates.len() < len {
        let pick = rng.gen_range(0..10);
        let entry = match pick {
            0..=1 if !gates.is_empty() => {
                let mut g = *gates.last().unwrap();
                if g.gate.kind.is_rotation() {
                    g.gate.theta = if rng.gen_bool(0.5) { -g.gate.theta } else { rng.gen_range(-7.0..7.0) };
                }
                g
            }
            2 => GateEntry::frozen(GateOp::h(rng.gen_range(0..n))),
            3 if n > 1 => {
                let c = rng.gen_range(0..n);
                let t = (c + rng.gen_range(1..n)) % n;
                GateEntry::frozen(GateOp::cnot(c, t))
            }
            4 => {
                let mut g = random_rotation(n, rng);
                g.theta = std::f64::consts::PI * rng.gen_range(-4..=4) as f64;
                GateEntry::parametric(g)
            }
            _ => GateEntry { gate: random_rotation(n, rng), parametric: rng.gen_bool(0.7) },
        };
        gates.push(entry);
    }
    Circuit::from_entries(n, gates).unwrap()
}
