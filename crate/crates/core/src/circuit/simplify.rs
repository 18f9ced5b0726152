//! Commutation-free peephole simplification.
//!
//! Two gates form a candidate pair when the second is the first later gate
//! touching any qubit of the first. Rules: CNOT·CNOT and H·H cancel, equal
//! rotations merge by angle addition, and rotations that are the identity
//! (angle ≡ 0 mod 4π) vanish.

use super::{Circuit, GateEntry};
use crate::scalar::Real;
use crate::state::GateKind;

const ZERO_ANGLE_TOL: f64 = 1e-12;

/// Maps an angle into `(-2π, 2π]` (rotations are 4π-periodic).
pub(crate) fn normalize_angle<T: Real>(theta: T) -> T {
    let four_pi = T::lit(4.0) * T::PI();
    let two_pi = T::lit(2.0) * T::PI();
    let mut a = theta % four_pi;
    if a > two_pi {
        a -= four_pi;
    } else if a <= -two_pi {
        a += four_pi;
    }
    a
}

fn is_identity_rotation<T: Real>(e: &GateEntry<T>) -> bool {
    e.gate.kind.is_rotation() && normalize_angle(e.gate.theta).abs() <= T::lit(ZERO_ANGLE_TOL)
}

enum Merge<T> {
    Cancel,
    Replace(GateEntry<T>),
}

fn try_merge<T: Real>(a: &GateEntry<T>, b: &GateEntry<T>) -> Option<Merge<T>> {
    let (ga, gb) = (&a.gate, &b.gate);
    if ga.kind != gb.kind || ga.target != gb.target || ga.control != gb.control {
        return None;
    }
    match ga.kind {
        GateKind::Cnot | GateKind::H => Some(Merge::Cancel),
        _ => {
            let mut merged = *a;
            merged.gate.theta = normalize_angle(ga.theta + gb.theta);
            merged.parametric = a.parametric || b.parametric;
            if is_identity_rotation(&merged) {
                Some(Merge::Cancel)
            } else {
                Some(Merge::Replace(merged))
            }
        }
    }
}

impl<T: Real> Circuit<T> {
    /// Applies the peephole rules until a fixed point; never reorders gates
    /// past one another.
    pub fn simplify(&self) -> Circuit<T> {
        let mut gates: Vec<Option<GateEntry<T>>> = self.gates.iter().copied().map(Some).collect();
        loop {
            let mut changed = false;
            for i in 0..gates.len() {
                let Some(a) = gates[i] else { continue };
                if is_identity_rotation(&a) {
                    gates[i] = None;
                    changed = true;
                    continue;
                }
                let next = (i + 1..gates.len())
                    .find(|&j| gates[j].is_some_and(|b| a.gate.qubits().any(|q| b.gate.touches(q))));
                let Some(j) = next else { continue };
                let b = gates[j].expect("found above");
                match try_merge(&a, &b) {
                    Some(Merge::Cancel) => {
                        gates[i] = None;
                        gates[j] = None;
                        changed = true;
                    }
                    Some(Merge::Replace(m)) => {
                        gates[i] = Some(m);
                        gates[j] = None;
                        changed = true;
                    }
                    None => {}
                }
            }
            if !changed {
                break;
            }
        }
        Circuit { n: self.n, gates: gates.into_iter().flatten().collect() }
    }
}
