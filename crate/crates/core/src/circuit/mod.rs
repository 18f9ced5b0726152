//! Gate-list circuits with parametric and frozen entries.

mod io;
mod simplify;

use std::fmt;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::DENSE_QUBIT_CAP;
use crate::scalar::{Real, C};
use crate::state::{apply_gate_amps, apply_generator_amps, GateKind, GateOp, Statevector};

pub use io::CircuitFileError;

/// A gate plus whether its angle is a trainable parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateEntry<T> {
    pub gate: GateOp<T>,
    pub parametric: bool,
}

impl<T: Real> GateEntry<T> {
    pub fn parametric(gate: GateOp<T>) -> Self {
        Self { gate, parametric: true }
    }

    pub fn frozen(gate: GateOp<T>) -> Self {
        Self { gate, parametric: false }
    }
}

/// Ordered gate list over `n` qubits, applied left to right.
///
/// Parametric entries keep their current angle inline, so a circuit doubles
/// as its own parameter vector; [`Circuit::run`] takes an explicit vector
/// instead when one is supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    n: usize,
    gates: Vec<GateEntry<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_entries(n: usize, gates: Vec<GateEntry<T>>) -> Result<Self> {
        let mut c = Self::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, entry: GateEntry<T>) -> Result<()> {
        entry.gate.validate(self.n)?;
        if entry.parametric && !entry.gate.kind.is_rotation() {
            return Err(Error::Range(format!("{} cannot be parametric", entry.gate.kind.name())));
        }
        self.gates.push(entry);
        Ok(())
    }

    pub fn push_parametric(&mut self, gate: GateOp<T>) -> Result<()> {
        self.push(GateEntry::parametric(gate))
    }

    pub fn push_frozen(&mut self, gate: GateOp<T>) -> Result<()> {
        self.push(GateEntry::frozen(gate))
    }

    /// Appends all gates of `other` (same register size).
    pub fn extend(&mut self, other: &Circuit<T>) -> Result<()> {
        ensure_dim(self.n, other.n)?;
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[GateEntry<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.gate.is_two_qubit()).count()
    }

    pub fn param_count(&self) -> usize {
        self.gates.iter().filter(|g| g.parametric).count()
    }

    /// Current angles of the parametric entries, in gate order.
    pub fn params(&self) -> Vec<T> {
        self.gates.iter().filter(|g| g.parametric).map(|g| g.gate.theta).collect()
    }

    pub fn set_params(&mut self, theta: &[T]) -> Result<()> {
        ensure_dim(self.param_count(), theta.len())?;
        let mut it = theta.iter();
        for g in self.gates.iter_mut().filter(|g| g.parametric) {
            g.gate.theta = *it.next().expect("length checked");
        }
        Ok(())
    }

    pub fn with_params(&self, theta: &[T]) -> Result<Self> {
        let mut c = self.clone();
        c.set_params(theta)?;
        Ok(c)
    }

    /// Gate positions of the parametric entries.
    pub fn param_positions(&self) -> Vec<usize> {
        self.gates.iter().enumerate().filter(|(_, g)| g.parametric).map(|(i, _)| i).collect()
    }

    pub fn remove_gate(&mut self, index: usize) -> GateEntry<T> {
        self.gates.remove(index)
    }

    /// The inverse circuit (reversed order, negated angles).
    pub fn inverse(&self) -> Self {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|e| GateEntry { gate: e.gate.inverse(), parametric: e.parametric })
            .collect();
        Self { n: self.n, gates }
    }

    /// Runs the circuit with an explicit parameter vector.
    pub fn run(&self, theta: &[T], psi0: &Statevector<T>) -> Result<Statevector<T>> {
        self.with_params(theta)?.run_current(psi0)
    }

    /// Runs the circuit with its stored angles.
    pub fn run_current(&self, psi0: &Statevector<T>) -> Result<Statevector<T>> {
        ensure_dim(self.n, psi0.n())?;
        let mut psi = psi0.clone();
        self.apply_to_amps(psi.amps_mut(), 0);
        Ok(psi)
    }

    /// Applies gates `from..` to raw amplitudes.
    pub(crate) fn apply_to_amps(&self, amps: &mut [C<T>], from: usize) {
        for e in &self.gates[from..] {
            apply_gate_amps(amps, &e.gate);
        }
    }

    /// `|∂_i ψ⟩` for parameter `i`, with the circuit's stored angles replaced by `theta`.
    pub fn derivative_state(&self, theta: &[T], i: usize, psi0: &Statevector<T>) -> Result<Statevector<T>> {
        let c = self.with_params(theta)?;
        let positions = c.param_positions();
        let pos = *positions
            .get(i)
            .ok_or_else(|| Error::Range(format!("parameter {i} of {}", positions.len())))?;
        ensure_dim(self.n, psi0.n())?;
        let mut psi = psi0.clone();
        for e in &c.gates[..=pos] {
            apply_gate_amps(psi.amps_mut(), &e.gate);
        }
        apply_generator_amps(psi.amps_mut(), &c.gates[pos].gate);
        c.apply_to_amps(psi.amps_mut(), pos + 1);
        Ok(psi)
    }

    /// Final state together with every derivative state, sharing the forward pass.
    pub fn state_and_derivatives(&self, psi0: &Statevector<T>) -> Result<(Statevector<T>, Vec<Statevector<T>>)> {
        ensure_dim(self.n, psi0.n())?;
        let mut prefix = psi0.clone();
        let mut derivs = Vec::with_capacity(self.param_count());
        for (pos, e) in self.gates.iter().enumerate() {
            apply_gate_amps(prefix.amps_mut(), &e.gate);
            if e.parametric {
                let mut d = prefix.clone();
                apply_generator_amps(d.amps_mut(), &e.gate);
                self.apply_to_amps(d.amps_mut(), pos + 1);
                derivs.push(d);
            }
        }
        Ok((prefix, derivs))
    }

    /// Dense unitary built column by column; refuses registers above 12 qubits.
    pub fn dense_unitary(&self, theta: &[T]) -> Result<CMatrix<T>> {
        self.with_params(theta)?.dense_unitary_current()
    }

    pub fn dense_unitary_current(&self) -> Result<CMatrix<T>> {
        if self.n > DENSE_QUBIT_CAP {
            return Err(Error::Resource { what: "dense unitary", n: self.n, cap: DENSE_QUBIT_CAP });
        }
        let dim = 1usize << self.n;
        let mut cols = Vec::with_capacity(dim);
        for k in 0..dim {
            cols.push(self.run_current(&Statevector::basis(self.n, k)?)?.into_amps());
        }
        Ok(CMatrix::from_columns(dim, &cols))
    }

    /// Checks that every gate is a (controlled) rotation.
    pub fn is_rotation_only(&self) -> bool {
        self.gates.iter().all(|g| g.gate.kind.is_rotation())
    }

    /// Counts of gates per kind, for reports.
    pub fn kind_count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.gate.kind == kind).count()
    }
}

impl<T: Real> fmt::Display for Circuit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Circuit[{} qubits]:", self.n)?;
        for e in &self.gates {
            write!(f, " {}", e.gate)?;
        }
        Ok(())
    }
}
