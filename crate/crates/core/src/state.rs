//! Dense statevector simulation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::pauli::{PauliOperator, PauliSum, IMAG_TOLERANCE};
use crate::scalar::{c, cone, czero, Real, C};

/// Statevectors are limited to this many qubits.
pub const MAX_STATE_QUBITS: usize = 30;

/// Rotation axis / gate letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateKind {
    pub const ROTATIONS: [GateKind; 3] = [GateKind::Rx, GateKind::Ry, GateKind::Rz];

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "Rx",
            GateKind::Ry => "Ry",
            GateKind::Rz => "Rz",
            GateKind::H => "H",
            GateKind::Cnot => "CNOT",
        }
    }
}

/// One gate: a rotation `exp(-iθσ/2)` (optionally controlled), a Hadamard or a CNOT.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateOp<T> {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    /// Rotation angle in radians; ignored by `H` and `CNOT`.
    pub theta: T,
}

impl<T: Real> GateOp<T> {
    pub fn rotation(kind: GateKind, target: usize, theta: T) -> Self {
        debug_assert!(kind.is_rotation());
        Self { kind, target, control: None, theta }
    }

    pub fn controlled(kind: GateKind, control: usize, target: usize, theta: T) -> Self {
        debug_assert!(kind.is_rotation());
        Self { kind, target, control: Some(control), theta }
    }

    pub fn rx(target: usize, theta: T) -> Self {
        Self::rotation(GateKind::Rx, target, theta)
    }

    pub fn ry(target: usize, theta: T) -> Self {
        Self::rotation(GateKind::Ry, target, theta)
    }

    pub fn rz(target: usize, theta: T) -> Self {
        Self::rotation(GateKind::Rz, target, theta)
    }

    pub fn h(target: usize) -> Self {
        Self { kind: GateKind::H, target, control: None, theta: T::zero() }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, target, control: Some(control), theta: T::zero() }
    }

    /// Checks indices against a register size.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.target >= n {
            return Err(Error::Range(format!("target {} outside {n}-qubit register", self.target)));
        }
        if let Some(ctrl) = self.control {
            if ctrl >= n {
                return Err(Error::Range(format!("control {ctrl} outside {n}-qubit register")));
            }
            if ctrl == self.target {
                return Err(Error::Range(format!("control equals target ({ctrl})")));
            }
        }
        if self.kind == GateKind::Cnot && self.control.is_none() {
            return Err(Error::Range("CNOT needs a control".into()));
        }
        if self.kind == GateKind::H && self.control.is_some() {
            return Err(Error::Range("controlled H is not in the gate vocabulary".into()));
        }
        Ok(())
    }

    /// Touched qubits (target first).
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.target).chain(self.control)
    }

    pub fn touches(&self, q: usize) -> bool {
        self.target == q || self.control == Some(q)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.control.is_some()
    }

    /// 2×2 matrix applied to the target (conditioned on the control).
    pub fn matrix(&self) -> [[C<T>; 2]; 2] {
        let half = self.theta / T::lit(2.0);
        let (cs, sn) = (half.cos(), half.sin());
        let z = T::zero();
        match self.kind {
            GateKind::Rx => [[c(cs, z), c(z, -sn)], [c(z, -sn), c(cs, z)]],
            GateKind::Ry => [[c(cs, z), c(-sn, z)], [c(sn, z), c(cs, z)]],
            GateKind::Rz => [[c(cs, -sn), czero()], [czero(), c(cs, sn)]],
            GateKind::H => {
                let r = T::FRAC_1_SQRT_2();
                [[c(r, z), c(r, z)], [c(r, z), c(-r, z)]]
            }
            GateKind::Cnot => [[czero(), cone()], [cone(), czero()]],
        }
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Self {
        let mut g = *self;
        if g.kind.is_rotation() {
            g.theta = -g.theta;
        }
        g
    }
}

impl<T: Real> fmt::Display for GateOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.control) {
            (GateKind::Cnot, Some(ctrl)) => write!(f, "CNOT[{ctrl}->{}]", self.target),
            (GateKind::H, _) => write!(f, "H{}", self.target),
            (k, Some(ctrl)) => write!(f, "C{ctrl}[{}{}({:.4})]", k.name(), self.target, self.theta),
            (k, None) => write!(f, "{}{}({:.4})", k.name(), self.target, self.theta),
        }
    }
}

/// Amplitudes over `2^n` computational basis states, qubit 0 least significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector<T> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> Statevector<T> {
    /// `|label⟩`.
    pub fn basis(n: usize, label: usize) -> Result<Self> {
        if n > MAX_STATE_QUBITS {
            return Err(Error::Resource { what: "statevector", n, cap: MAX_STATE_QUBITS });
        }
        let dim = 1usize << n;
        if label >= dim {
            return Err(Error::Range(format!("basis label {label} outside 0..{dim}")));
        }
        let mut amps = vec![czero(); dim];
        amps[label] = cone();
        Ok(Self { n, amps })
    }

    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Wraps raw amplitudes; length must be `2^n`. Norm is not enforced.
    pub fn from_amps(n: usize, amps: Vec<C<T>>) -> Result<Self> {
        if n > MAX_STATE_QUBITS {
            return Err(Error::Resource { what: "statevector", n, cap: MAX_STATE_QUBITS });
        }
        ensure_dim(1usize << n, amps.len())?;
        Ok(Self { n, amps })
    }

    pub(crate) fn from_amps_unchecked(n: usize, amps: Vec<C<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n);
        Self { n, amps }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amps(&self) -> &[C<T>] {
        &self.amps
    }

    #[inline]
    pub fn amps_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let nrm = self.norm();
        if nrm > T::zero() {
            self.amps.iter_mut().for_each(|a| *a = *a / nrm);
        }
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn scale(&mut self, s: C<T>) {
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    /// Returns a new state with the gate applied.
    pub fn apply(&self, gate: &GateOp<T>) -> Result<Self> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &GateOp<T>) -> Result<()> {
        gate.validate(self.n)?;
        apply_gate_amps(&mut self.amps, gate);
        Ok(())
    }

    /// `⟨psi|H|psi⟩` for a normalised state.
    pub fn expectation(&self, h: &PauliSum<T>) -> Result<T> {
        ensure_dim(h.n(), self.n)?;
        let hpsi = h.apply(self)?;
        real_part_checked(inner(&self.amps, hpsi.amps()))
    }

    /// Same as [`Statevector::expectation`] using a precompiled operator.
    pub fn expectation_op(&self, h: &PauliOperator<T>) -> Result<T> {
        ensure_dim(h.n(), self.n)?;
        real_part_checked(h.expectation_complex(&self.amps))
    }
}

pub(crate) fn real_part_checked<T: Real>(z: C<T>) -> Result<T> {
    let scale = T::one().max(z.re.abs());
    if z.im.abs() > T::lit(IMAG_TOLERANCE) * scale {
        return Err(Error::NotHermitian(format!("expectation has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

#[inline]
pub(crate) fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    let mut re = T::zero();
    let mut im = T::zero();
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    c(re, im)
}

/// Applies a validated gate to raw amplitudes.
pub(crate) fn apply_gate_amps<T: Real>(amps: &mut [C<T>], gate: &GateOp<T>) {
    let tbit = 1usize << gate.target;
    let cmask = gate.control.map_or(0, |q| 1usize << q);
    match gate.kind {
        GateKind::Cnot => {
            for b in 0..amps.len() {
                if b & tbit == 0 && b & cmask == cmask {
                    amps.swap(b, b | tbit);
                }
            }
        }
        GateKind::Rz => {
            let half = gate.theta / T::lit(2.0);
            let lo = c(half.cos(), -half.sin());
            let hi = lo.conj();
            for (b, a) in amps.iter_mut().enumerate() {
                if b & cmask == cmask {
                    *a *= if b & tbit == 0 { lo } else { hi };
                }
            }
        }
        _ => {
            let m = gate.matrix();
            for b in 0..amps.len() {
                if b & tbit == 0 && b & cmask == cmask {
                    let a0 = amps[b];
                    let a1 = amps[b | tbit];
                    amps[b] = m[0][0] * a0 + m[0][1] * a1;
                    amps[b | tbit] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
    }
}

/// Multiplies by `(-i/2)·G` where `G` is the rotation generator: `σ` on the
/// target, restricted to the control-set subspace for controlled rotations.
pub(crate) fn apply_generator_amps<T: Real>(amps: &mut [C<T>], gate: &GateOp<T>) {
    debug_assert!(gate.kind.is_rotation());
    let tbit = 1usize << gate.target;
    let cmask = gate.control.map_or(0, |q| 1usize << q);
    let half = T::lit(0.5);
    let mi = c(T::zero(), -half); // -i/2
    for b in 0..amps.len() {
        if b & cmask != cmask {
            amps[b] = czero();
            continue;
        }
        if b & tbit != 0 {
            continue;
        }
        let a0 = amps[b];
        let a1 = amps[b | tbit];
        let (n0, n1) = match gate.kind {
            GateKind::Rx => (a1, a0),
            // Y = [[0, -i], [i, 0]]
            GateKind::Ry => (c(a1.im, -a1.re), c(-a0.im, a0.re)),
            GateKind::Rz => (a0, -a1),
            _ => unreachable!(),
        };
        amps[b] = mi * n0;
        amps[b | tbit] = mi * n1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basis_examples() {
        let s = Statevector::<f64>::basis(4, 3).unwrap();
        assert_eq!(s.amps()[3], c(1.0, 0.0));
        assert_eq!(s.amps().iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert_eq!(Statevector::<f64>::basis(1, 0).unwrap().amps(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(Statevector::<f64>::basis(2, 2).unwrap().amps()[2], c(1.0, 0.0));
        assert!(matches!(Statevector::<f64>::basis(2, 4), Err(Error::Range(_))));
    }

    #[test]
    fn gate_examples() {
        let zero = Statevector::<f64>::basis(1, 0).unwrap();
        let t = 0.83;
        let out = zero.apply(&GateOp::rz(0, t)).unwrap();
        assert!((out.amps()[0] - c((t / 2.0).cos(), -(t / 2.0).sin())).norm() < 1e-15);

        let out = zero.apply(&GateOp::rx(0, PI)).unwrap();
        assert!((out.amps()[1] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(out.amps()[0].norm() < 1e-15);

        // control qubit 0 set: |01⟩ = label 1
        let s = Statevector::<f64>::basis(2, 1).unwrap();
        let out = s.apply(&GateOp::controlled(GateKind::Rx, 0, 1, PI)).unwrap();
        assert!((out.amps()[3] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn gate_validation() {
        let s = Statevector::<f64>::basis(2, 0).unwrap();
        assert!(s.apply(&GateOp::rx(2, 0.1)).is_err());
        assert!(s.apply(&GateOp::controlled(GateKind::Ry, 1, 1, 0.1)).is_err());
        assert!(s.apply(&GateOp::controlled(GateKind::Ry, 5, 1, 0.1)).is_err());
    }

    #[test]
    fn expectation_examples() {
        let z = PauliSum::<f64>::parse_text("1.0 Z0").unwrap();
        assert_eq!(Statevector::basis(1, 0).unwrap().expectation(&z).unwrap(), 1.0);
        assert_eq!(Statevector::basis(1, 1).unwrap().expectation(&z).unwrap(), -1.0);
        assert!(Statevector::basis(2, 1).unwrap().expectation(&z).is_err());
    }

    #[test]
    fn generator_matches_pauli_action() {
        let psi = Statevector::<f64>::from_amps(2, vec![c(0.1, 0.2), c(-0.3, 0.4), c(0.5, -0.1), c(0.2, 0.6)]).unwrap();
        for (kind, letter) in [(GateKind::Rx, "X1"), (GateKind::Ry, "Y1"), (GateKind::Rz, "Z1")] {
            let mut a = psi.amps().to_vec();
            apply_generator_amps(&mut a, &GateOp::rotation(kind, 1, 0.0));
            let expect = PauliSum::<f64>::parse_text(&format!("# qubits 2\n-0.5 {letter}")).unwrap();
            let e = expect.apply(&psi).unwrap();
            for (x, y) in a.iter().zip(e.amps()) {
                // (-i/2)σ ψ  vs  (-1/2)σ ψ times i
                assert!((x - y * c(0.0, 1.0)).norm() < 1e-15);
            }
        }
    }
}
