//! Occupation-number subspaces and the entangled probe state.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, czero, Real};
use crate::state::{Statevector, MAX_STATE_QUBITS};

/// A set of computational basis states of an `n`-qubit register together with
/// the ancilla count `m = ⌈log₂ |basis|⌉` needed to label them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceSpec {
    pub n: usize,
    /// Hamming weight of every basis state, `None` for the full space.
    pub occupation: Option<usize>,
    pub basis: Vec<usize>,
    pub m: usize,
}

fn ancillas_for(len: usize) -> usize {
    len.next_power_of_two().trailing_zeros() as usize
}

impl SubspaceSpec {
    /// Basis states of Hamming weight `k`, ascending.
    pub fn occupation(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Range(format!("occupation {k} exceeds {n} qubits")));
        }
        if n > MAX_STATE_QUBITS {
            return Err(Error::Resource { what: "subspace", n, cap: MAX_STATE_QUBITS });
        }
        let basis: Vec<usize> = (0..1usize << n).filter(|b| b.count_ones() as usize == k).collect();
        Ok(Self { n, occupation: Some(k), m: ancillas_for(basis.len()), basis })
    }

    /// All `2^n` basis states (`m = n`).
    pub fn full(n: usize) -> Result<Self> {
        if n > MAX_STATE_QUBITS {
            return Err(Error::Resource { what: "subspace", n, cap: MAX_STATE_QUBITS });
        }
        Ok(Self { n, occupation: None, basis: (0..1usize << n).collect(), m: n })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, b: usize) -> bool {
        self.basis.binary_search(&b).is_ok()
    }

    /// `Π_S` as a dense `2^n` matrix.
    pub fn projector<T: Real>(&self) -> CMatrix<T> {
        let mut p = CMatrix::zeros(1 << self.n, 1 << self.n);
        for &b in &self.basis {
            p[(b, b)] = c(T::one(), T::zero());
        }
        p
    }
}

/// `subspaceBasis(n, k)`.
pub fn subspace_basis(n: usize, k: usize) -> Result<SubspaceSpec> {
    SubspaceSpec::occupation(n, k)
}

/// `(1/√d) Σ_j |s_j⟩_R |j⟩_A`, register on the low `n` qubits and the ancilla
/// label on the `m` qubits above it.
pub fn entangled_probe<T: Real>(s: &SubspaceSpec) -> Result<Statevector<T>> {
    let total = s.n + s.m;
    if total > MAX_STATE_QUBITS {
        return Err(Error::Resource { what: "probe state", n: total, cap: MAX_STATE_QUBITS });
    }
    let amp = T::one() / T::from_usize(s.dim()).expect("basis size").sqrt();
    let mut amps = vec![czero(); 1 << total];
    for (j, &b) in s.basis.iter().enumerate() {
        amps[b | (j << s.n)] = c(amp, T::zero());
    }
    Statevector::from_amps(total, amps)
}

/// Reduced density matrix of the low `low` qubits (`keep_low`) or of the rest.
pub fn reduced_density_matrix<T: Real>(psi: &Statevector<T>, low: usize, keep_low: bool) -> Result<CMatrix<T>> {
    if low > psi.n() {
        return Err(Error::Range(format!("cut {low} outside {} qubits", psi.n())));
    }
    let lo_dim = 1usize << low;
    let hi_dim = 1usize << (psi.n() - low);
    let a = psi.amps();
    let (keep, trace) = if keep_low { (lo_dim, hi_dim) } else { (hi_dim, lo_dim) };
    let at = |k: usize, t: usize| if keep_low { a[k + t * lo_dim] } else { a[t + k * lo_dim] };
    Ok(CMatrix::from_fn(keep, keep, |r, col| (0..trace).map(|t| at(r, t) * at(col, t).conj()).sum()))
}
