//! Dense references built without the library's own algebra.

use super::{to_nalgebra, M};
use num_complex::Complex64;
use qsynth_core::circuit::Circuit;
use qsynth_core::fermion::{FermionOperator, Ladder};
use qsynth_core::linalg::{CMatrix, RMatrix};
use qsynth_core::pauli::{PauliOp, PauliString, PauliSum};
use qsynth_core::state::Statevector;
use qsynth_core::tasks::SubspaceSpec;
use qsynth_core::CMatrix64;
use rand::Rng;

pub fn letter_matrix(op: PauliOp) -> M {
    let (o, z, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
    match op {
        PauliOp::I => M::from_row_slice(2, 2, &[o, z, z, o]),
        PauliOp::X => M::from_row_slice(2, 2, &[z, o, o, z]),
        PauliOp::Y => M::from_row_slice(2, 2, &[z, -i, i, z]),
        PauliOp::Z => M::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Kronecker product with qubit 0 as the least significant factor.
pub fn kron_oracle(p: &PauliString) -> M {
    let mut m = M::identity(1, 1);
    for q in (0..p.n()).rev() {
        m = m.kronecker(&letter_matrix(p.op(q)));
    }
    m
}

/// `exp(-i a P) = cos(a) I − i sin(a) P`.
pub fn pauli_exp(a: f64, p: &PauliString) -> M {
    let dim = 1usize << p.n();
    M::identity(dim, dim) * Complex64::new(a.cos(), 0.0) - kron_oracle(p) * Complex64::new(0.0, a.sin())
}

pub fn random_string<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    let letters = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];
    loop {
        let ops: Vec<(usize, PauliOp)> = (0..n).map(|q| (q, letters[rng.gen_range(0..4)])).collect();
        let p = PauliString::from_sparse(n, &ops).unwrap();
        if !p.is_identity() {
            return p;
        }
    }
}

pub fn random_hermitian<R: Rng>(n: usize, terms: usize, rng: &mut R) -> PauliSum<f64> {
    let letters = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];
    let terms = (0..terms)
        .map(|_| {
            let ops: Vec<(usize, PauliOp)> = (0..n).map(|q| (q, letters[rng.gen_range(0..4)])).collect();
            (rng.gen_range(-1.0..1.0), PauliString::from_sparse(n, &ops).unwrap())
        })
        .collect();
    PauliSum::from_terms(n, terms).unwrap()
}

/// `a_j` or `a†_j` on the 2^n occupation basis, from occupation bits and
/// parity signs.
pub fn ladder_matrix(n: usize, l: Ladder) -> CMatrix64 {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let occupied = b >> l.mode & 1 == 1;
        if occupied == l.raise {
            continue;
        }
        let parity = (b & ((1 << l.mode) - 1)).count_ones();
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        m[(b ^ (1 << l.mode), b)] = Complex64::new(sign, 0.0);
    }
    m
}

pub fn fock_matrix(f: &FermionOperator<f64>) -> CMatrix64 {
    let dim = 1usize << f.norb;
    let mut total = CMatrix::zeros(dim, dim);
    for (w, ladders) in &f.terms {
        let mut prod = CMatrix::identity(dim);
        for l in ladders {
            prod = prod.matmul(&ladder_matrix(f.norb, *l));
        }
        total = total.add(&prod.scale(*w));
    }
    total
}

/// Hermitian and number conserving: every random term comes with its adjoint.
pub fn random_number_conserving<R: Rng>(norb: usize, rng: &mut R) -> FermionOperator<f64> {
    let mut f = FermionOperator::new(norb);
    for _ in 0..6 {
        let (i, j) = (rng.gen_range(0..norb), rng.gen_range(0..norb));
        let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        f.push(w, vec![Ladder::raise(i), Ladder::lower(j)]).unwrap();
        f.push(w.conj(), vec![Ladder::raise(j), Ladder::lower(i)]).unwrap();
    }
    for _ in 0..6 {
        let idx: Vec<usize> = (0..4).map(|_| rng.gen_range(0..norb)).collect();
        let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        f.push(w, vec![Ladder::raise(idx[0]), Ladder::raise(idx[1]), Ladder::lower(idx[2]), Ladder::lower(idx[3])])
            .unwrap();
        f.push(w.conj(), vec![Ladder::raise(idx[3]), Ladder::raise(idx[2]), Ladder::lower(idx[1]), Ladder::lower(idx[0])])
            .unwrap();
    }
    f
}

/// Fubini–Study metric from second differences of the fidelity
/// `|⟨ψ(θ)|ψ(θ+δ)⟩|² ≈ 1 − δᵀFδ/4`.
pub fn fd_metric(state: impl Fn(&[f64]) -> Statevector<f64>, theta: &[f64]) -> RMatrix<f64> {
    let h = 1e-3;
    let psi = state(theta);
    let fid = |shift: &[(usize, f64)]| {
        let mut t = theta.to_vec();
        for &(i, d) in shift {
            t[i] += d;
        }
        psi.inner(&state(&t)).unwrap().norm_sqr()
    };
    RMatrix::from_fn(theta.len(), |i, j| {
        let second = if i == j {
            (fid(&[(i, h)]) - 2.0 + fid(&[(i, -h)])) / (h * h)
        } else {
            (fid(&[(i, h), (j, h)]) - fid(&[(i, h), (j, -h)]) - fid(&[(i, -h), (j, h)]) + fid(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        };
        -2.0 * second
    })
}

/// Central differences of a cost over the circuit parameters.
pub fn fd_gradient(cost: impl Fn(&Circuit<f64>) -> f64, c: &Circuit<f64>) -> Vec<f64> {
    let h = 1e-5;
    let theta = c.params();
    (0..theta.len())
        .map(|i| {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[i] += h;
            minus[i] -= h;
            (cost(&c.with_params(&plus).unwrap()) - cost(&c.with_params(&minus).unwrap())) / (2.0 * h)
        })
        .collect()
}

/// `max |a − b| / max |b|`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

pub fn from_nalgebra(m: &M) -> CMatrix64 {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn restrict(m: &M, s: &SubspaceSpec) -> M {
    M::from_fn(s.dim(), s.dim(), |i, j| m[(s.basis[i], s.basis[j])])
}

pub fn spectral(m: &M) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Two-level brute-force grid over the global phase: 10⁴ points on the
/// circle, then 10⁴ points across the best coarse cell.
pub fn brute_distance(u: &M, v: &M, s: &SubspaceSpec) -> f64 {
    let (a, b) = (restrict(u, s), restrict(v, s));
    let g = |phi: f64| spectral(&(&a - &b * Complex64::from_polar(1.0, phi)));
    let n = 10_000;
    let step = std::f64::consts::TAU / n as f64;
    let coarse =
        (0..n).map(|k| (k as f64 * step, g(k as f64 * step))).fold((0.0, f64::INFINITY), |m, p| if p.1 < m.1 { p } else { m });
    let fine = 2.0 * step / n as f64;
    (0..=n).map(|k| g(coarse.0 - step + k as f64 * fine)).fold(coarse.1, f64::min)
}

/// Lowest eigenvalue of the Hamiltonian restricted to a basis, by dense
/// diagonalisation of its real embedding.
pub fn dense_ground(h: &PauliSum<f64>, basis: &[usize]) -> f64 {
    let dense = to_nalgebra(&h.dense_matrix().unwrap());
    let d = basis.len();
    let real = nalgebra::DMatrix::<f64>::from_fn(2 * d, 2 * d, |i, j| {
        let z = dense[(basis[i % d], basis[j % d])];
        match (i / d, j / d) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    nalgebra::linalg::SymmetricEigen::new(real).eigenvalues.min()
}
