//! Exact references: dense propagators and the Lanczos ground state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_function, symmetric_eigen, CMatrix, RMatrix};
use crate::pauli::{PauliOperator, PauliSum};
use crate::scalar::{c, cis, czero, Real, C};
use crate::state::{inner, Statevector};

/// Largest register for which dense propagators are built.
pub const PROPAGATOR_QUBIT_CAP: usize = 10;

/// How a compilation target was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetSource {
    ExactExpm,
    TrotterCircuit,
}

/// Dense unitary `U(dt)` to be compiled.
#[derive(Clone, Debug, PartialEq)]
pub struct CompileTarget<T> {
    pub u: CMatrix<T>,
    pub dt: T,
    pub source: TargetSource,
}

/// `exp(-i dt H)` through a dense Hermitian eigendecomposition.
pub fn exact_propagator<T: Real>(h: &PauliSum<T>, dt: T) -> Result<CompileTarget<T>> {
    if h.n() > PROPAGATOR_QUBIT_CAP {
        return Err(Error::Resource { what: "exact propagator", n: h.n(), cap: PROPAGATOR_QUBIT_CAP });
    }
    let dense = h.dense_matrix()?;
    let u = hermitian_function(&dense, |lambda| cis(-dt * lambda));
    Ok(CompileTarget { u, dt, source: TargetSource::ExactExpm })
}

const LANCZOS_RESTARTS: usize = 500;
const KRYLOV_CAP: usize = 80;
const RESIDUAL_TOL: f64 = 1e-8;

fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
}

/// Lowest eigenpair of `h`, optionally restricted to basis states of a fixed
/// Hamming weight (meaningful when `h` conserves particle number).
///
/// Restarted Lanczos with full reorthogonalisation; stops once the residual
/// `‖Hv − Ev‖` is at most 1e-8.
pub fn ground_state_oracle<T: Real>(h: &PauliSum<T>, occupation: Option<usize>, seed: u64) -> Result<(T, Statevector<T>)> {
    let n = h.n();
    if let Some(k) = occupation {
        if k > n {
            return Err(Error::Range(format!("occupation {k} exceeds {n} qubits")));
        }
    }
    let dim = Statevector::<T>::zero_state(n)?.dim();
    let allowed = |b: usize| occupation.is_none_or(|k| b.count_ones() as usize == k);
    let sector_dim = (0..dim).filter(|&b| allowed(b)).count();
    let op = PauliOperator::new(h);
    let apply = |v: &[C<T>]| {
        let mut out = vec![czero(); dim];
        op.apply_into(v, &mut out);
        for (b, o) in out.iter_mut().enumerate() {
            if !allowed(b) {
                *o = czero();
            }
        }
        out
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<C<T>> = (0..dim)
        .map(|b| {
            let (re, im) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if allowed(b) {
                c(T::lit(re), T::lit(im))
            } else {
                czero()
            }
        })
        .collect();
    let s = norm(&start);
    start.iter_mut().for_each(|a| *a = *a / s);

    let krylov = sector_dim.min(KRYLOV_CAP);
    for _ in 0..LANCZOS_RESTARTS {
        let mut basis: Vec<Vec<C<T>>> = vec![start.clone()];
        let mut alpha: Vec<T> = Vec::new();
        let mut beta: Vec<T> = Vec::new();
        loop {
            let j = basis.len() - 1;
            let mut w = apply(&basis[j]);
            alpha.push(inner(&basis[j], &w).re);
            for _ in 0..2 {
                for v in &basis {
                    let proj = inner(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let b = norm(&w);
            if basis.len() == krylov || b <= T::epsilon() * T::lit(1e3) * (T::one() + alpha[j].abs()) {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x = *x / b);
            basis.push(w);
        }
        let k = alpha.len();
        let tri = RMatrix::from_fn(k, |r, col| {
            if r == col {
                alpha[r]
            } else if r + 1 == col {
                beta[r]
            } else if col + 1 == r {
                beta[col]
            } else {
                T::zero()
            }
        });
        let (values, vectors) = symmetric_eigen(&tri);
        let energy = values[0];
        let mut ritz = vec![czero(); dim];
        for (i, v) in basis.iter().enumerate() {
            let w = vectors[(i, 0)];
            ritz.iter_mut().zip(v).for_each(|(r, x)| *r += *x * w);
        }
        let s = norm(&ritz);
        ritz.iter_mut().for_each(|a| *a = *a / s);
        let hv = apply(&ritz);
        let residual = norm(&hv.iter().zip(&ritz).map(|(a, b)| *a - *b * energy).collect::<Vec<_>>());
        if residual <= T::lit(RESIDUAL_TOL) {
            return Ok((energy, Statevector::from_amps(n, ritz)?));
        }
        start = ritz;
    }
    Err(Error::Numeric(format!("Lanczos did not converge after {LANCZOS_RESTARTS} restarts")))
}
