//! Phase-minimised operator distance, Schmidt measure and non-triviality.

use super::exact::exact_propagator;
use super::subspace::SubspaceSpec;
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{singular_values, spectral_norm, CMatrix};
use crate::pauli::PauliSum;
use crate::scalar::{cis, Real};
use crate::state::Statevector;

const PHASE_GRID: usize = 64;
const PHASE_TOL: f64 = 1e-10;

/// `min_φ ‖Π_S (u − e^{iφ} v) Π_S‖_∞`.
///
/// The phase is scanned on a 64-point grid and every local minimum of the
/// scan is refined by golden-section search, so a non-unimodal profile still
/// yields its global minimum.
pub fn distance<T: Real>(u: &CMatrix<T>, v: &CMatrix<T>, s: &SubspaceSpec) -> Result<T> {
    ensure_dim(u.rows(), v.rows())?;
    ensure_dim(u.cols(), v.cols())?;
    ensure_dim(1 << s.n, u.rows())?;
    let a = u.restrict(&s.basis);
    let b = v.restrict(&s.basis);
    Ok(min_over_phase(&a, &b).1)
}

/// Minimising phase and value of `σ_max(a − e^{iφ} b)`.
pub fn min_over_phase<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> (T, T) {
    let g = |phi: T| spectral_norm(&a.sub(&b.scale(cis(phi))));
    let two_pi = T::lit(2.0) * T::PI();
    let step = two_pi / T::from_usize(PHASE_GRID).expect("grid size");
    let grid: Vec<T> = (0..PHASE_GRID).map(|k| g(step * T::from_usize(k).expect("grid index"))).collect();
    let mut best = (T::zero(), grid[0]);
    for k in 0..PHASE_GRID {
        let prev = grid[(k + PHASE_GRID - 1) % PHASE_GRID];
        let next = grid[(k + 1) % PHASE_GRID];
        if grid[k] > prev || grid[k] > next {
            continue;
        }
        let centre = step * T::from_usize(k).expect("grid index");
        let (phi, val) = golden_section(&g, centre - step, centre + step);
        let (phi, val) = if grid[k] < val { (centre, grid[k]) } else { (phi, val) };
        if val < best.1 {
            best = (phi, val);
        }
    }
    best
}

fn golden_section<T: Real>(g: &impl Fn(T) -> T, mut lo: T, mut hi: T) -> (T, T) {
    let ratio = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while hi - lo > T::lit(PHASE_TOL) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = g(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `log₂` of the Schmidt rank across the cut between qubits `0..cut` and the rest.
pub fn schmidt_measure<T: Real>(psi: &Statevector<T>, cut: usize, rank_tol: T) -> Result<T> {
    if cut > psi.n() {
        return Err(Error::Range(format!("cut {cut} outside {} qubits", psi.n())));
    }
    if psi.norm() == T::zero() {
        return Err(Error::Numeric("Schmidt measure of the zero vector".into()));
    }
    let lo = 1usize << cut;
    let hi = 1usize << (psi.n() - cut);
    let m = CMatrix::from_fn(lo, hi, |r, col| psi.amps()[r + col * lo]);
    let sv = singular_values(&m);
    let rank = sv.iter().filter(|s| **s > rank_tol * sv[0]).count();
    Ok(T::from_usize(rank).expect("rank").log2())
}

/// Distance of `exp(-i dt H)` from the identity on the given space.
pub fn non_triviality<T: Real>(h: &PauliSum<T>, dt: T, s: &SubspaceSpec) -> Result<T> {
    let u = exact_propagator(h, dt)?.u;
    distance(&u, &CMatrix::identity(u.rows()), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn bell_state_has_one_ebit() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Statevector::from_amps(2, vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap();
        assert_eq!(schmidt_measure(&bell, 1, 1e-10).unwrap(), 1.0);
        let product = Statevector::<f64>::basis(4, 0b0011).unwrap();
        assert_eq!(schmidt_measure(&product, 2, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn phase_is_minimised_away() {
        let u = CMatrix::from_fn(2, 2, |r, col| if r == col { cis(0.2 * (r + 1) as f64) } else { c(0.0, 0.0) });
        let v = u.scale(cis(0.3));
        let s = SubspaceSpec::full(1).unwrap();
        assert!(distance(&u, &u, &s).unwrap() < 1e-9);
        assert!(distance(&u, &v, &s).unwrap() < 1e-9);
    }
}
