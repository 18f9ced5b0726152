//! Suzuki–Trotter synthesis of `exp(-i Δt H)` from commuting slices of `H`.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{PauliOp, PauliString, PauliSum};
use crate::scalar::Real;
use crate::state::GateOp;
use crate::tasks::{distance, exact_propagator, SubspaceSpec};

/// Durations swept by default (atomic time units).
pub const DEFAULT_DT_GRID: [f64; 39] = [
    0.001, 0.002, 0.005, 0.007, 0.01, 0.02, 0.03, 0.035, 0.05, 0.07, 0.1, 0.15, 0.25, 0.3, 0.35, 0.4, 0.5, 0.6,
    0.75, 0.9, 1.0, 1.1, 1.2, 1.35, 1.5, 1.65, 1.8, 2.0, 2.2, 2.35, 2.55, 2.85, 3.0, 3.3, 3.5, 3.7, 4.0, 4.3, 4.5,
];

/// Largest Trotter number swept by default for each order.
pub fn default_max_steps(order: u8) -> usize {
    match order {
        1 => 56,
        2 => 36,
        3 => 18,
        _ => 5,
    }
}

/// Greedy sequential colouring: each term joins the first slice whose members
/// all commute with it, otherwise opens a new slice.
pub fn partition_commuting<T: Real>(h: &PauliSum<T>) -> Vec<PauliSum<T>> {
    let mut slices: Vec<Vec<(T, PauliString)>> = Vec::new();
    for (w, p) in h.terms() {
        let home = slices.iter_mut().find(|s| s.iter().all(|(_, q)| p.commutes(q).unwrap_or(false)));
        match home {
            Some(s) => s.push((*w, p.clone())),
            None => slices.push(vec![(*w, p.clone())]),
        }
    }
    slices
        .into_iter()
        .map(|terms| PauliSum::from_terms(h.n(), terms).expect("terms come from a valid sum"))
        .collect()
}

/// Product-formula configuration.
#[derive(Clone, Debug)]
pub struct TrotterPlan<T> {
    pub order: u8,
    pub n_steps: usize,
    pub dt: T,
    pub partition: Vec<PauliSum<T>>,
}

impl<T: Real> TrotterPlan<T> {
    pub fn new(h: &PauliSum<T>, order: u8, n_steps: usize, dt: T) -> Result<Self> {
        let plan = Self { order, n_steps, dt, partition: partition_commuting(h) };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.order) {
            return Err(Error::Config(format!("Trotter order {} not in 1..=4", self.order)));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("Trotter number must be at least 1".into()));
        }
        for slice in &self.partition {
            for (i, (_, a)) in slice.terms().iter().enumerate() {
                for (_, b) in &slice.terms()[..i] {
                    if !a.commutes(b)? {
                        return Err(Error::Config(format!("slice mixes non-commuting {a} and {b}")));
                    }
                }
            }
        }
        if self.order >= 3 && self.partition.len() > 2 {
            return Err(Error::UnsupportedPartition { order: self.order, slices: self.partition.len() });
        }
        Ok(())
    }
}

/// Fourth-order weights `p1 = p2 = p4 = p5 = 1/(4 - 4^{1/3})`, `p3 = 1 - 4 p1`.
pub fn fourth_order_weights<T: Real>() -> [T; 5] {
    let four = T::lit(4.0);
    let p1 = T::one() / (four - four.cbrt());
    let p3 = T::one() - four * p1;
    [p1, p1, p3, p1, p1]
}

/// Ordered `(slice, evolution time)` factors of the product formula.
///
/// Consecutive factors on the same slice are coalesced, which is exact since
/// a slice commutes with itself.
pub fn expand_formula<T: Real>(plan: &TrotterPlan<T>) -> Result<Vec<(usize, T)>> {
    plan.validate()?;
    let k = plan.partition.len();
    let tau = plan.dt / T::from_usize(plan.n_steps).expect("step count");
    let half = tau / T::lit(2.0);
    let mut raw: Vec<(usize, T)> = Vec::new();
    match k {
        0 => return Ok(raw),
        // a single commuting slice is exact at any order
        1 => return Ok(vec![(0, plan.dt)]),
        _ => {}
    }
    for step in 0..plan.n_steps {
        match plan.order {
            1 => raw.extend((0..k).map(|s| (s, tau))),
            2 if k == 2 => {
                // alternating (A/2 B A/2)(B/2 A B/2)...
                let (a, b) = if step % 2 == 0 { (0, 1) } else { (1, 0) };
                raw.extend([(a, half), (b, tau), (a, half)]);
            }
            2 => {
                raw.extend((0..k - 1).map(|s| (s, half)));
                raw.push((k - 1, tau));
                raw.extend((0..k - 1).rev().map(|s| (s, half)));
            }
            3 => {
                let w = [
                    (0, 7.0 / 24.0),
                    (1, 2.0 / 3.0),
                    (0, 3.0 / 4.0),
                    (1, -2.0 / 3.0),
                    (0, -1.0 / 24.0),
                    (1, 1.0),
                ];
                raw.extend(w.iter().map(|&(s, f)| (s, T::lit(f) * tau)));
            }
            _ => {
                for p in fourth_order_weights::<T>() {
                    raw.extend([(0, p * half), (1, p * tau), (0, p * half)]);
                }
            }
        }
    }
    let mut merged: Vec<(usize, T)> = Vec::with_capacity(raw.len());
    for (s, t) in raw {
        match merged.last_mut() {
            Some((last, acc)) if *last == s => *acc += t,
            _ => merged.push((s, t)),
        }
    }
    Ok(merged)
}

/// Circuit for `exp(-i α·scale·P)`: basis change, ascending CNOT ladder,
/// `Rz(2α·scale)` on the last support qubit, then the mirror image.
pub fn emit_exp_circuit<T: Real>(alpha: T, pauli: &PauliString, scale: T) -> Result<Circuit<T>> {
    if pauli.is_identity() {
        return Err(Error::IdentityString);
    }
    let n = pauli.n();
    let support = pauli.support();
    let half_pi = T::FRAC_PI_2();
    let mut c = Circuit::new(n);
    let basis_in = |q: usize| match pauli.op(q) {
        PauliOp::X => Some(GateOp::h(q)),
        // Rx(π/2)† Z Rx(π/2) = Y
        PauliOp::Y => Some(GateOp::rx(q, half_pi)),
        _ => None,
    };
    for &q in &support {
        if let Some(g) = basis_in(q) {
            c.push_frozen(g)?;
        }
    }
    for w in support.windows(2) {
        c.push_frozen(GateOp::cnot(w[0], w[1]))?;
    }
    let last = *support.last().expect("non-identity string");
    c.push_frozen(GateOp::rz(last, T::lit(2.0) * alpha * scale))?;
    for w in support.windows(2).rev() {
        c.push_frozen(GateOp::cnot(w[0], w[1]))?;
    }
    for &q in &support {
        if let Some(g) = basis_in(q) {
            c.push_frozen(g.inverse())?;
        }
    }
    Ok(c)
}

/// A synthesised Trotter circuit.
#[derive(Clone, Debug)]
pub struct TrotterCircuit<T> {
    pub circuit: Circuit<T>,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    /// Phase `φ` such that `exp(-iΔtH) ≈ e^{iφ} · circuit`, from identity terms.
    pub global_phase: T,
}

/// Emits every factor of the product formula, then simplifies.
pub fn synthesize<T: Real>(h: &PauliSum<T>, order: u8, n_steps: usize, dt: T) -> Result<TrotterCircuit<T>> {
    let plan = TrotterPlan::new(h, order, n_steps, dt)?;
    synthesize_plan(&plan)
}

pub fn synthesize_plan<T: Real>(plan: &TrotterPlan<T>) -> Result<TrotterCircuit<T>> {
    let n = plan.partition.first().map_or(0, |s| s.n());
    let mut circuit = Circuit::new(n);
    let mut phase = T::zero();
    for (slice, time) in expand_formula(plan)? {
        for (w, p) in plan.partition[slice].terms() {
            if p.is_identity() {
                phase -= *w * time;
                continue;
            }
            circuit.extend(&emit_exp_circuit(*w, p, time)?)?;
        }
    }
    let circuit = circuit.simplify();
    Ok(TrotterCircuit {
        gate_count: circuit.gate_count(),
        two_qubit_count: circuit.two_qubit_count(),
        circuit,
        global_phase: phase,
    })
}

/// Header of the scan CSV.
pub const SCAN_HEADER: &str = "dt,order,n_steps,gate_count,two_qubit_count,full_space_error,subspace_error";

/// One synthesised point of a Trotter scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow<T> {
    pub dt: T,
    pub order: u8,
    pub n_steps: usize,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub full_space_error: T,
    pub subspace_error: T,
}

impl<T: Real> ScanRow<T> {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:e},{:e}",
            self.dt,
            self.order,
            self.n_steps,
            self.gate_count,
            self.two_qubit_count,
            self.full_space_error,
            self.subspace_error
        )
    }
}

/// Synthesises one formula and measures it against `target`.
pub fn scan_point<T: Real>(
    h: &PauliSum<T>,
    target: &CMatrix<T>,
    sector: &SubspaceSpec,
    order: u8,
    n_steps: usize,
    dt: T,
) -> Result<ScanRow<T>> {
    let synth = synthesize(h, order, n_steps, dt)?;
    let u = synth.circuit.dense_unitary_current()?;
    let full = SubspaceSpec::full(h.n())?;
    Ok(ScanRow {
        dt,
        order,
        n_steps,
        gate_count: synth.gate_count,
        two_qubit_count: synth.two_qubit_count,
        full_space_error: distance(&u, target, &full)?,
        subspace_error: distance(&u, target, sector)?,
    })
}

/// Every `(dt, order, n)` point of the grid, `n = 1..=max_steps(order)`,
/// in that nesting order.
pub fn scan<T: Real>(
    h: &PauliSum<T>,
    dts: &[T],
    orders: &[u8],
    max_steps: impl Fn(u8) -> usize,
    sector: &SubspaceSpec,
) -> Result<Vec<ScanRow<T>>> {
    let mut rows = Vec::new();
    for &dt in dts {
        let target = exact_propagator(h, dt)?;
        for &order in orders {
            for n in 1..=max_steps(order) {
                rows.push(scan_point(h, &target.u, sector, order, n, dt)?);
            }
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Real>(points: &[(T, T)]) -> Option<T> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= T::zero() || y <= T::zero()) {
        return None;
    }
    let k = T::from_usize(points.len())?;
    let (mx, my) = points.iter().fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (mx / k, my / k);
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for &(x, y) in points {
        let dx = x.ln() - mx;
        sxy = sxy + dx * (y.ln() - my);
        sxx = sxx + dx * dx;
    }
    (sxx > T::zero()).then(|| sxy / sxx)
}
