//! Natural-gradient training of circuit parameters.

use std::fmt;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{solve_symmetric, RMatrix};
use crate::scalar::{czero, Real};
use crate::state::{inner, Statevector};

/// A cost evaluated on the images of fixed input states under the circuit.
///
/// Implementations see the output states (and derivative states for the
/// gradient); the optimizer owns circuit execution and the metric.
pub trait CostFunction<T: Real> {
    fn inputs(&self) -> &[Statevector<T>];

    fn cost(&self, outputs: &[Statevector<T>]) -> Result<T>;

    /// `derivatives[j][i]` is `∂_i` of output `j`.
    fn gradient(&self, outputs: &[Statevector<T>], derivatives: &[Vec<Statevector<T>>]) -> Result<Vec<T>>;
}

/// Cost of the circuit at its stored angles.
pub fn cost_value<T: Real, F: CostFunction<T> + ?Sized>(f: &F, c: &Circuit<T>) -> Result<T> {
    let outputs = f.inputs().iter().map(|s| c.run_current(s)).collect::<Result<Vec<_>>>()?;
    f.cost(&outputs)
}

/// Value, gradient and averaged Fisher metric in one sweep.
#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub cost: T,
    pub gradient: Vec<T>,
    pub metric: RMatrix<T>,
}

pub fn evaluate<T: Real, F: CostFunction<T> + ?Sized>(f: &F, c: &Circuit<T>) -> Result<Evaluation<T>> {
    let mut outputs = Vec::with_capacity(f.inputs().len());
    let mut derivs = Vec::with_capacity(f.inputs().len());
    for s in f.inputs() {
        let (out, d) = c.state_and_derivatives(s)?;
        outputs.push(out);
        derivs.push(d);
    }
    Ok(Evaluation {
        cost: f.cost(&outputs)?,
        gradient: f.gradient(&outputs, &derivs)?,
        metric: metric_from_states(&outputs, &derivs, c.param_count()),
    })
}

/// `F_ij = 4 Re[⟨∂_i ψ|∂_j ψ⟩ − ⟨∂_i ψ|ψ⟩⟨ψ|∂_j ψ⟩]` for a single input.
pub fn fisher_metric<T: Real>(c: &Circuit<T>, theta: &[T], psi0: &Statevector<T>) -> Result<RMatrix<T>> {
    let c = c.with_params(theta)?;
    let (out, d) = c.state_and_derivatives(psi0)?;
    Ok(metric_from_states(&[out], &[d], c.param_count()))
}

/// Metric of the uniform superposition of inputs entangled with orthogonal
/// ancilla labels: both inner products are averaged over inputs before the
/// connection term is formed.
fn metric_from_states<T: Real>(outputs: &[Statevector<T>], derivs: &[Vec<Statevector<T>>], p: usize) -> RMatrix<T> {
    let weight = T::one() / T::from_usize(outputs.len().max(1)).expect("input count");
    let mut overlap = vec![czero::<T>(); p * p];
    let mut connection = vec![czero::<T>(); p];
    for (psi, d) in outputs.iter().zip(derivs) {
        for i in 0..p {
            connection[i] += inner(d[i].amps(), psi.amps()) * weight;
            for j in i..p {
                overlap[i * p + j] += inner(d[i].amps(), d[j].amps()) * weight;
            }
        }
    }
    let four = T::lit(4.0);
    let mut m = RMatrix::zeros(p);
    for i in 0..p {
        for j in i..p {
            let v = four * (overlap[i * p + j] - connection[i] * connection[j].conj()).re;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Hyperparameters of the natural-gradient loop.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig<T> {
    pub lambda0: T,
    pub lambda_growth: T,
    /// Relative Tikhonov shift, scaled by `trace(F)/p`.
    pub tikhonov: T,
    pub delta_conv: T,
    pub patience: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            lambda0: T::lit(0.05),
            lambda_growth: T::lit(2.0),
            tikhonov: T::lit(1e-6),
            delta_conv: T::lit(1e-6),
            patience: 5,
            max_iters: 5000,
            seed: 0,
        }
    }
}

impl<T: Real> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.lambda0 > T::zero()) {
            return bad("lambda0 must be positive");
        }
        if !(self.lambda_growth > T::one()) {
            return bad("lambda_growth must exceed 1");
        }
        if !(self.tikhonov >= T::zero()) {
            return bad("tikhonov must be non-negative");
        }
        if !(self.delta_conv > T::zero()) {
            return bad("delta_conv must be positive");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        Ok(())
    }
}

const HALVINGS: usize = 20;
const MAX_GROWTHS: usize = 60;

/// Result of one natural-gradient step.
#[derive(Clone, Debug, PartialEq)]
pub struct Step<T> {
    pub theta: Vec<T>,
    pub cost: T,
    /// Accepted step size, zero when stalled.
    pub lambda: T,
    pub stalled: bool,
    /// The regularised solve failed and the plain gradient was used.
    pub fallback: bool,
}

/// `d = (F + shift·I)⁻¹ ∇C`, or `∇C` itself when the solve fails.
pub fn natural_direction<T: Real>(metric: &RMatrix<T>, gradient: &[T], cfg: &OptimizerConfig<T>) -> (Vec<T>, bool) {
    let p = gradient.len();
    if p == 0 {
        return (Vec::new(), false);
    }
    let mean_diag = metric.trace() / T::from_usize(p).expect("parameter count");
    let scale = if mean_diag > T::zero() { mean_diag } else { T::one() };
    let shifted = metric.shifted(cfg.tikhonov * scale);
    let rcond = T::epsilon() * T::lit(64.0);
    match solve_symmetric(&shifted, gradient, rcond) {
        Some(d) if d.iter().all(|x| x.is_finite()) => (d, false),
        _ => (gradient.to_vec(), true),
    }
}

/// Line search along `-direction`: grow λ from `lambda0` while the cost keeps
/// strictly falling, or halve it until the first decrease.
pub fn natural_step<T: Real>(
    value: impl Fn(&[T]) -> Result<T>,
    theta: &[T],
    cost: T,
    gradient: &[T],
    metric: &RMatrix<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<Step<T>> {
    let stall = |fallback| Step { theta: theta.to_vec(), cost, lambda: T::zero(), stalled: true, fallback };
    if gradient.iter().all(|g| *g == T::zero()) {
        return Ok(stall(false));
    }
    let (dir, fallback) = natural_direction(metric, gradient, cfg);
    let point = |lambda: T| -> Vec<T> { theta.iter().zip(&dir).map(|(t, d)| *t - lambda * *d).collect() };

    let mut lambda = cfg.lambda0;
    let mut trial = point(lambda);
    let mut trial_cost = value(&trial)?;
    if trial_cost < cost {
        for _ in 0..MAX_GROWTHS {
            let next_lambda = lambda * cfg.lambda_growth;
            let next = point(next_lambda);
            let next_cost = value(&next)?;
            if !(next_cost < trial_cost) {
                break;
            }
            lambda = next_lambda;
            trial = next;
            trial_cost = next_cost;
        }
        return Ok(Step { theta: trial, cost: trial_cost, lambda, stalled: false, fallback });
    }
    let half = T::lit(0.5);
    for _ in 0..HALVINGS {
        lambda *= half;
        trial = point(lambda);
        trial_cost = value(&trial)?;
        if trial_cost < cost {
            return Ok(Step { theta: trial, cost: trial_cost, lambda, stalled: false, fallback });
        }
    }
    Ok(stall(fallback))
}

/// True when each of the last `patience` improvements is below `delta`.
pub fn converged<T: Real>(history: &[T], delta: T, patience: usize) -> bool {
    if patience == 0 || history.len() < patience + 1 {
        return false;
    }
    history.windows(2).rev().take(patience).all(|w| w[0] - w[1] < delta)
}

/// Optimizer trace event kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Step,
    Insert,
    Delete,
    Stall,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Event::Step => "step",
            Event::Insert => "insert",
            Event::Delete => "delete",
            Event::Stall => "stall",
        })
    }
}

/// One row of the optimizer trace CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub cost: f64,
    pub lambda: f64,
    pub grad_norm: f64,
    pub param_count: usize,
    pub gate_count: usize,
    pub event: Event,
}

pub const TRACE_HEADER: &str = "iter,cost,lambda,grad_norm,param_count,gate_count,event";

impl fmt::Display for TraceRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{:e},{:e},{:e},{},{},{}",
            self.iter, self.cost, self.lambda, self.grad_norm, self.param_count, self.gate_count, self.event
        )
    }
}

/// Accumulates trace rows and counts gradient evaluations.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub evaluations: usize,
    pub record: bool,
}

impl Trace {
    pub fn recording() -> Self {
        Self { record: true, ..Self::default() }
    }

    pub fn push<T: Real>(&mut self, c: &Circuit<T>, cost: T, lambda: T, grad_norm: T, event: Event) {
        if self.record {
            self.rows.push(TraceRow {
                iter: self.evaluations,
                cost: cost.as_f64(),
                lambda: lambda.as_f64(),
                grad_norm: grad_norm.as_f64(),
                param_count: c.param_count(),
                gate_count: c.gate_count(),
                event,
            });
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

/// Outcome of [`optimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Optimized<T> {
    pub cost: T,
    pub iterations: usize,
    pub converged: bool,
    pub stalled: bool,
}

/// Runs natural-gradient steps on the circuit's parametric angles, in place,
/// for at most `max_iters` gradient evaluations.
pub fn optimize<T: Real, F: CostFunction<T> + ?Sized>(
    f: &F,
    circuit: &mut Circuit<T>,
    cfg: &OptimizerConfig<T>,
    max_iters: usize,
    trace: &mut Trace,
) -> Result<Optimized<T>> {
    cfg.validate()?;
    let mut history = Vec::new();
    let mut cost = cost_value(f, circuit)?;
    if circuit.param_count() == 0 {
        return Ok(Optimized { cost, iterations: 0, converged: true, stalled: false });
    }
    history.push(cost);
    let mut iterations = 0;
    let mut stalled = false;
    while iterations < max_iters {
        let eval = evaluate(f, circuit)?;
        iterations += 1;
        trace.evaluations += 1;
        let theta = circuit.params();
        let probe = circuit.clone();
        let value = |t: &[T]| -> Result<T> { cost_value(f, &probe.with_params(t)?) };
        let step = natural_step(value, &theta, eval.cost, &eval.gradient, &eval.metric, cfg)?;
        let grad_norm = eval.gradient.iter().map(|g| *g * *g).sum::<T>().sqrt();
        if step.stalled {
            trace.push(circuit, eval.cost, T::zero(), grad_norm, Event::Stall);
            stalled = true;
            cost = eval.cost;
            break;
        }
        circuit.set_params(&step.theta)?;
        cost = step.cost;
        trace.push(circuit, cost, step.lambda, grad_norm, Event::Step);
        history.push(cost);
        if converged(&history, cfg.delta_conv, cfg.patience) {
            return Ok(Optimized { cost, iterations, converged: true, stalled: false });
        }
    }
    Ok(Optimized { cost, iterations, converged: stalled, stalled })
}
