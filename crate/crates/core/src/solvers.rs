//! First-order solvers: FISTA with backtracking over a projection,
//! projected gradient on a box, and Douglas–Rachford splitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// A differentiable objective. Matrix-valued points are passed flattened.
pub trait Objective {
    fn value(&self, x: &DenseVector) -> f64;
    fn gradient(&self, x: &DenseVector) -> DenseVector;
}

/// Objective assembled from a value closure and a gradient closure.
pub struct FnObjective<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> FnObjective<V, G>
where
    V: Fn(&DenseVector) -> f64,
    G: Fn(&DenseVector) -> DenseVector,
{
    pub fn new(value: V, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<V, G> Objective for FnObjective<V, G>
where
    V: Fn(&DenseVector) -> f64,
    G: Fn(&DenseVector) -> DenseVector,
{
    fn value(&self, x: &DenseVector) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &DenseVector) -> DenseVector {
        (self.gradient)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FistaConfig {
    pub max_iter: usize,
    pub initial_step: f64,
    /// Step shrink factor applied on each failed sufficient-decrease test.
    pub backtrack_factor: f64,
    /// Relative iterate-change tolerance.
    pub stop_tol: f64,
    /// Random initializations tried by the experiment harnesses.
    pub restarts: usize,
}

impl Default for FistaConfig {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            initial_step: 1.0,
            backtrack_factor: 0.5,
            stop_tol: 1e-10,
            restarts: 1,
        }
    }
}

impl FistaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::InvalidArgument(
                "initial_step must be positive".into(),
            ));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidArgument(
                "backtrack_factor must lie in (0, 1)".into(),
            ));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(Error::InvalidArgument(
                "stop_tol must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrConfig {
    pub max_iter: usize,
    /// Weight of the nonsmooth term inside its proximal map.
    pub gamma: f64,
    /// Relative fixed-point residual tolerance.
    pub stop_tol: f64,
}

impl Default for DrConfig {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            gamma: 1.0,
            stop_tol: 1e-9,
        }
    }
}

impl DrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 || !(self.gamma > 0.0) || !(self.stop_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "invalid Douglas–Rachford config {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    MaxIter,
    Tolerance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterate: DenseVector,
    pub objective: f64,
    pub iterations: usize,
    pub terminated: Termination,
    pub restart_index: usize,
}

fn check_finite(value: f64, grad: Option<&DenseVector>, iteration: usize) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite(format!(
            "objective is {value} at iteration {iteration}"
        )));
    }
    if let Some(g) = grad {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "gradient at iteration {iteration}"
            )));
        }
    }
    Ok(())
}

fn converged(step: f64, x: &DenseVector, tol: f64) -> bool {
    step == 0.0 || step <= tol * x.norm()
}

/// Accelerated projected gradient (FISTA) with backtracking.
///
/// Each iteration takes a projected gradient step from the extrapolated
/// point, shrinking the step by `backtrack_factor` until the quadratic
/// upper-bound test holds; the accepted step is reused by the next
/// iteration. When an accepted step would increase the objective, the step
/// is discarded and momentum is reset, so recorded objectives never
/// increase. Stops when the relative iterate change drops below `stop_tol`.
pub fn fista_backtracking<O, P>(
    obj: &O,
    project: P,
    x0: &DenseVector,
    cfg: &FistaConfig,
) -> Result<SolveReport>
where
    O: Objective + ?Sized,
    P: Fn(&DenseVector) -> DenseVector,
{
    cfg.validate()?;
    let mut x = project(x0);
    let mut fx = obj.value(&x);
    check_finite(fx, None, 0)?;
    let mut y = x.clone();
    let mut momentum = 1.0_f64;
    let mut step = cfg.initial_step;

    for iteration in 1..=cfg.max_iter {
        let fy = if momentum == 1.0 { fx } else { obj.value(&y) };
        let grad = obj.gradient(&y);
        check_finite(fy, Some(&grad), iteration)?;

        let (candidate, f_candidate) = loop {
            let candidate = project(&(&y - &grad * step));
            let f_candidate = obj.value(&candidate);
            let d = &candidate - &y;
            let bound = fy + grad.dot(&d) + d.norm_squared() / (2.0 * step);
            if f_candidate.is_finite() && f_candidate <= bound + 1e-12 * fy.abs() {
                break (candidate, f_candidate);
            }
            step *= cfg.backtrack_factor;
            if step < f64::MIN_POSITIVE {
                return Err(Error::NonFinite(format!(
                    "backtracking step underflowed at iteration {iteration}"
                )));
            }
        };

        if f_candidate > fx && momentum > 1.0 {
            // adaptive restart: retry from x without extrapolation
            y = x.clone();
            momentum = 1.0;
            continue;
        }

        let change = (&candidate - &x).norm();
        let next_momentum = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
        y = &candidate + (&candidate - &x) * ((momentum - 1.0) / next_momentum);
        momentum = next_momentum;
        x = candidate;
        fx = f_candidate;

        if converged(change, &x, cfg.stop_tol) {
            return Ok(SolveReport {
                iterate: x,
                objective: fx,
                iterations: iteration,
                terminated: Termination::Tolerance,
                restart_index: 0,
            });
        }
    }
    Ok(SolveReport {
        iterate: x,
        objective: fx,
        iterations: cfg.max_iter,
        terminated: Termination::MaxIter,
        restart_index: 0,
    })
}

/// Entrywise clamp to `[lo, hi]`.
pub fn project_box(x: &DenseVector, lo: f64, hi: f64) -> DenseVector {
    x.map(|v| v.clamp(lo, hi))
}

/// FISTA with backtracking over the box `[lo, hi]ᴺ`.
pub fn projected_gd_box<O>(
    obj: &O,
    lo: f64,
    hi: f64,
    x0: &DenseVector,
    cfg: &FistaConfig,
) -> Result<SolveReport>
where
    O: Objective + ?Sized,
{
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "box bounds need lo < hi, got [{lo}, {hi}]"
        )));
    }
    fista_backtracking(obj, |v| project_box(v, lo, hi), x0, cfg)
}

/// Soft threshold `sign(v)·max(|v| − t, 0)`, the prox of `t‖·‖₁`.
pub fn prox_l1(v: &DenseVector, t: f64) -> DenseVector {
    v.map(|e| e.signum() * (e.abs() - t).max(0.0))
}

/// Euclidean projection onto `{u : ‖u‖₁ ≤ radius}` by sort and threshold.
pub fn project_l1_ball(v: &DenseVector, radius: f64) -> DenseVector {
    if v.lp_norm(1) <= radius {
        return v.clone();
    }
    if radius <= 0.0 {
        return DenseVector::zeros(v.len());
    }
    let mut mags: Vec<f64> = v.iter().map(|e| e.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &m) in mags.iter().enumerate() {
        cumulative += m;
        let candidate = (cumulative - radius) / (j + 1) as f64;
        if m > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    prox_l1(v, theta)
}

/// Prox of `t‖·‖∞`, via the Moreau identity `v − P_{t·B₁}(v)`.
pub fn prox_linf(v: &DenseVector, t: f64) -> DenseVector {
    if t <= 0.0 {
        return v.clone();
    }
    v - project_l1_ball(v, t)
}

/// Douglas–Rachford splitting for `min f + g`:
/// `z ← z + prox_f(2·prox_g(z) − z) − prox_g(z)`; returns `x = prox_g(z)`.
///
/// `objective` is evaluated on the returned point only. Stops when the
/// fixed-point residual `‖prox_f(·) − prox_g(z)‖` falls below
/// `stop_tol·max(1, ‖z‖)`.
pub fn douglas_rachford<F, G, O>(
    prox_f: F,
    prox_g: G,
    objective: O,
    z0: &DenseVector,
    cfg: &DrConfig,
) -> Result<SolveReport>
where
    F: Fn(&DenseVector) -> DenseVector,
    G: Fn(&DenseVector) -> DenseVector,
    O: Fn(&DenseVector) -> f64,
{
    cfg.validate()?;
    let mut z = z0.clone();
    let mut terminated = Termination::MaxIter;
    let mut iterations = cfg.max_iter;
    for iteration in 1..=cfg.max_iter {
        let xg = prox_g(&z);
        let xf = prox_f(&(&xg * 2.0 - &z));
        let residual = &xf - &xg;
        z += &residual;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "Douglas–Rachford iterate at {iteration}"
            )));
        }
        if residual.norm() <= cfg.stop_tol * z.norm().max(1.0) {
            terminated = Termination::Tolerance;
            iterations = iteration;
            break;
        }
    }
    let iterate = prox_g(&z);
    let objective = objective(&iterate);
    Ok(SolveReport {
        iterate,
        objective,
        iterations,
        terminated,
        restart_index: 0,
    })
}
