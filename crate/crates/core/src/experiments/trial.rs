use serde::{Deserialize, Serialize};

use super::ortho::orthogonality_measure;
use super::{InstanceKind, RecoveryInstance};
use crate::error::{Error, Result};
use crate::linalg::{AffineProjector, DenseMatrix, DenseVector, RngStream};
use crate::regularizers::{BetaMode, RegularizerKind};
use crate::solvers::{
    douglas_rachford, fista_backtracking, prox_l1, prox_linf, DrConfig, FistaConfig, FnObjective,
    SolveReport,
};

/// Relative error at or below which a recovery counts as a success.
pub const SUCCESS_THRESHOLD: f64 = 1e-2;

/// Weight of the data-fit term in the unconstrained two-bit problem.
pub const DEFAULT_TWO_BIT_LAMBDA: f64 = 1e-5;

/// Stream-id offset separating solver initializations from instance draws.
const START_STREAM_SALT: u64 = 0x5eed_5eed_0000_0000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub relative_error: f64,
    pub restarts_used: usize,
    pub iterations_total: usize,
    /// Message of the last solver abort, if any restart aborted.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Baseline {
    /// `min ‖x‖∞ s.t. Ax = b` by Douglas–Rachford.
    LinfDr,
    /// `min ‖x‖₁ s.t. Ax = b` by Douglas–Rachford.
    L1Dr,
    /// `min Σ(x² − β)² s.t. Ax = b` with `β` fixed.
    BinBetaFixed(f64),
    /// `min Σ(x² − β)² s.t. Ax = b` over `(x, β)`.
    BinBetaJoint,
    /// `min ‖Cx − μx‖² s.t. Ax = b` over `(x, μ)`.
    EigMuJoint,
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LinfDr => "linf-dr",
            Self::L1Dr => "l1-dr",
            Self::BinBetaFixed(_) => "bin-beta-fixed",
            Self::BinBetaJoint => "bin-beta-joint",
            Self::EigMuJoint => "eig-mu-joint",
        }
    }
}

/// How a trial attempts the recovery.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Minimize a regularizer over the feasible set. `Eig` with an empty
    /// matrix takes the instance's own matrix.
    Regularizer(RegularizerKind),
    Baseline(Baseline),
    /// `ℓ_equ(y_1, …, y_B) + λ‖A·Σy_b − b‖²`, unconstrained.
    PenalizedEquispaced {
        bits: usize,
        lambda: f64,
    },
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Self::Regularizer(k) => k.name().to_string(),
            Self::Baseline(b) => b.name().to_string(),
            Self::PenalizedEquispaced { bits, .. } => format!("equ{bits}-penalized"),
        }
    }
}

/// Runs `cfg.restarts` random initializations of a regularizer, stopping at
/// the first success.
pub fn run_recovery_trial(
    inst: &RecoveryInstance,
    reg: &RegularizerKind,
    cfg: &FistaConfig,
) -> Result<TrialOutcome> {
    run_trial(inst, &Method::Regularizer(reg.clone()), cfg)
}

pub fn run_baseline_trial(
    inst: &RecoveryInstance,
    baseline: Baseline,
    cfg: &FistaConfig,
) -> Result<TrialOutcome> {
    run_trial(inst, &Method::Baseline(baseline), cfg)
}

/// Trial for any method. Initializations are i.i.d. `N(0, 1)` points drawn
/// from a stream derived from the instance's `(seed, stream)`.
pub fn run_trial(
    inst: &RecoveryInstance,
    method: &Method,
    cfg: &FistaConfig,
) -> Result<TrialOutcome> {
    let mut rng = RngStream::new(inst.seed, inst.stream ^ START_STREAM_SALT);
    let problem = Problem::build(inst, method)?;
    let restarts = if problem.is_convex() {
        1
    } else {
        cfg.restarts.max(1)
    };
    let mut iterations_total = 0;
    let mut best = f64::INFINITY;
    let mut diagnostic = None;
    for restart in 0..restarts {
        let start = rng.normal_vector(problem.dim());
        let (error, iterations) = match problem.solve(inst, &start, cfg) {
            Ok(done) => done,
            Err(e @ Error::NonFinite(_)) => {
                diagnostic = Some(e.to_string());
                continue;
            }
            Err(e) => return Err(e),
        };
        iterations_total += iterations;
        best = best.min(error);
        if error <= SUCCESS_THRESHOLD {
            return Ok(TrialOutcome {
                success: true,
                relative_error: error,
                restarts_used: restart + 1,
                iterations_total,
                diagnostic,
            });
        }
    }
    Ok(TrialOutcome {
        success: false,
        relative_error: best,
        restarts_used: restarts,
        iterations_total,
        diagnostic,
    })
}

/// Single run from an injected starting point (in the method's variable space).
pub fn run_trial_from_start(
    inst: &RecoveryInstance,
    method: &Method,
    start: &DenseVector,
    cfg: &FistaConfig,
) -> Result<TrialOutcome> {
    let problem = Problem::build(inst, method)?;
    if start.len() != problem.dim() {
        return Err(Error::Dimension(format!(
            "start has length {} but the problem has {} variables",
            start.len(),
            problem.dim()
        )));
    }
    let (error, iterations) = problem.solve(inst, start, cfg)?;
    Ok(TrialOutcome {
        success: error <= SUCCESS_THRESHOLD,
        relative_error: error,
        restarts_used: 1,
        iterations_total: iterations,
        diagnostic: None,
    })
}

/// A resolved optimization problem for one instance.
enum Problem {
    /// `min reg(x) s.t. Ax = b`, column by column for matrix unknowns.
    Constrained {
        reg: RegularizerKind,
        projector: AffineProjector,
        columns: usize,
    },
    /// Same, with one free scalar appended to `x`.
    ConstrainedAugmented {
        reg: Augmented,
        projector: AffineProjector,
    },
    /// Unconstrained over `[y_1; …; y_B]`, each block of length `n`.
    Penalized { bits: usize, lambda: f64, n: usize },
    DouglasRachford {
        linf: bool,
        projector: AffineProjector,
    },
}

enum Augmented {
    BinBeta,
    EigMu(DenseMatrix),
}

impl Problem {
    fn build(inst: &RecoveryInstance, method: &Method) -> Result<Self> {
        let kind = inst.kind;
        let projector = || {
            if inst.m() == 0 {
                Ok(AffineProjector::unconstrained(inst.n()))
            } else {
                AffineProjector::new(inst.a.clone(), target_of(inst, 0))
            }
        };
        Ok(match method {
            Method::Regularizer(reg) => {
                let reg = bind(reg, inst)?;
                if kind == InstanceKind::TwoBit {
                    let RegularizerKind::Equ { bits } = reg else {
                        return Err(incompatible(&reg, kind));
                    };
                    Problem::Penalized {
                        bits,
                        lambda: DEFAULT_TWO_BIT_LAMBDA,
                        n: inst.n(),
                    }
                } else {
                    check_compatible(&reg, kind)?;
                    Problem::Constrained {
                        reg,
                        projector: projector()?,
                        columns: inst.columns(),
                    }
                }
            }
            Method::PenalizedEquispaced { bits, lambda } => {
                if kind != InstanceKind::TwoBit || *bits != 2 {
                    return Err(Error::Incompatible(format!(
                        "penalized equispaced recovery with B = {bits} on {} instances",
                        kind.name()
                    )));
                }
                Problem::Penalized {
                    bits: *bits,
                    lambda: *lambda,
                    n: inst.n(),
                }
            }
            Method::Baseline(baseline) => {
                if matches!(
                    kind,
                    InstanceKind::OrthogonalMatrix(_) | InstanceKind::TwoBit
                ) {
                    return Err(Error::Incompatible(format!(
                        "baseline {} on {} instances",
                        baseline.name(),
                        kind.name()
                    )));
                }
                match baseline {
                    Baseline::LinfDr => Problem::DouglasRachford {
                        linf: true,
                        projector: projector()?,
                    },
                    Baseline::L1Dr => Problem::DouglasRachford {
                        linf: false,
                        projector: projector()?,
                    },
                    Baseline::BinBetaFixed(beta) => Problem::Constrained {
                        reg: RegularizerKind::BaselineBinBeta(BetaMode::Fixed(*beta)),
                        projector: projector()?,
                        columns: 1,
                    },
                    Baseline::BinBetaJoint => Problem::ConstrainedAugmented {
                        reg: Augmented::BinBeta,
                        projector: projector()?,
                    },
                    Baseline::EigMuJoint => {
                        let c = inst.eigen_matrix.clone().ok_or_else(|| {
                            Error::Incompatible("eig-mu-joint needs an eigenvector instance".into())
                        })?;
                        Problem::ConstrainedAugmented {
                            reg: Augmented::EigMu(c),
                            projector: projector()?,
                        }
                    }
                }
            }
        })
    }

    fn is_convex(&self) -> bool {
        matches!(self, Problem::DouglasRachford { .. })
    }

    /// Number of optimization variables.
    fn dim(&self) -> usize {
        match self {
            Problem::Constrained {
                projector, columns, ..
            } => projector.cols() * columns,
            Problem::ConstrainedAugmented { projector, .. } => projector.cols() + 1,
            Problem::Penalized { bits, n, .. } => bits * n,
            Problem::DouglasRachford { projector, .. } => projector.cols(),
        }
    }

    /// Solves from `start` and returns `(relative error, iterations)`.
    fn solve(
        &self,
        inst: &RecoveryInstance,
        start: &DenseVector,
        cfg: &FistaConfig,
    ) -> Result<(f64, usize)> {
        match self {
            Problem::Constrained {
                reg,
                projector,
                columns,
            } => {
                let obj = FnObjective::new(
                    |x: &DenseVector| reg.value(x).unwrap_or(f64::NAN),
                    |x: &DenseVector| reg.gradient(x).unwrap_or_else(|_| x.map(|_| f64::NAN)),
                );
                let k = *columns;
                let targets: Vec<DenseVector> = (0..k).map(|c| target_of(inst, c)).collect();
                let project = |x: &DenseVector| project_columns(projector, &targets, x);
                let report = fista_backtracking(&obj, project, start, cfg)?;
                let error = match inst.kind {
                    InstanceKind::OrthogonalMatrix(_) => {
                        let n = inst.n();
                        let feasible = targets.iter().enumerate().all(|(c, t)| {
                            let col = report.iterate.rows(c * n, n);
                            inst.m() == 0 || (&inst.a * col - t).norm() <= 1e-8 * (1.0 + t.norm())
                        });
                        let xm = DenseMatrix::from_column_slice(n, k, report.iterate.as_slice());
                        if feasible {
                            orthogonality_measure(&xm)
                        } else {
                            f64::INFINITY
                        }
                    }
                    _ => recovery_error(inst, &report.iterate),
                };
                Ok((error, report.iterations))
            }
            Problem::ConstrainedAugmented { reg, projector } => {
                let n = projector.cols();
                let mut start = start.clone();
                let x0 = projector.project(&start.rows(0, n).into_owned());
                start[n] = match reg {
                    Augmented::BinBeta => x0.norm_squared() / n as f64,
                    Augmented::EigMu(c) => x0.dot(&(c * &x0)) / x0.norm_squared(),
                };
                let project = |z: &DenseVector| {
                    let mut out = z.clone();
                    out.rows_mut(0, n)
                        .copy_from(&projector.project(&z.rows(0, n).into_owned()));
                    out
                };
                let report: SolveReport = match reg {
                    Augmented::BinBeta => {
                        let kind = RegularizerKind::BaselineBinBeta(BetaMode::Joint);
                        let obj = FnObjective::new(
                            |z: &DenseVector| kind.value(z).unwrap_or(f64::NAN),
                            |z: &DenseVector| {
                                kind.gradient(z).unwrap_or_else(|_| z.map(|_| f64::NAN))
                            },
                        );
                        fista_backtracking(&obj, project, &start, cfg)?
                    }
                    Augmented::EigMu(c) => {
                        let obj = FnObjective::new(
                            |z: &DenseVector| eig_mu_value(c, z),
                            |z: &DenseVector| eig_mu_gradient(c, z),
                        );
                        fista_backtracking(&obj, project, &start, cfg)?
                    }
                };
                let x = report.iterate.rows(0, n).into_owned();
                Ok((recovery_error(inst, &x), report.iterations))
            }
            Problem::Penalized { bits, lambda, n } => {
                let n = *n;
                let kind = RegularizerKind::Equ { bits: *bits };
                let a = &inst.a;
                let b = &inst.b;
                let sum_parts = |z: &DenseVector| {
                    (0..*bits).fold(DenseVector::zeros(n), |acc, p| acc + z.rows(p * n, n))
                };
                let obj = FnObjective::new(
                    |z: &DenseVector| {
                        let r = a * sum_parts(z) - b;
                        kind.value(z).unwrap_or(f64::NAN) + lambda * r.norm_squared()
                    },
                    |z: &DenseVector| {
                        let r = a * sum_parts(z) - b;
                        let fit = a.tr_mul(&r) * (2.0 * lambda);
                        let mut g = kind.gradient(z).unwrap_or_else(|_| z.map(|_| f64::NAN));
                        for p in 0..*bits {
                            let mut block = g.rows_mut(p * n, n);
                            block += &fit;
                        }
                        g
                    },
                );
                let report = fista_backtracking(&obj, |z: &DenseVector| z.clone(), start, cfg)?;
                let x = sum_parts(&report.iterate);
                Ok((recovery_error_signless(inst, &x), report.iterations))
            }
            Problem::DouglasRachford { linf, projector } => {
                let dr = DrConfig {
                    max_iter: cfg.max_iter,
                    ..DrConfig::default()
                };
                let gamma = dr.gamma;
                let report = if *linf {
                    douglas_rachford(
                        |z| prox_linf(z, gamma),
                        |z| projector.project(z),
                        |x| x.amax(),
                        start,
                        &dr,
                    )?
                } else {
                    douglas_rachford(
                        |z| prox_l1(z, gamma),
                        |z| projector.project(z),
                        |x| x.lp_norm(1),
                        start,
                        &dr,
                    )?
                };
                Ok((recovery_error(inst, &report.iterate), report.iterations))
            }
        }
    }
}

fn bind(reg: &RegularizerKind, inst: &RecoveryInstance) -> Result<RegularizerKind> {
    match (reg, &inst.eigen_matrix) {
        (RegularizerKind::Eig(c), Some(own)) if c.is_empty() => {
            Ok(RegularizerKind::Eig(own.clone()))
        }
        (RegularizerKind::Eig(c), None) if c.is_empty() => Err(Error::Incompatible(
            "eig without a matrix needs an eigenvector instance".into(),
        )),
        _ => Ok(reg.clone()),
    }
}

fn incompatible(reg: &RegularizerKind, kind: InstanceKind) -> Error {
    Error::Incompatible(format!(
        "regularizer {} on {} instances",
        reg.name(),
        kind.name()
    ))
}

fn check_compatible(reg: &RegularizerKind, kind: InstanceKind) -> Result<()> {
    let ok = match kind {
        InstanceKind::OrthogonalMatrix(k) => {
            matches!(reg, RegularizerKind::Om { k: rk } if *rk == k)
        }
        _ => {
            !matches!(
                reg,
                RegularizerKind::Om { .. } | RegularizerKind::Equ { .. }
            ) && reg.is_differentiable()
                && !matches!(reg, RegularizerKind::BaselineBinBeta(BetaMode::Joint))
        }
    };
    if ok {
        Ok(())
    } else {
        Err(incompatible(reg, kind))
    }
}

/// Right-hand side of column `c` of `A·X = B`.
fn target_of(inst: &RecoveryInstance, column: usize) -> DenseVector {
    let m = inst.m();
    inst.b.rows(column * m, m).into_owned()
}

fn project_columns(p: &AffineProjector, targets: &[DenseVector], x: &DenseVector) -> DenseVector {
    if targets.len() == 1 {
        return p.project_onto(x, &targets[0]);
    }
    let n = p.cols();
    let mut out = x.clone();
    for (c, t) in targets.iter().enumerate() {
        let col = p.project_onto(&x.rows(c * n, n).into_owned(), t);
        out.rows_mut(c * n, n).copy_from(&col);
    }
    out
}

fn recovery_error(inst: &RecoveryInstance, x: &DenseVector) -> f64 {
    match inst.kind {
        InstanceKind::SymBinary | InstanceKind::TwoBit => recovery_error_signless(inst, x),
        _ => (x - &inst.x_star).norm() / inst.x_star.norm(),
    }
}

/// `min(‖x − x*‖, ‖x + x*‖) / ‖x*‖`.
fn recovery_error_signless(inst: &RecoveryInstance, x: &DenseVector) -> f64 {
    let plus = (x - &inst.x_star).norm();
    let minus = (x + &inst.x_star).norm();
    plus.min(minus) / inst.x_star.norm()
}

fn eig_mu_value(c: &DenseMatrix, z: &DenseVector) -> f64 {
    let n = c.ncols();
    let x = z.rows(0, n);
    let r = c * x - x * z[n];
    r.norm_squared()
}

fn eig_mu_gradient(c: &DenseMatrix, z: &DenseVector) -> DenseVector {
    let n = c.ncols();
    let x = z.rows(0, n).into_owned();
    let mu = z[n];
    let r = c * &x - &x * mu;
    let gx = (c.tr_mul(&r) - &r * mu) * 2.0;
    let gmu = -2.0 * x.dot(&r);
    DenseVector::from_fn(n + 1, |i, _| if i < n { gx[i] } else { gmu })
}
