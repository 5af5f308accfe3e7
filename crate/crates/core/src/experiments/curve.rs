use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{run_trial, Method, TrialOutcome};
use super::{gen_instance, InstanceKind};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::linalg::RngStream;
use crate::solvers::FistaConfig;

/// One point of a success-probability curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessCurveRow {
    pub ratio: f64,
    pub success_prob: f64,
    /// `sqrt(p(1 − p)/trials)`.
    pub stderr: f64,
    pub trials: usize,
}

impl SuccessCurveRow {
    pub fn from_outcomes(ratio: f64, outcomes: &[TrialOutcome]) -> Self {
        let trials = outcomes.len();
        let p = outcomes.iter().filter(|o| o.success).count() as f64 / trials as f64;
        Self {
            ratio,
            success_prob: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// Success probability of `method` on `kind` instances at each `M` in
/// `m_list`, with ratio `M/N`.
///
/// Trial `t` at sweep index `r` draws its instance from stream
/// `r·trials + t` of `base_seed`, so two methods run with the same seed see
/// identical instances. Trials run on the current rayon pool.
pub fn success_curve(
    kind: InstanceKind,
    method: &Method,
    n: usize,
    m_list: &[usize],
    trials: usize,
    base_seed: u64,
    cfg: &FistaConfig,
) -> Result<Vec<SuccessCurveRow>> {
    let points: Vec<(InstanceKind, usize, f64)> = m_list
        .iter()
        .map(|&m| (kind, m, m as f64 / n as f64))
        .collect();
    curve(&points, method, n, trials, base_seed, cfg)
}

/// Sparse-recovery curve at fixed `M`, sweeping the support size `K` and
/// reporting the density `K/N` as the ratio. `sparse` maps `K` to the
/// instance kind.
#[allow(clippy::too_many_arguments)]
pub fn sparse_success_curve(
    sparse: fn(usize) -> InstanceKind,
    method: &Method,
    n: usize,
    m: usize,
    k_list: &[usize],
    trials: usize,
    base_seed: u64,
    cfg: &FistaConfig,
) -> Result<Vec<SuccessCurveRow>> {
    let points: Vec<(InstanceKind, usize, f64)> = k_list
        .iter()
        .map(|&k| (sparse(k), m, k as f64 / n as f64))
        .collect();
    curve(&points, method, n, trials, base_seed, cfg)
}

/// Two-bit recovery rate at one `M`: unconstrained penalized equispaced
/// regularizer, `cfg.restarts` initializations per instance.
pub fn run_two_bit(
    n: usize,
    m: usize,
    lambda: f64,
    trials: usize,
    base_seed: u64,
    cfg: &FistaConfig,
) -> Result<SuccessCurveRow> {
    let method = Method::PenalizedEquispaced { bits: 2, lambda };
    let rows = success_curve(
        InstanceKind::TwoBit,
        &method,
        n,
        &[m],
        trials,
        base_seed,
        cfg,
    )?;
    Ok(rows[0])
}

fn curve(
    points: &[(InstanceKind, usize, f64)],
    method: &Method,
    n: usize,
    trials: usize,
    base_seed: u64,
    cfg: &FistaConfig,
) -> Result<Vec<SuccessCurveRow>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|r| (0..trials).map(move |t| (r, t)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(r, t)| {
            let (kind, m, _) = points[r];
            let stream = (r * trials + t) as u64;
            let inst = gen_instance(kind, n, m, &mut RngStream::new(base_seed, stream))?;
            run_trial(&inst, method, cfg)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SuccessCurveRow> = points
        .iter()
        .enumerate()
        .map(|(r, &(_, _, ratio))| {
            SuccessCurveRow::from_outcomes(ratio, &outcomes[r * trials..(r + 1) * trials])
        })
        .collect();
    rows.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
    Ok(rows)
}

/// Writes `ratio,success_prob,stderr,trials` with 6 significant digits.
pub fn write_curve_csv<W: Write>(rows: &[SuccessCurveRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "ratio,success_prob,stderr,trials")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            sig(row.ratio, 6),
            sig(row.success_prob, 6),
            sig(row.stderr, 6),
            row.trials
        )?;
    }
    Ok(())
}
