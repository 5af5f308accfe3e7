use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{run_trial, Method};
use super::{gen_instance, InstanceKind};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, RngStream};
use crate::regularizers::RegularizerKind;
use crate::solvers::FistaConfig;

/// `‖XᵀX − ᾱI‖_F / ᾱ` with `ᾱ = trace(XᵀX)/K`; infinite when `X = 0`.
pub fn orthogonality_measure(x: &DenseMatrix) -> f64 {
    let k = x.ncols();
    let gram = x.tr_mul(x);
    let alpha = gram.trace() / k as f64;
    if alpha <= 0.0 {
        return f64::INFINITY;
    }
    (gram - DenseMatrix::identity(k, k) * alpha).norm() / alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthoSummary {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Largest orthogonality measure over all trials.
    pub worst_measure: f64,
}

/// Recovers matrices with orthogonal columns from `A·X = B` by minimizing
/// the orthogonal-matrix regularizer under the columnwise constraint.
/// Trial `t` uses stream `t` of `base_seed`.
pub fn run_orthogonal(
    n: usize,
    k: usize,
    m: usize,
    trials: usize,
    base_seed: u64,
    cfg: &FistaConfig,
) -> Result<OrthoSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let kind = InstanceKind::OrthogonalMatrix(k);
    let method = Method::Regularizer(RegularizerKind::Om { k });
    let measures: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let inst = gen_instance(kind, n, m, &mut RngStream::new(base_seed, t))?;
            Ok(run_trial(&inst, &method, cfg)?.relative_error)
        })
        .collect::<Result<_>>()?;
    let successes = measures
        .iter()
        .filter(|e| **e <= super::SUCCESS_THRESHOLD)
        .count();
    Ok(OrthoSummary {
        n,
        k,
        m,
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        worst_measure: measures.iter().copied().fold(0.0, f64::max),
    })
}
