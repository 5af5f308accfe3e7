//! Closed-form weight quantization.
//!
//! [`binarize`] maps `w` to `α·sign(w)` with `α = ‖w‖₁/N`. [`ternarize`]
//! zeroes every entry with magnitude below a threshold `τ` and maps the rest
//! to `±α`, where `τ` maximizes `(Σ_{|w_i| ≥ τ} |w_i|)² / #{|w_i| ≥ τ}` and
//! `α` is the mean magnitude of the kept entries. Both choices minimize
//! `‖w − levels‖²` over their level sets.

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite_vector, DenseVector};

#[derive(Debug, Clone, PartialEq)]
pub struct QuantResult {
    pub levels: DenseVector,
    pub scale: f64,
    /// Magnitude cutoff; `0` for binarization.
    pub threshold: f64,
    /// `‖w − levels‖₂²`.
    pub objective: f64,
}

impl QuantResult {
    fn new(w: &DenseVector, levels: DenseVector, scale: f64, threshold: f64) -> Self {
        let objective = (w - &levels).norm_squared();
        Self {
            levels,
            scale,
            threshold,
            objective,
        }
    }
}

/// `sign(0)` is taken as `+1`.
pub fn binarize(w: &DenseVector) -> Result<QuantResult> {
    check(w)?;
    let alpha = w.lp_norm(1) / w.len() as f64;
    let levels = w.map(|v| if v < 0.0 { -alpha } else { alpha });
    Ok(QuantResult::new(w, levels, alpha, 0.0))
}

/// Threshold search over all distinct nonzero magnitudes in `O(N log N)`.
/// Ties in the score go to the larger threshold.
pub fn ternarize(w: &DenseVector) -> Result<QuantResult> {
    check(w)?;
    let mut mags: Vec<f64> = w.iter().map(|v| v.abs()).filter(|m| *m > 0.0).collect();
    if mags.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot ternarize the zero vector".into(),
        ));
    }
    mags.sort_by(|a, b| b.total_cmp(a));
    // scan thresholds from the largest down; a candidate is scored only once
    // all entries equal to it are included
    let mut sum = 0.0;
    let mut best: Option<(f64, f64, usize)> = None;
    for (idx, &m) in mags.iter().enumerate() {
        sum += m;
        let count = idx + 1;
        if count < mags.len() && mags[count] == m {
            continue;
        }
        let score = sum * sum / count as f64;
        if best.is_none_or(|(s, _, _)| score > s) {
            best = Some((score, m, count));
        }
    }
    let (_, tau, count) = best.expect("nonempty candidate set");
    let alpha = mags[..count].iter().sum::<f64>() / count as f64;
    Ok(QuantResult::new(
        w,
        ternary_levels(w, tau, alpha),
        alpha,
        tau,
    ))
}

/// Brute-force reference for [`ternarize`]: every distinct nonzero magnitude
/// is tried as `τ` and the one with the smallest `‖w − levels‖²` is kept.
pub fn ternarize_oracle(w: &DenseVector) -> Result<QuantResult> {
    const MAX_N: usize = 10_000;
    check(w)?;
    if w.len() > MAX_N {
        return Err(Error::InvalidArgument(format!(
            "oracle needs N ≤ {MAX_N}, got {}",
            w.len()
        )));
    }
    let mut candidates: Vec<f64> = w.iter().map(|v| v.abs()).filter(|m| *m > 0.0).collect();
    if candidates.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot ternarize the zero vector".into(),
        ));
    }
    candidates.sort_by(|a, b| b.total_cmp(a));
    candidates.dedup();
    let mut best: Option<QuantResult> = None;
    for tau in candidates {
        let kept: Vec<f64> = w.iter().map(|v| v.abs()).filter(|m| *m >= tau).collect();
        let alpha = kept.iter().sum::<f64>() / kept.len() as f64;
        let result = QuantResult::new(w, ternary_levels(w, tau, alpha), alpha, tau);
        if best.as_ref().is_none_or(|b| result.objective < b.objective) {
            best = Some(result);
        }
    }
    Ok(best.expect("nonempty candidate set"))
}

fn ternary_levels(w: &DenseVector, tau: f64, alpha: f64) -> DenseVector {
    w.map(|v| {
        if v.abs() < tau {
            0.0
        } else if v < 0.0 {
            -alpha
        } else {
            alpha
        }
    })
}

fn check(w: &DenseVector) -> Result<()> {
    if w.is_empty() {
        return Err(Error::Dimension("weight vector is empty".into()));
    }
    ensure_finite_vector(w, "weights")
}
