//! Closed-form values and gradients of the specific regularizers.

use serde::{Deserialize, Serialize};

use super::pair::{self, sign0, CsPair};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};

/// Power sums `Σ x_n^k` (no absolute values).
fn psum(x: &DenseVector, k: i32) -> f64 {
    x.iter().map(|v| v.powi(k)).sum()
}

/// `‖h‖²‖g − βh‖²` with `β = ⟨g,h⟩/‖h‖²`; equals `‖g‖²‖h‖² − ⟨g,h⟩²` but
/// keeps full relative precision near the zero set.
fn residual_form(g: &DenseVector, h: &DenseVector) -> f64 {
    let hh = h.norm_squared();
    if hh == 0.0 {
        return 0.0;
    }
    let beta = g.dot(h) / hh;
    hh * g
        .iter()
        .zip(h.iter())
        .map(|(a, b)| (a - beta * b).powi(2))
        .sum::<f64>()
}

/// `N·Σ(g_n − ḡ)²`, the residual form with `h = 1`.
fn centered_form(g: &DenseVector) -> f64 {
    let n = g.len() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mean = g.sum() / n;
    n * g.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
}

/// `N·Σx⁴ − (Σx²)²`, zero iff `x ∈ {−α, +α}ᴺ`.
pub fn eval_bin(x: &DenseVector) -> f64 {
    centered_form(&x.map(|v| v * v))
}

pub fn grad_bin(x: &DenseVector) -> DenseVector {
    let n = x.len() as f64;
    let s2 = psum(x, 2);
    x.map(|v| 4.0 * v * (n * v * v - s2))
}

/// `Σx²·Σx⁴ − (Σx³)²`, zero iff `x ∈ {0, α}ᴺ`.
pub fn eval_osb(x: &DenseVector) -> f64 {
    residual_form(&x.map(|v| v * v), x)
}

pub fn grad_osb(x: &DenseVector) -> DenseVector {
    let (s2, s3, s4) = (psum(x, 2), psum(x, 3), psum(x, 4));
    x.map(|v| 2.0 * v * (s4 + 2.0 * v * v * s2 - 3.0 * v * s3))
}

/// `Σx²·Σx⁶ − (Σx⁴)²`, zero iff `x ∈ {−α, 0, +α}ᴺ`.
pub fn eval_ter(x: &DenseVector) -> f64 {
    residual_form(&x.map(|v| v.powi(3)), x)
}

pub fn grad_ter(x: &DenseVector) -> DenseVector {
    let (s2, s4, s6) = (psum(x, 2), psum(x, 4), psum(x, 6));
    x.map(|v| {
        let v2 = v * v;
        2.0 * v * (s6 + 3.0 * s2 * v2 * v2 - 4.0 * s4 * v2)
    })
}

/// `‖Cx‖²‖x‖² − (xᵀCx)²`, zero iff `x` is an eigenvector of `C` or zero.
pub fn eval_eig(c: &DenseMatrix, x: &DenseVector) -> Result<f64> {
    pair::check_square_operator(c, x)?;
    Ok(residual_form(&(c * x), x))
}

/// `2‖Cx‖²x + 2‖x‖²CᵀCx − 2(xᵀCx)(C + Cᵀ)x`, valid for nonsymmetric `C`.
pub fn grad_eig(c: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    pair::check_square_operator(c, x)?;
    let cx = c * x;
    let ctx = c.tr_mul(x);
    let ctcx = c.tr_mul(&cx);
    let q = x.dot(&cx);
    Ok(x * (2.0 * cx.norm_squared()) + ctcx * (2.0 * x.norm_squared()) - (cx + ctx) * (2.0 * q))
}

pub(crate) fn om_shape(len: usize, k: usize) -> Result<usize> {
    if k == 0 || !len.is_multiple_of(k) {
        return Err(Error::Dimension(format!(
            "flattened matrix of length {len} is not a multiple of K = {k}"
        )));
    }
    let n = len / k;
    if k > n {
        return Err(Error::Dimension(format!(
            "need K ≤ N, got N = {n}, K = {k}"
        )));
    }
    Ok(n)
}

/// `K‖XᵀX‖_F² − ‖X‖_F⁴` for `X ∈ ℝ^{N×K}`, zero iff `XᵀX = αI_K`.
pub fn eval_om(x: &DenseMatrix) -> Result<f64> {
    om_shape(x.len(), x.ncols())?;
    let k = x.ncols() as f64;
    let gram = x.tr_mul(x);
    let mean = gram.trace() / k;
    let off = gram - DenseMatrix::identity(x.ncols(), x.ncols()) * mean;
    Ok(k * off.norm_squared())
}

/// `4K·X(XᵀX) − 4‖X‖_F²·X`.
pub fn grad_om(x: &DenseMatrix) -> Result<DenseMatrix> {
    om_shape(x.len(), x.ncols())?;
    let k = x.ncols() as f64;
    let gram = x.tr_mul(x);
    Ok(x * gram * (4.0 * k) - x * (4.0 * x.norm_squared()))
}

/// Auxiliary vectors `y_1, …, y_B` whose sum is the equispaced-valued vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EquispacedState {
    pub parts: Vec<DenseVector>,
}

impl EquispacedState {
    pub fn new(parts: Vec<DenseVector>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidArgument(
                "equispaced state needs B ≥ 1 parts".into(),
            ));
        };
        let n = first.len();
        if parts.iter().any(|p| p.len() != n) {
            return Err(Error::Dimension(
                "all auxiliary vectors must share one length".into(),
            ));
        }
        Ok(Self { parts })
    }

    /// Splits a stacked `[y_1; …; y_B]` vector.
    pub fn from_stacked(stacked: &DenseVector, bits: usize) -> Result<Self> {
        let n = equ_shape(stacked.len(), bits)?;
        let parts = (0..bits)
            .map(|b| stacked.rows(b * n, n).into_owned())
            .collect();
        Ok(Self { parts })
    }

    pub fn to_stacked(&self) -> DenseVector {
        let n = self.len();
        DenseVector::from_fn(n * self.bits(), |i, _| self.parts[i / n][i % n])
    }

    pub fn bits(&self) -> usize {
        self.parts.len()
    }

    /// Length `N` of each auxiliary vector.
    pub fn len(&self) -> usize {
        self.parts.first().map_or(0, |p| p.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x = Σ_b y_b`.
    pub fn reconstruct(&self) -> DenseVector {
        self.parts
            .iter()
            .fold(DenseVector::zeros(self.len()), |acc, p| acc + p)
    }
}

pub(crate) fn equ_shape(len: usize, bits: usize) -> Result<usize> {
    if bits == 0 || len == 0 || !len.is_multiple_of(bits) {
        return Err(Error::Dimension(format!(
            "stacked length {len} is not a positive multiple of B = {bits}"
        )));
    }
    Ok(len / bits)
}

fn equ_k(bits: usize) -> f64 {
    (0..bits).map(|b| 16f64.powi(b as i32)).sum()
}

/// `K·N·Σ_b Σy_b⁴ − (Σ_b 4^{b−1}Σy_b²)²` with `K = Σ_b 4^{2(b−1)}`.
pub fn eval_equ(state: &EquispacedState) -> Result<f64> {
    if state.bits() == 0 || state.is_empty() {
        return Err(Error::InvalidArgument("equispaced state is empty".into()));
    }
    let kn = equ_k(state.bits()) * state.len() as f64;
    let beta = weighted_square_sum(state) / kn;
    let residual: f64 = state
        .parts
        .iter()
        .enumerate()
        .map(|(b, y)| {
            let w = 4f64.powi(b as i32);
            y.iter().map(|v| (v * v - beta * w).powi(2)).sum::<f64>()
        })
        .sum();
    Ok(kn * residual)
}

fn weighted_square_sum(state: &EquispacedState) -> f64 {
    state
        .parts
        .iter()
        .enumerate()
        .map(|(b, y)| 4f64.powi(b as i32) * psum(y, 2))
        .sum()
}

/// `∂/∂y_{b,n} = 4y_{b,n}(K·N·y_{b,n}² − 4^{b−1}·Σ_{b'}4^{b'−1}Σy_{b'}²)`.
pub fn grad_equ(state: &EquispacedState) -> Result<EquispacedState> {
    if state.bits() == 0 || state.is_empty() {
        return Err(Error::InvalidArgument("equispaced state is empty".into()));
    }
    let kn = equ_k(state.bits()) * state.len() as f64;
    let weighted = weighted_square_sum(state);
    let parts = state
        .parts
        .iter()
        .enumerate()
        .map(|(b, y)| {
            let w = 4f64.powi(b as i32) * weighted;
            y.map(|v| 4.0 * v * (kn * v * v - w))
        })
        .collect();
    Ok(EquispacedState { parts })
}

/// `N·Σ(1+x²)⁻² − (Σ(1+x²)⁻¹)²`, zero iff `x ∈ {−α, +α}ᴺ`; at most `N²`.
pub fn eval_bbin(x: &DenseVector) -> f64 {
    centered_form(&x.map(|v| 1.0 / (1.0 + v * v)))
}

/// `4x(1+x²)⁻²(Σ(1+x_k²)⁻¹ − N(1+x²)⁻¹)`.
pub fn grad_bbin(x: &DenseVector) -> DenseVector {
    let n = x.len() as f64;
    let s: f64 = x.iter().map(|v| 1.0 / (1.0 + v * v)).sum();
    x.map(|v| {
        let g = 1.0 / (1.0 + v * v);
        4.0 * g * g * v * (s - n * g)
    })
}

/// `N·Σe^{−2x²} − (Σe^{−x²})²`, zero iff `x ∈ {−α, +α}ᴺ`; at most `N²`.
pub fn eval_bin_exp(x: &DenseVector) -> f64 {
    centered_form(&x.map(|v| (-v * v).exp()))
}

/// `4x(e^{−x²}Σe^{−x_k²} − N·e^{−2x²})`.
pub fn grad_bin_exp(x: &DenseVector) -> DenseVector {
    let n = x.len() as f64;
    let s: f64 = x.iter().map(|v| (-v * v).exp()).sum();
    x.map(|v| {
        let g = (-v * v).exp();
        4.0 * v * (g * s - n * g * g)
    })
}

/// `N·Σx² − ‖x‖₁²`, the scaled variance of `|x|`.
pub fn eval_nondiff_sq(x: &DenseVector) -> f64 {
    let n = x.len() as f64;
    n * x.norm_squared() - x.lp_norm(1).powi(2)
}

/// `√N·‖x‖₂ − ‖x‖₁`.
pub fn eval_nondiff_root(x: &DenseVector) -> f64 {
    (x.len() as f64).sqrt() * x.norm() - x.lp_norm(1)
}

/// Subgradient `2N·x − 2‖x‖₁·sign(x)` with `sign(0) = 0`.
pub fn subgrad_nondiff_sq(x: &DenseVector) -> DenseVector {
    let n = x.len() as f64;
    let l1 = x.lp_norm(1);
    x.map(|v| 2.0 * n * v - 2.0 * l1 * sign0(v))
}

/// Subgradient `√N·x/‖x‖₂ − sign(x)`, with `0` in place of `x/‖x‖₂` at the origin.
pub fn subgrad_nondiff_root(x: &DenseVector) -> DenseVector {
    let n = x.len() as f64;
    let norm = x.norm();
    x.map(|v| {
        let radial = if norm > 0.0 { n.sqrt() * v / norm } else { 0.0 };
        radial - sign0(v)
    })
}

/// `(N+1)(Σx⁴ + α⁴) − (Σx² + α²)²`, zero iff `x ∈ {−α, +α}ᴺ` for the given `α`.
pub fn eval_fixed_scale(alpha: f64, x: &DenseVector) -> f64 {
    let g = DenseVector::from_fn(x.len() + 1, |i, _| {
        if i < x.len() {
            x[i] * x[i]
        } else {
            alpha * alpha
        }
    });
    centered_form(&g)
}

pub fn grad_fixed_scale(alpha: f64, x: &DenseVector) -> DenseVector {
    let n1 = x.len() as f64 + 1.0;
    let s2 = psum(x, 2) + alpha * alpha;
    x.map(|v| 4.0 * n1 * v.powi(3) - 4.0 * s2 * v)
}

fn check_ns(c: &DenseMatrix, x: &DenseVector) -> Result<()> {
    if c.ncols() != x.len() {
        return Err(Error::Dimension(format!(
            "C has {} columns but x has length {}",
            c.ncols(),
            x.len()
        )));
    }
    Ok(())
}

/// `‖Cx‖² + (‖x‖² − 1)²`, zero iff `Cx = 0` and `‖x‖ = 1`.
pub fn eval_ns(c: &DenseMatrix, x: &DenseVector) -> Result<f64> {
    check_ns(c, x)?;
    Ok((c * x).norm_squared() + (x.norm_squared() - 1.0).powi(2))
}

pub fn grad_ns(c: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    check_ns(c, x)?;
    Ok(c.tr_mul(&(c * x)) * 2.0 + x * (4.0 * (x.norm_squared() - 1.0)))
}

/// Scale handling of the `Σ(x² − β)²` binarization baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BetaMode {
    /// `β` known and fixed.
    Fixed(f64),
    /// `β` is appended to the input as an extra optimization coordinate.
    Joint,
}

fn beta_split(x: &DenseVector, mode: BetaMode) -> Result<(DenseVector, f64)> {
    match mode {
        BetaMode::Fixed(beta) => Ok((x.clone(), beta)),
        BetaMode::Joint => {
            if x.len() < 2 {
                return Err(Error::Dimension(
                    "joint β input needs at least [x₁; β]".into(),
                ));
            }
            let n = x.len() - 1;
            Ok((x.rows(0, n).into_owned(), x[n]))
        }
    }
}

/// `Σ(x_n² − β)²`.
pub fn eval_bin_beta(x: &DenseVector, mode: BetaMode) -> Result<f64> {
    let (v, beta) = beta_split(x, mode)?;
    Ok(v.iter().map(|t| (t * t - beta).powi(2)).sum())
}

pub fn grad_bin_beta(x: &DenseVector, mode: BetaMode) -> Result<DenseVector> {
    let (v, beta) = beta_split(x, mode)?;
    let gx = v.map(|t| 4.0 * t * (t * t - beta));
    Ok(match mode {
        BetaMode::Fixed(_) => gx,
        BetaMode::Joint => {
            let gb = -2.0 * v.iter().map(|t| t * t - beta).sum::<f64>();
            DenseVector::from_fn(x.len(), |i, _| if i < v.len() { gx[i] } else { gb })
        }
    })
}

/// Which regularizer a value/gradient evaluation dispatches to.
///
/// Every kind operates on a flat vector: `Om` expects a column-major
/// `N×K` matrix, `Equ` the stacked `[y_1; …; y_B]`, and
/// `BaselineBinBeta(Joint)` the augmented `[x; β]`.
#[derive(Debug, Clone, PartialEq)]
pub enum RegularizerKind {
    Bin,
    Osb,
    Ter,
    Eig(DenseMatrix),
    Om { k: usize },
    Equ { bits: usize },
    BBin,
    BinExp,
    NonDiffSq,
    NonDiffRoot,
    FixedScale(f64),
    Ns(DenseMatrix),
    BaselineBinBeta(BetaMode),
}

impl RegularizerKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bin => "bin",
            Self::Osb => "osb",
            Self::Ter => "ter",
            Self::Eig(_) => "eig",
            Self::Om { .. } => "om",
            Self::Equ { .. } => "equ",
            Self::BBin => "bbin",
            Self::BinExp => "bin-exp",
            Self::NonDiffSq => "nondiff-sq",
            Self::NonDiffRoot => "nondiff-root",
            Self::FixedScale(_) => "fixed-scale",
            Self::Ns(_) => "ns",
            Self::BaselineBinBeta(BetaMode::Fixed(_)) => "bin-beta-fixed",
            Self::BaselineBinBeta(BetaMode::Joint) => "bin-beta-joint",
        }
    }

    pub fn is_differentiable(&self) -> bool {
        !matches!(self, Self::NonDiffSq | Self::NonDiffRoot)
    }

    /// The `(g, h)` pair realizing this kind, if it is a CS regularizer.
    /// `NonDiffRoot` is the Hölder (`p = q = 2, r = 1`) form of the returned pair.
    pub fn pair(&self) -> Option<Box<dyn CsPair + Send + Sync>> {
        Some(match self {
            Self::Bin => Box::new(pair::BinPair),
            Self::Osb => Box::new(pair::OsbPair),
            Self::Ter => Box::new(pair::TerPair),
            Self::Eig(c) => Box::new(pair::EigPair { c: c.clone() }),
            Self::Om { k } => Box::new(pair::OmPair { k: *k }),
            Self::Equ { bits } => Box::new(pair::EquPair { bits: *bits }),
            Self::BBin => Box::new(pair::BBinPair),
            Self::BinExp => Box::new(pair::BinExpPair),
            Self::NonDiffSq | Self::NonDiffRoot => Box::new(pair::AbsPair),
            Self::FixedScale(alpha) => Box::new(pair::FixedScalePair { alpha: *alpha }),
            Self::Ns(c) => Box::new(pair::NsPair { c: c.clone() }),
            Self::BaselineBinBeta(_) => return None,
        })
    }

    pub fn value(&self, x: &DenseVector) -> Result<f64> {
        match self {
            Self::Bin => Ok(eval_bin(x)),
            Self::Osb => Ok(eval_osb(x)),
            Self::Ter => Ok(eval_ter(x)),
            Self::Eig(c) => eval_eig(c, x),
            Self::Om { k } => {
                let n = om_shape(x.len(), *k)?;
                eval_om(&DenseMatrix::from_column_slice(n, *k, x.as_slice()))
            }
            Self::Equ { bits } => eval_equ(&EquispacedState::from_stacked(x, *bits)?),
            Self::BBin => Ok(eval_bbin(x)),
            Self::BinExp => Ok(eval_bin_exp(x)),
            Self::NonDiffSq => Ok(eval_nondiff_sq(x)),
            Self::NonDiffRoot => Ok(eval_nondiff_root(x)),
            Self::FixedScale(alpha) => Ok(eval_fixed_scale(*alpha, x)),
            Self::Ns(c) => eval_ns(c, x),
            Self::BaselineBinBeta(mode) => eval_bin_beta(x, *mode),
        }
    }

    /// Analytic gradient; rejects the non-differentiable kinds.
    pub fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        match self {
            Self::Bin => Ok(grad_bin(x)),
            Self::Osb => Ok(grad_osb(x)),
            Self::Ter => Ok(grad_ter(x)),
            Self::Eig(c) => grad_eig(c, x),
            Self::Om { k } => {
                let n = om_shape(x.len(), *k)?;
                let g = grad_om(&DenseMatrix::from_column_slice(n, *k, x.as_slice()))?;
                Ok(DenseVector::from_column_slice(g.as_slice()))
            }
            Self::Equ { bits } => {
                Ok(grad_equ(&EquispacedState::from_stacked(x, *bits)?)?.to_stacked())
            }
            Self::BBin => Ok(grad_bbin(x)),
            Self::BinExp => Ok(grad_bin_exp(x)),
            Self::NonDiffSq | Self::NonDiffRoot => Err(Error::NotDifferentiable(self.name())),
            Self::FixedScale(alpha) => Ok(grad_fixed_scale(*alpha, x)),
            Self::Ns(c) => grad_ns(c, x),
            Self::BaselineBinBeta(mode) => grad_bin_beta(x, *mode),
        }
    }

    /// Gradient where it exists, otherwise the subgradient with `sign(0) = 0`.
    pub fn subgradient(&self, x: &DenseVector) -> Result<DenseVector> {
        match self {
            Self::NonDiffSq => Ok(subgrad_nondiff_sq(x)),
            Self::NonDiffRoot => Ok(subgrad_nondiff_root(x)),
            _ => self.gradient(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::from_row_slice(x)
    }

    #[test]
    fn bin_examples() {
        assert_eq!(eval_bin(&v(&[1.0, 1.0])), 0.0);
        assert_eq!(eval_bin(&v(&[3.0, -3.0, 3.0])), 0.0);
        assert_eq!(eval_bin(&v(&[1.0, 0.0])), 1.0);
        assert_eq!(eval_bin(&v(&[2.0, 1.0])), 9.0);
        assert_eq!(grad_bin(&v(&[1.0, -1.0])), v(&[0.0, 0.0]));
        assert_eq!(grad_bin(&v(&[1.0, 0.0])), v(&[4.0, 0.0]));
    }

    #[test]
    fn osb_examples() {
        assert_eq!(eval_osb(&v(&[0.0, 5.0, 5.0])), 0.0);
        assert_eq!(eval_osb(&v(&[1.0, -1.0])), 4.0);
        assert_eq!(eval_osb(&v(&[2.0, 1.0])), 4.0);
    }

    #[test]
    fn ter_examples() {
        assert_eq!(eval_ter(&v(&[2.0, 0.0, -2.0])), 0.0);
        assert_eq!(eval_ter(&v(&[2.0, 1.0])), 36.0);
        assert_eq!(eval_ter(&v(&[1.0, 1.0, 1.0])), 0.0);
    }

    #[test]
    fn eig_examples() {
        let x = v(&[0.3, -1.0, 2.0]);
        assert_eq!(eval_eig(&DenseMatrix::identity(3, 3), &x).unwrap(), 0.0);
        let swap = DenseMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(eval_eig(&swap, &v(&[1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(eval_eig(&swap, &v(&[1.0, 0.0])).unwrap(), 1.0);
        assert!(eval_eig(&swap, &x).is_err());
        assert!(eval_eig(&DenseMatrix::zeros(2, 3), &x).is_err());
    }

    #[test]
    fn om_examples() {
        assert_eq!(eval_om(&DenseMatrix::identity(2, 2)).unwrap(), 0.0);
        let d = DenseMatrix::from_diagonal(&v(&[1.0, 2.0]));
        assert_eq!(eval_om(&d).unwrap(), 9.0);
        let tall = DenseMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(eval_om(&tall).unwrap(), 0.0);
        assert!(eval_om(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn equ_examples() {
        let st = |a: &[f64], b: &[f64]| EquispacedState::new(vec![v(a), v(b)]).unwrap();
        assert_eq!(eval_equ(&st(&[1.0], &[2.0])).unwrap(), 0.0);
        assert_relative_eq!(
            eval_equ(&st(&[1.0], &[1.0])).unwrap(),
            9.0,
            max_relative = 1e-14
        );
        assert_eq!(eval_equ(&st(&[1.0, -1.0], &[2.0, -2.0])).unwrap(), 0.0);
        assert!(EquispacedState::new(vec![]).is_err());
        assert!(EquispacedState::new(vec![v(&[1.0]), v(&[1.0, 2.0])]).is_err());
        let s = st(&[1.0, -1.0], &[2.0, 2.0]);
        assert_eq!(s.reconstruct(), v(&[3.0, 1.0]));
        assert_eq!(
            EquispacedState::from_stacked(&s.to_stacked(), 2).unwrap(),
            s
        );
    }

    #[test]
    fn bounded_examples() {
        assert_eq!(eval_bbin(&v(&[1.0, -1.0])), 0.0);
        assert_relative_eq!(eval_bbin(&v(&[1.0, 0.0])), 0.25, epsilon = 1e-15);
        assert_relative_eq!(
            eval_bin_exp(&v(&[1.0, 0.0])),
            (1.0 - (-1f64).exp()).powi(2),
            epsilon = 1e-15
        );
        assert_relative_eq!(eval_bin_exp(&v(&[1.0, 0.0])), 0.39958, epsilon = 1e-5);
        // bounded above by N²
        let far = v(&[0.0, 1e3, 1e3, 1e3]);
        assert!(eval_bbin(&far) <= 16.0 && eval_bin_exp(&far) <= 16.0);
    }

    #[test]
    fn nondiff_examples() {
        assert_eq!(eval_nondiff_sq(&v(&[1.0, -1.0])), 0.0);
        assert_eq!(eval_nondiff_sq(&v(&[1.0, 0.0])), 1.0);
        assert_relative_eq!(eval_nondiff_root(&v(&[1.0, 0.0])), 2f64.sqrt() - 1.0);
        // N²·Var(|x|)
        let x = v(&[0.5, -2.0, 1.5, 3.0]);
        let a = x.map(f64::abs);
        let mean = a.mean();
        let var = a.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / 4.0;
        assert_relative_eq!(eval_nondiff_sq(&x), 16.0 * var, max_relative = 1e-12);
    }

    #[test]
    fn nondiff_gradient_rejected_but_subgradient_available() {
        let x = v(&[1.0, 0.0, -2.0]);
        for kind in [RegularizerKind::NonDiffSq, RegularizerKind::NonDiffRoot] {
            assert!(matches!(
                kind.gradient(&x),
                Err(Error::NotDifferentiable(_))
            ));
            assert!(kind.subgradient(&x).is_ok());
        }
        assert_eq!(subgrad_nondiff_sq(&x), v(&[6.0 - 6.0, 0.0, -12.0 + 6.0]));
        assert_eq!(
            subgrad_nondiff_root(&DenseVector::zeros(2)),
            DenseVector::zeros(2)
        );
    }

    #[test]
    fn fixed_scale_examples() {
        assert_eq!(eval_fixed_scale(1.0, &v(&[1.0, 1.0])), 0.0);
        assert_eq!(eval_fixed_scale(1.0, &v(&[2.0, 2.0])), 18.0);
        assert_eq!(eval_fixed_scale(1.0, &v(&[1.0])), 0.0);
    }

    #[test]
    fn ns_examples() {
        let c = DenseMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        assert_eq!(eval_ns(&c, &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(eval_ns(&c, &v(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(eval_ns(&c, &v(&[0.0, 0.0])).unwrap(), 1.0);
        assert!(eval_ns(&c, &v(&[0.0])).is_err());
    }

    #[test]
    fn bin_beta_baselines() {
        let x = v(&[1.0, -2.0]);
        assert_eq!(eval_bin_beta(&x, BetaMode::Fixed(1.0)).unwrap(), 9.0);
        let joint = v(&[1.0, -2.0, 1.0]);
        assert_eq!(eval_bin_beta(&joint, BetaMode::Joint).unwrap(), 9.0);
        assert_eq!(
            grad_bin_beta(&joint, BetaMode::Joint).unwrap(),
            v(&[0.0, -24.0, -6.0])
        );
        assert!(eval_bin_beta(&v(&[1.0]), BetaMode::Joint).is_err());
    }

    #[test]
    fn kind_dispatch_matches_direct_calls() {
        let x = v(&[0.3, -1.1, 0.8, 2.0]);
        assert_eq!(RegularizerKind::Bin.value(&x).unwrap(), eval_bin(&x));
        let om = RegularizerKind::Om { k: 2 };
        let m = DenseMatrix::from_column_slice(2, 2, x.as_slice());
        assert_eq!(om.value(&x).unwrap(), eval_om(&m).unwrap());
        assert!(RegularizerKind::Om { k: 3 }.value(&x).is_err());
        let equ = RegularizerKind::Equ { bits: 2 };
        let st = EquispacedState::from_stacked(&x, 2).unwrap();
        assert_eq!(equ.value(&x).unwrap(), eval_equ(&st).unwrap());
    }
}
