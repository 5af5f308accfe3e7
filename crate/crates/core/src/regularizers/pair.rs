//! Generic CS regularizer built from a pair of maps `(g, h)`.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};

/// Two maps `g, h : ℝᴺ → ℝᴹ` with their adjoint Jacobian products.
///
/// The regularizer `‖g‖²‖h‖² − ⟨g, h⟩²` vanishes exactly on the inputs where
/// `g(x)` and `h(x)` are linearly dependent.
pub trait CsPair {
    /// Validates the input before `g`/`h` are evaluated.
    fn check_input(&self, _x: &DenseVector) -> Result<()> {
        Ok(())
    }

    fn g(&self, x: &DenseVector) -> DenseVector;

    fn h(&self, x: &DenseVector) -> DenseVector;

    /// `J_g(x)ᵀ·v`.
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector;

    /// `J_h(x)ᵀ·v`.
    fn h_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector;
}

type MapFn = dyn Fn(&DenseVector) -> DenseVector + Send + Sync;
type AdjointFn = dyn Fn(&DenseVector, &DenseVector) -> DenseVector + Send + Sync;

/// A pair assembled from closures, for user-supplied structures.
pub struct FnPair {
    g: Box<MapFn>,
    h: Box<MapFn>,
    g_adj: Box<AdjointFn>,
    h_adj: Box<AdjointFn>,
}

impl FnPair {
    pub fn new(
        g: impl Fn(&DenseVector) -> DenseVector + Send + Sync + 'static,
        h: impl Fn(&DenseVector) -> DenseVector + Send + Sync + 'static,
        g_adjoint: impl Fn(&DenseVector, &DenseVector) -> DenseVector + Send + Sync + 'static,
        h_adjoint: impl Fn(&DenseVector, &DenseVector) -> DenseVector + Send + Sync + 'static,
    ) -> Self {
        Self {
            g: Box::new(g),
            h: Box::new(h),
            g_adj: Box::new(g_adjoint),
            h_adj: Box::new(h_adjoint),
        }
    }
}

impl CsPair for FnPair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        (self.g)(x)
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        (self.h)(x)
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        (self.g_adj)(x, v)
    }
    fn h_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        (self.h_adj)(x, v)
    }
}

fn eval_pair(pair: &dyn CsPair, x: &DenseVector) -> Result<(DenseVector, DenseVector)> {
    pair.check_input(x)?;
    let g = pair.g(x);
    let h = pair.h(x);
    if g.len() != h.len() {
        return Err(Error::Dimension(format!(
            "g(x) has length {} but h(x) has length {}",
            g.len(),
            h.len()
        )));
    }
    Ok((g, h))
}

/// `‖g(x)‖²‖h(x)‖² − ⟨g(x), h(x)⟩²`.
pub fn cs_value(pair: &dyn CsPair, x: &DenseVector) -> Result<f64> {
    let (g, h) = eval_pair(pair, x)?;
    let gh = g.dot(&h);
    Ok(g.norm_squared() * h.norm_squared() - gh * gh)
}

/// Gradient of [`cs_value`]:
/// `2‖h‖²J_gᵀg + 2‖g‖²J_hᵀh − 2⟨g,h⟩(J_gᵀh + J_hᵀg)`.
pub fn cs_grad(pair: &dyn CsPair, x: &DenseVector) -> Result<DenseVector> {
    let (g, h) = eval_pair(pair, x)?;
    let gg = g.norm_squared();
    let hh = h.norm_squared();
    let gh = g.dot(&h);
    // J_gᵀ(‖h‖²g − ⟨g,h⟩h) + J_hᵀ(‖g‖²h − ⟨g,h⟩g)
    let vg = &g * hh - &h * gh;
    let vh = &h * gg - &g * gh;
    Ok((pair.g_adjoint(x, &vg) + pair.h_adjoint(x, &vh)) * 2.0)
}

fn p_norm(v: &DenseVector, p: f64) -> f64 {
    if p == 2.0 {
        v.norm()
    } else if p == 1.0 {
        v.lp_norm(1)
    } else {
        v.iter().map(|e| e.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn check_exponents(p: f64, q: f64, r: f64) -> Result<()> {
    if !(p >= 1.0 && q >= 1.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Hölder exponents must satisfy p, q ≥ 1, got p = {p}, q = {q}"
        )));
    }
    if (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "Hölder exponents must be conjugate (1/p + 1/q = 1), got p = {p}, q = {q}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "power r must be positive, got {r}"
        )));
    }
    Ok(())
}

/// Hölder regularizer `‖g‖_p^r ‖h‖_q^r − |⟨g, h⟩|^r` for conjugate `p`, `q`.
pub fn holder_value(pair: &dyn CsPair, x: &DenseVector, p: f64, q: f64, r: f64) -> Result<f64> {
    check_exponents(p, q, r)?;
    let (g, h) = eval_pair(pair, x)?;
    Ok((p_norm(&g, p) * p_norm(&h, q)).powf(r) - g.dot(&h).abs().powf(r))
}

/// Scale-invariant Hölder regularizer
/// `(‖g‖_p^r ‖h‖_q^r + ε) / (|⟨g, h⟩|^r + ε) − 1`.
pub fn scale_invariant_value(
    pair: &dyn CsPair,
    x: &DenseVector,
    p: f64,
    q: f64,
    r: f64,
    eps: f64,
) -> Result<f64> {
    check_exponents(p, q, r)?;
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ε must be nonnegative, got {eps}"
        )));
    }
    let (g, h) = eval_pair(pair, x)?;
    let numerator = (p_norm(&g, p) * p_norm(&h, q)).powf(r) + eps;
    let denominator = g.dot(&h).abs().powf(r) + eps;
    if denominator == 0.0 {
        return Err(Error::InvalidArgument(
            "⟨g(x), h(x)⟩ = 0 with ε = 0 leaves the ratio undefined".into(),
        ));
    }
    Ok(numerator / denominator - 1.0)
}

/// Minimizer `⟨g, h⟩ / ‖h‖²` of `‖g − βh‖²` over `β`.
pub fn closed_form_beta(g: &DenseVector, h: &DenseVector) -> Result<f64> {
    if g.len() != h.len() {
        return Err(Error::Dimension(format!(
            "g has length {} but h has length {}",
            g.len(),
            h.len()
        )));
    }
    let hh = h.norm_squared();
    if hh == 0.0 {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    Ok(g.dot(h) / hh)
}

/// Right-hand side of the auto-scale identity: `‖h‖²·‖g − β*h‖²`.
pub fn auto_scale_value(pair: &dyn CsPair, x: &DenseVector) -> Result<f64> {
    let (g, h) = eval_pair(pair, x)?;
    if h.norm_squared() == 0.0 {
        return Ok(0.0);
    }
    let beta = closed_form_beta(&g, &h)?;
    Ok(h.norm_squared() * (&g - &h * beta).norm_squared())
}

// Built-in pairs.

/// `g = x², h = 1`: symmetric binary.
#[derive(Debug, Clone, Copy, Default)]
pub struct BinPair;

impl CsPair for BinPair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        x.map(|v| v * v)
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        DenseVector::from_element(x.len(), 1.0)
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        x.component_mul(v) * 2.0
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

/// `g = x², h = x`: one-sided binary.
#[derive(Debug, Clone, Copy, Default)]
pub struct OsbPair;

impl CsPair for OsbPair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        x.map(|v| v * v)
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        x.clone()
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        x.component_mul(v) * 2.0
    }
    fn h_adjoint(&self, _x: &DenseVector, v: &DenseVector) -> DenseVector {
        v.clone()
    }
}

/// `g = x³, h = x`: symmetric ternary.
#[derive(Debug, Clone, Copy, Default)]
pub struct TerPair;

impl CsPair for TerPair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        x.map(|v| v * v * v)
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        x.clone()
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        x.zip_map(v, |a, b| 3.0 * a * a * b)
    }
    fn h_adjoint(&self, _x: &DenseVector, v: &DenseVector) -> DenseVector {
        v.clone()
    }
}

/// `g = Cx, h = x`: eigenvectors of `C`.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub c: DenseMatrix,
}

impl CsPair for EigPair {
    fn check_input(&self, x: &DenseVector) -> Result<()> {
        check_square_operator(&self.c, x)
    }
    fn g(&self, x: &DenseVector) -> DenseVector {
        &self.c * x
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        x.clone()
    }
    fn g_adjoint(&self, _x: &DenseVector, v: &DenseVector) -> DenseVector {
        self.c.tr_mul(v)
    }
    fn h_adjoint(&self, _x: &DenseVector, v: &DenseVector) -> DenseVector {
        v.clone()
    }
}

pub(crate) fn check_square_operator(c: &DenseMatrix, x: &DenseVector) -> Result<()> {
    if !c.is_square() {
        return Err(Error::Dimension(format!(
            "C must be square, got {}×{}",
            c.nrows(),
            c.ncols()
        )));
    }
    if c.ncols() != x.len() {
        return Err(Error::Dimension(format!(
            "C is {}×{} but x has length {}",
            c.nrows(),
            c.ncols(),
            x.len()
        )));
    }
    Ok(())
}

/// `g = vec(XᵀX), h = vec(I_K)` on a column-major flattened `N×K` matrix.
#[derive(Debug, Clone, Copy)]
pub struct OmPair {
    pub k: usize,
}

impl OmPair {
    fn unflatten(&self, x: &DenseVector) -> DenseMatrix {
        DenseMatrix::from_column_slice(x.len() / self.k, self.k, x.as_slice())
    }
}

impl CsPair for OmPair {
    fn check_input(&self, x: &DenseVector) -> Result<()> {
        super::kinds::om_shape(x.len(), self.k).map(|_| ())
    }
    fn g(&self, x: &DenseVector) -> DenseVector {
        let m = self.unflatten(x);
        let gram = m.tr_mul(&m);
        DenseVector::from_column_slice(gram.as_slice())
    }
    fn h(&self, _x: &DenseVector) -> DenseVector {
        let eye = DenseMatrix::identity(self.k, self.k);
        DenseVector::from_column_slice(eye.as_slice())
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        let m = self.unflatten(x);
        let vm = DenseMatrix::from_column_slice(self.k, self.k, v.as_slice());
        let out = &m * (&vm + vm.transpose());
        DenseVector::from_column_slice(out.as_slice())
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

/// Stacked `[y_1; …; y_B]` with `g = y_b²` and `h_b = 4^{b−1}·1`.
#[derive(Debug, Clone, Copy)]
pub struct EquPair {
    pub bits: usize,
}

impl CsPair for EquPair {
    fn check_input(&self, x: &DenseVector) -> Result<()> {
        super::kinds::equ_shape(x.len(), self.bits).map(|_| ())
    }
    fn g(&self, x: &DenseVector) -> DenseVector {
        x.map(|v| v * v)
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        let n = x.len() / self.bits;
        DenseVector::from_fn(x.len(), |i, _| 4f64.powi((i / n) as i32))
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        x.component_mul(v) * 2.0
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

/// `g = (1 + x²)⁻¹, h = 1`: bounded symmetric binary.
#[derive(Debug, Clone, Copy, Default)]
pub struct BBinPair;

impl CsPair for BBinPair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        x.map(|v| 1.0 / (1.0 + v * v))
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        DenseVector::from_element(x.len(), 1.0)
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        x.zip_map(v, |a, b| -2.0 * a / (1.0 + a * a).powi(2) * b)
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

/// `g = e^{−x²}, h = 1`: exponential bounded symmetric binary.
#[derive(Debug, Clone, Copy, Default)]
pub struct BinExpPair;

impl CsPair for BinExpPair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        x.map(|v| (-v * v).exp())
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        DenseVector::from_element(x.len(), 1.0)
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        x.zip_map(v, |a, b| -2.0 * a * (-a * a).exp() * b)
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

/// `g = [x²; α²], h = 1_{N+1}`: binary with a fixed scale `α`.
#[derive(Debug, Clone, Copy)]
pub struct FixedScalePair {
    pub alpha: f64,
}

impl CsPair for FixedScalePair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        let n = x.len();
        DenseVector::from_fn(n + 1, |i, _| {
            if i < n {
                x[i] * x[i]
            } else {
                self.alpha.powi(2)
            }
        })
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        DenseVector::from_element(x.len() + 1, 1.0)
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        DenseVector::from_fn(x.len(), |i, _| 2.0 * x[i] * v[i])
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

/// `g = [Cx; ‖x‖² − 1; 1], h = [0; 0; 1]`: unit vectors in the nullspace of `C`.
#[derive(Debug, Clone)]
pub struct NsPair {
    pub c: DenseMatrix,
}

impl CsPair for NsPair {
    fn check_input(&self, x: &DenseVector) -> Result<()> {
        if self.c.ncols() != x.len() {
            return Err(Error::Dimension(format!(
                "C has {} columns but x has length {}",
                self.c.ncols(),
                x.len()
            )));
        }
        Ok(())
    }
    fn g(&self, x: &DenseVector) -> DenseVector {
        let cx = &self.c * x;
        let m = cx.len();
        DenseVector::from_fn(m + 2, |i, _| match i {
            i if i < m => cx[i],
            i if i == m => x.norm_squared() - 1.0,
            _ => 1.0,
        })
    }
    fn h(&self, _x: &DenseVector) -> DenseVector {
        let m = self.c.nrows();
        let mut h = DenseVector::zeros(m + 2);
        h[m + 1] = 1.0;
        h
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        let m = self.c.nrows();
        self.c.tr_mul(&v.rows(0, m).into_owned()) + x * (2.0 * v[m])
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

/// `g = |x|, h = 1`. Not differentiable where an entry is zero; the adjoint
/// uses `sign(0) = 0`, which selects an element of the subdifferential.
#[derive(Debug, Clone, Copy, Default)]
pub struct AbsPair;

impl CsPair for AbsPair {
    fn g(&self, x: &DenseVector) -> DenseVector {
        x.map(f64::abs)
    }
    fn h(&self, x: &DenseVector) -> DenseVector {
        DenseVector::from_element(x.len(), 1.0)
    }
    fn g_adjoint(&self, x: &DenseVector, v: &DenseVector) -> DenseVector {
        x.zip_map(v, |a, b| sign0(a) * b)
    }
    fn h_adjoint(&self, x: &DenseVector, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(x.len())
    }
}

pub(crate) fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}
