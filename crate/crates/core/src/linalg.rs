//! Dense linear algebra, seeded randomness and the affine feasibility projector.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type DenseVector = DVector<f64>;
pub type DenseMatrix = DMatrix<f64>;

/// Relative pivot threshold below which `A·Aᵀ` is treated as singular.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// A reproducible random stream identified by `(seed, stream)`.
///
/// Two streams with the same seed and stream id produce the same draws;
/// distinct stream ids select independent ChaCha streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    pub fn normal_vector(&mut self, len: usize) -> DenseVector {
        DenseVector::from_fn(len, |_, _| self.standard_normal())
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Matrix with i.i.d. `N(0, 1)` entries, drawn in row-major order.
pub fn standard_normal_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> DenseMatrix {
    let entries: Vec<f64> = (0..rows * cols).map(|_| rng.standard_normal()).collect();
    DenseMatrix::from_row_slice(rows, cols, &entries)
}

pub fn ensure_finite_vector(x: &DenseVector, what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub fn ensure_finite_matrix(x: &DenseMatrix, what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Euclidean projection onto `{x : A·x = b}`.
///
/// `A·Aᵀ` is Cholesky-factorized once at construction; each projection costs
/// two matrix-vector products and two triangular solves, followed by one
/// refinement pass on the remaining residual. The projector is immutable and
/// can be shared across threads.
#[derive(Debug, Clone)]
pub struct AffineProjector {
    a: DenseMatrix,
    b: DenseVector,
    /// Lower-triangular Cholesky factor of `A·Aᵀ`.
    chol: DenseMatrix,
}

impl AffineProjector {
    pub fn new(a: DenseMatrix, b: DenseVector) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::Dimension(format!(
                "A has {} rows but b has length {}",
                a.nrows(),
                b.len()
            )));
        }
        if a.nrows() > a.ncols() {
            return Err(Error::InvalidArgument(format!(
                "A must have at most as many rows as columns, got {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        ensure_finite_matrix(&a, "constraint matrix")?;
        ensure_finite_vector(&b, "constraint target")?;
        let gram = &a * a.transpose();
        let chol = cholesky_lower(&gram)?;
        Ok(Self { a, b, chol })
    }

    /// Projector with no constraints on `n`-dimensional points.
    pub fn unconstrained(n: usize) -> Self {
        Self {
            a: DenseMatrix::zeros(0, n),
            b: DenseVector::zeros(0),
            chol: DenseMatrix::zeros(0, 0),
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn target(&self) -> &DenseVector {
        &self.b
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    /// Projects `x` onto `{A·x = b}`.
    pub fn project(&self, x: &DenseVector) -> DenseVector {
        self.project_onto(x, &self.b)
    }

    /// Projects `x` onto `{A·x = target}` reusing the cached factorization.
    pub fn project_onto(&self, x: &DenseVector, target: &DenseVector) -> DenseVector {
        assert_eq!(
            x.len(),
            self.a.ncols(),
            "point dimension must equal cols(A)"
        );
        assert_eq!(
            target.len(),
            self.a.nrows(),
            "target dimension must equal rows(A)"
        );
        if self.a.nrows() == 0 {
            return x.clone();
        }
        let mut out = x.clone();
        for _ in 0..2 {
            let residual = &self.a * &out - target;
            let y = self.solve_gram(&residual);
            out -= self.a.tr_mul(&y);
        }
        out
    }

    /// `‖A·x − b‖₂`.
    pub fn residual_norm(&self, x: &DenseVector) -> f64 {
        if self.a.nrows() == 0 {
            return 0.0;
        }
        (&self.a * x - &self.b).norm()
    }

    /// Whether `x` satisfies the constraint to the projector's tolerance
    /// `1e-8·(1 + ‖b‖₂)`.
    pub fn is_feasible(&self, x: &DenseVector) -> bool {
        self.residual_norm(x) <= 1e-8 * (1.0 + self.b.norm())
    }

    fn solve_gram(&self, rhs: &DenseVector) -> DenseVector {
        let z = self
            .chol
            .solve_lower_triangular(rhs)
            .expect("Cholesky factor has a nonzero diagonal");
        self.chol
            .tr_solve_lower_triangular(&z)
            .expect("Cholesky factor has a nonzero diagonal")
    }
}

/// `L` with `L·Lᵀ = m`; fails when a pivot drops below `RANK_TOLERANCE·trace(m)`.
fn cholesky_lower(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.nrows();
    let threshold = RANK_TOLERANCE * m.trace().abs().max(f64::MIN_POSITIVE);
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > threshold) {
            return Err(Error::RankDeficient { pivot, threshold });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Real eigenpairs of a square matrix.
///
/// Eigenvalues come from the real Schur form; those whose imaginary part is
/// below `1e-8` times the spectral radius are kept. Each eigenvector is the
/// right singular vector of `C − λI` for its smallest singular value,
/// normalized to unit length. Repeated eigenvalues receive successive
/// singular vectors of the shared shifted matrix.
pub fn eig_real(c: &DenseMatrix) -> Result<Vec<(f64, DenseVector)>> {
    if !c.is_square() {
        return Err(Error::Dimension(format!(
            "eigen-decomposition needs a square matrix, got {}×{}",
            c.nrows(),
            c.ncols()
        )));
    }
    ensure_finite_matrix(c, "eigen-decomposition input")?;
    let n = c.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let eigenvalues = c.complex_eigenvalues();
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let imag_tol = 1e-8 * radius.max(f64::MIN_POSITIVE);
    let mut reals: Vec<f64> = eigenvalues
        .iter()
        .filter(|z| z.im.abs() <= imag_tol)
        .map(|z| z.re)
        .collect();
    reals.sort_by(|a, b| a.total_cmp(b));

    let scale = c.norm().max(f64::MIN_POSITIVE);
    let mut pairs = Vec::with_capacity(reals.len());
    let mut i = 0;
    while i < reals.len() {
        // group numerically repeated eigenvalues
        let mut j = i + 1;
        while j < reals.len() && (reals[j] - reals[i]).abs() <= 1e-10 * scale {
            j += 1;
        }
        let lambda = reals[i..j].iter().sum::<f64>() / (j - i) as f64;
        let shifted = c - DenseMatrix::identity(n, n) * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors were requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for (copy, &row) in order.iter().take(j - i).enumerate() {
            let mut v: DenseVector = v_t.row(row).transpose();
            let norm = v.norm();
            v /= norm;
            pairs.push((reals[i + copy], v));
        }
        i = j;
    }
    Ok(pairs)
}

/// Singular values in nonincreasing order.
pub fn singular_values(x: &DenseMatrix) -> DenseVector {
    if x.nrows() == 0 || x.ncols() == 0 {
        return DenseVector::zeros(0);
    }
    let mut s: Vec<f64> = x.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    DenseVector::from_vec(s)
}

/// Orthonormal basis for the columns of a tall matrix (thin QR).
pub fn orthonormal_columns(x: &DenseMatrix) -> DenseMatrix {
    let k = x.ncols();
    let q = x.clone().qr().q();
    q.columns(0, k).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_matrix_is_deterministic() {
        let a = standard_normal_matrix(2, 3, &mut RngStream::new(7, 0));
        let b = standard_normal_matrix(2, 3, &mut RngStream::new(7, 0));
        assert_eq!(a, b);
        assert_eq!(a.shape(), (2, 3));
        let c = standard_normal_matrix(2, 3, &mut RngStream::new(7, 1));
        assert_ne!(a, c);
    }

    #[test]
    fn normal_matrix_moments() {
        for seed in 0..5 {
            let a = standard_normal_matrix(1000, 1, &mut RngStream::new(seed, 0));
            let mean = a.mean();
            let var = a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 999.0;
            assert!(mean.abs() < 0.1, "mean {mean}");
            assert!((var - 1.0).abs() < 0.15, "variance {var}");
        }
        let one = standard_normal_matrix(1, 1, &mut RngStream::new(3, 3));
        assert!(one[(0, 0)].is_finite());
    }

    #[test]
    fn projection_examples() {
        let p = AffineProjector::new(
            DenseMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            DenseVector::from_vec(vec![2.0]),
        )
        .unwrap();
        let out = p.project(&DenseVector::zeros(2));
        assert_relative_eq!(out, DenseVector::from_vec(vec![1.0, 1.0]), epsilon = 1e-14);

        let p = AffineProjector::new(
            DenseMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DenseVector::from_vec(vec![0.0]),
        )
        .unwrap();
        let out = p.project(&DenseVector::from_vec(vec![3.0, 4.0]));
        assert_relative_eq!(out, DenseVector::from_vec(vec![0.0, 4.0]), epsilon = 1e-14);

        let feasible = DenseVector::from_vec(vec![0.0, -7.5]);
        assert_relative_eq!(p.project(&feasible), feasible, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficient_rejected() {
        let a = DenseMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let err = AffineProjector::new(a, DenseVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }));
    }

    #[test]
    fn too_many_rows_rejected() {
        let a = DenseMatrix::identity(3, 2);
        assert!(AffineProjector::new(a, DenseVector::zeros(3)).is_err());
    }

    #[test]
    fn square_system_projects_to_solution() {
        let mut rng = RngStream::new(11, 0);
        let a = standard_normal_matrix(100, 100, &mut rng);
        let x_star = rng.normal_vector(100);
        let b = &a * &x_star;
        let p = AffineProjector::new(a, b).unwrap();
        let out = p.project(&rng.normal_vector(100));
        assert!((out - &x_star).norm() / x_star.norm() < 1e-10);
    }

    #[test]
    fn unconstrained_is_identity() {
        let p = AffineProjector::unconstrained(3);
        let x = DenseVector::from_vec(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.project(&x), x);
        assert!(p.is_feasible(&x));
    }

    #[test]
    fn eig_identity_and_swap() {
        let pairs = eig_real(&DenseMatrix::identity(2, 2)).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(pairs.iter().all(|(l, _)| (l - 1.0).abs() < 1e-12));
        assert!((pairs[0].1.dot(&pairs[1].1)).abs() < 1e-12);

        let swap = DenseMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let pairs = eig_real(&swap).unwrap();
        assert_eq!(pairs.len(), 2);
        let (l0, v0) = &pairs[0];
        let (l1, v1) = &pairs[1];
        assert_relative_eq!(*l0, -1.0, epsilon = 1e-12);
        assert_relative_eq!(*l1, 1.0, epsilon = 1e-12);
        assert_relative_eq!((v0[0] + v0[1]).abs(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((v1[0] - v1[1]).abs(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_rotation_has_no_real_pairs() {
        let rot = DenseMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(eig_real(&rot).unwrap().is_empty());
    }

    #[test]
    fn eig_residual_on_random_matrices() {
        for seed in 0..5 {
            let c = standard_normal_matrix(50, 50, &mut RngStream::new(seed, 9));
            let pairs = eig_real(&c).unwrap();
            assert!(!pairs.is_empty());
            for (lambda, v) in &pairs {
                assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
                let r = (&c * v - v * *lambda).norm();
                assert!(r <= 1e-6 * c.norm(), "residual {r}");
            }
        }
    }

    #[test]
    fn eig_rejects_rectangular() {
        assert!(eig_real(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn singular_value_examples() {
        let s = singular_values(&DenseMatrix::identity(3, 3));
        assert_relative_eq!(
            s,
            DenseVector::from_vec(vec![1.0, 1.0, 1.0]),
            epsilon = 1e-14
        );
        let d = DenseMatrix::from_diagonal(&DenseVector::from_vec(vec![1.0, 2.0]));
        let s = singular_values(&d);
        assert_relative_eq!(s, DenseVector::from_vec(vec![2.0, 1.0]), epsilon = 1e-14);
        let x = standard_normal_matrix(6, 4, &mut RngStream::new(5, 5));
        let s = singular_values(&x);
        assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
        let fro2 = x.norm_squared();
        assert_relative_eq!(s.norm_squared(), fro2, max_relative = 1e-9);
    }

    #[test]
    fn orthonormal_columns_are_orthonormal() {
        let x = standard_normal_matrix(10, 4, &mut RngStream::new(1, 2));
        let q = orthonormal_columns(&x);
        assert_eq!(q.shape(), (10, 4));
        assert_relative_eq!(
            q.transpose() * &q,
            DenseMatrix::identity(4, 4),
            epsilon = 1e-12
        );
    }
}
