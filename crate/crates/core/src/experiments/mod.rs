//! Instance generation and trial harnesses for the recovery, eigenvector,
//! orthogonal-matrix, two-bit and MAX-CUT experiments.

mod curve;
mod maxcut;
mod ortho;
mod trial;

pub use curve::{
    run_two_bit, sparse_success_curve, success_curve, write_curve_csv, SuccessCurveRow,
};
pub use maxcut::{
    cut_value, demo_graph, maxcut_bruteforce, maxcut_objective, parse_gset, read_gset, run_maxcut,
    Edge, Graph, MaxCutReport, RestartRecord, DEMO_GRAPHS,
};
pub use ortho::{orthogonality_measure, run_orthogonal, OrthoSummary};
pub use trial::{
    run_baseline_trial, run_recovery_trial, run_trial, run_trial_from_start, Baseline, Method,
    TrialOutcome, DEFAULT_TWO_BIT_LAMBDA, SUCCESS_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_real, orthonormal_columns, standard_normal_matrix, DenseMatrix, DenseVector, RngStream,
};

/// Which ground-truth structure an instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceKind {
    SymBinary,
    OneSidedBinary,
    SymTernary,
    TwoBit,
    Eigenvector,
    OrthogonalMatrix(usize),
    /// Exactly `K` entries equal to `+1`, the rest zero.
    SparseOsb(usize),
    /// Exactly `K` entries drawn uniformly from `{−1, +1}`, the rest zero.
    SparseTer(usize),
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SymBinary => "sym-binary",
            Self::OneSidedBinary => "one-sided-binary",
            Self::SymTernary => "sym-ternary",
            Self::TwoBit => "two-bit",
            Self::Eigenvector => "eigenvector",
            Self::OrthogonalMatrix(_) => "orthogonal-matrix",
            Self::SparseOsb(_) => "sparse-osb",
            Self::SparseTer(_) => "sparse-ter",
        }
    }

    /// Random initializations used by the reference protocol for this kind.
    pub fn default_restarts(&self) -> usize {
        match self {
            Self::SymBinary | Self::TwoBit | Self::Eigenvector => 10,
            _ => 1,
        }
    }

    fn columns(&self) -> usize {
        match self {
            Self::OrthogonalMatrix(k) => *k,
            _ => 1,
        }
    }
}

/// One experiment case: `b = A·x*` with a structured `x*`.
///
/// Matrix-valued ground truths (`OrthogonalMatrix`) are stored column-major
/// in `x_star` and `b`, and the constraint `A·X = B` applies column by column.
#[derive(Debug, Clone)]
pub struct RecoveryInstance {
    pub a: DenseMatrix,
    pub x_star: DenseVector,
    pub b: DenseVector,
    pub kind: InstanceKind,
    pub seed: u64,
    pub stream: u64,
    /// The matrix whose eigenvector is `x*` (eigenvector instances only).
    pub eigen_matrix: Option<DenseMatrix>,
    /// `[y_1; y_2]` with `x* = y_1 + y_2` (two-bit instances only).
    pub parts: Option<DenseVector>,
}

impl RecoveryInstance {
    /// Number of unknowns per column.
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn columns(&self) -> usize {
        self.kind.columns()
    }

    /// `x*` reshaped to `N×K`.
    pub fn x_star_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_column_slice(self.n(), self.columns(), self.x_star.as_slice())
    }
}

/// Draws `A` and a structured `x*`, then sets `b = A·x*`.
///
/// `m = 0` yields an instance without constraints. Eigenvector instances
/// redraw `C` from the same stream until it has a real eigenpair.
pub fn gen_instance(
    kind: InstanceKind,
    n: usize,
    m: usize,
    rng: &mut RngStream,
) -> Result<RecoveryInstance> {
    if n == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ N and M ≤ N, got N = {n}, M = {m}"
        )));
    }
    match kind {
        InstanceKind::OrthogonalMatrix(k)
        | InstanceKind::SparseOsb(k)
        | InstanceKind::SparseTer(k)
            if k == 0 || k > n =>
        {
            return Err(Error::InvalidArgument(format!(
                "K = {k} must lie in [1, N = {n}]"
            )));
        }
        _ => {}
    }
    let (seed, stream) = (rng.seed(), rng.stream());
    let a = standard_normal_matrix(m, n, rng);
    let mut eigen_matrix = None;
    let mut parts = None;
    let x_star = match kind {
        InstanceKind::SymBinary => sign_vector(n, 1.0, rng),
        InstanceKind::OneSidedBinary => {
            DenseVector::from_fn(n, |_, _| if rng.coin() { 1.0 } else { 0.0 })
        }
        InstanceKind::SymTernary => DenseVector::from_fn(n, |_, _| match rng.index(4) {
            0 => -1.0,
            3 => 1.0,
            _ => 0.0,
        }),
        InstanceKind::TwoBit => {
            let y1 = sign_vector(n, 1.0, rng);
            let y2 = sign_vector(n, 2.0, rng);
            let x = &y1 + &y2;
            parts = Some(DenseVector::from_iterator(
                2 * n,
                y1.iter().chain(y2.iter()).copied(),
            ));
            x
        }
        InstanceKind::Eigenvector => loop {
            let c = standard_normal_matrix(n, n, rng);
            let pairs = eig_real(&c)?;
            if pairs.is_empty() {
                continue;
            }
            let (_, v) = pairs[rng.index(pairs.len())].clone();
            eigen_matrix = Some(c);
            break v;
        },
        InstanceKind::OrthogonalMatrix(k) => {
            let q = orthonormal_columns(&standard_normal_matrix(n, k, rng));
            DenseVector::from_column_slice(q.as_slice())
        }
        InstanceKind::SparseOsb(k) => sparse_vector(n, k, rng, |_| 1.0),
        InstanceKind::SparseTer(k) => {
            sparse_vector(n, k, rng, |r| if r.coin() { 1.0 } else { -1.0 })
        }
    };
    let k = kind.columns();
    let x_mat = DenseMatrix::from_column_slice(n, k, x_star.as_slice());
    let b_mat = &a * x_mat;
    let b = DenseVector::from_column_slice(b_mat.as_slice());
    Ok(RecoveryInstance {
        a,
        x_star,
        b,
        kind,
        seed,
        stream,
        eigen_matrix,
        parts,
    })
}

fn sign_vector(n: usize, scale: f64, rng: &mut RngStream) -> DenseVector {
    DenseVector::from_fn(n, |_, _| if rng.coin() { scale } else { -scale })
}

fn sparse_vector(
    n: usize,
    k: usize,
    rng: &mut RngStream,
    mut value: impl FnMut(&mut RngStream) -> f64,
) -> DenseVector {
    let mut positions: Vec<usize> = (0..n).collect();
    // partial Fisher–Yates: the first k slots are a uniform k-subset
    for i in 0..k {
        let j = i + rng.index(n - i);
        positions.swap(i, j);
    }
    let mut x = DenseVector::zeros(n);
    for &p in &positions[..k] {
        x[p] = value(rng);
    }
    x
}
