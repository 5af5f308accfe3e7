//! Cauchy–Schwarz regularizers.
//!
//! A CS regularizer is built from two vector-valued maps `g` and `h` as
//! `‖g(x)‖²‖h(x)‖² − ⟨g(x), h(x)⟩²`. It is nonnegative and vanishes exactly
//! when `g(x)` and `h(x)` are linearly dependent, so choosing `g` and `h`
//! selects the structure that is promoted: binary, one-sided binary or
//! ternary vectors, eigenvectors of a fixed matrix, matrices with
//! orthogonal columns, and so on.
//!
//! The crate is organised as
//!
//! - [`linalg`]: dense containers, seeded randomness, the affine projector
//!   and eigen/singular value helpers;
//! - [`regularizers`]: values and analytic gradients of every regularizer,
//!   the generic pair combinator and its Hölder / scale-invariant variants;
//! - [`solvers`]: FISTA with backtracking, projected gradient on a box,
//!   Douglas–Rachford splitting and the proximal maps it needs;
//! - [`experiments`]: instance generation and trial harnesses for recovery,
//!   eigenvector, orthogonal-matrix, two-bit and MAX-CUT experiments;
//! - [`quantize`]: closed-form binarization and ternarization of weights.

// `!(a >= b)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod fmt;
pub mod linalg;
pub mod quantize;
pub mod regularizers;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::{AffineProjector, DenseMatrix, DenseVector, RngStream};
pub use regularizers::{CsPair, EquispacedState, RegularizerKind};
pub use solvers::{DrConfig, FistaConfig, SolveReport, Termination};
