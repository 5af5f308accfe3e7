//! Central finite-difference gradient checks.

use crate::linalg::DenseVector;

/// Central differences with per-coordinate step `rel_step·(1 + |x_n|)`.
pub fn finite_difference<F>(f: F, x: &DenseVector, rel_step: f64) -> DenseVector
where
    F: Fn(&DenseVector) -> f64,
{
    let mut probe = x.clone();
    DenseVector::from_fn(x.len(), |n, _| {
        let h = rel_step * (1.0 + x[n].abs());
        probe[n] = x[n] + h;
        let up = f(&probe);
        probe[n] = x[n] - h;
        let down = f(&probe);
        probe[n] = x[n];
        (up - down) / (2.0 * h)
    })
}

/// `‖a − b‖₂ / max(‖a‖₂, ‖b‖₂)`, or `0` when both vanish.
pub fn relative_error(a: &DenseVector, b: &DenseVector) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
