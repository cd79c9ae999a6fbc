//! Haar-distributed orthogonal matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Draw U in O(n) from the Haar measure: QR of a Gaussian matrix with the
/// R-diagonal signs folded into Q, then a fair coin flips the last row so
/// both determinant signs stay reachable regardless of the QR convention.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    assert!(n >= 2, "orthogonal sampling needs n >= 2");
    let gaussian = DMatrix::from_fn(n, n, |_, _| -> f64 { StandardNormal.sample(rng) });
    let qr = gaussian.qr();
    let r_diag = qr.r().map_diagonal(|d| if d < 0.0 { -1.0 } else { 1.0 });
    let mut u = qr.q() * DMatrix::from_diagonal(&r_diag);
    if rng.random::<bool>() {
        u.row_mut(n - 1).neg_mut();
    }
    u
}
