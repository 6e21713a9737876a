use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg;

/// Largest Gram error that clipping may introduce.
pub const GRAM_TOL: f64 = 1e-5;

/// Factors `U ≈ V Vᵀ` from its eigendecomposition after clipping negative
/// eigenvalues. Columns of `V` follow decreasing eigenvalue; columns for
/// eigenvalues below `1e-12·λ_max` are dropped. Row `i` is the vector `u_i`.
///
/// `U` is rejected when `λ_min < −1e-6` and the clipped part could move some
/// entry by more than [`GRAM_TOL`], bounded by `max_i Σ_{λ_k<0} |λ_k| v_ik²`.
pub fn factorize(u: &Mat<f64>) -> Result<Mat<f64>> {
    let eig = linalg::sym_eigen(u)?;
    let n = u.nrows();
    let lo = eig.values.first().copied().unwrap_or(0.0);
    if lo < -1e-6 {
        let clip = (0..n)
            .map(|i| {
                (0..n)
                    .take_while(|&k| eig.values[k] < 0.0)
                    .map(|k| -eig.values[k] * eig.vectors[(i, k)].powi(2))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        if clip > GRAM_TOL {
            return Err(Error::NotPsd(lo));
        }
    }
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..n).rev().filter(|&k| eig.values[k] > 1e-12 * top.max(1e-300)).collect();
    Ok(Mat::from_fn(n, keep.len(), |i, c| {
        let k = keep[c];
        eig.vectors[(i, k)] * eig.values[k].sqrt()
    }))
}
