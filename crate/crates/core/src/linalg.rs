//! Dense symmetric linear algebra on top of `faer`, always in sequential
//! mode so results are bit-reproducible.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par, Side};

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending, columns
/// of `vectors` orthonormal.
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

pub fn sym_eigen(a: &Mat<f64>) -> Result<SymEigen> {
    let e = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let s = e.S().column_vector();
    let values = (0..a.nrows()).map(|i| s[i]).collect();
    Ok(SymEigen { values, vectors: e.U().to_owned() })
}

pub fn sym_eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigen)
}

/// `‖A‖₂` for symmetric `A`, from its extreme eigenvalues.
pub fn sym_spectral_norm(a: &Mat<f64>) -> Result<f64> {
    let v = sym_eigenvalues(a)?;
    Ok(v.first().map_or(0.0, |x| x.abs()).max(v.last().map_or(0.0, |x| x.abs())))
}

/// `W Wᵀ`.
pub fn gram(w: &Mat<f64>) -> Mat<f64> {
    let mut out = Mat::zeros(w.nrows(), w.nrows());
    matmul(&mut out, Accum::Replace, w, w.transpose(), 1.0, Par::Seq);
    out
}

/// Projection onto the PSD cone in Frobenius norm. Builds the result from
/// whichever eigen-half is smaller.
pub fn psd_project(a: &Mat<f64>) -> Result<(Mat<f64>, SymEigen)> {
    let n = a.nrows();
    let eig = sym_eigen(a)?;
    let pos = eig.values.iter().filter(|&&v| v > 0.0).count();
    let out = if pos <= n - pos {
        scaled_outer(&eig, (n - pos)..n, |v| v.sqrt())
    } else {
        let mut out = a.clone();
        let neg = scaled_outer(&eig, 0..(n - pos), |v| (-v).sqrt());
        out += &neg;
        out
    };
    Ok((symmetrize(out), eig))
}

/// `Σ_{k∈range} f(λ_k)² v_k v_kᵀ`.
fn scaled_outer(eig: &SymEigen, range: std::ops::Range<usize>, f: impl Fn(f64) -> f64) -> Mat<f64> {
    let n = eig.vectors.nrows();
    let k = range.len();
    let mut w = Mat::zeros(n, k);
    for (c, idx) in range.enumerate() {
        let s = f(eig.values[idx]);
        for r in 0..n {
            w[(r, c)] = eig.vectors[(r, idx)] * s;
        }
    }
    let mut out = Mat::zeros(n, n);
    if k > 0 {
        matmul(&mut out, Accum::Replace, &w, w.transpose(), 1.0, Par::Seq);
    }
    out
}

/// `(A + Aᵀ)/2`, removing rounding asymmetry from products.
pub fn symmetrize(mut a: Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

pub fn from_row_major(n: usize, data: &[f64]) -> Result<Mat<f64>> {
    if data.len() != n * n {
        return Err(Error::Dimension { expected: n * n, got: data.len() });
    }
    Ok(Mat::from_fn(n, n, |i, j| data[i * n + j]))
}

pub fn to_row_major(a: &Mat<f64>) -> Vec<f64> {
    let (r, c) = (a.nrows(), a.ncols());
    let mut v = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            v.push(a[(i, j)]);
        }
    }
    v
}

pub fn max_abs_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    m
}

pub fn frob_dot(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * b[(i, j)];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_of_psd_is_identity() {
        let w = Mat::from_fn(5, 2, |i, j| (i as f64 + 1.0) * if j == 0 { 1.0 } else { -0.5 });
        let a = gram(&w);
        let (p, _) = psd_project(&a).unwrap();
        assert!(max_abs_diff(&a, &p) < 1e-12);
    }

    #[test]
    fn projection_with_mostly_positive_spectrum() {
        // eigenvalues 3, 2, -1: built from the negative half
        let q = [[1.0, 1.0, 1.0], [1.0, -1.0, 0.0], [1.0, 1.0, -2.0]];
        let norms: Vec<f64> = q.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
        let lam = [3.0, 2.0, -1.0];
        let a = Mat::from_fn(3, 3, |i, j| (0..3).map(|k| lam[k] * q[k][i] * q[k][j] / (norms[k] * norms[k])).sum());
        let want = Mat::from_fn(3, 3, |i, j| (0..2).map(|k| lam[k] * q[k][i] * q[k][j] / (norms[k] * norms[k])).sum());
        let (p, _) = psd_project(&a).unwrap();
        assert!(max_abs_diff(&p, &want) < 1e-12);
    }

    #[test]
    fn projection_clips_negative_part() {
        let a = Mat::from_fn(2, 2, |i, j| if i == j { 0.0 } else { 1.0 });
        let (p, _) = psd_project(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)] - 0.5).abs() < 1e-12);
            }
        }
    }
}
