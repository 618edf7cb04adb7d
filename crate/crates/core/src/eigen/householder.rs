use super::{DenseMatrix, TridiagonalForm};
use crate::{Error, Result};

/// Relative asymmetry accepted by the dense reductions.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Orthogonally reduces a symmetric matrix to tridiagonal form with
/// Householder reflections `H = I - 2 v v^T`.
///
/// Columns that are already zero below the subdiagonal are left alone, so a
/// tridiagonal input comes back unchanged.
pub fn householder_tridiagonalize(m: &DenseMatrix) -> Result<TridiagonalForm> {
    if !m.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::Symmetry(format!("{}x{} input is not symmetric", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n == 0 {
        return TridiagonalForm::new(vec![], vec![]);
    }
    // symmetrised working copy, row-major
    let mut a: Vec<f64> = (0..n * n).map(|idx| 0.5 * (m[(idx / n, idx % n)] + m[(idx % n, idx / n)])).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        d[k] = a[k * n + k];
        let lo = k + 1;
        let tail_norm_sq: f64 = (lo + 1..n).map(|i| a[i * n + k].powi(2)).sum();
        let x0 = a[lo * n + k];
        if tail_norm_sq == 0.0 {
            e[k] = x0;
            continue;
        }
        let norm = (x0 * x0 + tail_norm_sq).sqrt();
        let alpha = if x0 > 0.0 { -norm } else { norm };
        e[k] = alpha;

        // v = (x - alpha e_1) / |x - alpha e_1|
        v[lo] = x0 - alpha;
        for i in lo + 1..n {
            v[i] = a[i * n + k];
        }
        let vnorm = (v[lo] * v[lo] + tail_norm_sq).sqrt();
        for vi in &mut v[lo..n] {
            *vi /= vnorm;
        }

        // p = 2 A22 v, w = p - (v.p) v, A22 -= v w^T + w v^T
        for i in lo..n {
            let row = &a[i * n + lo..i * n + n];
            p[i] = 2.0 * row.iter().zip(&v[lo..n]).map(|(x, y)| x * y).sum::<f64>();
        }
        let c: f64 = (lo..n).map(|i| v[i] * p[i]).sum();
        for i in lo..n {
            p[i] -= c * v[i];
        }
        for i in lo..n {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[i * n..(i + 1) * n];
            for j in lo..n {
                row[j] -= vi * p[j] + wi * v[j];
            }
        }
    }
    d[n - 1] = a[(n - 1) * n + n - 1];
    TridiagonalForm::new(d, e)
}
