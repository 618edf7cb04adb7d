use super::DenseMatrix;

const MAX_JACOBI_SWEEPS: usize = 60;

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
///
/// Small singular values are computed to high absolute accuracy relative to
/// the largest one, which numerical rank decisions depend on.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    // work on the orientation with fewer columns
    let a = if m.cols() > m.rows() { m.transpose() } else { m.clone() };
    let (rows, cols) = (a.rows(), a.cols());
    let mut columns: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| a[(i, j)]).collect()).collect();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha: f64 = columns[i].iter().map(|x| x * x).sum();
                let beta: f64 = columns[j].iter().map(|x| x * x).sum();
                let gamma: f64 = columns[i].iter().zip(&columns[j]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let (xi, yj) = (*x, *y);
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(m: &DenseMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > rel_tol * top).count(),
        _ => 0,
    }
}
