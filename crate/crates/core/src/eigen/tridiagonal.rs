use serde::{Deserialize, Serialize};

use super::EigenvalueList;
use crate::{Error, Result};

/// Maximum QL sweeps spent on one eigenvalue before giving up.
pub const MAX_QL_SWEEPS: usize = 50;

/// Default relative deflation threshold for the QL iteration.
pub const DEFAULT_DEFLATION_TOL: f64 = 1e-12;

/// Symmetric tridiagonal matrix: diagonal `d` and off-diagonal `e`
/// (`e[i]` couples rows `i` and `i + 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalForm {
    d: Vec<f64>,
    e: Vec<f64>,
}

impl TridiagonalForm {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Result<Self> {
        if d.is_empty() && !e.is_empty() || !d.is_empty() && e.len() + 1 != d.len() {
            return Err(Error::Domain(format!(
                "off-diagonal length {} does not match diagonal length {}",
                e.len(),
                d.len()
            )));
        }
        if d.iter().chain(&e).any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite tridiagonal entry".into()));
        }
        Ok(Self { d, e })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.e
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn trace(&self) -> f64 {
        self.d.iter().sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.d.iter().map(|x| x * x).sum::<f64>() + 2.0 * self.e.iter().map(|x| x * x).sum::<f64>()
    }

    /// Number of eigenvalues `<= x`, read from the inertia of `T - xI = L D L^T`.
    ///
    /// A zero pivot is replaced by `-PIVOT_GUARD`, so an eigenvalue exactly at
    /// `x` is counted.
    pub fn count_at_most(&self, x: f64) -> usize {
        const PIVOT_GUARD: f64 = 1e-300;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &di) in self.d.iter().enumerate() {
            let coupling = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] / q };
            q = di - x - coupling;
            if q.abs() < PIVOT_GUARD {
                q = -PIVOT_GUARD;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Number of eigenvalues of `t` in the half-open interval `(a, b]`.
pub fn sturm_count(t: &TridiagonalForm, a: f64, b: f64) -> Result<usize> {
    if !(a < b) {
        return Err(Error::Domain(format!("sturm_count needs a < b, got ({a}, {b}]")));
    }
    Ok(t.count_at_most(b) - t.count_at_most(a))
}

/// All eigenvalues of `t` by implicit-shift QL with a Wilkinson-type shift.
///
/// An off-diagonal is treated as zero once `|e_i| <= tol * (|d_i| + |d_{i+1}|)`.
pub fn tridiagonal_eigenvalues(t: &TridiagonalForm, tol: f64) -> Result<EigenvalueList> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("deflation tolerance must be positive, got {tol}")));
    }
    let mut d = t.d.clone();
    let mut e = t.e.clone();
    e.push(0.0);
    ql_implicit(&mut d, &mut e, tol)?;
    Ok(EigenvalueList::from_unsorted(d))
}

fn ql_implicit(d: &mut [f64], e: &mut [f64], tol: f64) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m] == 0.0 || e[m].abs() <= tol * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Convergence { index: l, sweeps: MAX_QL_SWEEPS });
            }

            // shift from the eigenvalue of the leading 2x2 block nearer d[l]
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
