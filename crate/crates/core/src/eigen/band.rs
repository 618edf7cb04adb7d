use super::TridiagonalForm;
use crate::{Error, Result};

/// Symmetric band matrix with half-bandwidth `k`, stored by lower diagonals.
///
/// Column `j` holds `A[j..=j+k+1][j]`; the extra slot absorbs the single
/// bulge created while chasing rotations down the band.
#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, k: usize) -> Self {
        Self { n, k, data: vec![0.0; n * (k + 2)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> usize {
        self.k
    }

    /// Entry `A[i][j]`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let off = r - c;
        if off > self.k + 1 || r >= self.n {
            0.0
        } else {
            self.data[c * (self.k + 2) + off]
        }
    }

    /// Sets `A[i][j]` and `A[j][i]`. Panics if the entry lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let off = r - c;
        assert!(off <= self.k + 1 && r < self.n, "({i}, {j}) outside band {}", self.k);
        self.data[c * (self.k + 2) + off] = value;
    }

    /// Diagonal `off` below the main one, entries `A[j+off][j]`.
    pub fn lower_diagonal(&self, off: usize) -> Vec<f64> {
        (0..self.n.saturating_sub(off)).map(|j| self.get(j + off, j)).collect()
    }

    // Rotation in plane (p, p+1) chosen to zero A[p+1][col] against A[p][col].
    fn rotate_out(&mut self, p: usize, col: usize) {
        let q = p + 1;
        let (a, b) = (self.get(p, col), self.get(q, col));
        if b == 0.0 {
            return;
        }
        let r = a.hypot(b);
        let (c, s) = (a / r, b / r);

        let lo = p.saturating_sub(self.k + 1);
        let hi = (q + self.k + 1).min(self.n - 1);
        for i in lo..=hi {
            if i == p || i == q {
                continue;
            }
            let (aip, aiq) = (self.get(i, p), self.get(i, q));
            if aip == 0.0 && aiq == 0.0 {
                continue;
            }
            let new_p = c * aip + s * aiq;
            let new_q = -s * aip + c * aiq;
            self.set(i, p, new_p);
            if i == col {
                self.set(i, q, 0.0);
            } else {
                self.set(i, q, new_q);
            }
        }
        let (app, aqq, apq) = (self.get(p, p), self.get(q, q), self.get(q, p));
        self.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.set(q, p, c * s * (aqq - app) + (c * c - s * s) * apq);
    }
}

/// Reduces a symmetric band matrix to tridiagonal form with Givens
/// rotations, chasing each bulge off the end of the band. `O(k n^2)` work.
pub fn band_tridiagonalize(band: &BandMatrix) -> Result<TridiagonalForm> {
    let n = band.n;
    let k = band.k;
    if band.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite band entry".into()));
    }
    let mut a = band.clone();
    if k >= 2 {
        for j in 0..n.saturating_sub(2) {
            for off in (2..=k).rev() {
                let r = j + off;
                if r >= n || a.get(r, j) == 0.0 {
                    continue;
                }
                a.rotate_out(r - 1, j);
                let (mut q, mut col) = (r + k, r - 1);
                while q < n {
                    if a.get(q, col) != 0.0 {
                        a.rotate_out(q - 1, col);
                    }
                    col = q - 1;
                    q += k;
                }
            }
        }
    }
    TridiagonalForm::new(a.lower_diagonal(0), a.lower_diagonal(1))
}
