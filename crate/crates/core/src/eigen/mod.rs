//! Eigenvalues of real symmetric matrices.
//!
//! Dense input is split into its irreducible diagonal blocks, each block is
//! Householder-reduced to tridiagonal form and finished with implicit QL.
//! Band input is reduced by Givens bulge chasing instead. Only eigenvalues
//! are computed.

mod band;
mod dense;
mod householder;
mod svd;
mod tridiagonal;

use serde::{Deserialize, Serialize};

pub use band::{band_tridiagonalize, BandMatrix};
pub use dense::DenseMatrix;
pub use householder::{householder_tridiagonalize, SYMMETRY_TOL};
pub use svd::{numerical_rank, singular_values};
pub use tridiagonal::{sturm_count, tridiagonal_eigenvalues, TridiagonalForm, DEFAULT_DEFLATION_TOL, MAX_QL_SWEEPS};

use crate::{Error, Result};

/// Eigenvalues sorted ascending, repeated according to multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    values: Vec<f64>,
}

impl EigenvalueList {
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Largest absolute eigenvalue (the spectral norm for symmetric input).
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Number of eigenvalues in the open interval `(lo, hi)`.
    pub fn count_open(&self, lo: f64, hi: f64) -> usize {
        if !(lo < hi) {
            return 0;
        }
        let start = self.values.partition_point(|&x| x <= lo);
        let end = self.values.partition_point(|&x| x < hi);
        end.saturating_sub(start)
    }

    /// Distance from `x` to the nearest eigenvalue, `inf` when empty.
    pub fn distance_to(&self, x: f64) -> f64 {
        let idx = self.values.partition_point(|&v| v < x);
        let right = self.values.get(idx).map_or(f64::INFINITY, |v| v - x);
        let left = idx.checked_sub(1).map_or(f64::INFINITY, |i| x - self.values[i]);
        left.min(right)
    }
}

/// All eigenvalues of a dense symmetric matrix.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<EigenvalueList> {
    if !m.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::Symmetry(format!("{}x{} input is not symmetric", m.rows(), m.cols())));
    }
    let mut values = Vec::with_capacity(m.rows());
    for block in irreducible_blocks(m) {
        let sub = DenseMatrix::from_fn(block.len(), block.len(), |i, j| m[(block[i], block[j])]);
        let t = householder_tridiagonalize(&sub)?;
        values.extend_from_slice(tridiagonal_eigenvalues(&t, DEFAULT_DEFLATION_TOL)?.values());
    }
    Ok(EigenvalueList::from_unsorted(values))
}

/// All eigenvalues of a symmetric band matrix.
pub fn band_eigenvalues(b: &BandMatrix) -> Result<EigenvalueList> {
    tridiagonal_eigenvalues(&band_tridiagonalize(b)?, DEFAULT_DEFLATION_TOL)
}

/// Index sets of the connected components of the nonzero pattern.
///
/// A symmetric permutation of the basis makes the matrix block diagonal
/// with these blocks, so their spectra can be solved independently.
fn irreducible_blocks(m: &DenseMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        let row = m.row(i);
        for (j, &a) in row.iter().enumerate().skip(i + 1) {
            if a != 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

/// Trace norm (sum of singular values) of a square matrix.
pub fn trace_norm(m: &DenseMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Trace norm through the eigenvalues of `m^T m`, the route independent of
/// the Jacobi singular values. Loses accuracy for tiny singular values.
pub fn trace_norm_via_gram(m: &DenseMatrix) -> Result<f64> {
    let gram = m.transpose().matmul(m);
    let ev = symmetric_eigenvalues(&gram)?;
    Ok(ev.values().iter().map(|&x| x.max(0.0).sqrt()).sum())
}
