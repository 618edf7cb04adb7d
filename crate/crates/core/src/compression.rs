//! Filtrations, finite compressions `A_n = P_n A|H_n`, and the
//! filtration-relative quantities built on them: degree, the diagonal bound
//! on the `D(F)` norm, commutator Hilbert-Schmidt norms, and the trace-state
//! and product defects.

use std::io::Write;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::eigen::{self, numerical_rank, BandMatrix, DenseMatrix, EigenvalueList, TridiagonalForm};
use crate::operator::{IndexMode, Operator, OperatorSpec};
use crate::{Error, Result};

/// Default relative threshold on singular values for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Default window `n = 1..=n_max` scanned by [`degree_estimate`].
pub const DEFAULT_DEGREE_WINDOW: usize = 64;

/// `H_n = span{e_1..e_n}` (unilateral) or `span{e_-n..e_n}` (bilateral).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtration {
    mode: IndexMode,
}

impl Filtration {
    pub fn new(mode: IndexMode) -> Self {
        Self { mode }
    }

    pub fn unilateral() -> Self {
        Self::new(IndexMode::Unilateral)
    }

    pub fn bilateral() -> Self {
        Self::new(IndexMode::Bilateral)
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    pub fn dim(&self, n: usize) -> usize {
        match self.mode {
            IndexMode::Unilateral => n,
            IndexMode::Bilateral => 2 * n + 1,
        }
    }

    pub fn basis_range(&self, n: usize) -> RangeInclusive<i64> {
        let n = n as i64;
        match self.mode {
            IndexMode::Unilateral => 1..=n,
            IndexMode::Bilateral => -n..=n,
        }
    }

    pub fn contains(&self, n: usize, i: i64) -> bool {
        self.basis_range(n).contains(&i)
    }

    fn check(&self, op_mode: IndexMode) -> Result<()> {
        if op_mode != self.mode {
            return Err(Error::Configuration(format!(
                "{op_mode} operator cannot be compressed along a {} filtration",
                self.mode
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    Dense(DenseMatrix),
    /// Half-bandwidth at most 1.
    Tridiagonal(TridiagonalForm),
    /// Half-bandwidth 2 or more.
    Banded(BandMatrix),
}

/// The `n`-th compression of a self-adjoint operator, indexed locally from 0
/// (local index 0 is the first basis vector of `H_n`).
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedMatrix {
    n: usize,
    dim: usize,
    storage: Storage,
}

impl CompressedMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[(i, j)],
            Storage::Banded(b) => b.get(i, j),
            Storage::Tridiagonal(t) => {
                if i == j {
                    t.diagonal()[i]
                } else if i.abs_diff(j) == 1 {
                    t.off_diagonal()[i.min(j)]
                } else {
                    0.0
                }
            }
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            _ => DenseMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j)),
        }
    }

    /// Tridiagonal storage, if this compression has it.
    pub fn as_tridiagonal(&self) -> Option<&TridiagonalForm> {
        match &self.storage {
            Storage::Tridiagonal(t) => Some(t),
            _ => None,
        }
    }

    pub fn eigenvalues(&self) -> Result<EigenvalueList> {
        match &self.storage {
            Storage::Dense(m) => eigen::symmetric_eigenvalues(m),
            Storage::Tridiagonal(t) => eigen::tridiagonal_eigenvalues(t, eigen::DEFAULT_DEFLATION_TOL),
            Storage::Banded(b) => eigen::band_eigenvalues(b),
        }
    }

    /// CSV dump. Dense: one row-major line per matrix row. Tridiagonal:
    /// columns `d,e` with an empty last `e`. Banded: columns `d0..dK`, where
    /// row `j` holds `A[j+k][j]` (empty past the end).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        match &self.storage {
            Storage::Dense(m) => {
                for i in 0..m.rows() {
                    let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:e}")).collect();
                    writeln!(w, "{}", row.join(","))?;
                }
            }
            Storage::Tridiagonal(t) => {
                writeln!(w, "d,e")?;
                for (i, d) in t.diagonal().iter().enumerate() {
                    match t.off_diagonal().get(i) {
                        Some(e) => writeln!(w, "{d:e},{e:e}")?,
                        None => writeln!(w, "{d:e},")?,
                    }
                }
            }
            Storage::Banded(b) => {
                let k = b.half_width();
                let header: Vec<String> = (0..=k).map(|j| format!("d{j}")).collect();
                writeln!(w, "{}", header.join(","))?;
                for j in 0..b.dim() {
                    let row: Vec<String> = (0..=k)
                        .map(|off| if j + off < b.dim() { format!("{:e}", b.get(j + off, j)) } else { String::new() })
                        .collect();
                    writeln!(w, "{}", row.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// The compression `P_n A|H_n` with entries `a_ij`, `i, j` in `basis_range(n)`.
///
/// Band-limited operators get tridiagonal (`K <= 1`) or band storage and are
/// checked for symmetry on the window; other operators are stored densely.
pub fn compress(op: &dyn Operator, filt: &Filtration, n: usize) -> Result<CompressedMatrix> {
    if n == 0 {
        return Err(Error::Domain("filtration steps start at n = 1".into()));
    }
    filt.check(op.index_mode())?;
    let range = filt.basis_range(n);
    let first = *range.start();
    let dim = filt.dim(n);

    let storage = match op.as_banded() {
        Some(spec) => {
            spec.check_self_adjoint(first, *range.end())?;
            let k = spec.band();
            if k <= 1 {
                let d = range.clone().map(|i| spec.diag_fn(0, i)).collect();
                let e = range.clone().take(dim - 1).map(|i| spec.diag_fn(1, i)).collect();
                Storage::Tridiagonal(TridiagonalForm::new(d, e)?)
            } else {
                let mut b = BandMatrix::zeros(dim, k);
                for j in 0..dim {
                    for off in 0..=k.min(dim - 1 - j) {
                        b.set(j + off, j, spec.diag_fn(off as i64, first + j as i64));
                    }
                }
                Storage::Banded(b)
            }
        }
        None => {
            let mut m = DenseMatrix::zeros(dim, dim);
            for j in 0..dim {
                for i in 0..dim {
                    m[(i, j)] = op.entry(first + i as i64, first + j as i64)?;
                }
            }
            if !m.is_symmetric(eigen::SYMMETRY_TOL) {
                return Err(Error::Symmetry(format!("compression of {} is not symmetric", op.label())));
            }
            Storage::Dense(m)
        }
    };
    Ok(CompressedMatrix { n, dim, storage })
}

fn banded<'a>(op: &'a dyn Operator, what: &str) -> Result<&'a OperatorSpec> {
    op.as_banded()
        .ok_or_else(|| Error::UnsupportedDegree(format!("{} ({what} needs a band-limited operator)", op.label())))
}

/// Indices adjacent to `H_n` within distance `k`, inside and outside.
fn boundary_indices(filt: &Filtration, n: usize, k: usize) -> (Vec<i64>, Vec<i64>) {
    let range = filt.basis_range(n);
    let (lo, hi) = (*range.start(), *range.end());
    let k = k as i64;
    let mut inside: Vec<i64> = Vec::new();
    let mut outside: Vec<i64> = Vec::new();
    if filt.mode() == IndexMode::Bilateral {
        outside.extend(lo - k..lo);
        inside.extend(lo..=(lo + k - 1).min(hi));
    }
    inside.extend((hi - k + 1).max(lo)..=hi);
    outside.extend(hi + 1..=hi + k);
    inside.sort_unstable();
    inside.dedup();
    (inside, outside)
}

/// `rank(P_n A - A P_n)` at one step, as the sum of the ranks of
/// `(1 - P_n) A P_n` and `P_n A (1 - P_n)`, both supported next to the cut.
pub fn commutator_rank(spec: &OperatorSpec, filt: &Filtration, n: usize, rank_tol: f64) -> Result<usize> {
    filt.check(spec.mode())?;
    let (inside, outside) = boundary_indices(filt, n, spec.band());
    if inside.is_empty() || outside.is_empty() {
        return Ok(0);
    }
    let lower =
        DenseMatrix::from_fn(outside.len(), inside.len(), |r, c| spec.diag_fn(outside[r] - inside[c], inside[c]));
    let upper =
        DenseMatrix::from_fn(inside.len(), outside.len(), |r, c| spec.diag_fn(inside[r] - outside[c], outside[c]));
    Ok(numerical_rank(&lower, rank_tol) + numerical_rank(&upper, rank_tol))
}

/// `max_{n <= n_max} rank(P_n A - A P_n)`.
///
/// For a band-limited operator the rank is eventually constant in `n`, so the
/// maximum over the window equals the supremum once `n_max` exceeds the band.
pub fn degree_estimate(op: &dyn Operator, filt: &Filtration, n_max: usize, rank_tol: f64) -> Result<usize> {
    let spec = banded(op, "degree")?;
    if n_max == 0 {
        return Err(Error::Domain("degree window needs n_max >= 1".into()));
    }
    if !(rank_tol > 0.0) {
        return Err(Error::Domain(format!("rank tolerance must be positive, got {rank_tol}")));
    }
    let mut degree = 0;
    for n in 1..=n_max {
        degree = degree.max(commutator_rank(spec, filt, n, rank_tol)?);
    }
    Ok(degree)
}

/// `Σ_k (1 + |2k|^{1/2}) d_k`, an upper bound for the `D(F)` norm along the
/// bilateral filtration.
pub fn dfnorm_bound(spec: &OperatorSpec) -> Result<f64> {
    if spec.mode() != IndexMode::Bilateral {
        return Err(Error::Unsupported("the diagonal norm bound holds for the bilateral filtration only".into()));
    }
    Ok(spec.diag_sups().iter().map(|&(k, d)| (1.0 + (2.0 * k.unsigned_abs() as f64).sqrt()) * d).sum())
}

/// `Σ_k d_k`, an upper bound for the operator norm.
pub fn norm_upper_bound(spec: &OperatorSpec) -> f64 {
    spec.diag_sups().iter().map(|(_, d)| d).sum()
}

/// Hilbert-Schmidt norm of `(1 - P_n) A P_n`.
pub fn commutator_hs_norm(op: &dyn Operator, filt: &Filtration, n: usize) -> Result<f64> {
    let spec = banded(op, "commutator norm")?;
    filt.check(spec.mode())?;
    let (inside, outside) = boundary_indices(filt, n, spec.band());
    let mut sum = 0.0;
    for &i in &outside {
        for &j in &inside {
            sum += spec.diag_fn(i - j, j).powi(2);
        }
    }
    Ok(sum.sqrt())
}

// Σ_{i in H_n} (AB)_{ii}, exact for banded A, B.
fn compressed_product_trace(a: &OperatorSpec, b: &OperatorSpec, filt: &Filtration, n: usize) -> f64 {
    let ka = a.band() as i64;
    let unilateral = filt.mode() == IndexMode::Unilateral;
    filt.basis_range(n)
        .map(|i| {
            (i - ka..=i + ka)
                .filter(|&j| !unilateral || j >= 1)
                .map(|j| a.diag_fn(i - j, j) * b.diag_fn(j - i, i))
                .sum::<f64>()
        })
        .sum()
}

/// `|trace(P_n AB P_n) - trace(P_n BA P_n)| / dim H_n`.
pub fn trace_state_defect(a: &dyn Operator, b: &dyn Operator, filt: &Filtration, n: usize) -> Result<f64> {
    let a = banded(a, "trace-state defect")?;
    let b = banded(b, "trace-state defect")?;
    filt.check(a.mode())?;
    filt.check(b.mode())?;
    if n == 0 {
        return Err(Error::Domain("filtration steps start at n = 1".into()));
    }
    let ab = compressed_product_trace(a, b, filt, n);
    let ba = compressed_product_trace(b, a, filt, n);
    Ok((ab - ba).abs() / filt.dim(n) as f64)
}

/// Dense block of `op` on `basis_range(window)`, non-symmetric operators allowed.
fn window_block(spec: &OperatorSpec, filt: &Filtration, window: usize) -> DenseMatrix {
    let range = filt.basis_range(window);
    let first = *range.start();
    let dim = filt.dim(window);
    let k = spec.band();
    let mut m = DenseMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in j.saturating_sub(k)..=(j + k).min(dim - 1) {
            m[(i, j)] = spec.diag_fn(i as i64 - j as i64, first + j as i64);
        }
    }
    m
}

/// `Δ_p = P_n A_1...A_p P_n - (P_n A_1 P_n)...(P_n A_p P_n)` on `H_n`.
///
/// The exact product is formed on a window padded by the sum of the band
/// widths, which is large enough that no path between basis vectors of
/// `H_n` is cut off.
pub fn product_compression_delta(specs: &[&OperatorSpec], filt: &Filtration, n: usize) -> Result<DenseMatrix> {
    if specs.is_empty() {
        return Err(Error::Domain("product defect needs at least one operator".into()));
    }
    if n == 0 {
        return Err(Error::Domain("filtration steps start at n = 1".into()));
    }
    for s in specs {
        filt.check(s.mode())?;
    }
    let pad: usize = specs.iter().map(|s| s.band()).sum();
    let window = n + pad;
    let dim = filt.dim(n);
    // H_n sits at local offset `shift` inside the window for both modes
    let shift = match filt.mode() {
        IndexMode::Unilateral => 0,
        IndexMode::Bilateral => pad,
    };

    let blocks: Vec<DenseMatrix> = specs.iter().map(|s| window_block(s, filt, window)).collect();
    let exact = blocks[1..].iter().fold(blocks[0].clone(), |acc, m| acc.matmul(m));
    let exact = DenseMatrix::from_fn(dim, dim, |i, j| exact[(i + shift, j + shift)]);

    let cut = |m: &DenseMatrix| DenseMatrix::from_fn(dim, dim, |i, j| m[(i + shift, j + shift)]);
    let truncated = blocks[1..].iter().fold(cut(&blocks[0]), |acc, m| acc.matmul(&cut(m)));
    Ok(exact.sub(&truncated))
}

/// Trace norm of [`product_compression_delta`].
pub fn product_compression_defect(specs: &[&OperatorSpec], filt: &Filtration, n: usize) -> Result<f64> {
    Ok(eigen::trace_norm(&product_compression_delta(specs, filt, n)?))
}
