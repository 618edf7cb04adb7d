//! Band-limited self-adjoint operators on `l^2(N)` or `l^2(Z)`, described
//! diagonal by diagonal, plus the involutive permutation operator whose
//! compressions accumulate eigenvalues at a point outside the spectrum.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Real function of one index or one real variable, shareable across threads.
pub type IndexFn = Arc<dyn Fn(i64) -> f64 + Send + Sync>;
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Grid size used to estimate `sup |v|` over `[-1, 1]` for potentials.
pub const POTENTIAL_SUP_GRID: usize = 10_000;

/// Default number of trapezoid nodes for symbol quadrature.
pub const DEFAULT_QUADRATURE_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexMode {
    /// Basis `e_1, e_2, ...`.
    Unilateral,
    /// Basis `e_n`, `n` in `Z`.
    Bilateral,
}

impl IndexMode {
    pub fn check_index(self, i: i64) -> Result<()> {
        match self {
            IndexMode::Unilateral if i < 1 => Err(Error::Domain(format!("index {i} is not a natural number"))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for IndexMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexMode::Unilateral => "unilateral",
            IndexMode::Bilateral => "bilateral",
        })
    }
}

/// Anything with a matrix `a_ij = <A e_j, e_i>` that can be compressed.
pub trait Operator: Send + Sync {
    fn index_mode(&self) -> IndexMode;

    /// `Some(K)` when `a_ij = 0` for `|i - j| > K`; `None` if no band exists.
    fn band_half_width(&self) -> Option<usize>;

    fn entry(&self, i: i64, j: i64) -> Result<f64>;

    fn label(&self) -> String;

    /// The banded description, when there is one.
    fn as_banded(&self) -> Option<&OperatorSpec> {
        None
    }
}

#[derive(Clone)]
struct Diagonal {
    values: IndexFn,
    sup: f64,
}

/// A band-limited operator given by its diagonals.
///
/// Diagonal `k` holds the entries `a_{i+k,i}`; `diag_sup(k)` bounds their
/// absolute values. Self-adjoint constructors check `a_ij = a_ji`; the
/// general [`OperatorSpec::from_diagonals`] also admits one-sided operators
/// such as the shift, which only the degree computations accept.
#[derive(Clone)]
pub struct OperatorSpec {
    mode: IndexMode,
    band: usize,
    diagonals: Vec<Option<Diagonal>>,
    label: String,
}

impl fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("label", &self.label)
            .field("mode", &self.mode)
            .field("band", &self.band)
            .field("diag_sup", &self.diag_sups())
            .finish()
    }
}

impl OperatorSpec {
    /// Operator with the given `(offset, entries, sup)` diagonals; all others are zero.
    pub fn from_diagonals(
        mode: IndexMode,
        label: impl Into<String>,
        diagonals: Vec<(i64, IndexFn, f64)>,
    ) -> Result<Self> {
        let band = diagonals.iter().map(|(k, _, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut slots: Vec<Option<Diagonal>> = vec![None; 2 * band + 1];
        for (k, values, sup) in diagonals {
            if !(sup.is_finite() && sup >= 0.0) {
                return Err(Error::Domain(format!("diagonal {k} has invalid sup bound {sup}")));
            }
            let slot = &mut slots[(k + band as i64) as usize];
            if slot.is_some() {
                return Err(Error::Domain(format!("diagonal {k} given twice")));
            }
            *slot = Some(Diagonal { values, sup });
        }
        Ok(Self { mode, band, diagonals: slots, label: label.into() })
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    pub fn band(&self) -> usize {
        self.band
    }

    /// `a_{i+k,i}`, zero outside the band.
    pub fn diag_fn(&self, k: i64, i: i64) -> f64 {
        if k.unsigned_abs() as usize > self.band {
            return 0.0;
        }
        match &self.diagonals[(k + self.band as i64) as usize] {
            Some(d) => (d.values)(i),
            None => 0.0,
        }
    }

    /// Sup norm `d_k` of diagonal `k`.
    pub fn diag_sup(&self, k: i64) -> f64 {
        if k.unsigned_abs() as usize > self.band {
            return 0.0;
        }
        self.diagonals[(k + self.band as i64) as usize].as_ref().map_or(0.0, |d| d.sup)
    }

    /// `(k, d_k)` for every diagonal in the band.
    pub fn diag_sups(&self) -> Vec<(i64, f64)> {
        let b = self.band as i64;
        (-b..=b).map(|k| (k, self.diag_sup(k))).collect()
    }

    /// Whether diagonal `k` is structurally present.
    pub fn has_diagonal(&self, k: i64) -> bool {
        k.unsigned_abs() as usize <= self.band && self.diagonals[(k + self.band as i64) as usize].is_some()
    }

    /// The operator made of diagonal `k` alone.
    pub fn single_diagonal(&self, k: i64) -> Result<OperatorSpec> {
        let slot = self
            .diagonals
            .get((k + self.band as i64) as usize)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Domain(format!("diagonal {k} is not present in {}", self.label)))?;
        OperatorSpec::from_diagonals(
            self.mode,
            format!("{}[diag {k}]", self.label),
            vec![(k, slot.values.clone(), slot.sup)],
        )
    }

    /// Largest `|a_ij - a_ji|` over the index window `lo..=hi`.
    pub fn asymmetry_on(&self, lo: i64, hi: i64) -> f64 {
        let b = self.band as i64;
        let mut worst = 0.0f64;
        for i in lo..=hi {
            for k in 1..=b {
                let j = i + k;
                if j > hi {
                    break;
                }
                // a_{j,i} = diag_fn(k, i), a_{i,j} = diag_fn(-k, j)
                worst = worst.max((self.diag_fn(k, i) - self.diag_fn(-k, j)).abs());
            }
        }
        worst
    }

    /// Fails unless `a_ij = a_ji` on the window `lo..=hi`, relative to the largest `d_k`.
    pub fn check_self_adjoint(&self, lo: i64, hi: i64) -> Result<()> {
        let scale = self.diag_sups().iter().fold(1.0f64, |m, (_, s)| m.max(*s));
        let asym = self.asymmetry_on(lo, hi);
        if asym > 1e-12 * scale {
            return Err(Error::Symmetry(format!("{} has |a_ij - a_ji| = {asym:.3e}", self.label)));
        }
        Ok(())
    }

    /// Diagonal operator with entries `f(i)` bounded by `sup`.
    pub fn diagonal(mode: IndexMode, label: impl Into<String>, f: IndexFn, sup: f64) -> Result<Self> {
        Self::from_diagonals(mode, label, vec![(0, f, sup)])
    }

    /// Jacobi matrix with period-`p` diagonal and off-diagonal patterns:
    /// `a_ii = diagonal[i mod p]`, `a_{i+1,i} = a_{i,i+1} = off_diagonal[i mod q]`.
    pub fn periodic_jacobi(mode: IndexMode, diagonal: &[f64], off_diagonal: &[f64]) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.is_empty() {
            return Err(Error::Domain("periodic patterns must be nonempty".into()));
        }
        let pick = |pattern: &[f64], i: i64| pattern[i.rem_euclid(pattern.len() as i64) as usize];
        let sup = |pattern: &[f64]| pattern.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let d: Vec<f64> = diagonal.to_vec();
        let e: Vec<f64> = off_diagonal.to_vec();
        let e_lower = e.clone();
        let e_upper = e.clone();
        let spec = Self::from_diagonals(
            mode,
            format!("periodic_jacobi(d={diagonal:?}, e={off_diagonal:?})"),
            vec![
                (0, Arc::new(move |i| pick(&d, i)), sup(diagonal)),
                (1, Arc::new(move |i| pick(&e_lower, i)), sup(off_diagonal)),
                (-1, Arc::new(move |i| pick(&e_upper, i - 1)), sup(off_diagonal)),
            ],
        )?;
        Ok(spec)
    }

    /// The product `self * rhs`, band `K_A + K_B`.
    ///
    /// `(AB)_{i+k,i} = Σ_j a_{i+k,j} b_{j,i}`; the sup of diagonal `k` is
    /// bounded by `Σ_{k1+k2=k} d^A_{k1} d^B_{k2}`.
    pub fn product(&self, rhs: &OperatorSpec) -> Result<OperatorSpec> {
        if self.mode != rhs.mode {
            return Err(Error::Configuration(format!("cannot multiply {} and {} operators", self.mode, rhs.mode)));
        }
        let (ka, kb) = (self.band as i64, rhs.band as i64);
        let mode = self.mode;
        let mut diagonals = Vec::new();
        for k in -(ka + kb)..=(ka + kb) {
            let sup: f64 =
                (-kb..=kb).filter(|k2| (k - k2).abs() <= ka).map(|k2| self.diag_sup(k - k2) * rhs.diag_sup(k2)).sum();
            let present =
                (-kb..=kb).any(|k2| (k - k2).abs() <= ka && self.has_diagonal(k - k2) && rhs.has_diagonal(k2));
            if !present {
                continue;
            }
            let (a, b) = (self.clone(), rhs.clone());
            let values: IndexFn = Arc::new(move |i| {
                (-kb..=kb)
                    .filter(|k2| (k - k2).abs() <= ka)
                    .filter(|k2| mode == IndexMode::Bilateral || i + k2 >= 1)
                    .map(|k2| a.diag_fn(k - k2, i + k2) * b.diag_fn(k2, i))
                    .sum()
            });
            diagonals.push((k, values, sup));
        }
        OperatorSpec::from_diagonals(mode, format!("({})*({})", self.label, rhs.label), diagonals)
    }

    pub fn entry(&self, i: i64, j: i64) -> Result<f64> {
        self.mode.check_index(i)?;
        self.mode.check_index(j)?;
        Ok(self.diag_fn(i - j, j))
    }
}

impl Operator for OperatorSpec {
    fn index_mode(&self) -> IndexMode {
        self.mode
    }

    fn band_half_width(&self) -> Option<usize> {
        Some(self.band)
    }

    fn entry(&self, i: i64, j: i64) -> Result<f64> {
        OperatorSpec::entry(self, i, j)
    }

    fn label(&self) -> String {
        self.label.clone()
    }

    fn as_banded(&self) -> Option<&OperatorSpec> {
        Some(self)
    }
}

/// Fourier coefficients `a_k`, `k = -K..=K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients {
    k_max: usize,
    values: Vec<f64>,
}

impl FourierCoefficients {
    /// From `a_{-K}..=a_K`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() % 2 == 0 {
            return Err(Error::Domain(format!("expected 2K+1 coefficients, got {}", values.len())));
        }
        Ok(Self { k_max: values.len() / 2, values })
    }

    /// From `a_0, a_1, ..., a_K` with `a_{-k} = a_k`.
    pub fn symmetric(one_sided: &[f64]) -> Result<Self> {
        if one_sided.is_empty() {
            return Err(Error::Domain("need at least a_0".into()));
        }
        let mut values: Vec<f64> = one_sided.iter().rev().copied().collect();
        values.extend_from_slice(&one_sided[1..]);
        Self::new(values)
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn get(&self, k: i64) -> f64 {
        if k.unsigned_abs() as usize > self.k_max {
            0.0
        } else {
            self.values[(k + self.k_max as i64) as usize]
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// A real 2π-periodic symbol `f` with its quadrature resolution.
#[derive(Clone)]
pub struct SymbolSpec {
    f: RealFn,
    quadrature_points: usize,
    label: String,
}

impl fmt::Debug for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolSpec")
            .field("label", &self.label)
            .field("quadrature_points", &self.quadrature_points)
            .finish()
    }
}

impl SymbolSpec {
    pub fn new(label: impl Into<String>, f: RealFn, quadrature_points: usize) -> Result<Self> {
        if quadrature_points < 2 {
            return Err(Error::Domain("quadrature needs at least 2 points".into()));
        }
        Ok(Self { f, quadrature_points, label: label.into() })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn quadrature_points(&self) -> usize {
        self.quadrature_points
    }

    /// Trapezoid nodes `x_j = -π + 2πj/N`, `j = 0..N`.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.quadrature_points;
        (0..n).map(move |j| -PI + 2.0 * PI * j as f64 / n as f64)
    }

    /// Sampled `(min f, max f)`: the essential inf and sup on the quadrature grid.
    pub fn range(&self) -> (f64, f64) {
        self.nodes()
            .map(|x| self.eval(x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)))
    }

    /// `(1/2π) ∫ g(x) dx` over one period by the trapezoid rule.
    pub fn mean_of(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes().map(g).sum::<f64>() / self.quadrature_points as f64
    }
}

/// `a_k = (1/2π) ∫ f(x) e^{-ikx} dx` for `|k| <= K` by the trapezoid rule.
///
/// Only even symbols are accepted, so the coefficients are real and
/// `a_{-k} = a_k`.
pub fn fourier_coefficients(sym: &SymbolSpec, k_max: i64) -> Result<FourierCoefficients> {
    if k_max < 0 {
        return Err(Error::Domain(format!("band K must be nonnegative, got {k_max}")));
    }
    let k_max = k_max as usize;
    if sym.quadrature_points < 2 * k_max + 2 {
        return Err(Error::Domain(format!(
            "{} quadrature points cannot resolve band {k_max} (need {})",
            sym.quadrature_points,
            2 * k_max + 2
        )));
    }
    let samples: Vec<(f64, f64)> = sym.nodes().map(|x| (x, sym.eval(x))).collect();
    let scale = samples.iter().fold(1.0f64, |m, (_, y)| m.max(y.abs()));
    let asym = samples.iter().map(|&(x, y)| (y - sym.eval(-x)).abs()).fold(0.0f64, f64::max);
    if asym > 1e-10 * scale {
        return Err(Error::UnsupportedSymbol(format!(
            "{} is not even (|f(x) - f(-x)| up to {asym:.3e}); real symmetric operators need an even symbol",
            sym.label
        )));
    }
    let n = samples.len() as f64;
    let one_sided: Vec<f64> =
        (0..=k_max).map(|k| samples.iter().map(|&(x, y)| y * (k as f64 * x).cos()).sum::<f64>() / n).collect();
    FourierCoefficients::symmetric(&one_sided)
}

fn constant_diagonals(coeffs: &FourierCoefficients) -> Result<Vec<(i64, IndexFn, f64)>> {
    let k = coeffs.k_max() as i64;
    let scale = coeffs.as_slice().iter().fold(1.0f64, |m, a| m.max(a.abs()));
    for j in 1..=k {
        if (coeffs.get(j) - coeffs.get(-j)).abs() > 1e-12 * scale {
            return Err(Error::Symmetry(format!("a_{j} = {} but a_-{j} = {}", coeffs.get(j), coeffs.get(-j))));
        }
    }
    Ok((-k..=k)
        .filter(|&j| coeffs.get(j) != 0.0)
        .map(|j| {
            let a = coeffs.get(j);
            (j, Arc::new(move |_| a) as IndexFn, a.abs())
        })
        .collect())
}

/// Bilateral Laurent operator with constant diagonals `a_{i+k,i} = a_k`.
pub fn laurent_operator(coeffs: &FourierCoefficients) -> Result<OperatorSpec> {
    let mut spec = OperatorSpec::from_diagonals(IndexMode::Bilateral, "laurent", constant_diagonals(coeffs)?)?;
    spec.label = format!("laurent(a={:?})", coeffs.as_slice());
    Ok(spec)
}

/// Unilateral Toeplitz operator with the same constant diagonals.
pub fn toeplitz_operator(coeffs: &FourierCoefficients) -> Result<OperatorSpec> {
    let mut spec = OperatorSpec::from_diagonals(IndexMode::Unilateral, "toeplitz", constant_diagonals(coeffs)?)?;
    spec.label = format!("toeplitz(a={:?})", coeffs.as_slice());
    Ok(spec)
}

/// `max |v|` over a uniform grid on `[-1, 1]`.
pub fn potential_sup(v: &RealFn) -> f64 {
    let n = POTENTIAL_SUP_GRID;
    (0..n).map(|j| v(-1.0 + 2.0 * j as f64 / (n - 1) as f64).abs()).fold(0.0, f64::max)
}

fn unit_off_diagonals() -> Vec<(i64, IndexFn, f64)> {
    vec![(1, Arc::new(|_| 1.0), 1.0), (-1, Arc::new(|_| 1.0), 1.0)]
}

/// `T e_n = e_{n-1} + v(sin(nθ)) e_n + e_{n+1}` on `l^2(Z)`.
pub fn almost_mathieu_operator(v: RealFn, theta: f64) -> Result<OperatorSpec> {
    if !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be finite, got {theta}")));
    }
    let sup = potential_sup(&v);
    let mut diagonals = unit_off_diagonals();
    diagonals.push((0, Arc::new(move |n| v((n as f64 * theta).sin())), sup));
    OperatorSpec::from_diagonals(IndexMode::Bilateral, format!("almost_mathieu(theta={theta})"), diagonals)
}

/// The tridiagonal form `V_1 + V_1^* + D` of the discretised Hamiltonian
/// with step `sigma`, where `D e_n = v(-sin(2 sigma^2 n)) e_n`.
pub fn discretized_hamiltonian(v: RealFn, sigma: f64) -> Result<OperatorSpec> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let negated: RealFn = Arc::new(move |x| v(-x));
    let mut spec = almost_mathieu_operator(negated, 2.0 * sigma * sigma)?;
    spec.label = format!("discretized_hamiltonian(sigma={sigma})");
    Ok(spec)
}

/// The involution `π` of `N = {1, 2, ...}` exchanging evens and odds.
///
/// `π` is defined on all of `N`; values for `k <= limit` are tabulated and
/// the rest are evaluated from the closed form on demand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSpec {
    limit: usize,
    // table[k] = π(k) for 1 <= k <= limit, table[0] unused
    table: Vec<usize>,
}

impl PermutationSpec {
    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn pi(&self, k: usize) -> Option<usize> {
        match k {
            0 => None,
            k if k <= self.limit => Some(self.table[k]),
            k => Some(appendix_pi(k)),
        }
    }

    /// `#{k <= n : π(k) > n}`, the number of zero columns of the `n`-th compression.
    pub fn escape_count(&self, n: usize) -> usize {
        (1..=n).filter(|&k| self.pi(k).is_some_and(|p| p > n)).count()
    }
}

/// `#{j >= 1 : 16 j^2 + 1 <= x}`, the odd images of multiples of 4 up to `x`.
fn squares_below(x: usize) -> usize {
    if x == 0 {
        0
    } else {
        ((x - 1) / 16).isqrt()
    }
}

/// Number of odd `o <= x` that are not of the form `16 j^2 + 1`.
fn free_odds_below(x: usize) -> usize {
    x.div_ceil(2) - squares_below(x)
}

/// `π(k)` for the bijection `f: evens -> odds` with `f(k) = k^2 + 1` on
/// multiples of 4 and the order-preserving matching of the remaining evens
/// `4m + 2` with the remaining odds.
fn appendix_pi(k: usize) -> usize {
    debug_assert!(k >= 1);
    if k % 4 == 0 {
        return k * k + 1;
    }
    if k % 2 == 0 {
        // the m-th remaining odd, 0-based
        let m = (k - 2) / 4;
        let (mut lo, mut hi) = (1, 2 * k + 16);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if free_odds_below(mid) > m {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return lo;
    }
    let r = (k - 1).isqrt();
    if r > 0 && r % 4 == 0 && r * r == k - 1 {
        return r;
    }
    4 * (free_odds_below(k) - 1) + 2
}

/// Builds `π` and tabulates it on `{1, ..., limit}`.
pub fn appendix_permutation(limit: usize) -> Result<PermutationSpec> {
    if limit < 16 {
        return Err(Error::Domain(format!("permutation limit must be at least 16, got {limit}")));
    }
    let mut table = vec![0usize; limit + 1];
    for (k, slot) in table.iter_mut().enumerate().skip(1) {
        *slot = appendix_pi(k);
    }
    Ok(PermutationSpec { limit, table })
}

/// `A ξ(k) = ξ(π(k))` on `l^2(N)`: `a_ij = 1` iff `i = π(j)`.
///
/// Not band-limited; degree computations reject it.
#[derive(Clone, Debug)]
pub struct PermutationOperator {
    perm: PermutationSpec,
}

impl PermutationOperator {
    pub fn new(perm: PermutationSpec) -> Self {
        Self { perm }
    }

    pub fn permutation(&self) -> &PermutationSpec {
        &self.perm
    }
}

/// Operator induced by the appendix permutation.
pub fn permutation_operator(perm: PermutationSpec) -> PermutationOperator {
    PermutationOperator::new(perm)
}

impl Operator for PermutationOperator {
    fn index_mode(&self) -> IndexMode {
        IndexMode::Unilateral
    }

    fn band_half_width(&self) -> Option<usize> {
        None
    }

    fn entry(&self, i: i64, j: i64) -> Result<f64> {
        IndexMode::Unilateral.check_index(i)?;
        IndexMode::Unilateral.check_index(j)?;
        let image = self.perm.pi(j as usize).expect("indices checked positive");
        Ok(if image as i64 == i { 1.0 } else { 0.0 })
    }

    fn label(&self) -> String {
        format!("appendix_permutation(limit={})", self.perm.limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_jacobi() -> OperatorSpec {
        laurent_operator(&FourierCoefficients::symmetric(&[0.0, 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn entry_examples() {
        assert_eq!(free_jacobi().entry(5, 6).unwrap(), 1.0);
        assert_eq!(free_jacobi().entry(3, 7).unwrap(), 0.0);
        let am = almost_mathieu_operator(Arc::new(|x| x), PI / 2.0).unwrap();
        assert!((am.entry(1, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unilateral_rejects_nonpositive_indices() {
        let t = toeplitz_operator(&FourierCoefficients::symmetric(&[0.0, 1.0]).unwrap()).unwrap();
        assert!(matches!(t.entry(0, 1), Err(Error::Domain(_))));
        assert!(matches!(t.entry(2, -1), Err(Error::Domain(_))));
        assert_eq!(t.entry(1, 2).unwrap(), 1.0);
    }

    #[test]
    fn fourier_of_cosine_and_constant() {
        let cos = SymbolSpec::new("cos", Arc::new(f64::cos), 4096).unwrap();
        let a = fourier_coefficients(&cos, 2).unwrap();
        assert!((a.get(1) - 0.5).abs() < 1e-14 && (a.get(-1) - 0.5).abs() < 1e-14);
        for k in [0, 2, -2] {
            assert!(a.get(k).abs() < 1e-14);
        }
        let one = SymbolSpec::new("one", Arc::new(|_| 1.0), 64).unwrap();
        let a = fourier_coefficients(&one, 3).unwrap();
        assert!((a.get(0) - 1.0).abs() < 1e-15);
        assert!((1..=3).all(|k| a.get(k).abs() < 1e-15));
    }

    #[test]
    fn fourier_matches_high_resolution_oracle() {
        let f: RealFn = Arc::new(|x: f64| 2.0 * x.cos() + (2.0 * x).cos());
        let coarse = fourier_coefficients(&SymbolSpec::new("f", f.clone(), 4096).unwrap(), 2).unwrap();
        let fine = fourier_coefficients(&SymbolSpec::new("f", f, 1 << 16).unwrap(), 2).unwrap();
        for (k, want) in [(0, 0.0), (1, 1.0), (2, 0.5)] {
            assert!((coarse.get(k) - fine.get(k)).abs() < 1e-13);
            assert!((coarse.get(k) - want).abs() < 1e-13);
            assert!((coarse.get(-k) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn fourier_errors() {
        let sym = SymbolSpec::new("sin", Arc::new(f64::sin), 64).unwrap();
        assert!(matches!(fourier_coefficients(&sym, -1), Err(Error::Domain(_))));
        assert!(matches!(fourier_coefficients(&sym, 2), Err(Error::UnsupportedSymbol(_))));
        let coarse = SymbolSpec::new("cos", Arc::new(f64::cos), 8).unwrap();
        assert!(matches!(fourier_coefficients(&coarse, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn laurent_readoff() {
        let spec = laurent_operator(&FourierCoefficients::symmetric(&[0.0, 1.0, 0.5]).unwrap()).unwrap();
        assert_eq!(spec.band(), 2);
        assert_eq!(spec.diag_sup(1), 1.0);
        assert_eq!(spec.diag_sup(-2), 0.5);
        assert_eq!(spec.diag_sup(0), 0.0);
        let five = laurent_operator(&FourierCoefficients::symmetric(&[5.0]).unwrap()).unwrap();
        assert_eq!(five.band(), 0);
        assert_eq!(five.entry(-3, -3).unwrap(), 5.0);
    }

    #[test]
    fn laurent_rejects_asymmetric_coefficients() {
        let c = FourierCoefficients::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(laurent_operator(&c), Err(Error::Symmetry(_))));
    }

    #[test]
    fn laurent_of_two_cos_is_free_jacobi() {
        let sym = SymbolSpec::new("2cos", Arc::new(|x: f64| 2.0 * x.cos()), 4096).unwrap();
        let spec = laurent_operator(&fourier_coefficients(&sym, 1).unwrap()).unwrap();
        for i in -5..5 {
            assert!((spec.entry(i + 1, i).unwrap() - 1.0).abs() < 1e-12);
            assert!((spec.entry(i, i + 1).unwrap() - 1.0).abs() < 1e-12);
            assert!(spec.entry(i, i).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn almost_mathieu_diagonal() {
        let lambda = 0.7;
        let theta = 1.3;
        let am = almost_mathieu_operator(Arc::new(move |x| 2.0 * lambda * x), theta).unwrap();
        for n in -4..4 {
            assert!((am.entry(n, n).unwrap() - 2.0 * lambda * (n as f64 * theta).sin()).abs() < 1e-15);
        }
        assert!((am.diag_sup(0) - 1.4).abs() < 1e-12);
        assert_eq!(am.band(), 1);
    }

    #[test]
    fn hamiltonian_form_negates_argument() {
        let sigma = 0.3;
        let v: RealFn = Arc::new(|x: f64| x * x * x + 0.5 * x);
        let h = discretized_hamiltonian(v.clone(), sigma).unwrap();
        for n in -6..6 {
            let want = v(-(2.0 * sigma * sigma * n as f64).sin());
            assert!((h.entry(n, n).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn appendix_pairs() {
        let p = appendix_permutation(400).unwrap();
        assert_eq!(p.pi(4), Some(17));
        assert_eq!(p.pi(17), Some(4));
        assert_eq!(p.pi(8), Some(65));
        assert!(matches!(appendix_permutation(15), Err(Error::Domain(_))));
    }

    #[test]
    fn permutation_is_a_parity_swapping_involution() {
        let p = appendix_permutation(101).unwrap();
        for k in 1..=2000 {
            let image = p.pi(k).unwrap();
            assert_ne!(image % 2, k % 2, "k={k}");
            assert_eq!(p.pi(image), Some(k), "k={k}");
        }
    }

    #[test]
    fn remaining_evens_match_remaining_odds_in_order() {
        // brute-force oracle: list the remaining odds directly
        let p = appendix_permutation(64).unwrap();
        let images: Vec<usize> = (4..=400).step_by(4).map(|k| k * k + 1).collect();
        let odds: Vec<usize> = (1..2000).step_by(2).filter(|o| !images.contains(o)).collect();
        let evens: Vec<usize> = (2..1000).step_by(4).collect();
        for (e, o) in evens.iter().zip(&odds) {
            assert_eq!(p.pi(*e), Some(*o), "e={e}");
        }
    }

    #[test]
    fn escape_count_exceeds_quarter_bound() {
        let p = appendix_permutation(4096).unwrap();
        for n in [64, 256, 1000, 4096] {
            let bound = n as f64 / 4.0 * (1.0 - (n as f64).powf(-0.5));
            assert!(p.escape_count(n) as f64 >= bound, "n={n}");
        }
    }

    #[test]
    fn permutation_operator_entries() {
        let op = permutation_operator(appendix_permutation(64).unwrap());
        assert_eq!(op.entry(17, 4).unwrap(), 1.0);
        assert_eq!(op.entry(4, 17).unwrap(), 1.0);
        assert_eq!(op.entry(5, 4).unwrap(), 0.0);
        // beyond the table the closed form takes over
        assert_eq!(op.entry(65, 8).unwrap(), 1.0);
        assert_eq!(op.entry(8 * 8 * 8 * 8 + 1, 64).unwrap(), 1.0);
        assert!(op.entry(0, 4).is_err());
        assert_eq!(op.band_half_width(), None);
    }

    #[test]
    fn periodic_jacobi_is_symmetric() {
        let spec = OperatorSpec::periodic_jacobi(IndexMode::Bilateral, &[1.0, -1.0], &[1.0, 0.5]).unwrap();
        assert!(spec.asymmetry_on(-20, 20) == 0.0);
        assert_eq!(spec.entry(0, 1).unwrap(), 1.0);
        assert_eq!(spec.entry(1, 2).unwrap(), 0.5);
        assert_eq!(spec.entry(-1, 0).unwrap(), 0.5);
        assert_eq!(spec.entry(1, 1).unwrap(), -1.0);
    }
}
