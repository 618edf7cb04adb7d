//! Empirical spectral measures, eigenvalue ladders and the
//! essential/transient classification read off their counting functions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compression::{compress, Filtration};
use crate::eigen::EigenvalueList;
use crate::operator::{IndexMode, Operator, SymbolSpec};
use crate::{Error, Result};

/// Default ladder: dimensions roughly double from step to step.
pub const DEFAULT_SCHEDULE: [usize; 6] = [64, 128, 256, 512, 1024, 2048];

/// Window radius as a fraction of the spectral diameter.
pub const DEFAULT_EPS_FRACTION: f64 = 0.05;

/// Minimum number of ladder steps accepted by [`classify`].
pub const MIN_LADDER_STEPS: usize = 4;

/// Minimum ratio between the last and first dimension accepted by [`classify`].
pub const MIN_DIM_GROWTH: usize = 8;

/// Uniform probability measure on the eigenvalues of one compression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    eigs: EigenvalueList,
    weight: f64,
}

impl EmpiricalMeasure {
    pub fn new(eigs: EigenvalueList) -> Result<Self> {
        if eigs.dim() == 0 {
            return Err(Error::Domain("empirical measure of an empty spectrum".into()));
        }
        let weight = 1.0 / eigs.dim() as f64;
        Ok(Self { eigs, weight })
    }

    pub fn eigs(&self) -> &EigenvalueList {
        &self.eigs
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// One rung of a ladder: the eigenvalues of `A_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub n: usize,
    pub dim: usize,
    pub eigs: EigenvalueList,
}

/// Spectra of `A_n` along an increasing schedule of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigLadder {
    filtration: Filtration,
    steps: Vec<LadderStep>,
}

impl EigLadder {
    /// Compresses `op` at every `n` of `schedule` and solves each step.
    ///
    /// Steps are solved in parallel on the current rayon pool; the result
    /// does not depend on the number of threads.
    pub fn build(op: &dyn Operator, filt: &Filtration, schedule: &[usize]) -> Result<Self> {
        check_schedule(schedule)?;
        let steps = schedule
            .par_iter()
            .map(|&n| {
                let eigs = compress(op, filt, n)?.eigenvalues()?;
                Ok(LadderStep { n, dim: filt.dim(n), eigs })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { filtration: *filt, steps })
    }

    /// Ladder along the filtration matching the operator's index mode.
    pub fn for_operator(op: &dyn Operator, schedule: &[usize]) -> Result<Self> {
        Self::build(op, &Filtration::new(op.index_mode()), schedule)
    }

    /// Assembles a ladder from precomputed steps.
    pub fn from_steps(filtration: Filtration, steps: Vec<LadderStep>) -> Result<Self> {
        let schedule: Vec<usize> = steps.iter().map(|s| s.n).collect();
        check_schedule(&schedule)?;
        for s in &steps {
            if s.dim != filtration.dim(s.n) || s.eigs.dim() != s.dim {
                return Err(Error::Domain(format!(
                    "step n={} has dim {} and {} eigenvalues, expected {}",
                    s.n,
                    s.dim,
                    s.eigs.dim(),
                    filtration.dim(s.n)
                )));
            }
        }
        Ok(Self { filtration, steps })
    }

    pub fn filtration(&self) -> Filtration {
        self.filtration
    }

    pub fn mode(&self) -> IndexMode {
        self.filtration.mode()
    }

    pub fn steps(&self) -> &[LadderStep] {
        &self.steps
    }

    pub fn schedule(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.n).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.dim).collect()
    }

    pub fn last(&self) -> &LadderStep {
        self.steps.last().expect("ladders are nonempty")
    }

    pub fn measures(&self) -> Vec<EmpiricalMeasure> {
        self.steps.iter().map(|s| EmpiricalMeasure::new(s.eigs.clone()).expect("steps are nonempty")).collect()
    }

    /// Largest `max - min` over all steps.
    pub fn spectral_diameter(&self) -> f64 {
        self.steps.iter().map(|s| s.eigs.max().unwrap_or(0.0) - s.eigs.min().unwrap_or(0.0)).fold(0.0, f64::max)
    }

    /// Largest absolute eigenvalue over all steps.
    pub fn spectral_radius(&self) -> f64 {
        self.steps.iter().map(|s| s.eigs.spectral_radius()).fold(0.0, f64::max)
    }

    /// Indices of the last `len` steps (all steps if fewer).
    fn tail(&self, len: usize) -> std::ops::Range<usize> {
        self.steps.len().saturating_sub(len)..self.steps.len()
    }
}

fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Domain("empty ladder schedule".into()));
    }
    if schedule[0] == 0 {
        return Err(Error::Domain("ladder schedule must start at n >= 1".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("ladder schedule {schedule:?} is not strictly increasing")));
    }
    Ok(())
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(Error::Domain(format!("({lo}, {hi}) is not an open interval")));
    }
    Ok(())
}

/// `N(U)`: eigenvalues in the open interval `(lo, hi)`, with multiplicity.
pub fn counting(eigs: &EigenvalueList, lo: f64, hi: f64) -> Result<usize> {
    check_interval(lo, hi)?;
    Ok(eigs.count_open(lo, hi))
}

/// `N(U) / dim`.
pub fn density(eigs: &EigenvalueList, lo: f64, hi: f64) -> Result<f64> {
    let count = counting(eigs, lo, hi)?;
    Ok(if eigs.dim() == 0 { 0.0 } else { count as f64 / eigs.dim() as f64 })
}

/// `∫ u dμ = weight · Σ u(λ_i)`.
pub fn integrate(mu: &EmpiricalMeasure, u: impl Fn(f64) -> f64) -> f64 {
    mu.weight * mu.eigs.values().iter().map(|&x| u(x)).sum::<f64>()
}

/// `(1/2π) ∫ u(f(x)) dx` by the trapezoid rule.
pub fn szego_reference(sym: &SymbolSpec, u: impl Fn(f64) -> f64) -> f64 {
    sym.mean_of(|x| u(sym.eval(x)))
}

/// `|∫ u dμ_n - reference|` for every step.
pub fn weak_star_gap(ladder: &EigLadder, reference: f64, u: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
    ladder.measures().iter().map(|mu| (integrate(mu, &u) - reference).abs()).collect()
}

/// True when every step in the tail half of the ladder has an eigenvalue
/// within `tol` of `lambda`.
pub fn lambda_membership(ladder: &EigLadder, lambda: f64, tol: f64) -> bool {
    let half = ladder.steps.len().div_ceil(2);
    ladder.steps[ladder.tail(half)].iter().all(|s| s.eigs.distance_to(lambda) <= tol)
}

/// `4 · diameter / dim` of the smallest step in the tail half.
pub fn default_membership_tol(ladder: &EigLadder) -> f64 {
    let half = ladder.steps.len().div_ceil(2);
    let first = &ladder.steps[ladder.tail(half).start];
    let diameter = ladder.spectral_diameter();
    let scale = if diameter > 0.0 { diameter } else { 1.0 };
    4.0 * scale / first.dim as f64
}

/// `0.05 · diameter`, or `0.05 · max(|λ|, 1)` for a one-point spectrum.
pub fn default_eps(ladder: &EigLadder) -> f64 {
    let diameter = ladder.spectral_diameter();
    if diameter > 0.0 {
        DEFAULT_EPS_FRACTION * diameter
    } else {
        DEFAULT_EPS_FRACTION * ladder.spectral_radius().max(1.0)
    }
}

/// Grid pitch `ε / 2`.
pub fn default_pitch(eps: f64) -> f64 {
    0.5 * eps
}

/// Trend-reading parameters for [`classify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Number of final steps whose counts are read as the trend.
    pub tail_len: usize,
    /// Required count growth per doubling of the dimension in the tail.
    pub growth_min: f64,
    /// Fixed transient cap; `None` takes the maximum count over the first
    /// half of the ladder, separately for each point.
    pub cap_const: Option<usize>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { tail_len: 3, growth_min: 1.5, cap_const: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Essential,
    Transient,
    Indeterminate,
    NotInLambda,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Essential => "essential",
            Label::Transient => "transient",
            Label::Indeterminate => "indeterminate",
            Label::NotInLambda => "not-in-lambda",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Counts and densities behind one label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointEvidence {
    pub lambda: f64,
    pub label: Label,
    pub cap: usize,
    pub counts: Vec<usize>,
    pub densities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub eps: f64,
    pub thresholds: Thresholds,
    pub schedule: Vec<usize>,
    pub dims: Vec<usize>,
    pub points: Vec<PointEvidence>,
}

impl ClassificationReport {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.points.iter().map(|p| p.label).collect()
    }

    pub fn label_of(&self, lambda: f64) -> Option<Label> {
        self.points.iter().find(|p| p.lambda == lambda).map(|p| p.label)
    }
}

/// Labels every grid point from the counts `N_n((λ-ε, λ+ε))` along the ladder.
///
/// In order: `not-in-lambda` if the tail counts are all zero; `transient`
/// if every count stays within the cap; `essential` if the tail counts
/// grow strictly, by at least `growth_min` per doubling, and end above the
/// cap; `indeterminate` otherwise.
pub fn classify(ladder: &EigLadder, grid: &[f64], eps: f64, th: &Thresholds) -> Result<ClassificationReport> {
    let steps = ladder.steps();
    if steps.len() < MIN_LADDER_STEPS {
        return Err(Error::Diagnostic(format!(
            "classification needs at least {MIN_LADDER_STEPS} ladder steps, got {}",
            steps.len()
        )));
    }
    let (first, last) = (steps[0].dim, ladder.last().dim);
    if last < MIN_DIM_GROWTH * first {
        return Err(Error::Diagnostic(format!(
            "classification needs {MIN_DIM_GROWTH}x dimension growth, ladder spans {first}..{last}"
        )));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("window radius must be positive, got {eps}")));
    }
    if th.tail_len < 2 || th.tail_len > steps.len() || !(th.growth_min >= 1.0) {
        return Err(Error::Configuration(format!("unusable thresholds {th:?}")));
    }
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("grid point {bad} is not finite")));
    }

    let points = grid
        .par_iter()
        .map(|&lambda| {
            let counts: Vec<usize> = steps.iter().map(|s| s.eigs.count_open(lambda - eps, lambda + eps)).collect();
            let densities = counts.iter().zip(steps).map(|(&c, s)| c as f64 / s.dim as f64).collect();
            let cap = th.cap_const.unwrap_or_else(|| counts[..steps.len() / 2].iter().copied().max().unwrap_or(0));
            let label = label_counts(&counts, steps, cap, th);
            PointEvidence { lambda, label, cap, counts, densities }
        })
        .collect();

    Ok(ClassificationReport { eps, thresholds: th.clone(), schedule: ladder.schedule(), dims: ladder.dims(), points })
}

fn label_counts(counts: &[usize], steps: &[LadderStep], cap: usize, th: &Thresholds) -> Label {
    let tail = counts.len() - th.tail_len..counts.len();
    if counts[tail.clone()].iter().all(|&c| c == 0) {
        return Label::NotInLambda;
    }
    if counts.iter().all(|&c| c <= cap) {
        return Label::Transient;
    }
    let growing = tail.clone().skip(1).all(|i| {
        let (prev, next) = (counts[i - 1], counts[i]);
        let doublings = (steps[i].dim as f64 / steps[i - 1].dim as f64).log2();
        prev >= 1 && next > prev && next as f64 >= th.growth_min.powf(doublings) * prev as f64
    });
    if growing && counts[tail.end - 1] > cap {
        Label::Essential
    } else {
        Label::Indeterminate
    }
}

/// Union of closed intervals approximating the essential spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub intervals: Vec<(f64, f64)>,
    pub h: f64,
    pub eps: f64,
    pub radius: f64,
    pub report: ClassificationReport,
}

/// Grid `-R, -R + h, ..., R` with `R = (ladder radius) + 2ε`.
pub fn spectrum_grid(ladder: &EigLadder, h: f64, eps: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("grid pitch must be positive, got {h}")));
    }
    let radius = ladder.spectral_radius() + 2.0 * eps;
    let steps = (2.0 * radius / h).ceil() as usize;
    Ok((0..=steps).map(|j| -radius + j as f64 * h).collect())
}

/// Sweeps the grid of pitch `h`, merges runs of essential points and
/// shrinks each run by `ε - h/2` at both ends, undoing the window's reach.
pub fn spectrum_estimate(ladder: &EigLadder, h: f64, eps: f64) -> Result<SpectrumEstimate> {
    spectrum_estimate_with(ladder, h, eps, &Thresholds::default())
}

pub fn spectrum_estimate_with(ladder: &EigLadder, h: f64, eps: f64, th: &Thresholds) -> Result<SpectrumEstimate> {
    if h > eps {
        return Err(Error::Domain(format!("grid pitch {h} exceeds the window radius {eps}")));
    }
    let grid = spectrum_grid(ladder, h, eps)?;
    let radius = grid.last().map_or(0.0, |x| x.abs());
    let report = classify(ladder, &grid, eps, th)?;
    let shrink = eps - 0.5 * h;
    let mut intervals = Vec::new();
    let mut run: Option<(f64, f64)> = None;
    for p in report.points.iter().chain(std::iter::once(&PointEvidence {
        lambda: f64::INFINITY,
        label: Label::NotInLambda,
        cap: 0,
        counts: Vec::new(),
        densities: Vec::new(),
    })) {
        if p.label == Label::Essential {
            run = Some(run.map_or((p.lambda, p.lambda), |(a, _)| (a, p.lambda)));
        } else if let Some((a, b)) = run.take() {
            let (lo, hi) = (a + shrink, b - shrink);
            intervals.push(if lo <= hi { (lo, hi) } else { (0.5 * (a + b), 0.5 * (a + b)) });
        }
    }
    Ok(SpectrumEstimate { intervals, h, eps, radius, report })
}

/// Hausdorff distance between two finite unions of closed intervals.
///
/// Both lists must be sorted and disjoint. An empty set is at infinite
/// distance from a nonempty one.
pub fn hausdorff_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => one_sided(a, b).max(one_sided(b, a)),
    }
}

fn dist_to_union(x: f64, set: &[(f64, f64)]) -> f64 {
    set.iter()
        .map(|&(lo, hi)| {
            if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn one_sided(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    // the farthest point of an interval from b is an endpoint or the
    // midpoint of a gap of b
    let mut candidates = Vec::new();
    for &(lo, hi) in a {
        candidates.push(lo);
        candidates.push(hi);
        for w in b.windows(2) {
            let mid = 0.5 * (w[0].1 + w[1].0);
            if lo <= mid && mid <= hi {
                candidates.push(mid);
            }
        }
    }
    candidates.into_iter().map(|x| dist_to_union(x, b)).fold(0.0, f64::max)
}

/// One failed sample of a known spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentViolation {
    pub lambda: f64,
    pub in_lambda: bool,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub samples: Vec<f64>,
    pub violations: Vec<ContainmentViolation>,
    /// Essential grid runs that stay away from the known spectrum by more
    /// than the window radius: points of `Λ_e` outside `σ_e`.
    pub extra_essential: Vec<(f64, f64)>,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that sampled points of a known spectrum are limits of
/// eigenvalues and are classified essential.
///
/// Each interval is sampled at `samples_per_interval` evenly spaced points
/// (a degenerate interval at its single point).
pub fn containment_check(
    ladder: &EigLadder,
    known: &[(f64, f64)],
    eps: f64,
    tol: f64,
    samples_per_interval: usize,
) -> Result<ContainmentReport> {
    if known.iter().any(|&(lo, hi)| !(lo <= hi)) {
        return Err(Error::Domain("known spectrum intervals must satisfy lo <= hi".into()));
    }
    let mut samples = Vec::new();
    for &(lo, hi) in known {
        if lo == hi || samples_per_interval < 2 {
            samples.push(0.5 * (lo + hi));
        } else {
            let m = samples_per_interval - 1;
            samples.extend((0..=m).map(|j| lo + (hi - lo) * j as f64 / m as f64));
        }
    }
    let report = classify(ladder, &samples, eps, &Thresholds::default())?;
    let violations = report
        .points
        .iter()
        .filter_map(|p| {
            let in_lambda = lambda_membership(ladder, p.lambda, tol);
            (!in_lambda || p.label != Label::Essential).then_some(ContainmentViolation {
                lambda: p.lambda,
                in_lambda,
                label: p.label,
            })
        })
        .collect();

    let estimate = spectrum_estimate(ladder, default_pitch(eps), eps)?;
    let extra_essential = estimate
        .intervals
        .iter()
        .copied()
        .filter(|&(lo, hi)| dist_to_union(0.5 * (lo + hi), known) > eps && dist_to_union(lo, known) > eps)
        .collect();
    Ok(ContainmentReport { samples, violations, extra_essential })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{sturm_count, tridiagonal_eigenvalues, TridiagonalForm};
    use crate::operator::{
        appendix_permutation, fourier_coefficients, laurent_operator, permutation_operator, FourierCoefficients,
        OperatorSpec,
    };
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn free_jacobi() -> OperatorSpec {
        laurent_operator(&FourierCoefficients::symmetric(&[0.0, 1.0]).unwrap()).unwrap()
    }

    fn small_schedule() -> Vec<usize> {
        vec![16, 32, 64, 128, 256]
    }

    #[test]
    fn counting_examples() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &[5]).unwrap();
        let eigs = &ladder.last().eigs;
        assert_eq!(eigs.dim(), 11);
        assert_eq!(counting(eigs, -3.0, 3.0).unwrap(), 11);
        assert_eq!(counting(eigs, 5.0, 6.0).unwrap(), 0);
        assert!(matches!(counting(eigs, 1.0, 1.0), Err(Error::Domain(_))));
        assert_eq!(density(eigs, -1e9, 1e9).unwrap(), 1.0);
        assert_eq!(density(eigs, 5.0, 6.0).unwrap(), 0.0);
    }

    #[test]
    fn appendix_zero_count_matches_escapes() {
        let perm = appendix_permutation(512).unwrap();
        let op = permutation_operator(perm.clone());
        for n in [20, 64, 100, 256] {
            let eigs = compress(&op, &Filtration::unilateral(), n).unwrap().eigenvalues().unwrap();
            assert_eq!(counting(&eigs, -0.5, 0.5).unwrap(), perm.escape_count(n), "n={n}");
        }
    }

    #[test]
    fn integrate_examples() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &[10, 40]).unwrap();
        for mu in ladder.measures() {
            assert!((integrate(&mu, |_| 1.0) - 1.0).abs() < 1e-15);
            assert!(integrate(&mu, |x| x).abs() < 1e-13);
            // (1/m) Σ 4cos²(kπ/(m+1)) = (2/m)(m - 1) + ... evaluated as a plain sum
            let m = mu.eigs().dim();
            let closed: f64 =
                (1..=m).map(|k| 4.0 * (k as f64 * PI / (m as f64 + 1.0)).cos().powi(2)).sum::<f64>() / m as f64;
            assert!((closed - (2.0 - 2.0 / m as f64)).abs() < 1e-12);
            assert!((integrate(&mu, |x| x * x) - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn szego_reference_examples() {
        let sym = SymbolSpec::new("2cos", Arc::new(|x: f64| 2.0 * x.cos()), 4096).unwrap();
        assert!((szego_reference(&sym, |_| 1.0) - 1.0).abs() < 1e-15);
        assert!(szego_reference(&sym, |x| x).abs() < 1e-13);
        // midpoint-rule oracle on a shifted grid
        let m = 10_000;
        let oracle: f64 = (0..m)
            .map(|j| {
                let x = -PI + 2.0 * PI * (j as f64 + 0.5) / m as f64;
                4.0 * x.cos().powi(2)
            })
            .sum::<f64>()
            / m as f64;
        assert!((szego_reference(&sym, |x| x * x) - oracle).abs() < 1e-12);
        assert!((oracle - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weak_star_gap_examples() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &[32, 64, 128]).unwrap();
        assert!(weak_star_gap(&ladder, 1.0, |_| 1.0).iter().all(|&g| g < 1e-14));
        let gaps = weak_star_gap(&ladder, 2.0, |x| x * x);
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));

        let constant = OperatorSpec::diagonal(IndexMode::Bilateral, "c", Arc::new(|_| 0.7), 0.7).unwrap();
        let sym = SymbolSpec::new("c", Arc::new(|_| 0.7), 64).unwrap();
        let ladder = EigLadder::for_operator(&constant, &[8, 16]).unwrap();
        let u = |x: f64| x.powi(3) - x;
        let gaps = weak_star_gap(&ladder, szego_reference(&sym, u), u);
        assert!(gaps.iter().all(|&g| g < 1e-14));
    }

    #[test]
    fn membership_examples() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &small_schedule()).unwrap();
        let tol = default_membership_tol(&ladder);
        assert!(lambda_membership(&ladder, 0.0, tol));
        assert!(lambda_membership(&ladder, 1.3, tol));
        assert!(!lambda_membership(&ladder, 3.0, tol));

        let constant = OperatorSpec::diagonal(IndexMode::Unilateral, "c", Arc::new(|_| -1.25), 1.25).unwrap();
        let ladder = EigLadder::for_operator(&constant, &[4, 8]).unwrap();
        assert!(lambda_membership(&ladder, -1.25, 1e-12));
    }

    #[test]
    fn ladder_rejects_bad_schedules() {
        let op = free_jacobi();
        assert!(matches!(EigLadder::for_operator(&op, &[]), Err(Error::Domain(_))));
        assert!(matches!(EigLadder::for_operator(&op, &[8, 8]), Err(Error::Domain(_))));
        assert!(matches!(EigLadder::for_operator(&op, &[0, 8]), Err(Error::Domain(_))));
    }

    #[test]
    fn short_ladder_is_diagnosed() {
        let op = free_jacobi();
        let ladder = EigLadder::for_operator(&op, &[16, 32, 64]).unwrap();
        assert!(matches!(classify(&ladder, &[0.0], 0.2, &Thresholds::default()), Err(Error::Diagnostic(_))));
        let ladder = EigLadder::for_operator(&op, &[16, 20, 24, 28]).unwrap();
        assert!(matches!(classify(&ladder, &[0.0], 0.2, &Thresholds::default()), Err(Error::Diagnostic(_))));
    }

    #[test]
    fn free_jacobi_zero_is_essential() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &small_schedule()).unwrap();
        let report = classify(&ladder, &[0.0, 1.0, 3.0], 0.2, &Thresholds::default()).unwrap();
        assert_eq!(report.labels(), vec![Label::Essential, Label::Essential, Label::NotInLambda]);

        // brute-force oracle: count closed-form eigenvalues in the window
        let p = &report.points[0];
        for (step, &c) in ladder.steps().iter().zip(&p.counts) {
            let m = step.dim;
            let oracle = (1..=m).filter(|&k| (2.0 * (k as f64 * PI / (m as f64 + 1.0)).cos()).abs() < 0.2).count();
            assert_eq!(c, oracle);
        }
    }

    #[test]
    fn ssh_chain_zero_mode_is_transient() {
        // alternating hoppings 1, 1/2: bands ±[1/2, 3/2] and an edge state at 0
        let op = OperatorSpec::periodic_jacobi(IndexMode::Bilateral, &[0.0], &[1.0, 0.5]).unwrap();
        let ladder = EigLadder::for_operator(&op, &small_schedule()).unwrap();
        let report = classify(&ladder, &[0.0, 1.0, -1.0, 2.0], 0.1, &Thresholds::default()).unwrap();
        assert_eq!(report.points[0].counts, vec![1; 5]);
        assert_eq!(report.labels(), vec![Label::Transient, Label::Essential, Label::Essential, Label::NotInLambda]);
    }

    #[test]
    fn appendix_zero_is_essential() {
        let op = permutation_operator(appendix_permutation(1024).unwrap());
        let ladder = EigLadder::for_operator(&op, &[64, 128, 256, 512, 1024]).unwrap();
        let report = classify(&ladder, &[-1.0, 0.0, 1.0], 0.5, &Thresholds::default()).unwrap();
        assert_eq!(report.labels(), vec![Label::Essential; 3]);
    }

    #[test]
    fn gap_of_two_band_symbol() {
        // two-valued step symbol truncated to K=8: the gap density decays
        let sym =
            SymbolSpec::new("step", Arc::new(|x: f64| if x.abs() < PI / 2.0 { 1.0 } else { -1.0 }), 4096).unwrap();
        let op = laurent_operator(&fourier_coefficients(&sym, 8).unwrap()).unwrap();
        let ladder = EigLadder::for_operator(&op, &small_schedule()).unwrap();
        let d: Vec<f64> = ladder.steps().iter().map(|s| density(&s.eigs, -0.05, 0.05).unwrap()).collect();
        assert!(d.last().unwrap() < &0.02, "{d:?}");
    }

    #[test]
    fn free_jacobi_estimate_is_one_interval() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &small_schedule()).unwrap();
        let eps = default_eps(&ladder);
        let est = spectrum_estimate(&ladder, default_pitch(eps), eps).unwrap();
        assert_eq!(est.intervals.len(), 1);
        assert!(hausdorff_distance(&est.intervals, &[(-2.0, 2.0)]) <= est.h + est.eps);
    }

    #[test]
    fn constant_estimate_is_a_point() {
        let op = OperatorSpec::diagonal(IndexMode::Bilateral, "c", Arc::new(|_| 0.5), 0.5).unwrap();
        let ladder = EigLadder::for_operator(&op, &small_schedule()).unwrap();
        let eps = default_eps(&ladder);
        let h = default_pitch(eps);
        let est = spectrum_estimate(&ladder, h, eps).unwrap();
        assert_eq!(est.intervals.len(), 1);
        let (lo, hi) = est.intervals[0];
        assert!(hi - lo <= h && (0.5 * (lo + hi) - 0.5).abs() <= h);
    }

    #[test]
    fn ssh_estimate_has_two_intervals() {
        let op = OperatorSpec::periodic_jacobi(IndexMode::Bilateral, &[0.0], &[1.0, 0.5]).unwrap();
        let ladder = EigLadder::for_operator(&op, &small_schedule()).unwrap();
        let eps = default_eps(&ladder);
        let est = spectrum_estimate(&ladder, default_pitch(eps), eps).unwrap();
        assert_eq!(est.intervals.len(), 2);
        assert!(hausdorff_distance(&est.intervals, &[(-1.5, -0.5), (0.5, 1.5)]) <= est.h);
    }

    #[test]
    fn containment_examples() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &small_schedule()).unwrap();
        let eps = default_eps(&ladder);
        let report = containment_check(&ladder, &[(-2.0, 2.0)], eps, default_membership_tol(&ladder), 9).unwrap();
        assert!(report.holds(), "{:?}", report.violations);
        assert!(report.extra_essential.is_empty());

        let op = permutation_operator(appendix_permutation(1024).unwrap());
        let ladder = EigLadder::for_operator(&op, &[64, 128, 256, 512, 1024]).unwrap();
        let report = containment_check(&ladder, &[(-1.0, -1.0), (1.0, 1.0)], 0.25, 1e-9, 1).unwrap();
        assert!(report.holds());
        assert_eq!(report.extra_essential.len(), 1);
        // a collapsed run sits within half a grid pitch of the point
        let (lo, hi) = report.extra_essential[0];
        assert!(dist_to_union(0.0, &[(lo, hi)]) <= 0.5 * default_pitch(0.25), "{:?}", report.extra_essential);
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff_distance(&[(0.0, 1.0)], &[(0.0, 1.0)]), 0.0);
        assert_eq!(hausdorff_distance(&[(0.0, 1.0)], &[(0.0, 2.0)]), 1.0);
        assert_eq!(hausdorff_distance(&[(-1.0, 1.0)], &[(-1.0, -1.0), (1.0, 1.0)]), 1.0);
        assert_eq!(hausdorff_distance(&[], &[(0.0, 1.0)]), f64::INFINITY);
    }

    #[test]
    fn sturm_counts_match_ladder_counts() {
        let ladder = EigLadder::for_operator(&free_jacobi(), &[20, 40]).unwrap();
        for step in ladder.steps() {
            let t = TridiagonalForm::new(vec![0.0; step.dim], vec![1.0; step.dim - 1]).unwrap();
            let full = tridiagonal_eigenvalues(&t, 1e-12).unwrap();
            for (a, b) in [(-0.33, 0.41), (1.01, 2.5), (-3.0, -1.7)] {
                assert_eq!(sturm_count(&t, a, b).unwrap(), counting(&step.eigs, a, b).unwrap());
                assert_eq!(full.count_open(a, b), counting(&step.eigs, a, b).unwrap());
            }
        }
    }
}
