//! Finite-n surrogates for the asymptotic notions: singular value and
//! eigenvalue distributions tested on a finite battery of compactly
//! supported functions, zero-distributed and sparsely unbounded sequences,
//! and the SVD splitting `A = Â + Ã`.
//!
//! None of these checks can verify a limit. A distribution check PASSes when
//! the deviation at the last scheduled size is within tolerance and no larger
//! than at the first.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::densela::ComplexMatrix;
use crate::error::{domain, Error, Result};
use crate::multiindex::{unrank0, MultiIndex};
use crate::parallel::par_map;
use crate::symbols::Symbol;

type Generator = dyn Fn(&MultiIndex) -> Result<ComplexMatrix> + Send + Sync;

/// A lazily generated sequence `n ↦ A_n` over an ascending schedule.
#[derive(Clone)]
pub struct MatrixFamily {
    schedule: Vec<MultiIndex>,
    s: usize,
    t: usize,
    generator: Arc<Generator>,
}

impl MatrixFamily {
    /// `generator(n)` must be `N(n)·s × N(n)·t`; [`build`](Self::build)
    /// enforces it.
    pub fn new(
        schedule: Vec<MultiIndex>,
        s: usize,
        t: usize,
        generator: impl Fn(&MultiIndex) -> Result<ComplexMatrix> + Send + Sync + 'static,
    ) -> Result<Self> {
        let Some(first) = schedule.first() else {
            return domain("empty schedule");
        };
        if schedule.iter().any(|n| n.len() != first.len() || !n.is_positive()) {
            return domain("schedule entries must be positive and share their number of levels");
        }
        if s == 0 || t == 0 {
            return domain("block sizes must be positive");
        }
        Ok(MatrixFamily { schedule, s, t, generator: Arc::new(generator) })
    }

    /// The 1-level schedule `{(n)}` for each `n`.
    pub fn schedule_1d(ns: &[usize]) -> Vec<MultiIndex> {
        ns.iter().map(|&n| MultiIndex::sizes(&[n])).collect()
    }

    pub fn schedule(&self) -> &[MultiIndex] {
        &self.schedule
    }

    pub fn levels(&self) -> usize {
        self.schedule[0].len()
    }

    pub fn block_dims(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    /// `A_n`, for any positive `n` with the family's number of levels.
    pub fn build(&self, n: &MultiIndex) -> Result<ComplexMatrix> {
        if n.len() != self.levels() {
            return domain(format!("{}-level size {n} for a {}-level family", n.len(), self.levels()));
        }
        let a = (self.generator)(n)?;
        let big_n = n.n_of()?;
        if a.shape() != (big_n * self.s, big_n * self.t) {
            return Err(Error::Domain(format!(
                "generator produced a {}x{} matrix at n = {n}, expected {}x{}",
                a.rows(),
                a.cols(),
                big_n * self.s,
                big_n * self.t
            )));
        }
        Ok(a)
    }

    /// The same generator over another schedule.
    pub fn with_schedule(&self, schedule: Vec<MultiIndex>) -> Result<Self> {
        let g = self.generator.clone();
        MatrixFamily::new(schedule, self.s, self.t, move |n| g(n))
    }

    /// `n ↦ f(A_n)` with new block dims.
    pub fn map(
        &self,
        s: usize,
        t: usize,
        f: impl Fn(ComplexMatrix) -> Result<ComplexMatrix> + Send + Sync + 'static,
    ) -> Result<Self> {
        let g = self.generator.clone();
        MatrixFamily::new(self.schedule.clone(), s, t, move |n| f(g(n)?))
    }

    /// `n ↦ f(A_n, B_n)` over the shared schedule.
    pub fn zip_with(
        &self,
        other: &MatrixFamily,
        s: usize,
        t: usize,
        f: impl Fn(ComplexMatrix, ComplexMatrix) -> Result<ComplexMatrix> + Send + Sync + 'static,
    ) -> Result<Self> {
        if self.schedule != other.schedule {
            return domain("families are scheduled over different sizes");
        }
        let (g, h) = (self.generator.clone(), other.generator.clone());
        MatrixFamily::new(self.schedule.clone(), s, t, move |n| f(g(n)?, h(n)?))
    }
}

impl fmt::Debug for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixFamily")
            .field("schedule", &self.schedule)
            .field("s", &self.s)
            .field("t", &self.t)
            .finish_non_exhaustive()
    }
}

/// Singular values or (Hermitian) eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sv,
    Eig,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sv => "sv",
            Mode::Eig => "eig",
        })
    }
}

/// A continuous, compactly supported test function with values in `[0,1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFn {
    /// Peak 1 at `center`, zero outside `center ± half_width`.
    Hat { center: f64, half_width: f64 },
    /// 1 on `[lo, hi]`, linear down to 0 over `ramp` on each side.
    Plateau { lo: f64, hi: f64, ramp: f64 },
}

impl TestFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFn::Hat { center, half_width } => (1.0 - (x - center).abs() / half_width).max(0.0),
            TestFn::Plateau { lo, hi, ramp } => {
                if x < lo {
                    (1.0 - (lo - x) / ramp).max(0.0)
                } else if x > hi {
                    (1.0 - (x - hi) / ramp).max(0.0)
                } else {
                    1.0
                }
            }
        }
    }
}

impl fmt::Display for TestFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFn::Hat { center, half_width } => write!(f, "hat({center:.6},{half_width:.6})"),
            TestFn::Plateau { lo, hi, ramp } => write!(f, "plateau({lo:.6},{hi:.6},{ramp:.6})"),
        }
    }
}

/// `q` equispaced hats on `[lo, hi]` with half-width equal to the node
/// spacing, followed by the plateau that is 1 on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestBattery {
    pub lo: f64,
    pub hi: f64,
    pub q: usize,
    fns: Vec<TestFn>,
}

pub const DEFAULT_HATS: usize = 17;

impl TestBattery {
    pub fn new(lo: f64, hi: f64, q: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || q < 2 {
            return domain(format!("battery needs lo < hi and q >= 2, got [{lo}, {hi}], q = {q}"));
        }
        let h = (hi - lo) / (q - 1) as f64;
        let mut fns: Vec<TestFn> =
            (0..q).map(|j| TestFn::Hat { center: lo + h * j as f64, half_width: h }).collect();
        fns.push(TestFn::Plateau { lo, hi, ramp: h });
        Ok(TestBattery { lo, hi, q, fns })
    }

    /// The default battery for values in `[min, max]`, padded by 10% of the
    /// range on each side.
    pub fn for_range(min: f64, max: f64) -> Result<Self> {
        let width = max - min;
        let pad = if width > 0.0 { 0.1 * width } else { 0.1 * min.abs().max(1.0) };
        Self::new(min - pad, max + pad, DEFAULT_HATS)
    }

    pub fn functions(&self) -> &[TestFn] {
        &self.fns
    }
}

/// `σ(A)` descending, or `λ(A)` ascending for Hermitian `A`.
pub fn spectrum(a: &ComplexMatrix, mode: Mode) -> Result<Vec<f64>> {
    match mode {
        Mode::Sv => Ok(a.svd_values()),
        Mode::Eig => {
            if !a.is_hermitian() {
                return domain("eigenvalue distribution requested for a non-Hermitian matrix");
            }
            a.eigh()
        }
    }
}

/// `(1/len) Σ F(v)`.
pub fn average(values: &[f64], f: &TestFn) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().map(|&v| f.eval(v)).sum::<f64>() / values.len() as f64
}

/// `(1/(d∧e)) Σ_i F(σ_i(A))`.
pub fn empirical_sv_average(a: &ComplexMatrix, f: &TestFn) -> f64 {
    average(&a.svd_values(), f)
}

/// `(1/d) Σ_i F(λ_i(A))` for Hermitian `A`.
pub fn empirical_eig_average(a: &ComplexMatrix, f: &TestFn) -> Result<f64> {
    Ok(average(&spectrum(a, Mode::Eig)?, f))
}

/// Spectral samples of a symbol on a midpoint grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSamples {
    /// `s∧t` values per retained grid point.
    pub values: Vec<f64>,
    /// Grid points whose evaluation failed and were dropped.
    pub skipped: usize,
    pub total: usize,
}

impl SymbolSamples {
    pub fn average(&self, f: &TestFn) -> f64 {
        average(&self.values, f)
    }

    pub fn range(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Largest total number of reference samples.
pub const SYMBOL_SAMPLE_BUDGET: usize = 4096;

/// Largest `g` with `g^k ≤ budget` (and at least 2).
pub fn grid_for_budget(active: usize, budget: usize) -> usize {
    if active == 0 {
        return 1;
    }
    let mut g = 1usize;
    while (g + 1).checked_pow(active as u32).is_some_and(|p| p <= budget) {
        g += 1;
    }
    g.max(2)
}

/// The `x` coordinates and `θ` levels (0-based) a symbol depends on.
fn active_dims(symbol: &Symbol) -> (BTreeSet<usize>, BTreeSet<usize>) {
    match symbol {
        Symbol::Trig(f) => (BTreeSet::new(), f.active_levels()),
        Symbol::Glt(k) => k.active_dims(),
    }
}

/// Midpoint-rule samples of `σ(κ(x,θ))` (or `λ(κ(x,θ))`) over
/// `[0,1]^d × [-π,π]^d` with `grid` points per active dimension. Dimensions
/// the symbol does not depend on integrate out exactly and are not gridded.
///
/// Points where a coefficient function fails to evaluate are skipped; more
/// than 1% skipped is an error.
pub fn symbol_samples(symbol: &Symbol, mode: Mode, grid: usize) -> Result<SymbolSamples> {
    if grid == 0 {
        return domain("grid must be positive");
    }
    if mode == Mode::Eig && !symbol.is_hermitian() {
        return domain("eigenvalue distribution requested for a non-Hermitian symbol");
    }
    let d = symbol.levels();
    let (xs, ths) = active_dims(symbol);
    let dims: Vec<(bool, usize)> = xs.iter().map(|&j| (true, j)).chain(ths.iter().map(|&j| (false, j))).collect();
    let sizes = vec![grid; dims.len()];
    let total = grid
        .checked_pow(dims.len() as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::Resource(format!("{grid}^{} symbol samples", dims.len())))?;
    let glt = symbol.as_glt();
    let pi = std::f64::consts::PI;
    // inactive coordinates sit at an arbitrary interior point
    let mut x = vec![0.5; d];
    let mut theta = vec![0.0; d];
    let mut values = Vec::new();
    let mut skipped = 0;
    for r in 0..total {
        for (&(is_x, j), &g) in dims.iter().zip(&unrank0(r, &sizes)) {
            let mid = (g as f64 + 0.5) / grid as f64;
            if is_x {
                x[j] = mid;
            } else {
                theta[j] = -pi + 2.0 * pi * mid;
            }
        }
        let block = match glt.eval(&x, &theta) {
            Ok(b) => b,
            Err(Error::Eval { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        values.extend(spectrum(&hermitize(block, mode), mode)?);
    }
    if skipped * 100 > total {
        return domain(format!("symbol failed to evaluate at {skipped} of {total} sample points"));
    }
    Ok(SymbolSamples { values, skipped, total })
}

// symbol blocks are Hermitian only up to rounding in the trig sums
fn hermitize(block: ComplexMatrix, mode: Mode) -> ComplexMatrix {
    match mode {
        Mode::Sv => block,
        Mode::Eig => {
            let adj = block.adjoint();
            ComplexMatrix::from_fn(block.rows(), block.cols(), |i, j| (block[(i, j)] + adj[(i, j)]) * 0.5)
        }
    }
}

/// Midpoint approximation of `(1/μ(D)) ∫_D (1/(s∧t)) Σ F(σ_i(κ))`.
pub fn symbol_sv_average(symbol: &Symbol, f: &TestFn, grid: usize) -> Result<f64> {
    Ok(symbol_samples(symbol, Mode::Sv, grid)?.average(f))
}

/// Eigenvalue analogue of [`symbol_sv_average`] for Hermitian symbols.
pub fn symbol_eig_average(symbol: &Symbol, f: &TestFn, grid: usize) -> Result<f64> {
    Ok(symbol_samples(symbol, Mode::Eig, grid)?.average(f))
}

/// Reference samples within the default budget.
pub fn default_symbol_samples(symbol: &Symbol, mode: Mode) -> Result<SymbolSamples> {
    let (xs, ths) = active_dims(symbol);
    symbol_samples(symbol, mode, grid_for_budget(xs.len() + ths.len(), SYMBOL_SAMPLE_BUDGET))
}

/// One (size, test function) comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionRow {
    pub n: MultiIndex,
    pub big_n: usize,
    pub f_index: usize,
    pub empirical: f64,
    pub reference: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionReport {
    pub mode: Mode,
    pub tol: f64,
    pub battery: TestBattery,
    pub rows: Vec<DistributionRow>,
    /// `Δ(n)` per scheduled size.
    pub deltas: Vec<(MultiIndex, f64)>,
    pub pass: bool,
}

impl DistributionReport {
    pub fn first_delta(&self) -> f64 {
        self.deltas.first().map_or(0.0, |d| d.1)
    }

    pub fn last_delta(&self) -> f64 {
        self.deltas.last().map_or(0.0, |d| d.1)
    }

    /// `Δ` strictly decreasing along the schedule.
    pub fn strictly_decreasing(&self) -> bool {
        self.deltas.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,N,F,empirical,reference,abs_diff\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.12e},{:.12e},{:.12e}\n",
                size_label(&r.n),
                r.big_n,
                r.f_index,
                r.empirical,
                r.reference,
                r.abs_diff
            ));
        }
        out
    }
}

/// `12x12` style label for CSV cells.
pub fn size_label(n: &MultiIndex) -> String {
    n.components().iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x")
}

/// Spectra of every scheduled matrix, computed in parallel.
pub fn family_spectra(fam: &MatrixFamily, mode: Mode) -> Result<Vec<Vec<f64>>> {
    par_map(fam.schedule(), |n| spectrum(&fam.build(n)?, mode)).into_iter().collect()
}

/// `Δ(n) = max_F |empirical(A_n, F) - reference(κ, F)|` along the schedule.
/// Without an explicit battery the default one is built from the range of
/// the reference samples.
pub fn distribution_report(
    fam: &MatrixFamily,
    symbol: &Symbol,
    battery: Option<&TestBattery>,
    mode: Mode,
    tol: f64,
) -> Result<DistributionReport> {
    if mode == Mode::Eig && fam.block_dims().0 != fam.block_dims().1 {
        return domain("eigenvalue distribution of a non-square family");
    }
    if symbol.levels() != fam.levels() || symbol.block_dims() != fam.block_dims() {
        return domain("symbol and family differ in levels or block size");
    }
    let reference = default_symbol_samples(symbol, mode)?;
    let spectra = family_spectra(fam, mode)?;
    report_from_spectra(fam.schedule(), &spectra, &reference, battery, mode, tol)
}

/// [`distribution_report`] on precomputed spectra.
pub fn report_from_spectra(
    schedule: &[MultiIndex],
    spectra: &[Vec<f64>],
    reference: &SymbolSamples,
    battery: Option<&TestBattery>,
    mode: Mode,
    tol: f64,
) -> Result<DistributionReport> {
    let battery = match battery {
        Some(b) => b.clone(),
        None => {
            let (lo, hi) = reference.range();
            if !lo.is_finite() {
                return domain("no reference samples");
            }
            TestBattery::for_range(lo, hi)?
        }
    };
    let refs: Vec<f64> = battery.functions().iter().map(|f| reference.average(f)).collect();
    let mut rows = Vec::new();
    let mut deltas = Vec::new();
    for (n, values) in schedule.iter().zip(spectra) {
        let mut delta: f64 = 0.0;
        for (j, (f, &rf)) in battery.functions().iter().zip(&refs).enumerate() {
            let emp = average(values, f);
            let diff = (emp - rf).abs();
            delta = delta.max(diff);
            rows.push(DistributionRow {
                n: n.clone(),
                big_n: n.n_of()?,
                f_index: j + 1,
                empirical: emp,
                reference: rf,
                abs_diff: diff,
            });
        }
        deltas.push((n.clone(), delta));
    }
    let (first, last) = (deltas[0].1, deltas[deltas.len() - 1].1);
    let pass = last <= tol && last <= first;
    Ok(DistributionReport { mode, tol, battery, rows, deltas, pass })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroReport {
    pub eps: f64,
    /// Fraction of singular values above `eps`, per size.
    pub fractions: Vec<(MultiIndex, f64)>,
    pub pass: bool,
}

/// Fraction of `σ > eps` per scheduled size. PASS when the fractions never
/// increase and the last is at most `tol`.
pub fn is_zero_distributed(fam: &MatrixFamily, eps: f64, tol: f64) -> Result<ZeroReport> {
    if eps <= 0.0 {
        return domain("eps must be positive");
    }
    let spectra = family_spectra(fam, Mode::Sv)?;
    let fractions: Vec<(MultiIndex, f64)> =
        fam.schedule().iter().cloned().zip(spectra.iter().map(|sv| fraction_above(sv, eps))).collect();
    let pass = fractions.windows(2).all(|w| w[1].1 <= w[0].1)
        && fractions.last().is_some_and(|f| f.1 <= tol);
    Ok(ZeroReport { eps, fractions, pass })
}

fn fraction_above(sv: &[f64], m: f64) -> f64 {
    if sv.is_empty() {
        return 0.0;
    }
    sv.iter().filter(|&&s| s > m).count() as f64 / sv.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuProfile {
    pub ms: Vec<f64>,
    /// `(n, M, fraction of σ > M)`.
    pub rows: Vec<(MultiIndex, f64, f64)>,
    /// `r(M)`: the largest fraction over the tail half of the schedule.
    pub tail: Vec<(f64, f64)>,
}

impl SuProfile {
    /// `r(M_last) ≤ tol`.
    pub fn pass(&self, tol: f64) -> bool {
        self.tail.last().is_some_and(|&(_, r)| r <= tol)
    }

    pub fn tail_at(&self, m: f64) -> Option<f64> {
        self.tail.iter().find(|t| t.0 == m).map(|t| t.1)
    }
}

/// Sparse-unboundedness profile: fraction of `σ_i(A_n) > M` for each `M`.
pub fn su_profile(fam: &MatrixFamily, ms: &[f64]) -> Result<SuProfile> {
    let spectra = family_spectra(fam, Mode::Sv)?;
    su_profile_from_spectra(fam.schedule(), &spectra, ms)
}

pub fn su_profile_from_spectra(schedule: &[MultiIndex], spectra: &[Vec<f64>], ms: &[f64]) -> Result<SuProfile> {
    if ms.is_empty() || ms.iter().any(|&m| !(m > 0.0)) || ms.windows(2).any(|w| w[1] < w[0]) {
        return domain("thresholds must be positive and ascending");
    }
    let mut rows = Vec::new();
    for (n, sv) in schedule.iter().zip(spectra) {
        for &m in ms {
            rows.push((n.clone(), m, fraction_above(sv, m)));
        }
    }
    let start = schedule.len() / 2;
    let tail = ms
        .iter()
        .map(|&m| {
            let r = spectra[start..].iter().map(|sv| fraction_above(sv, m)).fold(0.0, f64::max);
            (m, r)
        })
        .collect();
    Ok(SuProfile { ms: ms.to_vec(), rows, tail })
}

/// `A = Â + Ã` with `Â = U Σ_{>M} V*` keeping the singular values above `M`.
pub fn svd_split(a: &ComplexMatrix, m: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(m > 0.0) {
        return domain("split threshold must be positive");
    }
    let keep = a.svd_values().iter().filter(|&&s| s > m).count();
    if keep == 0 {
        return Ok((ComplexMatrix::zeros(a.rows(), a.cols()), a.clone()));
    }
    // right singular vectors: eigenvectors of A*A, largest first
    let gram = a.adjoint().matmul(a)?;
    let gram = hermitize(gram, Mode::Eig);
    let eig = gram.eigh_jacobi()?;
    let n = a.cols();
    let v = ComplexMatrix::from_fn(n, keep, |i, j| eig.vectors[(i, n - 1 - j)]);
    let hat = a.matmul(&v)?.matmul(&v.adjoint())?;
    let tilde = a.sub(&hat)?;
    Ok((hat, tilde))
}

/// Splitting of `A ⊗ A'` at `M²` from splittings of the factors at `M`:
/// `Â⊗ = Â ⊗ A' + Ã ⊗ Â'`, `Ã⊗ = Ã ⊗ Ã'`.
pub fn svd_split_kron(a: &ComplexMatrix, b: &ComplexMatrix, m: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (ah, at) = svd_split(a, m)?;
    let (bh, bt) = svd_split(b, m)?;
    let hat = ah.kron(b)?.add(&at.kron(&bh)?)?;
    let tilde = at.kron(&bt)?;
    Ok((hat, tilde))
}

/// Family `n ↦ A_n ⊗ B_n` over the shared schedule index, with
/// `n = (n_A, n_B)` concatenated.
pub fn kron_family(a: &MatrixFamily, b: &MatrixFamily) -> Result<MatrixFamily> {
    if a.schedule().len() != b.schedule().len() {
        return domain("tensor factors need schedules of equal length");
    }
    let schedule = a
        .schedule()
        .iter()
        .zip(b.schedule())
        .map(|(x, y)| MultiIndex::concat(&[x.clone(), y.clone()]))
        .collect::<Result<Vec<_>>>()?;
    let la = a.levels();
    let (fa, fb) = (a.clone(), b.clone());
    let (sa, ta) = a.block_dims();
    let (sb, tb) = b.block_dims();
    MatrixFamily::new(schedule, sa * sb, ta * tb, move |n| {
        let parts = n.split(&[la, n.len() - la])?;
        fa.build(&parts[0])?.kron(&fb.build(&parts[1])?)
    })
}
