//! GLT operands: a matrix family together with its GLT symbol, built from
//! the canonical form `Σ_i D_n(a_i I_s) T_n(f_i)` or combined by sums,
//! products and Π-conjugated tensor products.

use crate::acs::{acs_check, AcsPair, AcsReport};
use crate::asymptotics::{distribution_report, DistributionReport, MatrixFamily, Mode};
use crate::densela::{check_dims, ComplexMatrix};
use crate::error::{domain, Result};
use crate::multiindex::MultiIndex;
use crate::parallel::par_map;
use crate::rng::SplitMix64;
use crate::sampling::sample_values;
use crate::shuffle::Permutation;
use crate::symbols::{GltSymbol, Symbol};
use crate::toeplitz::toeplitz;
use crate::Complex64;

/// A family `{X_n}` with the symbol it is claimed to carry.
#[derive(Clone, Debug)]
pub struct GltOperand {
    pub family: MatrixFamily,
    pub symbol: GltSymbol,
    /// Whether `family` is `Σ D_n(a_i I_s) T_n(f_i)` over the symbol's terms.
    pub canonical: bool,
}

/// `Σ_i D_n(a_i I_s) T_n(f_i)` over the terms of `κ`.
pub fn canonical_matrix(n: &MultiIndex, kappa: &GltSymbol) -> Result<ComplexMatrix> {
    let big_n = n.n_of()?;
    let (s, t) = kappa.block_dims();
    check_dims(big_n * s, big_n * t)?;
    let mut out = ComplexMatrix::zeros(big_n * s, big_n * t);
    for (a, f) in kappa.terms() {
        let samples = sample_values(n, a)?;
        let tf = toeplitz(n, f)?;
        // D_n(a I_s) T_n(f): row block i scaled by a(i/n)
        let scaled = ComplexMatrix::from_fn(tf.rows(), tf.cols(), |r, c| Complex64::new(samples[r / s], 0.0) * tf[(r, c)]);
        out = out.add(&scaled)?;
    }
    Ok(out)
}

impl GltOperand {
    /// The canonical family of `κ` over `schedule`.
    pub fn from_symbol(kappa: GltSymbol, schedule: Vec<MultiIndex>) -> Result<Self> {
        if schedule.iter().any(|n| n.len() != kappa.levels()) {
            return domain("schedule levels differ from the symbol's");
        }
        let (s, t) = kappa.block_dims();
        let k = kappa.clone();
        let family = MatrixFamily::new(schedule, s, t, move |n| canonical_matrix(n, &k))?;
        Ok(GltOperand { family, symbol: kappa, canonical: true })
    }

    /// An arbitrary family paired with a claimed symbol.
    pub fn opaque(family: MatrixFamily, symbol: GltSymbol) -> Result<Self> {
        if family.levels() != symbol.levels() || family.block_dims() != symbol.block_dims() {
            return domain("family and symbol differ in levels or block size");
        }
        Ok(GltOperand { family, symbol, canonical: false })
    }

    pub fn schedule(&self) -> &[MultiIndex] {
        self.family.schedule()
    }

    pub fn build(&self, n: &MultiIndex) -> Result<ComplexMatrix> {
        self.family.build(n)
    }

    /// `α X_n + β Y_n` with symbol `ακ + βξ`.
    pub fn combine(&self, alpha: Complex64, other: &GltOperand, beta: Complex64) -> Result<GltOperand> {
        let symbol = self.symbol.scale(alpha).add(&other.symbol.scale(beta))?;
        let (s, t) = symbol.block_dims();
        let family = self.family.zip_with(&other.family, s, t, move |x, y| x.scale(alpha).add(&y.scale(beta)))?;
        Ok(GltOperand { family, symbol, canonical: false })
    }

    pub fn add(&self, other: &GltOperand) -> Result<GltOperand> {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn scale(&self, alpha: Complex64) -> Result<GltOperand> {
        let symbol = self.symbol.scale(alpha);
        let (s, t) = symbol.block_dims();
        let family = self.family.map(s, t, move |x| Ok(x.scale(alpha)))?;
        Ok(GltOperand { family, symbol, canonical: self.canonical })
    }

    /// `X_n Y_n` with symbol `κξ`.
    pub fn mul(&self, other: &GltOperand) -> Result<GltOperand> {
        let symbol = self.symbol.mul(&other.symbol)?;
        let (s, t) = symbol.block_dims();
        let family = self.family.zip_with(&other.family, s, t, |x, y| x.matmul(&y))?;
        Ok(GltOperand { family, symbol, canonical: false })
    }
}

/// `(Π^{s_1,…,s_d})ᵀ (A_{n,1} ⊗ ⋯ ⊗ A_{n,d}) Π^{t_1,…,t_d}` with
/// `Π^{r} = Π_{N(n_1),…,N(n_d)}^{r_1,…,r_d}`.
pub fn tensor_matrix(parts: &[ComplexMatrix], sizes: &[usize], ss: &[usize], ts: &[usize]) -> Result<ComplexMatrix> {
    let k = ComplexMatrix::kron_all(parts)?;
    let left = Permutation::pi(sizes, ss)?.invert();
    let right = Permutation::pi(sizes, ts)?.invert();
    left.conjugate(&k, &right)
}

/// Tensor product of operands sharing one schedule index: the `j`-th
/// scheduled size of the result is the concatenation of the factors'
/// `j`-th sizes. The symbol is `κ_1 ⊗ ⋯ ⊗ κ_d`.
pub fn glt_tensor(ops: &[GltOperand]) -> Result<GltOperand> {
    let Some(first) = ops.first() else {
        return domain("empty tensor product");
    };
    let len = first.schedule().len();
    if ops.iter().any(|o| o.schedule().len() != len) {
        return domain("tensor factors need schedules of equal length");
    }
    let schedule = (0..len)
        .map(|j| MultiIndex::concat(&ops.iter().map(|o| o.schedule()[j].clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let symbol = GltSymbol::tensor_all(&ops.iter().map(|o| o.symbol.clone()).collect::<Vec<_>>())?;
    let levels: Vec<usize> = ops.iter().map(|o| o.family.levels()).collect();
    let ss: Vec<usize> = ops.iter().map(|o| o.family.block_dims().0).collect();
    let ts: Vec<usize> = ops.iter().map(|o| o.family.block_dims().1).collect();
    let families: Vec<MatrixFamily> = ops.iter().map(|o| o.family.clone()).collect();
    let (s, t) = symbol.block_dims();
    let family = MatrixFamily::new(schedule, s, t, move |n| {
        let parts = n.split(&levels)?;
        let mats = parts.iter().zip(&families).map(|(p, f)| f.build(p)).collect::<Result<Vec<_>>>()?;
        let sizes = parts.iter().map(|p| p.n_of()).collect::<Result<Vec<_>>>()?;
        tensor_matrix(&mats, &sizes, &ss, &ts)
    })?;
    let canonical = ops.iter().all(|o| o.canonical);
    Ok(GltOperand { family, symbol, canonical })
}

/// Singular value distribution always; eigenvalue distribution when the
/// symbol and every scheduled matrix are Hermitian.
#[derive(Clone, Debug)]
pub struct GltReport {
    pub sv: DistributionReport,
    pub eig: Option<DistributionReport>,
    pub eig_skipped: Option<String>,
}

impl GltReport {
    pub fn pass(&self) -> bool {
        self.sv.pass && self.eig.as_ref().is_none_or(|e| e.pass)
    }
}

pub fn verify_glt(op: &GltOperand, tol: f64) -> Result<GltReport> {
    let symbol = Symbol::Glt(op.symbol.clone());
    let sv = distribution_report(&op.family, &symbol, None, Mode::Sv, tol)?;
    let reason = if !op.symbol.is_hermitian() {
        Some("symbol is not Hermitian".to_string())
    } else {
        let herm = par_map(op.schedule(), |n| op.build(n).map(|a| a.is_hermitian()));
        let mut bad = None;
        for (n, h) in op.schedule().iter().zip(herm) {
            if !h? {
                bad = Some(format!("matrix at n = {n} is not Hermitian"));
                break;
            }
        }
        bad
    };
    let eig = match reason {
        None => Some(distribution_report(&op.family, &symbol, None, Mode::Eig, tol)?),
        Some(_) => None,
    };
    Ok(GltReport { sv, eig, eig_skipped: reason })
}

/// Tolerances of [`glt4_limit_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Glt4Tolerances {
    /// For each approximant's own distribution check.
    pub distribution: f64,
    /// For the last sampled symbol gap `max |κ_m - κ|`.
    pub symbol_gap: f64,
    /// For `ρ̂(m_last)`.
    pub acs: f64,
}

#[derive(Clone, Debug)]
pub struct Glt4Report {
    /// Per `m`: whether the approximant verifies its own symbol.
    pub own: Vec<(usize, bool)>,
    /// Per `m`: `max |κ_m(x,θ) - κ(x,θ)|` over the sampled points.
    pub gaps: Vec<(usize, f64)>,
    pub gaps_pass: bool,
    pub acs: AcsReport,
    pub pass: bool,
}

/// Number of random `(x,θ)` points for the symbol gap.
pub const GAP_POINTS: usize = 256;

/// Empirical check of the three hypotheses of the GLT limit property for
/// approximants `{X_{n,m}} ∼ κ_m` of a target `{X_n}` claimed `∼ κ`.
pub fn glt4_limit_check(
    ms: &[usize],
    approx: &[GltOperand],
    target: &GltOperand,
    tol: Glt4Tolerances,
    seed: u64,
) -> Result<Glt4Report> {
    if ms.len() != approx.len() || ms.is_empty() {
        return domain("need one approximant per m");
    }
    let own = ms
        .iter()
        .zip(approx)
        .map(|(&m, op)| Ok((m, verify_glt(op, tol.distribution)?.pass())))
        .collect::<Result<Vec<_>>>()?;
    let d = target.symbol.levels();
    let mut rng = SplitMix64::new(seed);
    let pi = std::f64::consts::PI;
    let points: Vec<(Vec<f64>, Vec<f64>)> = (0..GAP_POINTS)
        .map(|_| {
            let x = (0..d).map(|_| rng.next_f64()).collect();
            let th = (0..d).map(|_| rng.uniform(-pi, pi)).collect();
            (x, th)
        })
        .collect();
    let mut gaps = Vec::new();
    for (&m, op) in ms.iter().zip(approx) {
        let mut gap: f64 = 0.0;
        for (x, th) in &points {
            let diff = op.symbol.eval(x, th)?.max_abs_diff(&target.symbol.eval(x, th)?);
            gap = gap.max(diff);
        }
        gaps.push((m, gap));
    }
    let gaps_pass = gaps.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12)
        && gaps.last().is_some_and(|g| g.1 <= tol.symbol_gap);
    let pair = AcsPair::new(target.family.clone(), ms.to_vec(), approx.iter().map(|o| o.family.clone()).collect())?;
    let acs = acs_check(&pair, tol.acs)?;
    let pass = own.iter().all(|o| o.1) && gaps_pass && acs.verdict == crate::acs::Verdict::Pass;
    Ok(Glt4Report { own, gaps, gaps_pass, acs, pass })
}
