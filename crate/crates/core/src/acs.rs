//! Approximating classes of sequences.
//!
//! The pair `(c(m), ω(m))` of the rank/norm splitting `A_n - B_{n,m} = R + N`
//! is scalarized to the modulus
//! `ρ(A, B) = min_j max(j/(d∧e), σ_{j+1}(A - B))`,
//! which is small exactly when a splitting with small relative rank and
//! small norm exists (take `R` the best rank-`j` truncation).

use std::fmt;

use crate::asymptotics::{kron_family, su_profile, MatrixFamily};
use crate::densela::ComplexMatrix;
use crate::error::{domain, Result};
use crate::multiindex::MultiIndex;
use crate::parallel::par_map;

/// `ρ(A,B)`, with `σ_{(d∧e)+1} := 0`.
pub fn split_modulus(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return domain(format!("split_modulus of {:?} and {:?} matrices", a.shape(), b.shape()));
    }
    Ok(modulus_from_sv(&a.sub(b)?.svd_values()))
}

/// `ρ` from the descending singular values of `A - B`.
pub fn modulus_from_sv(sv: &[f64]) -> f64 {
    let k = sv.len();
    if k == 0 {
        return 0.0;
    }
    (0..=k)
        .map(|j| {
            let tail = sv.get(j).copied().unwrap_or(0.0);
            (j as f64 / k as f64).max(tail)
        })
        .fold(f64::INFINITY, f64::min)
}

/// A target family `{A_n}` with approximants `{B_{n,m}}` for a list of `m`.
#[derive(Clone, Debug)]
pub struct AcsPair {
    pub target: MatrixFamily,
    pub ms: Vec<usize>,
    pub approximants: Vec<MatrixFamily>,
}

impl AcsPair {
    pub fn new(target: MatrixFamily, ms: Vec<usize>, approximants: Vec<MatrixFamily>) -> Result<Self> {
        if ms.is_empty() || ms.len() != approximants.len() {
            return domain("need one approximant family per m");
        }
        if approximants
            .iter()
            .any(|b| b.schedule() != target.schedule() || b.block_dims() != target.block_dims())
        {
            return domain("approximants must share the target's schedule and block size");
        }
        Ok(AcsPair { target, ms, approximants })
    }

    /// Approximants from a map `m ↦ {B_{n,m}}` over the target's schedule.
    pub fn from_fn(target: MatrixFamily, ms: Vec<usize>, approx: impl Fn(usize) -> Result<MatrixFamily>) -> Result<Self> {
        let approximants = ms.iter().map(|&m| approx(m)).collect::<Result<Vec<_>>>()?;
        Self::new(target, ms, approximants)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The check ran but a factor was not observed to be s.u.
    UnmetHypothesis,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::UnmetHypothesis => "UNMET-HYPOTHESIS",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcsReport {
    pub tol: f64,
    /// `(m, n, ρ(A_n, B_{n,m}))` for every pair evaluated.
    pub detail: Vec<(usize, MultiIndex, f64)>,
    /// `(m, ρ̂(m))`.
    pub rho_hat: Vec<(usize, f64)>,
    pub verdict: Verdict,
}

impl AcsReport {
    pub fn last(&self) -> f64 {
        self.rho_hat.last().map_or(0.0, |r| r.1)
    }

    pub fn non_increasing(&self) -> bool {
        self.rho_hat.windows(2).all(|w| w[1].1 <= w[0].1 + MONOTONE_SLACK)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,rho_hat,verdict\n");
        for (m, r) in &self.rho_hat {
            out.push_str(&format!("{m},{r:.12e},{}\n", self.verdict));
        }
        out
    }
}

const MONOTONE_SLACK: f64 = 1e-12;

/// `ρ̂(m) = max` of `ρ(A_n, B_{n,m})` over the tail half of the schedule.
/// PASS when `ρ̂` is non-increasing in `m` (up to `1e-12`) and
/// `ρ̂(m_last) ≤ tol`.
pub fn acs_check(pair: &AcsPair, tol: f64) -> Result<AcsReport> {
    let schedule = pair.target.schedule();
    let tail: Vec<MultiIndex> = schedule[schedule.len() / 2..].to_vec();
    let targets: Vec<ComplexMatrix> =
        par_map(&tail, |n| pair.target.build(n)).into_iter().collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..pair.ms.len()).flat_map(|mi| (0..tail.len()).map(move |ni| (mi, ni))).collect();
    let rhos: Vec<f64> = par_map(&jobs, |&(mi, ni)| {
        let b = pair.approximants[mi].build(&tail[ni])?;
        split_modulus(&targets[ni], &b)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut detail = Vec::new();
    let mut rho_hat = Vec::new();
    for (mi, &m) in pair.ms.iter().enumerate() {
        let mut worst: f64 = 0.0;
        for (ni, n) in tail.iter().enumerate() {
            let r = rhos[mi * tail.len() + ni];
            worst = worst.max(r);
            detail.push((m, n.clone(), r));
        }
        rho_hat.push((m, worst));
    }
    let mut report = AcsReport { tol, detail, rho_hat, verdict: Verdict::Fail };
    if report.non_increasing() && report.last() <= tol {
        report.verdict = Verdict::Pass;
    }
    Ok(report)
}

/// Thresholds and tolerance used to observe sparse unboundedness of a
/// target family.
#[derive(Clone, Debug, PartialEq)]
pub struct SuHypothesis {
    pub ms: Vec<f64>,
    pub tol: f64,
}

impl Default for SuHypothesis {
    fn default() -> Self {
        SuHypothesis { ms: vec![10.0, 100.0, 1000.0], tol: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcsTensorReport {
    pub left_su: bool,
    pub right_su: bool,
    pub report: AcsReport,
    /// The report's verdict, downgraded when a factor is not observed s.u.
    pub verdict: Verdict,
}

/// `{B_{n,m} ⊗ B'_{n,m}}` against `{A_n ⊗ A'_n}`.
pub fn tensor_pair(left: &AcsPair, right: &AcsPair) -> Result<AcsPair> {
    if left.ms != right.ms {
        return domain("tensored pairs need the same list of m");
    }
    let target = kron_family(&left.target, &right.target)?;
    let approximants = left
        .approximants
        .iter()
        .zip(&right.approximants)
        .map(|(b, b2)| kron_family(b, b2))
        .collect::<Result<Vec<_>>>()?;
    AcsPair::new(target, left.ms.clone(), approximants)
}

/// Runs [`acs_check`] on the tensored pair. The s.u. hypothesis on both
/// targets is checked first; when it fails the check still runs and the
/// verdict reads UNMET-HYPOTHESIS unless it failed outright.
pub fn acs_tensor_check(left: &AcsPair, right: &AcsPair, tol: f64, su: &SuHypothesis) -> Result<AcsTensorReport> {
    let left_su = su_profile(&left.target, &su.ms)?.pass(su.tol);
    let right_su = su_profile(&right.target, &su.ms)?.pass(su.tol);
    let report = acs_check(&tensor_pair(left, right)?, tol)?;
    let verdict = match report.verdict {
        Verdict::Pass if !(left_su && right_su) => Verdict::UnmetHypothesis,
        v => v,
    };
    Ok(AcsTensorReport { left_su, right_su, report, verdict })
}
