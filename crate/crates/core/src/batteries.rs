//! Seeded randomized batteries for the exact tensor identities. Every case
//! is drawn from [`SplitMix64`], so a seed reproduces the battery exactly.

use serde::Serialize;

use crate::densela::ComplexMatrix;
use crate::error::Result;
use crate::glt::{canonical_matrix, glt_tensor, GltOperand};
use crate::multiindex::MultiIndex;
use crate::rng::SplitMix64;
use crate::sampling::{check_sampling_tensor, SamplingSpec};
use crate::shuffle::{all_permutations, permutation_audit, AuditCase, Permutation};
use crate::symbols::{CoeffFn, GltSymbol, TrigPoly};
use crate::toeplitz::{check_toeplitz_tensor, ToeplitzSpec};

/// One battery case: a short description and its deviation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub case: usize,
    pub description: String,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryReport {
    pub name: String,
    pub seed: u64,
    pub tol: f64,
    pub cases: Vec<CaseResult>,
    pub max_dev: f64,
    pub pass: bool,
}

impl BatteryReport {
    fn new(name: &str, seed: u64, tol: f64, cases: Vec<CaseResult>) -> Self {
        let max_dev = cases.iter().map(|c| c.deviation).fold(0.0, f64::max);
        let pass = cases.iter().all(|c| c.deviation <= tol);
        BatteryReport { name: name.to_string(), seed, tol, cases, max_dev, pass }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("battery,case,description,deviation\n");
        for c in &self.cases {
            out.push_str(&format!("{},{},\"{}\",{:.6e}\n", self.name, c.case, c.description, c.deviation));
        }
        out
    }
}

/// Random complex matrix with parts uniform in `[-1, 1)`.
pub fn random_matrix(r: &mut SplitMix64, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| r.complex())
}

/// Random matrix with Gaussian-integer entries (parts in `-4..=4`); every
/// product of such entries is exact in floating point.
pub fn random_int_matrix(r: &mut SplitMix64, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| r.gaussian_int(4))
}

/// A random `s×t` trigonometric polynomial on `n.len()` levels with one to
/// four frequencies inside `-(n-1) ≤ k ≤ n-1`.
pub fn random_trig(r: &mut SplitMix64, n: &[usize], s: usize, t: usize) -> TrigPoly {
    let mut f = TrigPoly::zero(n.len(), s, t);
    for _ in 0..1 + r.range(0, 3) {
        let k: Vec<i64> = n.iter().map(|&nl| r.small_int(nl as i64 - 1) as i64).collect();
        f.add_coeff(k, random_matrix(r, s, t)).expect("shape matches");
    }
    f
}

/// A random multilevel size with `1 ≤ N(n) ≤ max_total` on one or two levels.
pub fn random_size(r: &mut SplitMix64, max_total: usize) -> Vec<usize> {
    if r.range(0, 1) == 0 {
        vec![1 + r.range(0, max_total - 1)]
    } else {
        let n1 = 1 + r.range(0, 2);
        vec![n1, 1 + r.range(0, max_total / n1 - 1)]
    }
}

const COEFF_POOL: [&str; 6] = ["x1", "1", "cos(3*x1)", "x1^2 - 0.3", "abs(x1 - 0.5)", "exp(-x1)"];

fn random_coeff(r: &mut SplitMix64, levels: usize) -> CoeffFn {
    if levels == 1 {
        return CoeffFn::parse(COEFF_POOL[r.range(0, COEFF_POOL.len() - 1)], 1).expect("pool parses");
    }
    let parts = (0..levels).map(|_| random_coeff(r, 1)).collect();
    CoeffFn::tensor(parts).expect("nonempty")
}

fn describe_sizes(sizes: &[usize]) -> String {
    sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x")
}

/// `P_{m1,m2} (X ⊗ Y) P_{n1,n2}ᵀ = Y ⊗ X` for random `m1×n1` / `m2×n2`
/// pairs with sizes up to `max_size`.
pub fn shuffle_battery(seed: u64, cases: usize, max_size: usize) -> Result<BatteryReport> {
    let mut r = SplitMix64::new(seed);
    let mut out = Vec::new();
    for case in 0..cases {
        let (m1, n1, m2, n2) =
            (1 + r.range(0, max_size - 1), 1 + r.range(0, max_size - 1), 1 + r.range(0, max_size - 1), 1 + r.range(0, max_size - 1));
        let x = random_matrix(&mut r, m1, n1);
        let y = random_matrix(&mut r, m2, n2);
        let lhs = Permutation::p_shuffle(m1, m2)?.conjugate(&x.kron(&y)?, &Permutation::p_shuffle(n1, n2)?)?;
        let dev = lhs.max_abs_diff(&y.kron(&x)?);
        out.push(CaseResult { case, description: format!("{m1}x{n1} and {m2}x{n2}"), deviation: dev });
    }
    Ok(BatteryReport::new("shuffle", seed, 0.0, out))
}

/// `X_{σ(1)} ⊗ ⋯ ⊗ X_{σ(d)} = Γ_m(σ) (X_1 ⊗ ⋯ ⊗ X_d) Γ_n(σ)ᵀ` for every `σ`
/// of each `d` in `ds`, with random rectangular sizes up to `max_size` and
/// Gaussian-integer entries.
pub fn gamma_battery(seed: u64, ds: &[usize], max_size: usize) -> Result<BatteryReport> {
    let mut r = SplitMix64::new(seed);
    let mut out = Vec::new();
    for &d in ds {
        for sigma in all_permutations(d) {
            let rows: Vec<usize> = (0..d).map(|_| 1 + r.range(0, max_size - 1)).collect();
            let cols: Vec<usize> = (0..d).map(|_| 1 + r.range(0, max_size - 1)).collect();
            let xs: Vec<ComplexMatrix> = (0..d).map(|k| random_int_matrix(&mut r, rows[k], cols[k])).collect();
            let s = sigma.one_line();
            let reordered: Vec<ComplexMatrix> = s.iter().map(|&k| xs[k - 1].clone()).collect();
            let lhs = ComplexMatrix::kron_all(&reordered)?;
            let gm = Permutation::gamma(&rows, &sigma)?;
            let gn = Permutation::gamma(&cols, &sigma)?;
            let rhs = gm.conjugate(&ComplexMatrix::kron_all(&xs)?, &gn)?;
            out.push(CaseResult {
                case: out.len(),
                description: format!("sigma {sigma}, rows {}, cols {}", describe_sizes(&rows), describe_sizes(&cols)),
                deviation: lhs.max_abs_diff(&rhs),
            });
        }
    }
    Ok(BatteryReport::new("gamma", seed, 0.0, out))
}

/// Uniqueness audit as a battery: the deviation of a case is 0 when exactly
/// one permutation solves it and it equals `Γ(σ)`, 1 otherwise.
pub fn uniqueness_battery(max_d: usize, max_total: usize) -> Result<(BatteryReport, Vec<AuditCase>)> {
    let audit = permutation_audit(max_d, max_total)?;
    let cases = audit
        .iter()
        .enumerate()
        .map(|(case, a)| CaseResult {
            case,
            description: format!("sizes {}, sigma {}, solutions {}", describe_sizes(&a.sizes), a.sigma, a.solutions),
            deviation: if a.unique() { 0.0 } else { 1.0 },
        })
        .collect();
    Ok((BatteryReport::new("gamma-uniqueness", 0, 0.0, cases), audit))
}

/// Random specs for the Toeplitz tensor identity: `d ≤ max_d` factors,
/// `N(n_i) ≤ max_total`, block dims up to `max_block` (1 when `scalar`).
pub fn random_toeplitz_specs(
    r: &mut SplitMix64,
    max_d: usize,
    max_total: usize,
    max_block: usize,
    scalar: bool,
) -> Vec<ToeplitzSpec> {
    let d = 1 + r.range(0, max_d - 1);
    (0..d)
        .map(|_| {
            let n = random_size(r, max_total);
            let (s, t) = if scalar { (1, 1) } else { (1 + r.range(0, max_block - 1), 1 + r.range(0, max_block - 1)) };
            let f = random_trig(r, &n, s, t);
            ToeplitzSpec::new(MultiIndex::sizes(&n), f).expect("levels match")
        })
        .collect()
}

fn describe_toeplitz(specs: &[ToeplitzSpec]) -> String {
    specs
        .iter()
        .map(|sp| {
            let (s, t) = sp.f.block_dims();
            format!("n={} {}x{}", describe_sizes(&sp.n.as_sizes()), s, t)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// `cases` random block cases at tolerance `tol` followed by
/// `scalar_cases` all-scalar cases that must be exact.
pub fn toeplitz_battery(seed: u64, cases: usize, scalar_cases: usize, tol: f64) -> Result<(BatteryReport, BatteryReport)> {
    let mut r = SplitMix64::new(seed);
    let mut block = Vec::new();
    for case in 0..cases {
        let specs = random_toeplitz_specs(&mut r, 3, 6, 2, false);
        block.push(CaseResult { case, description: describe_toeplitz(&specs), deviation: check_toeplitz_tensor(&specs)? });
    }
    let mut scalar = Vec::new();
    for case in 0..scalar_cases {
        let specs = random_toeplitz_specs(&mut r, 3, 6, 1, true);
        scalar.push(CaseResult { case, description: describe_toeplitz(&specs), deviation: check_toeplitz_tensor(&specs)? });
    }
    Ok((BatteryReport::new("toeplitz-tensor", seed, tol, block), BatteryReport::new("toeplitz-tensor-scalar", seed, 0.0, scalar)))
}

/// Random specs for the sampling tensor identity.
pub fn random_sampling_specs(r: &mut SplitMix64, max_d: usize, max_total: usize, max_block: usize) -> Vec<SamplingSpec> {
    let d = 1 + r.range(0, max_d - 1);
    (0..d)
        .map(|_| {
            let n = random_size(r, max_total);
            let a = random_coeff(r, n.len());
            SamplingSpec::new(MultiIndex::sizes(&n), a, 1 + r.range(0, max_block - 1)).expect("levels match")
        })
        .collect()
}

/// Sampling tensor identity; every case must be exact.
pub fn sampling_battery(seed: u64, cases: usize) -> Result<BatteryReport> {
    let mut r = SplitMix64::new(seed);
    let mut out = Vec::new();
    for case in 0..cases {
        let specs = random_sampling_specs(&mut r, 3, 6, 3);
        let description = specs
            .iter()
            .map(|sp| format!("n={} s={}", describe_sizes(&sp.n.as_sizes()), sp.s))
            .collect::<Vec<_>>()
            .join("; ");
        out.push(CaseResult { case, description, deviation: check_sampling_tensor(&specs)? });
    }
    Ok(BatteryReport::new("sampling-tensor", seed, 0.0, out))
}

/// A random canonical symbol with one or two terms.
pub fn random_glt_symbol(r: &mut SplitMix64, n: &[usize], s: usize, t: usize) -> GltSymbol {
    let mut k = GltSymbol::zero(n.len(), s, t);
    for _ in 0..1 + r.range(0, 1) {
        let a = random_coeff(r, n.len());
        let f = random_trig(r, n, s, t);
        k.push_term(a, f).expect("shapes match");
    }
    k
}

/// `Πᵀ (⊗ X_i) Π` against `Σ D_n((⊗a) I) T_n(⊗f)` assembled directly from
/// the tensor symbol's terms.
pub fn glt_structural_battery(seed: u64, cases: usize, tol: f64) -> Result<BatteryReport> {
    let mut r = SplitMix64::new(seed);
    let mut out = Vec::new();
    for case in 0..cases {
        let d = 2 + r.range(0, 1);
        let mut ops = Vec::new();
        let mut parts = Vec::new();
        for _ in 0..d {
            let n = random_size(&mut r, 4);
            let (s, t) = (1 + r.range(0, 1), 1 + r.range(0, 1));
            let kappa = random_glt_symbol(&mut r, &n, s, t);
            parts.push(format!("n={} {}x{} terms={}", describe_sizes(&n), s, t, kappa.terms().len()));
            ops.push(GltOperand::from_symbol(kappa, vec![MultiIndex::sizes(&n)])?);
        }
        let tensor = glt_tensor(&ops)?;
        let n = &tensor.schedule()[0];
        let dev = tensor.build(n)?.max_abs_diff(&canonical_matrix(n, &tensor.symbol)?);
        out.push(CaseResult { case, description: parts.join("; "), deviation: dev });
    }
    Ok(BatteryReport::new("glt-tensor-structure", seed, tol, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batteries_pass_and_are_deterministic() {
        let a = shuffle_battery(3, 10, 4).unwrap();
        assert!(a.pass && a.max_dev == 0.0);
        assert_eq!(a, shuffle_battery(3, 10, 4).unwrap());
        let g = gamma_battery(4, &[2, 3], 3).unwrap();
        assert_eq!(g.cases.len(), 2 + 6);
        assert!(g.pass);
        let (t, ts) = toeplitz_battery(5, 5, 5, 1e-12).unwrap();
        assert!(t.pass && ts.pass);
        assert!(sampling_battery(6, 5).unwrap().pass);
        assert!(glt_structural_battery(7, 3, 1e-12).unwrap().pass);
        let (u, audit) = uniqueness_battery(2, 4).unwrap();
        assert!(u.pass && audit.iter().all(AuditCase::unique));
        assert!(t.to_csv().starts_with("battery,case,description,deviation\ntoeplitz-tensor,0,\""));
    }

    #[test]
    fn random_sizes_respect_limits() {
        let mut r = SplitMix64::new(8);
        for _ in 0..200 {
            let n = random_size(&mut r, 6);
            assert!(n.iter().product::<usize>() <= 6 && n.iter().all(|&x| x >= 1));
        }
    }
}
