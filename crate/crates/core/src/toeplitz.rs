//! Multilevel block Toeplitz matrices `T_n(f) = [f_{i-j}]_{i,j=1}^n`.
//!
//! Block rows and columns follow the lexicographic order of `{1,…,n}`.
//! Coefficients outside the stored support of `f` are zero blocks.

use crate::densela::{check_dims, ComplexMatrix};
use crate::error::{domain, Result};
use crate::multiindex::{unrank0, MultiIndex};
use crate::shuffle::Permutation;
use crate::symbols::TrigPoly;

/// A pair `(n, f)` with `f` on `|n|` levels.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzSpec {
    pub n: MultiIndex,
    pub f: TrigPoly,
}

impl ToeplitzSpec {
    pub fn new(n: MultiIndex, f: TrigPoly) -> Result<Self> {
        if !n.is_positive() {
            return domain(format!("Toeplitz size {n} must be positive"));
        }
        if n.len() != f.levels() {
            return domain(format!("{}-level size {n} for a {}-level symbol", n.len(), f.levels()));
        }
        Ok(ToeplitzSpec { n, f })
    }

    /// `N(n)`.
    pub fn size(&self) -> usize {
        self.n.as_sizes().iter().product()
    }

    /// `(N(n)·s, N(n)·t)`.
    pub fn shape(&self) -> (usize, usize) {
        let (s, t) = self.f.block_dims();
        (self.size() * s, self.size() * t)
    }

    pub fn build(&self) -> Result<ComplexMatrix> {
        toeplitz(&self.n, &self.f)
    }
}

/// `T_n(f)`.
pub fn toeplitz(n: &MultiIndex, f: &TrigPoly) -> Result<ComplexMatrix> {
    let spec = ToeplitzSpec::new(n.clone(), f.clone())?;
    let (rows, cols) = spec.shape();
    check_dims(rows, cols)?;
    let sizes = n.as_sizes();
    let total = spec.size();
    let (s, t) = f.block_dims();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for (k, block) in f.support() {
        // i - j = k: walk the rows and shift each digit by -k
        'rows: for ri in 0..total {
            let i = unrank0(ri, &sizes);
            let mut cj = 0usize;
            for ((&il, &kl), &nl) in i.iter().zip(k).zip(&sizes) {
                let jl = il as i64 - kl;
                if jl < 0 || jl >= nl as i64 {
                    continue 'rows;
                }
                cj = cj * nl + jl as usize;
            }
            for a in 0..s {
                for b in 0..t {
                    out[(ri * s + a, cj * t + b)] += block[(a, b)];
                }
            }
        }
    }
    Ok(out)
}

/// `J_n^{(k)}` with `(J_n^{(k)})_{ij} = δ_{i-j,k}` on one level.
pub fn shift(n: usize, k: i64) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let c = i as i64 - k;
        if c >= 0 && (c as usize) < n {
            j[(i, c as usize)] = crate::Complex64::new(1.0, 0.0);
        }
    }
    j
}

/// `J_n^{(k)} = J_{n_1}^{(k_1)} ⊗ ⋯ ⊗ J_{n_d}^{(k_d)}`.
pub fn multilevel_shift(n: &MultiIndex, k: &[i64]) -> Result<ComplexMatrix> {
    if k.len() != n.len() {
        return domain(format!("shift {k:?} for a {}-level size", n.len()));
    }
    let factors: Vec<ComplexMatrix> = n.as_sizes().iter().zip(k).map(|(&nl, &kl)| shift(nl, kl)).collect();
    ComplexMatrix::kron_all(&factors)
}

/// `T_n(f) = Σ_k J_n^{(k)} ⊗ f_k`, summed over the support of `f` inside
/// `-(n-1) ≤ k ≤ n-1`.
pub fn toeplitz_via_shifts(n: &MultiIndex, f: &TrigPoly) -> Result<ComplexMatrix> {
    let spec = ToeplitzSpec::new(n.clone(), f.clone())?;
    let (rows, cols) = spec.shape();
    check_dims(rows, cols)?;
    let sizes = n.as_sizes();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for (k, block) in f.support() {
        if k.iter().zip(&sizes).any(|(&kl, &nl)| kl.unsigned_abs() as usize >= nl) {
            continue;
        }
        out = out.add(&multilevel_shift(n, k)?.kron(block)?)?;
    }
    Ok(out)
}

/// `T_{n_1}(f_1) ⊗ ⋯ ⊗ T_{n_d}(f_d)`.
pub fn toeplitz_tensor_lhs(specs: &[ToeplitzSpec]) -> Result<ComplexMatrix> {
    let blocks = specs.iter().map(ToeplitzSpec::build).collect::<Result<Vec<_>>>()?;
    ComplexMatrix::kron_all(&blocks)
}

/// `Π_{N(n_1),…,N(n_d)}^{s_1,…,s_d} T_n(f_1 ⊗ ⋯ ⊗ f_d) (Π_{N(n_1),…,N(n_d)}^{t_1,…,t_d})ᵀ`
/// with `n = (n_1,…,n_d)`.
pub fn toeplitz_tensor_rhs(specs: &[ToeplitzSpec]) -> Result<ComplexMatrix> {
    let (first, rest) = specs.split_first().ok_or_else(|| crate::Error::Domain("no Toeplitz specs".into()))?;
    let f = rest.iter().try_fold(first.f.clone(), |acc, sp| acc.tensor(&sp.f))?;
    let n = MultiIndex::concat(&specs.iter().map(|sp| sp.n.clone()).collect::<Vec<_>>())?;
    let t = toeplitz(&n, &f)?;
    let ns: Vec<usize> = specs.iter().map(ToeplitzSpec::size).collect();
    let ss: Vec<usize> = specs.iter().map(|sp| sp.f.block_dims().0).collect();
    let ts: Vec<usize> = specs.iter().map(|sp| sp.f.block_dims().1).collect();
    Permutation::pi(&ns, &ss)?.conjugate(&t, &Permutation::pi(&ns, &ts)?)
}

/// `max |LHS - RHS|` for the Toeplitz tensor identity.
pub fn check_toeplitz_tensor(specs: &[ToeplitzSpec]) -> Result<f64> {
    let lhs = toeplitz_tensor_lhs(specs)?;
    let rhs = toeplitz_tensor_rhs(specs)?;
    Ok(lhs.max_abs_diff(&rhs))
}
