//! Diagonal sampling matrices `D_n(a) = diag_{i=1,…,n} a(i/n)` and their
//! block inflations `D_n(a I_s) = D_n(a) ⊗ I_s`.

use crate::densela::{check_dims, ComplexMatrix};
use crate::error::{domain, Error, Result};
use crate::multiindex::{unrank0, MultiIndex};
use crate::shuffle::Permutation;
use crate::symbols::CoeffFn;

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingSpec {
    pub n: MultiIndex,
    pub a: CoeffFn,
    pub s: usize,
}

impl SamplingSpec {
    pub fn new(n: MultiIndex, a: CoeffFn, s: usize) -> Result<Self> {
        if !n.is_positive() {
            return domain(format!("sampling size {n} must be positive"));
        }
        if n.len() != a.levels() {
            return domain(format!("{}-level size {n} for a function of {} variables", n.len(), a.levels()));
        }
        if s == 0 {
            return domain("block size must be at least 1");
        }
        Ok(SamplingSpec { n, a, s })
    }

    /// `N(n)`.
    pub fn size(&self) -> usize {
        self.n.as_sizes().iter().product()
    }

    pub fn build(&self) -> Result<ComplexMatrix> {
        diag_sampling(&self.n, &self.a, self.s)
    }
}

/// `a(i/n)` for `i = 1,…,n` in lexicographic order. Any evaluation failure
/// is an error naming the grid point.
pub fn sample_values(n: &MultiIndex, a: &CoeffFn) -> Result<Vec<f64>> {
    if n.len() != a.levels() {
        return domain(format!("{}-level size {n} for a function of {} variables", n.len(), a.levels()));
    }
    let sizes = n.as_sizes();
    let total = n.n_of()?;
    (0..total)
        .map(|r| {
            let x: Vec<f64> =
                unrank0(r, &sizes).iter().zip(&sizes).map(|(&i, &nl)| (i + 1) as f64 / nl as f64).collect();
            a.eval(&x).map_err(|e| match e {
                Error::Eval { point, reason } => Error::Domain(format!(
                    "sampling failed at x = {point:?}: {reason}"
                )),
                other => other,
            })
        })
        .collect()
}

/// `D_n(a I_s)`.
pub fn diag_sampling(n: &MultiIndex, a: &CoeffFn, s: usize) -> Result<ComplexMatrix> {
    let spec = SamplingSpec::new(n.clone(), a.clone(), s)?;
    check_dims(spec.size() * s, spec.size() * s)?;
    let values = sample_values(n, a)?;
    let diag: Vec<f64> = values.iter().flat_map(|&v| std::iter::repeat_n(v, s)).collect();
    Ok(ComplexMatrix::real_diag(&diag))
}

/// `D_{n_1}(a_1 I_{s_1}) ⊗ ⋯ ⊗ D_{n_d}(a_d I_{s_d})`.
pub fn sampling_tensor_lhs(specs: &[SamplingSpec]) -> Result<ComplexMatrix> {
    let blocks = specs.iter().map(SamplingSpec::build).collect::<Result<Vec<_>>>()?;
    ComplexMatrix::kron_all(&blocks)
}

/// `Π D_n((a_1 ⊗ ⋯ ⊗ a_d) I_{s_1⋯s_d}) Πᵀ` with `Π = Π_{N(n_1),…,N(n_d)}^{s_1,…,s_d}`
/// on both sides.
pub fn sampling_tensor_rhs(specs: &[SamplingSpec]) -> Result<ComplexMatrix> {
    if specs.is_empty() {
        return domain("no sampling specs");
    }
    let a = CoeffFn::tensor(specs.iter().map(|sp| sp.a.clone()).collect())?;
    let n = MultiIndex::concat(&specs.iter().map(|sp| sp.n.clone()).collect::<Vec<_>>())?;
    let s: usize = specs.iter().map(|sp| sp.s).product();
    let d = diag_sampling(&n, &a, s)?;
    let ns: Vec<usize> = specs.iter().map(SamplingSpec::size).collect();
    let ss: Vec<usize> = specs.iter().map(|sp| sp.s).collect();
    let pi = Permutation::pi(&ns, &ss)?;
    pi.conjugate(&d, &pi)
}

/// `max |LHS - RHS|` for the sampling tensor identity.
pub fn check_sampling_tensor(specs: &[SamplingSpec]) -> Result<f64> {
    Ok(sampling_tensor_lhs(specs)?.max_abs_diff(&sampling_tensor_rhs(specs)?))
}
