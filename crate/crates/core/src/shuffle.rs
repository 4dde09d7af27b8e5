//! Permutations in one-line notation: the perfect shuffle `P_{n1,n2}`, the
//! recursive factor-reordering permutation `Γ_{n1,…,nd}(σ)` and the
//! interleaving `Π_{p1,…,pd}^{q1,…,qd}`.
//!
//! # Convention
//!
//! A permutation `ζ` of `{1,…,N}` stands for the matrix whose rows are
//! `e_{ζ(1)}ᵀ, …, e_{ζ(N)}ᵀ`, so `(Pv)_i = v_{ζ(i)}` and
//! `(P A Qᵀ)_{ij} = A_{ζ_P(i), ζ_Q(j)}`. Applying a permutation never forms
//! the matrix and never performs arithmetic.

use std::fmt;

use crate::densela::ComplexMatrix;
use crate::error::{domain, Result};
use crate::multiindex::{rank0, unrank0};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    // zeta[i] = ζ(i+1) - 1
    zeta: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { zeta: (0..n).collect() }
    }

    /// From 1-based one-line notation; rejects non-bijections.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n];
        for &z in one_line {
            if z < 1 || z > n || seen[z - 1] {
                return domain(format!("{one_line:?} is not a permutation of 1..={n}"));
            }
            seen[z - 1] = true;
        }
        Ok(Permutation { zeta: one_line.iter().map(|z| z - 1).collect() })
    }

    #[cfg(test)]
    pub(crate) fn from_zero_based(zeta: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = zeta.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &z)| i == z)
        });
        Permutation { zeta }
    }

    /// 1-based one-line notation `[ζ(1), …, ζ(N)]`.
    pub fn one_line(&self) -> Vec<usize> {
        self.zeta.iter().map(|z| z + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[usize] {
        &self.zeta
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    /// `ζ(i)`, 1-based.
    pub fn image(&self, i: usize) -> usize {
        self.zeta[i - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.zeta.iter().enumerate().all(|(i, &z)| i == z)
    }

    /// The perfect shuffle `P_{n1,n2}`:
    /// `ζ(i) = ((i-1) mod n1)·n2 + ⌊(i-1)/n1⌋ + 1`.
    pub fn p_shuffle(n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return domain(format!("P_{{{n1},{n2}}} needs positive sizes"));
        }
        let n = n1.checked_mul(n2).filter(|&n| n as u64 <= crate::multiindex::MAX_RANGE);
        let Some(n) = n else {
            return domain(format!("P_{{{n1},{n2}}} is too large"));
        };
        Ok(Permutation { zeta: (0..n).map(|i| (i % n1) * n2 + i / n1).collect() })
    }

    /// `Γ_{n1,…,nd}(σ)`, the permutation with
    /// `X_{σ(1)} ⊗ ⋯ ⊗ X_{σ(d)} = Γ_m(σ) (X_1 ⊗ ⋯ ⊗ X_d) Γ_n(σ)ᵀ`.
    ///
    /// For `d ≥ 3`, with `σ(i) = d` and `τ` equal to `σ` without `d`:
    /// `Γ(σ) = (I_{n_{σ(1)}⋯n_{σ(i-1)}} ⊗ P_{n_{σ(i+1)}⋯n_{σ(d)}, n_d}) (Γ(τ) ⊗ I_{n_d})`.
    pub fn gamma(sizes: &[usize], sigma: &Permutation) -> Result<Self> {
        let d = sizes.len();
        if d == 0 || sigma.len() != d {
            return domain(format!("Γ needs {} sizes for σ of length {}", sigma.len(), d));
        }
        if sizes.iter().any(|&n| n == 0) {
            return domain("Γ needs positive sizes");
        }
        let total = sizes.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n as u64));
        if total.is_none_or(|t| t > crate::multiindex::MAX_RANGE) {
            return domain(format!("Γ of sizes {sizes:?} is too large"));
        }
        // the recursion peels one level at a time and never revisits a
        // (sizes, σ) pair, so there is nothing to memoize
        match d {
            1 => Ok(Self::identity(sizes[0])),
            2 if sigma.is_identity() => Ok(Self::identity(sizes[0] * sizes[1])),
            2 => Self::p_shuffle(sizes[0], sizes[1]),
            _ => {
                let s = sigma.one_line();
                let i = s.iter().position(|&x| x == d).unwrap();
                let tau = Permutation::from_one_line(
                    &s.iter().copied().filter(|&x| x != d).collect::<Vec<_>>(),
                )?;
                let nd = sizes[d - 1];
                let a: usize = s[..i].iter().map(|&k| sizes[k - 1]).product();
                let b: usize = s[i + 1..].iter().map(|&k| sizes[k - 1]).product();
                let left = Self::identity(a).kron(&Self::p_shuffle(b, nd)?);
                let right = Self::gamma(&sizes[..d - 1], &tau)?.kron(&Self::identity(nd));
                left.compose(&right)
            }
        }
    }

    /// `Π_{p1,…,pd}^{q1,…,qd} = Γ_{p1,…,pd,q1,…,qd}([1, d+1, 2, d+2, …, d, 2d])`.
    pub fn pi(ps: &[usize], qs: &[usize]) -> Result<Self> {
        let d = ps.len();
        if d == 0 || qs.len() != d {
            return domain(format!("Π needs equal nonempty size lists, got {ps:?} and {qs:?}"));
        }
        let sizes: Vec<usize> = ps.iter().chain(qs).copied().collect();
        let sigma: Vec<usize> = (1..=d).flat_map(|k| [k, d + k]).collect();
        Self::gamma(&sizes, &Permutation::from_one_line(&sigma)?)
    }

    /// `(Pv)_i = v_{ζ(i)}`.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.len() {
            return domain(format!("vector of length {} for a permutation of {}", v.len(), self.len()));
        }
        Ok(self.zeta.iter().map(|&z| v[z].clone()).collect())
    }

    /// `P·A`: row `i` of the result is row `ζ(i)` of `A`.
    pub fn apply_rows(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.conjugate(a, &Self::identity(a.cols()))
    }

    /// `P·A·Qᵀ` with `self = P`: entry `(i,j)` is `A[ζ_P(i), ζ_Q(j)]`.
    pub fn conjugate(&self, a: &ComplexMatrix, q: &Permutation) -> Result<ComplexMatrix> {
        if a.rows() != self.len() || a.cols() != q.len() {
            return domain(format!(
                "cannot conjugate a {}x{} matrix by permutations of sizes {} and {}",
                a.rows(),
                a.cols(),
                self.len(),
                q.len()
            ));
        }
        Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(self.zeta[i], q.zeta[j])]))
    }

    /// Matrix product `self · other`; as maps `ζ_{PQ} = ζ_Q ∘ ζ_P`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return domain(format!("cannot compose sizes {} and {}", self.len(), other.len()));
        }
        Ok(Permutation { zeta: self.zeta.iter().map(|&z| other.zeta[z]).collect() })
    }

    /// `Pᵀ = P⁻¹`.
    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &z) in self.zeta.iter().enumerate() {
            inv[z] = i;
        }
        Permutation { zeta: inv }
    }

    /// `P ⊗ Q`, with `ζ(i1,i2) = (ζ_P(i1), ζ_Q(i2))` in lexicographic order.
    pub fn kron(&self, other: &Permutation) -> Permutation {
        let m = other.len();
        let mut zeta = Vec::with_capacity(self.len() * m);
        for &a in &self.zeta {
            for &b in &other.zeta {
                zeta.push(a * m + b);
            }
        }
        Permutation { zeta }
    }

    /// The dense permutation matrix (rows `e_{ζ(i)}ᵀ`).
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &z) in self.zeta.iter().enumerate() {
            m[(i, z)] = num_complex::Complex64::new(1.0, 0.0);
        }
        m
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_line())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_line().iter().map(|z| z.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Every permutation of `{1,…,d}` in lexicographic order of one-line form.
pub fn all_permutations(d: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        if prefix.len() == used.len() {
            out.push(Permutation { zeta: prefix.clone() });
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// A 0-1 matrix with exactly one nonzero entry, as `(row, col)` 0-based.
type Unit = (usize, usize);

/// Pairs `(E, E')` of canonical tensor-basis matrices for sizes `n` and the
/// reordering `σ`: `E = E_{u1v1} ⊗ ⋯ ⊗ E_{udvd}` and
/// `E' = E_{u_σ(1)v_σ(1)} ⊗ ⋯ ⊗ E_{u_σ(d)v_σ(d)}`.
fn tensor_basis_pairs(sizes: &[usize], sigma: &Permutation) -> Vec<(Unit, Unit)> {
    let total: usize = sizes.iter().product();
    let s = sigma.zero_based();
    let reordered: Vec<usize> = s.iter().map(|&k| sizes[k]).collect();
    let mut pairs = Vec::with_capacity(total * total);
    for r in 0..total {
        let u = unrank0(r, sizes);
        let u2: Vec<usize> = s.iter().map(|&k| u[k]).collect();
        for c in 0..total {
            let v = unrank0(c, sizes);
            let v2: Vec<usize> = s.iter().map(|&k| v[k]).collect();
            pairs.push(((r, c), (rank0(&u2, &reordered), rank0(&v2, &reordered))));
        }
    }
    pairs
}

/// Whether `Q E Qᵀ = E'` holds on entries whose row and column indices are
/// both `< k`, given the first `k` images of `ζ_Q`.
fn consistent_prefix(zeta: &[usize], pairs: &[(Unit, Unit)]) -> bool {
    let k = zeta.len();
    let i = k - 1;
    pairs.iter().all(|&((r, c), (r2, c2))| {
        // (Q E Qᵀ)_{ij} = E[ζ(i), ζ(j)]; only entries touching the new index i
        (0..k).all(|j| {
            let lhs_ij = zeta[i] == r && zeta[j] == c;
            let rhs_ij = i == r2 && j == c2;
            let lhs_ji = zeta[j] == r && zeta[i] == c;
            let rhs_ji = j == r2 && i == c2;
            lhs_ij == rhs_ij && lhs_ji == rhs_ji
        })
    })
}

/// All permutations `Q` of `{1,…,N}`, `N = n_1⋯n_d`, with
/// `E' = Q E Qᵀ` for every canonical tensor-basis pair; exhaustive search by
/// backtracking over partial one-line forms (a prefix is extended only while
/// every fully assigned entry already matches).
pub fn find_conjugators(sizes: &[usize], sigma: &Permutation) -> Vec<Permutation> {
    let pairs = tensor_basis_pairs(sizes, sigma);
    let total: usize = sizes.iter().product();
    let mut found = Vec::new();
    let mut zeta = Vec::with_capacity(total);
    let mut used = vec![false; total];
    fn rec(
        zeta: &mut Vec<usize>,
        used: &mut [bool],
        pairs: &[(Unit, Unit)],
        found: &mut Vec<Permutation>,
    ) {
        if zeta.len() == used.len() {
            found.push(Permutation { zeta: zeta.clone() });
            return;
        }
        for z in 0..used.len() {
            if used[z] {
                continue;
            }
            zeta.push(z);
            if consistent_prefix(zeta, pairs) {
                used[z] = true;
                rec(zeta, used, pairs, found);
                used[z] = false;
            }
            zeta.pop();
        }
    }
    rec(&mut zeta, &mut used, &pairs, &mut found);
    found
}

/// The same search as [`find_conjugators`] by plain enumeration of all `N!`
/// permutations, used to cross-check the pruned search on small sizes.
pub fn find_conjugators_naive(sizes: &[usize], sigma: &Permutation) -> Vec<Permutation> {
    let pairs = tensor_basis_pairs(sizes, sigma);
    let total: usize = sizes.iter().product();
    all_permutations(total)
        .into_iter()
        .filter(|q| {
            let z = q.zero_based();
            pairs.iter().all(|&((r, c), (r2, c2))| {
                (0..total).all(|i| {
                    (0..total).all(|j| (z[i] == r && z[j] == c) == (i == r2 && j == c2))
                })
            })
        })
        .collect()
}

/// All permutations of `{1,…,n}` commuting with every canonical basis matrix
/// `E_{uv}` of size `n` (exhaustive backtracking search).
pub fn commuting_with_basis(n: usize) -> Vec<Permutation> {
    // Q E_uv = E_uv Q  ⇔  Q E_uv Qᵀ = E_uv, the d = 1 case of the search above
    find_conjugators(&[n], &Permutation::identity(1))
}

/// Outcome of the uniqueness audit for one `(sizes, σ)`.
#[derive(Clone, Debug)]
pub struct AuditCase {
    pub sizes: Vec<usize>,
    pub sigma: Permutation,
    pub solutions: usize,
    pub matches_gamma: bool,
}

impl AuditCase {
    pub fn unique(&self) -> bool {
        self.solutions == 1 && self.matches_gamma
    }
}

/// Every size tuple with components `≥ 1`, length `1..=max_d` and product
/// `≤ max_total`.
pub fn size_tuples(max_d: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_d {
        let mut next = Vec::new();
        for t in &frontier {
            let prod: usize = t.iter().product();
            for n in 1..=max_total / prod {
                let mut u = t.clone();
                u.push(n);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Runs the exhaustive uniqueness search for every size tuple with
/// `d ≤ max_d`, product `≤ max_total`, and every `σ`.
pub fn permutation_audit(max_d: usize, max_total: usize) -> Result<Vec<AuditCase>> {
    let mut cases = Vec::new();
    for sizes in size_tuples(max_d, max_total) {
        for sigma in all_permutations(sizes.len()) {
            let gamma = Permutation::gamma(&sizes, &sigma)?;
            let found = find_conjugators(&sizes, &sigma);
            cases.push(AuditCase {
                matches_gamma: found.len() == 1 && found[0] == gamma,
                solutions: found.len(),
                sizes: sizes.clone(),
                sigma,
            });
        }
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use num_complex::Complex64;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    fn random(r: &mut SplitMix64, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| r.complex())
    }

    // Gaussian-integer entries keep every product exact, so reindexing
    // identities can be compared bit for bit whatever the factor order.
    fn random_int(r: &mut SplitMix64, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| r.gaussian_int(4))
    }

    #[test]
    fn p_shuffle_examples() {
        assert_eq!(Permutation::p_shuffle(2, 3).unwrap().one_line(), vec![1, 4, 2, 5, 3, 6]);
        assert_eq!(Permutation::p_shuffle(3, 2).unwrap().one_line(), vec![1, 3, 5, 2, 4, 6]);
        for n in 1..6 {
            assert!(Permutation::p_shuffle(1, n).unwrap().is_identity());
            assert!(Permutation::p_shuffle(n, 1).unwrap().is_identity());
        }
        assert!(Permutation::p_shuffle(0, 3).is_err());
    }

    #[test]
    fn p_shuffle_matches_block_formula() {
        // P_{n1,n2} = Σ_i e_i^{(n2)} ⊗ I_{n1} ⊗ (e_i^{(n2)})ᵀ
        for (n1, n2) in [(2, 3), (3, 2), (4, 4), (1, 5), (3, 1)] {
            let mut sum = ComplexMatrix::zeros(n1 * n2, n1 * n2);
            for i in 0..n2 {
                let mut col = ComplexMatrix::zeros(n2, 1);
                col[(i, 0)] = Complex64::new(1.0, 0.0);
                let term = ComplexMatrix::kron_all(&[
                    col.clone(),
                    ComplexMatrix::identity(n1),
                    col.transpose(),
                ])
                .unwrap();
                sum = sum.add(&term).unwrap();
            }
            assert_eq!(Permutation::p_shuffle(n1, n2).unwrap().to_matrix(), sum);
        }
    }

    #[test]
    fn one_line_validation() {
        assert!(Permutation::from_one_line(&[1, 1]).is_err());
        assert!(Permutation::from_one_line(&[0, 1]).is_err());
        assert!(Permutation::from_one_line(&[3, 1]).is_err());
        assert_eq!(perm(&[2, 3, 1]).image(1), 2);
        assert_eq!(perm(&[2, 3, 1]).to_string(), "2,3,1");
    }

    #[test]
    fn gamma_examples() {
        assert!(Permutation::gamma(&[5], &perm(&[1])).unwrap().is_identity());
        assert_eq!(Permutation::gamma(&[5], &perm(&[1])).unwrap().len(), 5);
        assert_eq!(
            Permutation::gamma(&[2, 3], &perm(&[2, 1])).unwrap().one_line(),
            vec![1, 4, 2, 5, 3, 6]
        );
        assert_eq!(Permutation::gamma(&[2, 2], &perm(&[2, 1])).unwrap().one_line(), vec![1, 3, 2, 4]);
        assert!(Permutation::gamma(&[2, 2], &perm(&[1])).is_err());
        // [3,1,2] on (2,2,2) is the unique conjugator found by exhaustive search
        let g = Permutation::gamma(&[2, 2, 2], &perm(&[3, 1, 2])).unwrap();
        assert_eq!(find_conjugators(&[2, 2, 2], &perm(&[3, 1, 2])), vec![g]);
    }

    #[test]
    fn gamma_of_identity_is_identity() {
        for sizes in size_tuples(4, 12) {
            let g = Permutation::gamma(&sizes, &Permutation::identity(sizes.len())).unwrap();
            assert!(g.is_identity(), "{sizes:?}");
        }
    }

    #[test]
    fn pi_examples() {
        assert!(Permutation::pi(&[4, 5], &[1, 1]).unwrap().is_identity());
        assert_eq!(Permutation::pi(&[4, 5], &[1, 1]).unwrap().len(), 20);
        assert!(Permutation::pi(&[2], &[3]).unwrap().is_identity());
        assert!(Permutation::pi(&[2], &[3, 1]).is_err());
        let p = Permutation::pi(&[2, 2], &[2, 2]).unwrap();
        assert_eq!(p.len(), 16);
        assert!(p.compose(&p.invert()).unwrap().is_identity());
    }

    #[test]
    fn pi_interleaves_kron_factors() {
        // Π reorders P1⊗P2⊗Q1⊗Q2 into P1⊗Q1⊗P2⊗Q2
        let mut r = SplitMix64::new(11);
        let (ps, qs) = ([2usize, 3], [2usize, 1]);
        let xs: Vec<ComplexMatrix> =
            ps.iter().chain(&qs).map(|&n| random_int(&mut r, n, n)).collect();
        let natural = ComplexMatrix::kron_all(&xs).unwrap();
        let inter = ComplexMatrix::kron_all(&[
            xs[0].clone(),
            xs[2].clone(),
            xs[1].clone(),
            xs[3].clone(),
        ])
        .unwrap();
        let p = Permutation::pi(&ps, &qs).unwrap();
        assert_eq!(p.conjugate(&natural, &p).unwrap(), inter);
    }

    #[test]
    fn conjugate_examples() {
        let mut r = SplitMix64::new(12);
        let a = random(&mut r, 4, 3);
        assert_eq!(
            Permutation::identity(4).conjugate(&a, &Permutation::identity(3)).unwrap(),
            a
        );
        let d = ComplexMatrix::real_diag(&[1.0, 2.0, 3.0, 4.0]);
        let p = perm(&[3, 1, 4, 2]);
        let c = p.conjugate(&d, &p).unwrap();
        assert!(c.is_diagonal());
        assert_eq!(c.diagonal(), p.apply(&d.diagonal()).unwrap());
        assert!(p.conjugate(&a, &p).is_err());
    }

    #[test]
    fn compose_invert_to_matrix() {
        assert!(Permutation::identity(4).invert().is_identity());
        assert_eq!(Permutation::p_shuffle(2, 3).unwrap().invert().one_line(), vec![1, 3, 5, 2, 4, 6]);
        let mut r = SplitMix64::new(13);
        for n in 1..8 {
            let p = Permutation::from_zero_based(r.permutation(n));
            let q = Permutation::from_zero_based(r.permutation(n));
            let m = p.to_matrix();
            assert_eq!(m.matmul(&m.transpose()).unwrap(), ComplexMatrix::identity(n));
            assert!(p.compose(&p.invert()).unwrap().is_identity());
            assert_eq!(p.invert().to_matrix(), m.transpose());
            assert_eq!(p.compose(&q).unwrap().to_matrix(), m.matmul(&q.to_matrix()).unwrap());
            let v: Vec<Complex64> = (0..n).map(|_| r.complex()).collect();
            assert_eq!(m.matvec(&v).unwrap(), p.apply(&v).unwrap());
            let a = random(&mut r, n, 2);
            assert_eq!(p.apply_rows(&a).unwrap(), m.matmul(&a).unwrap());
            let pq = p.kron(&q);
            assert_eq!(pq.to_matrix(), m.kron(&q.to_matrix()).unwrap());
        }
    }

    #[test]
    fn two_factor_swap() {
        let mut r = SplitMix64::new(14);
        for _ in 0..20 {
            let (m1, n1, m2, n2) = (r.range(1, 4), r.range(1, 4), r.range(1, 4), r.range(1, 4));
            let (x1, x2) = (random(&mut r, m1, n1), random(&mut r, m2, n2));
            let p = Permutation::p_shuffle(m1, m2).unwrap();
            let q = Permutation::p_shuffle(n1, n2).unwrap();
            let lhs = p.conjugate(&x1.kron(&x2).unwrap(), &q).unwrap();
            assert_eq!(lhs, x2.kron(&x1).unwrap());
        }
    }

    #[test]
    fn gamma_reorders_factors_exactly() {
        let mut r = SplitMix64::new(15);
        for d in 1..=4 {
            for sigma in all_permutations(d) {
                let ms: Vec<usize> = (0..d).map(|_| r.range(1, 3)).collect();
                let ns: Vec<usize> = (0..d).map(|_| r.range(1, 3)).collect();
                let gm = Permutation::gamma(&ms, &sigma).unwrap();
                let gn = Permutation::gamma(&ns, &sigma).unwrap();
                let s = sigma.zero_based();
                let xs: Vec<ComplexMatrix> =
                    (0..d).map(|k| random_int(&mut r, ms[k], ns[k])).collect();
                let reordered: Vec<ComplexMatrix> = s.iter().map(|&k| xs[k].clone()).collect();
                let lhs = ComplexMatrix::kron_all(&reordered).unwrap();
                let rhs = gm.conjugate(&ComplexMatrix::kron_all(&xs).unwrap(), &gn).unwrap();
                assert_eq!(lhs, rhs, "sigma={sigma:?} ms={ms:?} ns={ns:?}");

                // float entries: products associate differently on the two sides
                let xs: Vec<ComplexMatrix> =
                    (0..d).map(|k| random(&mut r, ms[k], ns[k])).collect();
                let reordered: Vec<ComplexMatrix> = s.iter().map(|&k| xs[k].clone()).collect();
                let lhs = ComplexMatrix::kron_all(&reordered).unwrap();
                let rhs = gm.conjugate(&ComplexMatrix::kron_all(&xs).unwrap(), &gn).unwrap();
                assert!(lhs.max_abs_diff(&rhs) <= 1e-15);
            }
        }
    }

    #[test]
    fn pruned_search_agrees_with_naive_enumeration() {
        for sizes in size_tuples(3, 5) {
            for sigma in all_permutations(sizes.len()) {
                assert_eq!(
                    find_conjugators(&sizes, &sigma),
                    find_conjugators_naive(&sizes, &sigma),
                    "{sizes:?} {sigma:?}"
                );
            }
        }
    }

    #[test]
    fn only_identity_commutes_with_all_basis_matrices() {
        for n in 1..=8 {
            let found = commuting_with_basis(n);
            assert_eq!(found, vec![Permutation::identity(n)]);
        }
        // plain enumeration for small n
        for n in 1..=5 {
            let naive: Vec<_> = all_permutations(n)
                .into_iter()
                .filter(|q| {
                    let m = q.to_matrix();
                    (0..n).all(|u| {
                        (0..n).all(|v| {
                            let mut e = ComplexMatrix::zeros(n, n);
                            e[(u, v)] = Complex64::new(1.0, 0.0);
                            m.matmul(&e).unwrap() == e.matmul(&m).unwrap()
                        })
                    })
                })
                .collect();
            assert_eq!(naive, vec![Permutation::identity(n)]);
        }
    }

    #[test]
    fn size_tuple_enumeration() {
        let t = size_tuples(2, 4);
        assert!(t.contains(&vec![4]) && t.contains(&vec![2, 2]) && t.contains(&vec![1, 4]));
        assert!(!t.contains(&vec![3, 2]));
        assert!(t.iter().all(|s| s.iter().product::<usize>() <= 4));
    }
}
