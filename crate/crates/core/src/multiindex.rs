//! Multi-indices and the standard lexicographic ordering.
//!
//! A d-index range `{1,…,m}` is enumerated with the last component varying
//! fastest: for `m = (2,3)` the order is `(1,1),(1,2),(1,3),(2,1),…`. Every
//! row/column layout of a multilevel matrix in this crate goes through
//! [`MultiIndex::lex_rank`] / [`MultiIndex::lex_unrank`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest admissible `N(m)`.
pub const MAX_RANGE: u64 = 1 << 31;

/// A d-tuple of integers (`d ≥ 1`). Components are 1-based when used as a
/// position inside a range.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct MultiIndex(Vec<i64>);

impl TryFrom<Vec<i64>> for MultiIndex {
    type Error = crate::Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<i64> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

impl MultiIndex {
    pub fn new(components: Vec<i64>) -> Result<Self> {
        if components.is_empty() {
            return domain("multi-index must have at least one component");
        }
        Ok(MultiIndex(components))
    }

    /// A positive multi-index whose range size `N(m)` fits in [`MAX_RANGE`].
    pub fn positive(components: Vec<i64>) -> Result<Self> {
        let m = Self::new(components)?;
        m.n_of()?;
        Ok(m)
    }

    /// Convenience constructor from sizes; panics on invalid input.
    pub fn sizes(components: &[usize]) -> Self {
        Self::positive(components.iter().map(|&c| c as i64).collect())
            .expect("invalid positive multi-index")
    }

    pub fn ones(d: usize) -> Self {
        MultiIndex(vec![1; d.max(1)])
    }

    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// Component `k` (1-based, as in `m_k`).
    pub fn get(&self, k: usize) -> i64 {
        self.0[k - 1]
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 1)
    }

    /// `N(m) = m_1 m_2 ⋯ m_d`.
    pub fn n_of(&self) -> Result<usize> {
        let mut prod: u64 = 1;
        for &c in &self.0 {
            if c < 1 {
                return domain(format!("N(m) needs positive components, got {self}"));
            }
            prod = prod.saturating_mul(c as u64);
            if prod > MAX_RANGE {
                return domain(format!("N({self}) exceeds 2^31"));
            }
        }
        Ok(prod as usize)
    }

    /// Sizes as `usize`, for positive multi-indices.
    pub fn as_sizes(&self) -> Vec<usize> {
        self.0.iter().map(|&c| c.max(0) as usize).collect()
    }

    /// 1-based position of `self` in the lexicographic enumeration of `{1,…,m}`.
    pub fn lex_rank(&self, m: &MultiIndex) -> Result<usize> {
        m.n_of()?;
        if self.len() != m.len() {
            return domain(format!("length mismatch: {self} vs range {m}"));
        }
        let mut r: usize = 0;
        for (&i, &mk) in self.0.iter().zip(&m.0) {
            if i < 1 || i > mk {
                return domain(format!("{self} is outside the range 1..={m}"));
            }
            r = r * mk as usize + (i - 1) as usize;
        }
        Ok(r + 1)
    }

    /// Inverse of [`lex_rank`](Self::lex_rank).
    pub fn lex_unrank(r: usize, m: &MultiIndex) -> Result<MultiIndex> {
        let total = m.n_of()?;
        if r < 1 || r > total {
            return domain(format!("rank {r} outside 1..={total}"));
        }
        Ok(MultiIndex(
            unrank0(r - 1, &m.as_sizes()).into_iter().map(|c| c as i64 + 1).collect(),
        ))
    }

    pub fn concat(parts: &[MultiIndex]) -> Result<MultiIndex> {
        Self::new(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn split(&self, lengths: &[usize]) -> Result<Vec<MultiIndex>> {
        if lengths.iter().sum::<usize>() != self.len() || lengths.iter().any(|&l| l == 0) {
            return domain(format!("cannot split {self} into lengths {lengths:?}"));
        }
        let mut out = Vec::with_capacity(lengths.len());
        let mut at = 0;
        for &l in lengths {
            out.push(MultiIndex(self.0[at..at + l].to_vec()));
            at += l;
        }
        Ok(out)
    }

    /// Componentwise `i / n`, the sampling point of a diagonal sampling matrix.
    pub fn ratio(&self, n: &MultiIndex) -> Vec<f64> {
        self.0.iter().zip(&n.0).map(|(&i, &k)| i as f64 / k as f64).collect()
    }

    /// All multi-indices of `{1,…,m}` in lexicographic order.
    pub fn range(m: &MultiIndex) -> Result<impl Iterator<Item = MultiIndex>> {
        let total = m.n_of()?;
        let sizes = m.as_sizes();
        Ok((0..total).map(move |r| {
            MultiIndex(unrank0(r, &sizes).into_iter().map(|c| c as i64 + 1).collect())
        }))
    }
}

/// 0-based mixed-radix rank of a 0-based digit tuple.
pub(crate) fn rank0(digits: &[usize], sizes: &[usize]) -> usize {
    digits.iter().zip(sizes).fold(0, |acc, (&i, &m)| acc * m + i)
}

/// 0-based mixed-radix digits of `r`.
pub(crate) fn unrank0(mut r: usize, sizes: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        digits[k] = r % sizes[k];
        r /= sizes[k];
    }
    digits
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        if self.0.len() == 1 {
            write!(f, ",")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    /// Enumeration oracle: nested loops, last index fastest.
    fn enumerate(m: &[i64]) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &mk in m {
            let mut next = Vec::new();
            for prefix in &out {
                for i in 1..=mk {
                    let mut p = prefix.clone();
                    p.push(i);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn n_of_examples() {
        assert_eq!(mi(&[2, 3]).n_of().unwrap(), 6);
        assert_eq!(mi(&[1, 1, 1]).n_of().unwrap(), 1);
        assert_eq!(mi(&[4]).n_of().unwrap(), 4);
        assert!(mi(&[2, 0]).n_of().is_err());
        assert!(mi(&[1 << 16, 1 << 16]).n_of().is_err());
        assert!(MultiIndex::new(vec![]).is_err());
    }

    #[test]
    fn rank_examples() {
        let m = mi(&[2, 3]);
        assert_eq!(mi(&[1, 2]).lex_rank(&m).unwrap(), 2);
        assert_eq!(mi(&[2, 1]).lex_rank(&m).unwrap(), 4);
        assert_eq!(mi(&[1, 1]).lex_rank(&m).unwrap(), 1);
        assert_eq!(mi(&[2, 3]).lex_rank(&m).unwrap(), 6);
        assert!(mi(&[3, 1]).lex_rank(&m).is_err());
        assert!(mi(&[0, 1]).lex_rank(&m).is_err());
        assert!(mi(&[1]).lex_rank(&m).is_err());
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(MultiIndex::lex_unrank(4, &mi(&[2, 3])).unwrap(), mi(&[2, 1]));
        assert_eq!(MultiIndex::lex_unrank(1, &mi(&[4, 2, 5])).unwrap(), mi(&[1, 1, 1]));
        assert_eq!(MultiIndex::lex_unrank(6, &mi(&[3, 2])).unwrap(), mi(&[3, 2]));
        assert!(MultiIndex::lex_unrank(0, &mi(&[3, 2])).is_err());
        assert!(MultiIndex::lex_unrank(7, &mi(&[3, 2])).is_err());
    }

    #[test]
    fn concat_and_split() {
        let c = MultiIndex::concat(&[mi(&[1, 2]), mi(&[3])]).unwrap();
        assert_eq!(c, mi(&[1, 2, 3]));
        assert_eq!(c.split(&[2, 1]).unwrap(), vec![mi(&[1, 2]), mi(&[3])]);
        assert!(c.split(&[2, 2]).is_err());
        assert!(c.split(&[3, 0]).is_err());
    }

    #[test]
    fn rank_is_a_bijection_matching_enumeration() {
        // exhaustive for every range with N(m) <= 720 over a handful of shapes
        for m in [
            vec![720],
            vec![6, 120],
            vec![2, 3, 4, 5, 6],
            vec![3, 1, 4, 1, 5],
            vec![8, 9, 10],
            vec![1],
        ] {
            let range = mi(&m);
            let listed = enumerate(&m);
            assert_eq!(listed.len(), range.n_of().unwrap());
            for (pos, i) in listed.iter().enumerate() {
                let r = mi(i).lex_rank(&range).unwrap();
                assert_eq!(r, pos + 1);
                assert_eq!(MultiIndex::lex_unrank(r, &range).unwrap(), mi(i));
            }
            let via_range: Vec<_> = MultiIndex::range(&range).unwrap().collect();
            assert_eq!(via_range.len(), listed.len());
            assert!(via_range.iter().zip(&listed).all(|(a, b)| a.components() == &b[..]));
        }
    }

    #[test]
    fn mixed_radix_law() {
        let m = [3i64, 4, 2];
        for i in enumerate(&m) {
            let mut expected = 1i64;
            for k in 0..3 {
                let tail: i64 = m[k + 1..].iter().product();
                expected += (i[k] - 1) * tail;
            }
            assert_eq!(mi(&i).lex_rank(&mi(&m)).unwrap() as i64, expected);
        }
    }

    proptest! {
        #[test]
        fn concat_split_round_trip(v in prop::collection::vec(-5i64..9, 5), cut in 1usize..5) {
            let i = mi(&v);
            let parts = i.split(&[cut, 5 - cut]).unwrap();
            prop_assert_eq!(MultiIndex::concat(&parts).unwrap(), i);
        }

        #[test]
        fn concatenation_compatibility(m1 in prop::collection::vec(1i64..4, 1..3),
                                       m2 in prop::collection::vec(1i64..4, 1..3),
                                       seed in 0usize..1000) {
            let (r1, r2) = (mi(&m1), mi(&m2));
            let n1 = r1.n_of().unwrap();
            let n2 = r2.n_of().unwrap();
            let i1 = MultiIndex::lex_unrank(seed % n1 + 1, &r1).unwrap();
            let i2 = MultiIndex::lex_unrank(seed / n1 % n2 + 1, &r2).unwrap();
            let whole = MultiIndex::concat(&[r1.clone(), r2.clone()]).unwrap();
            let joint = MultiIndex::concat(&[i1.clone(), i2.clone()]).unwrap();
            prop_assert_eq!(
                joint.lex_rank(&whole).unwrap(),
                (i1.lex_rank(&r1).unwrap() - 1) * n2 + i2.lex_rank(&r2).unwrap()
            );
        }
    }
}
