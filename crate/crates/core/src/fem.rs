//! B-spline Galerkin matrices for `-Δu = g` on `[0,1]^d` with homogeneous
//! Dirichlet conditions.
//!
//! The basis of degree `p` on the uniform grid `{i/m}` uses the clamped knot
//! vector and drops the first and last B-spline, leaving the `m+p-2`
//! functions that vanish at 0 and 1. The normalized factors `(1/m)K` and
//! `m·M` have `m`-independent interior stencils; their symbols are `f_p` and
//! `h_p`.

use crate::asymptotics::{distribution_report, DistributionReport, MatrixFamily, Mode};
use crate::densela::{check_dims, ComplexMatrix};
use crate::error::{domain, Error, Result};
use crate::multiindex::MultiIndex;
use crate::symbols::{GltSymbol, Symbol, TrigPoly};

pub const MAX_DEGREE: usize = 4;

/// `k`-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_k(x) and P_k'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 0 { 1.0 } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[k - 1 - i] = x;
        weights[k - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// The `m+p-2` B-splines of degree `p` on `{i/m}` vanishing at 0 and 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BSplineBasis {
    p: usize,
    m: usize,
    knots: Vec<f64>,
}

impl BSplineBasis {
    pub fn new(p: usize, m: usize) -> Result<Self> {
        if p == 0 || p > MAX_DEGREE {
            return domain(format!("degree {p} outside 1..={MAX_DEGREE}"));
        }
        if m < p {
            return domain(format!("{m} subintervals for degree {p}"));
        }
        let mut knots = vec![0.0; p + 1];
        knots.extend((1..m).map(|i| i as f64 / m as f64));
        knots.extend(std::iter::repeat_n(1.0, p + 1));
        Ok(BSplineBasis { p, m, knots })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn subintervals(&self) -> usize {
        self.m
    }

    /// `m + p - 2`.
    pub fn dim(&self) -> usize {
        self.m + self.p - 2
    }

    /// Size of the untruncated basis, `m + p`.
    pub fn full_dim(&self) -> usize {
        self.m + self.p
    }

    // knot span containing x, with x = 1 in the last span
    fn span(&self, x: f64) -> usize {
        let k = ((x * self.m as f64).floor() as usize).min(self.m - 1);
        k + self.p
    }

    /// `N_{i,k}(x)` on the full basis, 0-based `i`, for `x` in span `span`.
    fn full(&self, i: usize, k: usize, x: f64, span: usize) -> f64 {
        let t = &self.knots;
        if k == 0 {
            return if i == span { 1.0 } else { 0.0 };
        }
        let mut v = 0.0;
        let d1 = t[i + k] - t[i];
        if d1 > 0.0 {
            v += (x - t[i]) / d1 * self.full(i, k - 1, x, span);
        }
        let d2 = t[i + k + 1] - t[i + 1];
        if d2 > 0.0 {
            v += (t[i + k + 1] - x) / d2 * self.full(i + 1, k - 1, x, span);
        }
        v
    }

    fn full_deriv(&self, i: usize, x: f64, span: usize) -> f64 {
        let (t, p) = (&self.knots, self.p);
        let mut v = 0.0;
        let d1 = t[i + p] - t[i];
        if d1 > 0.0 {
            v += p as f64 / d1 * self.full(i, p - 1, x, span);
        }
        let d2 = t[i + p + 1] - t[i + 1];
        if d2 > 0.0 {
            v -= p as f64 / d2 * self.full(i + 1, p - 1, x, span);
        }
        v
    }

    /// Every function of the untruncated basis at `x` (value or derivative).
    pub fn full_values(&self, x: f64, deriv: bool) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&x) {
            return domain(format!("x = {x} outside [0, 1]"));
        }
        let span = self.span(x);
        Ok((0..self.full_dim())
            .map(|i| {
                if i + self.p < span || i > span {
                    0.0
                } else if deriv {
                    self.full_deriv(i, x, span)
                } else {
                    self.full(i, self.p, x, span)
                }
            })
            .collect())
    }

    /// `B_{j+1,p,m}(x)` (or its derivative) for `1 ≤ j ≤ m+p-2`.
    pub fn eval(&self, j: usize, x: f64, deriv: bool) -> Result<f64> {
        if j == 0 || j > self.dim() {
            return domain(format!("basis index {j} outside 1..={}", self.dim()));
        }
        if !(0.0..=1.0).contains(&x) {
            return domain(format!("x = {x} outside [0, 1]"));
        }
        let span = self.span(x);
        let i = j; // 0-based index into the full basis
        if i + self.p < span || i > span {
            return Ok(0.0);
        }
        Ok(if deriv { self.full_deriv(i, x, span) } else { self.full(i, self.p, x, span) })
    }

    /// `[∫ φ_j φ_i]` with `φ = B` or `B'`, by `p+1`-point Gauss–Legendre on
    /// each knot span.
    fn gram(&self, deriv: bool) -> Result<ComplexMatrix> {
        let n = self.dim();
        check_dims(n, n)?;
        let (gx, gw) = gauss_legendre(self.p + 1);
        let h = 1.0 / self.m as f64;
        let mut out = vec![0.0; n * n];
        for k in 0..self.m {
            let span = k + self.p;
            for (&xi, &wi) in gx.iter().zip(&gw) {
                let x = (k as f64 + 0.5 * (xi + 1.0)) * h;
                let w = 0.5 * h * wi;
                // full-basis functions alive on this span: span-p..=span
                let vals: Vec<(usize, f64)> = (span - self.p..=span)
                    .filter(|&i| i >= 1 && i <= n)
                    .map(|i| {
                        let v = if deriv { self.full_deriv(i, x, span) } else { self.full(i, self.p, x, span) };
                        (i - 1, v)
                    })
                    .collect();
                for &(a, va) in &vals {
                    for &(b, vb) in &vals {
                        out[a * n + b] += w * va * vb;
                    }
                }
            }
        }
        let rows: Vec<&[f64]> = out.chunks(n).collect();
        ComplexMatrix::from_real_rows(&rows)
    }
}

fn checked_basis(m: usize, p: usize) -> Result<BSplineBasis> {
    if m < p + 1 {
        return domain(format!("need m >= p + 1, got m = {m}, p = {p}"));
    }
    BSplineBasis::new(p, m)
}

/// `K = [∫ B'_{j+1} B'_{i+1}]_{i,j=1}^{m+p-2}`.
pub fn stiffness(m: usize, p: usize) -> Result<ComplexMatrix> {
    checked_basis(m, p)?.gram(true)
}

/// `M = [∫ B_{j+1} B_{i+1}]_{i,j=1}^{m+p-2}`.
pub fn mass(m: usize, p: usize) -> Result<ComplexMatrix> {
    checked_basis(m, p)?.gram(false)
}

/// `(1/m) K`.
pub fn stiffness_normalized(m: usize, p: usize) -> Result<ComplexMatrix> {
    Ok(stiffness(m, p)?.scale(crate::Complex64::new(1.0 / m as f64, 0.0)))
}

/// `m M`.
pub fn mass_normalized(m: usize, p: usize) -> Result<ComplexMatrix> {
    Ok(mass(m, p)?.scale(crate::Complex64::new(m as f64, 0.0)))
}

// interior row of a banded symmetric matrix as trig coefficients
fn stencil_symbol(a: &ComplexMatrix, p: usize) -> Result<TrigPoly> {
    let mid = a.rows() / 2;
    // average the two sides so the coefficients are exactly even
    let coeffs: Vec<(Vec<i64>, f64)> = (-(p as i64)..=p as i64)
        .map(|k| {
            let (l, r) = ((mid as i64 - k) as usize, (mid as i64 + k) as usize);
            (vec![k], 0.5 * (a[(mid, l)].re + a[(mid, r)].re))
        })
        .collect();
    TrigPoly::scalar(1, &coeffs)
}

fn stencil_m(p: usize) -> usize {
    3 * (p + 1) + 2
}

/// `f_p`, read off the interior row of `(1/m) K`.
pub fn symbol_fp(p: usize) -> Result<TrigPoly> {
    stencil_symbol(&stiffness_normalized(stencil_m(p), p)?, p)
}

/// `h_p`, read off the interior row of `m M`.
pub fn symbol_hp(p: usize) -> Result<TrigPoly> {
    stencil_symbol(&mass_normalized(stencil_m(p), p)?, p)
}

/// `Σ_r M ⊗ ⋯ ⊗ K ⊗ ⋯ ⊗ M` with `K` in slot `r`. Normalized: the factors
/// are `(1/m_r) K` and `m_i M`.
pub fn poisson_matrix(ms: &[usize], ps: &[usize], normalized: bool) -> Result<ComplexMatrix> {
    if ms.is_empty() || ms.len() != ps.len() {
        return domain("need one degree per direction");
    }
    let total = ms.iter().zip(ps).try_fold(1usize, |acc, (&m, &p)| acc.checked_mul((m + p).saturating_sub(2)));
    match total {
        Some(t) => check_dims(t, t)?,
        None => return Err(Error::Resource("Poisson matrix size overflows".into())),
    }
    let (ks, mm): (Vec<ComplexMatrix>, Vec<ComplexMatrix>) = if normalized {
        (
            ms.iter().zip(ps).map(|(&m, &p)| stiffness_normalized(m, p)).collect::<Result<_>>()?,
            ms.iter().zip(ps).map(|(&m, &p)| mass_normalized(m, p)).collect::<Result<_>>()?,
        )
    } else {
        (
            ms.iter().zip(ps).map(|(&m, &p)| stiffness(m, p)).collect::<Result<_>>()?,
            ms.iter().zip(ps).map(|(&m, &p)| mass(m, p)).collect::<Result<_>>()?,
        )
    };
    let d = ms.len();
    let mut out: Option<ComplexMatrix> = None;
    for r in 0..d {
        let factors: Vec<ComplexMatrix> = (0..d).map(|i| if i == r { ks[i].clone() } else { mm[i].clone() }).collect();
        let term = ComplexMatrix::kron_all(&factors)?;
        out = Some(match out {
            Some(acc) => acc.add(&term)?,
            None => term,
        });
    }
    Ok(out.expect("d >= 1"))
}

/// `Σ_r h_{p_1} ⊗ ⋯ ⊗ f_{p_r} ⊗ ⋯ ⊗ h_{p_d}`.
pub fn poisson_symbol(ps: &[usize]) -> Result<GltSymbol> {
    if ps.is_empty() {
        return domain("need at least one direction");
    }
    let fs = ps.iter().map(|&p| symbol_fp(p)).collect::<Result<Vec<_>>>()?;
    let hs = ps.iter().map(|&p| symbol_hp(p)).collect::<Result<Vec<_>>>()?;
    let d = ps.len();
    let mut sum = TrigPoly::zero(d, 1, 1);
    for r in 0..d {
        let pick = |i: usize| if i == r { &fs[i] } else { &hs[i] };
        let term = (1..d).try_fold(pick(0).clone(), |acc, i| acc.tensor(pick(i)))?;
        sum = sum.add(&term)?;
    }
    Ok(GltSymbol::from_trig(sum))
}

/// The normalized Poisson family over isotropic `m`. Level `r` of the
/// scheduled size is the factor dimension `m + p_r - 2`.
pub fn poisson_family(ps: &[usize], schedule: &[usize]) -> Result<MatrixFamily> {
    let sched = schedule
        .iter()
        .map(|&m| {
            if m < ps.iter().max().copied().unwrap_or(1) + 1 {
                return domain(format!("m = {m} too small for degrees {ps:?}"));
            }
            MultiIndex::positive(ps.iter().map(|&p| (m + p - 2) as i64).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let ps = ps.to_vec();
    MatrixFamily::new(sched, 1, 1, move |n| {
        let ms: Vec<usize> = n.as_sizes().iter().zip(&ps).map(|(&nr, &p)| nr + 2 - p).collect();
        poisson_matrix(&ms, &ps, true)
    })
}

#[derive(Clone, Debug)]
pub struct PoissonReport {
    pub sv: DistributionReport,
    pub eig: DistributionReport,
}

impl PoissonReport {
    pub fn pass(&self) -> bool {
        self.sv.pass && self.eig.pass
    }
}

/// Singular value and eigenvalue distributions of the normalized family
/// against [`poisson_symbol`].
pub fn verify_poisson(ps: &[usize], schedule: &[usize], tol: f64) -> Result<PoissonReport> {
    let fam = poisson_family(ps, schedule)?;
    let symbol = Symbol::Glt(poisson_symbol(ps)?);
    let sv = distribution_report(&fam, &symbol, None, Mode::Sv, tol)?;
    let eig = distribution_report(&fam, &symbol, None, Mode::Eig, tol)?;
    Ok(PoissonReport { sv, eig })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::Complex64;
    use std::f64::consts::PI;

    fn tridiag(n: usize, off: f64, diag: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            let v = if i == j {
                diag
            } else if i.abs_diff(j) == 1 {
                off
            } else {
                0.0
            };
            Complex64::new(v, 0.0)
        })
    }

    #[test]
    fn gauss_legendre_is_exact() {
        for k in 1..=6 {
            let (x, w) = gauss_legendre(k);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..2 * k {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                assert!((q - exact).abs() < 1e-14, "k = {k}, degree {deg}");
            }
        }
    }

    #[test]
    fn basis_examples() {
        let b = BSplineBasis::new(1, 4).unwrap();
        assert_eq!(b.dim(), 3);
        assert!((b.eval(1, 0.25, false).unwrap() - 1.0).abs() < 1e-15);
        assert!((b.eval(1, 0.1, true).unwrap() - 4.0).abs() < 1e-12);
        assert!((b.eval(1, 0.4, true).unwrap() + 4.0).abs() < 1e-12);
        assert!(b.eval(0, 0.5, false).is_err());
        assert!(b.eval(4, 0.5, false).is_err());
        assert!(b.eval(1, 1.5, false).is_err());
        let mut r = SplitMix64::new(91);
        for p in 1..=4 {
            let b = BSplineBasis::new(p, 7).unwrap();
            assert_eq!(b.eval(1, 0.0, false).unwrap(), 0.0);
            assert_eq!(b.eval(b.dim(), 1.0, false).unwrap(), 0.0);
            for _ in 0..20 {
                let x = r.next_f64();
                let v = b.full_values(x, false).unwrap();
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
                assert!(v.iter().all(|&y| y >= -1e-15));
                let dv = b.full_values(x, true).unwrap();
                assert!(dv.iter().sum::<f64>().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences_and_is_continuous() {
        let mut r = SplitMix64::new(92);
        for p in 1..=4 {
            let b = BSplineBasis::new(p, 6).unwrap();
            for j in 1..=b.dim() {
                for _ in 0..5 {
                    let x = r.uniform(0.01, 0.99);
                    let h = 1e-6;
                    let fd = (b.eval(j, x + h, false).unwrap() - b.eval(j, x - h, false).unwrap()) / (2.0 * h);
                    // skip points straddling a knot for p = 1
                    if p == 1 && ((x - h) * 6.0).floor() != ((x + h) * 6.0).floor() {
                        continue;
                    }
                    assert!((fd - b.eval(j, x, true).unwrap()).abs() < 1e-5);
                }
                // C^{p-1}: values continuous across interior knots
                for k in 1..6 {
                    let t = k as f64 / 6.0;
                    let (lo, hi) = (b.eval(j, t - 1e-12, false).unwrap(), b.eval(j, t, false).unwrap());
                    assert!((lo - hi).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn linear_stencils() {
        let k = stiffness_normalized(5, 1).unwrap();
        let m = mass_normalized(5, 1).unwrap();
        assert!(k.max_abs_diff(&tridiag(4, -1.0, 2.0)) < 1e-12);
        assert!(m.max_abs_diff(&tridiag(4, 1.0 / 6.0, 2.0 / 3.0)) < 1e-12);
        assert!(stiffness(1, 1).is_err());
    }

    #[test]
    fn quadratic_matrices() {
        let (k, m) = (stiffness(8, 2).unwrap(), mass(8, 2).unwrap());
        for a in [&k, &m] {
            assert!(a.is_hermitian() && a.is_real());
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    if i.abs_diff(j) > 2 {
                        assert_eq!(a[(i, j)], Complex64::new(0.0, 0.0));
                    }
                }
            }
            assert!(a.eigh().unwrap()[0] > 0.0);
        }
    }

    #[test]
    fn stencils_are_m_independent() {
        for p in 1..=4 {
            for (m1, m2) in [(3 * (p + 1) + 2, 3 * (p + 1) + 7)] {
                let (a, b) = (stiffness_normalized(m1, p).unwrap(), stiffness_normalized(m2, p).unwrap());
                let (ma, mb) = (mass_normalized(m1, p).unwrap(), mass_normalized(m2, p).unwrap());
                let (ia, ib) = (a.rows() / 2, b.rows() / 2);
                for k in -(p as i64)..=p as i64 {
                    let (ja, jb) = ((ia as i64 + k) as usize, (ib as i64 + k) as usize);
                    assert!((a[(ia, ja)] - b[(ib, jb)]).norm() < 1e-12);
                    assert!((ma[(ia, ja)] - mb[(ib, jb)]).norm() < 1e-12);
                }
                // constant along diagonals across the interior
                for i in p + 1..a.rows() - p - 1 {
                    assert!((a[(i, i)] - a[(ia, ia)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn symbols_fp_hp() {
        let f1 = symbol_fp(1).unwrap();
        let h1 = symbol_hp(1).unwrap();
        for th in [0.0f64, 0.7, PI] {
            assert!((f1.eval_scalar(&[th]).unwrap().re - (2.0 - 2.0 * th.cos())).abs() < 1e-12);
            assert!((h1.eval_scalar(&[th]).unwrap().re - (2.0 / 3.0 + th.cos() / 3.0)).abs() < 1e-12);
        }
        // quadratic closed forms
        let f2 = symbol_fp(2).unwrap();
        let h2 = symbol_hp(2).unwrap();
        for th in [0.3f64, 1.9, -2.5] {
            let f = 1.0 - 2.0 / 3.0 * th.cos() - (2.0 * th).cos() / 3.0;
            let h = (33.0 + 26.0 * th.cos() + (2.0 * th).cos()) / 60.0;
            assert!((f2.eval_scalar(&[th]).unwrap().re - f).abs() < 1e-12);
            assert!((h2.eval_scalar(&[th]).unwrap().re - h).abs() < 1e-12);
        }
        for p in 1..=4 {
            let (f, h) = (symbol_fp(p).unwrap(), symbol_hp(p).unwrap());
            assert!(f.eval_scalar(&[0.0]).unwrap().norm() < 1e-12);
            assert!((h.eval_scalar(&[0.0]).unwrap().re - 1.0).abs() < 1e-12);
            assert!(f.is_hermitian_symmetric() && h.is_hermitian_symmetric());
            for th in [0.4, 2.2] {
                let (a, b) = (f.eval_scalar(&[th]).unwrap(), f.eval_scalar(&[-th]).unwrap());
                assert!((a - b).norm() < 1e-14 && a.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn poisson_examples() {
        let a = poisson_matrix(&[2, 2], &[1, 1], true).unwrap();
        assert_eq!(a.shape(), (1, 1));
        assert!((a[(0, 0)].re - 8.0 / 3.0).abs() < 1e-12);
        assert!(poisson_matrix(&[6], &[2], true).unwrap().max_abs_diff(&stiffness_normalized(6, 2).unwrap()) < 1e-15);
        let (n, u) = (poisson_matrix(&[5, 5], &[1, 1], true).unwrap(), poisson_matrix(&[5, 5], &[1, 1], false).unwrap());
        assert!(n.max_abs_diff(&u) < 1e-12);
        let (n, u) = (poisson_matrix(&[4, 4, 4], &[1, 2, 1], true).unwrap(), poisson_matrix(&[4, 4, 4], &[1, 2, 1], false).unwrap());
        assert!(n.max_abs_diff(&u.scale(Complex64::new(4.0, 0.0))) < 1e-12);
    }

    #[test]
    fn poisson_matches_closed_form_and_slot_loop() {
        let m = 7;
        let (k, mm) = (tridiag(m - 1, -1.0, 2.0), tridiag(m - 1, 1.0 / 6.0, 2.0 / 3.0));
        let oracle = k.kron(&mm).unwrap().add(&mm.kron(&k).unwrap()).unwrap();
        let a = poisson_matrix(&[m, m], &[1, 1], true).unwrap();
        assert!(a.max_abs_diff(&oracle) < 1e-12);
        assert!(a.is_hermitian() && a.eigh().unwrap()[0] > 0.0);
        // independent slot loop, anisotropic
        let (ms, ps) = ([5, 6], [2, 1]);
        let mut acc = ComplexMatrix::zeros(5 * 5, 5 * 5);
        for r in 0..2 {
            let mut term = ComplexMatrix::identity(1);
            for i in 0..2 {
                let f = if i == r { stiffness(ms[i], ps[i]).unwrap() } else { mass(ms[i], ps[i]).unwrap() };
                term = term.kron(&f).unwrap();
            }
            acc = acc.add(&term).unwrap();
        }
        assert_eq!(poisson_matrix(&ms, &ps, false).unwrap(), acc);
    }

    #[test]
    fn poisson_symbol_examples() {
        let s1 = poisson_symbol(&[1]).unwrap();
        assert!((s1.eval(&[0.5], &[PI]).unwrap()[(0, 0)].re - 4.0).abs() < 1e-12);
        let s2 = poisson_symbol(&[1, 1]).unwrap();
        assert!((s2.eval(&[0.5, 0.5], &[PI, PI]).unwrap()[(0, 0)].re - 8.0 / 3.0).abs() < 1e-12);
        for ps in [vec![1, 1], vec![2, 3], vec![4, 1, 2]] {
            let s = poisson_symbol(&ps).unwrap();
            let d = ps.len();
            assert!(s.eval(&vec![0.5; d], &vec![0.0; d]).unwrap()[(0, 0)].norm() < 1e-12);
            assert!(s.is_hermitian());
        }
    }

    #[test]
    fn verify_small() {
        let rep = verify_poisson(&[2], &[32, 64, 128], 0.05).unwrap();
        assert!(rep.pass(), "{:?} {:?}", rep.sv.deltas, rep.eig.deltas);
        let rep = verify_poisson(&[2, 1], &[6, 10], 0.2).unwrap();
        assert!(rep.eig.last_delta() <= rep.eig.first_delta());
    }
}
