//! Hermitian eigenvalue kernels and singular values.

use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Field operations shared by the real and complex code paths.
trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + SubAssign
    + PartialEq
    + Send
    + Sync
{
    const ZERO: Self;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn real(x: f64) -> Self;
    fn scale(self, x: f64) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn conj(self) -> Self {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn real(x: f64) -> Self {
        x
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
}

/// Reduces the Hermitian `n×n` row-major matrix `a` to real symmetric
/// tridiagonal form `(diag, offdiag)` by Householder reflections. The
/// off-diagonal moduli are kept, which is a diagonal unitary similarity.
fn tridiagonalize<S: Scalar>(mut a: Vec<S>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![S::ZERO; n];
    let mut w = vec![S::ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let alpha2: f64 = (lo..n).map(|i| a[i * n + k].norm_sqr()).sum();
        let x0 = a[lo * n + k];
        let Some((phase, vnorm, alpha)) = reflector(alpha2, x0) else {
            e[k] = x0.abs();
            continue;
        };
        // v = x + phase·α·e1, normalised; H = I - 2vv* maps x to -phase·α·e1
        for i in lo..n {
            v[i] = a[i * n + k].scale(1.0 / vnorm);
        }
        v[lo] = (x0 + phase.scale(alpha)).scale(1.0 / vnorm);
        e[k] = alpha;

        // w = S v on the trailing block, c = v* w
        for i in lo..n {
            let row = &a[i * n + lo..i * n + n];
            let mut acc = S::ZERO;
            for (aij, &vj) in row.iter().zip(&v[lo..n]) {
                acc += *aij * vj;
            }
            w[i] = acc;
        }
        let mut c = S::ZERO;
        for i in lo..n {
            c += v[i].conj() * w[i];
        }
        // q = w - c v ; S -= 2(v q* + q v*)
        for i in lo..n {
            w[i] -= c * v[i];
        }
        for i in lo..n {
            let (vi2, qi2) = (v[i].scale(2.0), w[i].scale(2.0));
            let row = &mut a[i * n + lo..i * n + n];
            for (j, aij) in row.iter_mut().enumerate() {
                let j = j + lo;
                *aij -= vi2 * w[j].conj() + qi2 * v[j].conj();
            }
        }
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + (n - 2)].abs();
    }
    let d = (0..n).map(|i| a[i * n + i].re()).collect();
    (d, e)
}

/// Eigenvalues of the symmetric tridiagonal matrix by implicit QL with
/// Wilkinson-type shifts.
fn tridiagonal_ql(mut d: Vec<f64>, offdiag: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = offdiag;
    e.push(0.0);
    // absolute deflation floor: clusters of noise-level entries otherwise
    // never satisfy the relative test
    let norm = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::NoConvergence(format!("QL iteration stalled at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

pub(super) fn eigh_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = a.rows;
    let (d, e) = match a.real_data() {
        Some(real) => tridiagonalize(real, n),
        None => tridiagonalize(a.data.clone(), n),
    };
    tridiagonal_ql(d, e)
}

/// Eigen-decomposition from [`ComplexMatrix::eigh_jacobi`].
#[derive(Clone, Debug)]
pub struct EighJacobi {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unit eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 40;
const JACOBI_REL_TOL: f64 = 1e-13;

pub(super) fn eigh_jacobi(a: &ComplexMatrix) -> Result<EighJacobi> {
    let n = a.rows;
    let mut m = a.data.clone();
    // symmetrise exactly so rounding in the input cannot leak in
    for i in 0..n {
        m[i * n + i] = Complex64::new(m[i * n + i].re, 0.0);
        for j in i + 1..n {
            let avg = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            m[i * n + j] = avg;
            m[j * n + i] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius();
    let off = |m: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while total > 0.0 && off(&m) >= JACOBI_REL_TOL * total {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let ph = apq / r; // e^{iφ}
                let (app, aqq) = (m[p * n + p].re, m[q * n + q].re);
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // W = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on coordinates (p, q)
                let phc = ph.conj();
                for k in 0..n {
                    let (xp, xq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = xp * c - xq * phc * s;
                    m[k * n + q] = xp * s + xq * phc * c;
                }
                for k in 0..n {
                    let (yp, yq) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = yp * c - yq * ph * s;
                    m[q * n + k] = yp * s + yq * ph * c;
                }
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                m[p * n + p].im = 0.0;
                m[q * n + q].im = 0.0;
                for k in 0..n {
                    let (xp, xq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = xp * c - xq * phc * s;
                    v[(k, q)] = xp * s + xq * phc * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EighJacobi { values, vectors })
}

/// Householder bidiagonalization of the tall `rows×cols` row-major matrix
/// `a` (`rows >= cols`). Returns the moduli of the diagonal and the
/// superdiagonal.
fn bidiagonalize<S: Scalar>(mut a: Vec<S>, rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (rows, cols);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![S::ZERO; m.max(n)];
    let mut u = vec![S::ZERO; n];
    for k in 0..n {
        // left reflector: zero a[k+1.., k]
        let alpha2: f64 = (k..m).map(|i| a[i * n + k].norm_sqr()).sum();
        let x0 = a[k * n + k];
        if let Some((phase, vnorm, alpha)) = reflector(alpha2, x0) {
            for i in k..m {
                v[i] = a[i * n + k].scale(1.0 / vnorm);
            }
            v[k] = (x0 + phase.scale(alpha)).scale(1.0 / vnorm);
            for x in u[k..n].iter_mut() {
                *x = S::ZERO;
            }
            for i in k..m {
                let vi = v[i].conj();
                for (uj, &aij) in u[k..n].iter_mut().zip(&a[i * n + k..i * n + n]) {
                    *uj += vi * aij;
                }
            }
            for i in k..m {
                let vi2 = v[i].scale(2.0);
                for (aij, &uj) in a[i * n + k..i * n + n].iter_mut().zip(&u[k..n]) {
                    *aij -= vi2 * uj;
                }
            }
            d[k] = alpha;
        } else {
            d[k] = x0.abs();
        }
        if k + 1 >= n {
            continue;
        }
        // right reflector: zero a[k, k+2..]
        let lo = k + 1;
        let alpha2: f64 = (lo..n).map(|j| a[k * n + j].norm_sqr()).sum();
        let y0 = a[k * n + lo].conj();
        if let Some((phase, wnorm, alpha)) = reflector(alpha2, y0) {
            for j in lo..n {
                v[j] = a[k * n + j].conj().scale(1.0 / wnorm);
            }
            v[lo] = (y0 + phase.scale(alpha)).scale(1.0 / wnorm);
            for i in k..m {
                let row = &mut a[i * n + lo..i * n + n];
                let mut s = S::ZERO;
                for (&aij, &wj) in row.iter().zip(&v[lo..n]) {
                    s += aij * wj;
                }
                let s2 = s.scale(2.0);
                for (aij, &wj) in row.iter_mut().zip(&v[lo..n]) {
                    *aij -= s2 * wj.conj();
                }
            }
            e[k] = alpha;
        } else {
            e[k] = y0.abs();
        }
    }
    (d, e)
}

/// Householder data `(phase, ‖x + phase·α·e1‖, α)` for a vector with squared
/// norm `alpha2` and leading entry `x0`; `None` when nothing needs zeroing.
fn reflector<S: Scalar>(alpha2: f64, x0: S) -> Option<(S, f64, f64)> {
    let tail2 = alpha2 - x0.norm_sqr();
    if alpha2 == 0.0 || tail2 <= f64::MIN_POSITIVE * 4.0 {
        return None;
    }
    let alpha = alpha2.sqrt();
    let x0abs = x0.abs();
    let phase = if x0abs == 0.0 { S::real(1.0) } else { x0.scale(1.0 / x0abs) };
    Some((phase, (2.0 * alpha * (alpha + x0abs)).sqrt(), alpha))
}

/// Singular values of a bidiagonal matrix as the nonnegative eigenvalues of
/// its Golub–Kahan tridiagonal form `[[0, B], [B*, 0]]` (zero diagonal,
/// off-diagonal `d1, e1, d2, …, dn`).
fn bidiagonal_sv(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut off = Vec::with_capacity(2 * n);
    for k in 0..n {
        off.push(d[k]);
        if k + 1 < n {
            off.push(e[k]);
        }
    }
    let eig = tridiagonal_ql(vec![0.0; 2 * n], off)?;
    Ok(eig[n..].iter().rev().map(|&x| x.max(0.0)).collect())
}

fn tall_sv<S: Scalar>(data: Vec<S>, rows: usize, cols: usize) -> Result<Vec<f64>> {
    let (d, e) = bidiagonalize(data, rows, cols);
    bidiagonal_sv(&d, &e)
}

pub(super) fn svd_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows == 0 || a.cols == 0 {
        return Vec::new();
    }
    let result = if a.is_square() && a.is_hermitian() {
        // σ = |λ| for Hermitian input
        eigh_values(a).map(|ev| {
            let mut sv: Vec<f64> = ev.into_iter().map(f64::abs).collect();
            sv.sort_by(|x, y| y.total_cmp(x));
            sv
        })
    } else {
        let t = if a.rows >= a.cols { a.clone() } else { a.adjoint() };
        match t.real_data() {
            Some(real) => tall_sv(real, t.rows, t.cols),
            None => tall_sv(t.data, t.rows, t.cols),
        }
    };
    // QL on a symmetric tridiagonal matrix converges in practice; the
    // Jacobi kernel on the Gram matrix is the fallback.
    result.unwrap_or_else(|_| {
        let g = if a.rows >= a.cols { a.adjoint().matmul(a) } else { a.matmul(&a.adjoint()) };
        let mut ev = eigh_jacobi(&g.expect("gram shape")).expect("Jacobi on Gram matrix").values;
        ev.reverse();
        ev.into_iter().map(|l| l.max(0.0).sqrt()).collect()
    })
}
