//! The functional side: trigonometric polynomials with matrix coefficients,
//! scalar coefficient functions and separable GLT symbols
//! `κ(x,θ) = Σ_i a_i(x) f_i(θ)`.
//!
//! A measurable symbol has no canonical finite representation; this crate
//! represents exactly the finite separable sums and reaches anything else
//! only as a limit of such sums.

mod expr;

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densela::ComplexMatrix;
use crate::error::{domain, Error, Result};

pub use expr::{parse_expr, CoeffBody, CoeffFn, Expr, Func};

/// `f(θ) = Σ_k f_k e^{i k·θ}` with `s×t` blocks `f_k`, `k ∈ Z^levels`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    levels: usize,
    s: usize,
    t: usize,
    coeffs: BTreeMap<Vec<i64>, ComplexMatrix>,
}

impl TrigPoly {
    /// The zero polynomial.
    pub fn zero(levels: usize, s: usize, t: usize) -> Self {
        TrigPoly { levels, s, t, coeffs: BTreeMap::new() }
    }

    /// The constant `block`.
    pub fn constant(levels: usize, block: ComplexMatrix) -> Self {
        let (s, t) = block.shape();
        let mut p = Self::zero(levels, s, t);
        p.coeffs.insert(vec![0; levels], block);
        p
    }

    /// The scalar constant 1.
    pub fn one(levels: usize) -> Self {
        Self::constant(levels, ComplexMatrix::identity(1))
    }

    /// Scalar polynomial from real coefficients.
    pub fn scalar(levels: usize, coeffs: &[(Vec<i64>, f64)]) -> Result<Self> {
        let mut p = Self::zero(levels, 1, 1);
        for (k, c) in coeffs {
            p.add_coeff(k.clone(), ComplexMatrix::scalar(Complex64::new(*c, 0.0)))?;
        }
        Ok(p)
    }

    /// `e^{i k·θ}`.
    pub fn monomial(k: Vec<i64>) -> Self {
        let levels = k.len();
        let mut p = Self::zero(levels, 1, 1);
        p.coeffs.insert(k, ComplexMatrix::identity(1));
        p
    }

    /// `2 - 2cos θ` on one level.
    pub fn laplacian() -> Self {
        Self::scalar(1, &[(vec![0], 2.0), (vec![1], -1.0), (vec![-1], -1.0)]).unwrap()
    }

    /// Adds `block` to the coefficient at `k`.
    pub fn add_coeff(&mut self, k: Vec<i64>, block: ComplexMatrix) -> Result<()> {
        if k.len() != self.levels {
            return domain(format!("frequency {k:?} for a {}-level polynomial", self.levels));
        }
        if block.shape() != (self.s, self.t) {
            return domain(format!(
                "{}x{} block for a {}x{} polynomial",
                block.rows(),
                block.cols(),
                self.s,
                self.t
            ));
        }
        match self.coeffs.get_mut(&k) {
            Some(existing) => *existing = existing.add(&block)?,
            None => {
                self.coeffs.insert(k, block);
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn block_dims(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    /// The stored `(k, f_k)` pairs in lexicographic order of `k`.
    pub fn support(&self) -> impl Iterator<Item = (&Vec<i64>, &ComplexMatrix)> {
        self.coeffs.iter()
    }

    /// `f_k`, or `None` outside the stored support.
    pub fn coeff(&self, k: &[i64]) -> Option<&ComplexMatrix> {
        self.coeffs.get(k)
    }

    /// `f_k`, the zero block outside the stored support.
    pub fn coeff_or_zero(&self, k: &[i64]) -> ComplexMatrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ComplexMatrix::zeros(self.s, self.t))
    }

    /// Levels along which some stored frequency is nonzero (0-based).
    pub fn active_levels(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (k, c) in &self.coeffs {
            if c.max_abs() == 0.0 {
                continue;
            }
            for (l, &kl) in k.iter().enumerate() {
                if kl != 0 {
                    out.insert(l);
                }
            }
        }
        out
    }

    /// `f(θ)`.
    pub fn eval(&self, theta: &[f64]) -> Result<ComplexMatrix> {
        if theta.len() != self.levels {
            return domain(format!("point of dimension {} for {} levels", theta.len(), self.levels));
        }
        let mut out = ComplexMatrix::zeros(self.s, self.t);
        for (k, c) in &self.coeffs {
            let phase: f64 = k.iter().zip(theta).map(|(&kl, &th)| kl as f64 * th).sum();
            let e = Complex64::from_polar(1.0, phase);
            out = out.add(&c.scale(e))?;
        }
        Ok(out)
    }

    /// Scalar value of a `1×1` polynomial.
    pub fn eval_scalar(&self, theta: &[f64]) -> Result<Complex64> {
        if (self.s, self.t) != (1, 1) {
            return domain("eval_scalar on a block polynomial");
        }
        Ok(self.eval(theta)?[(0, 0)])
    }

    /// `(f_1 ⊗ f_2)(θ_1, θ_2) = f_1(θ_1) ⊗ f_2(θ_2)`, with coefficients
    /// `(f_1 ⊗ f_2)_{(k_1,k_2)} = (f_1)_{k_1} ⊗ (f_2)_{k_2}`.
    pub fn tensor(&self, other: &TrigPoly) -> Result<TrigPoly> {
        let mut out = TrigPoly::zero(self.levels + other.levels, self.s * other.s, self.t * other.t);
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &other.coeffs {
                let k: Vec<i64> = k1.iter().chain(k2).copied().collect();
                out.add_coeff(k, c1.kron(c2)?)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if (self.levels, self.s, self.t) != (other.levels, other.s, other.t) {
            return domain("adding trigonometric polynomials of different shapes");
        }
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_coeff(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, alpha: Complex64) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c.scale(alpha))).collect(),
            ..*self
        }
    }

    /// Pointwise block product `f(θ)g(θ)`: coefficients convolve.
    pub fn mul(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if self.levels != other.levels || self.t != other.s {
            return domain(format!(
                "cannot multiply {}x{} by {}x{} polynomials on {} and {} levels",
                self.s, self.t, other.s, other.t, self.levels, other.levels
            ));
        }
        let mut out = TrigPoly::zero(self.levels, self.s, other.t);
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &other.coeffs {
                let k: Vec<i64> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out.add_coeff(k, c1.matmul(c2)?)?;
            }
        }
        Ok(out)
    }

    /// `f_{-k} = (f_k)*` for every `k`, which makes `f(θ)` Hermitian.
    pub fn is_hermitian_symmetric(&self) -> bool {
        if self.s != self.t {
            return false;
        }
        let zero = ComplexMatrix::zeros(self.s, self.t);
        self.coeffs.iter().all(|(k, c)| {
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            let other = self.coeffs.get(&neg).unwrap_or(&zero);
            let tol = 1e-14 * c.max_abs().max(other.max_abs());
            c.max_abs_diff(&other.adjoint()) <= tol
        })
    }

    /// Largest `|k_l|` over the support, per level.
    pub fn bandwidth(&self) -> Vec<i64> {
        let mut bw = vec![0; self.levels];
        for k in self.coeffs.keys() {
            for (b, &kl) in bw.iter_mut().zip(k) {
                *b = (*b).max(kl.abs());
            }
        }
        bw
    }
}

/// JSON form `{ "levels": d, "s": s, "t": t, "coeffs": [ { "k": [..], "re": [[..]], "im": [[..]] } ] }`.
/// `im` may be omitted for real blocks.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPolyJson {
    pub levels: usize,
    pub s: usize,
    pub t: usize,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffJson {
    pub k: Vec<i64>,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl TryFrom<TrigPolyJson> for TrigPoly {
    type Error = Error;

    fn try_from(j: TrigPolyJson) -> Result<TrigPoly> {
        if j.levels == 0 || j.s == 0 || j.t == 0 {
            return domain("trigonometric polynomial needs positive levels and block sizes");
        }
        let mut p = TrigPoly::zero(j.levels, j.s, j.t);
        for c in j.coeffs {
            let im = c.im.unwrap_or_else(|| vec![vec![0.0; j.t]; j.s]);
            let shape_ok = c.re.len() == j.s
                && im.len() == j.s
                && c.re.iter().chain(&im).all(|row| row.len() == j.t);
            if !shape_ok {
                return domain(format!("coefficient at {:?} is not {}x{}", c.k, j.s, j.t));
            }
            let block = ComplexMatrix::from_fn(j.s, j.t, |a, b| Complex64::new(c.re[a][b], im[a][b]));
            p.add_coeff(c.k, block)?;
        }
        Ok(p)
    }
}

impl From<&TrigPoly> for TrigPolyJson {
    fn from(p: &TrigPoly) -> Self {
        let coeffs = p
            .coeffs
            .iter()
            .map(|(k, c)| {
                let grid = |f: &dyn Fn(Complex64) -> f64| -> Vec<Vec<f64>> {
                    (0..p.s).map(|a| (0..p.t).map(|b| f(c[(a, b)])).collect()).collect()
                };
                CoeffJson {
                    k: k.clone(),
                    re: grid(&|z| z.re),
                    im: (!c.is_real()).then(|| grid(&|z| z.im)),
                }
            })
            .collect();
        TrigPolyJson { levels: p.levels, s: p.s, t: p.t, coeffs }
    }
}

impl TrigPoly {
    pub fn from_json(text: &str) -> Result<Self> {
        let j: TrigPolyJson =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid polynomial JSON: {e}")))?;
        j.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TrigPolyJson::from(self)).expect("serializable")
    }
}

/// `(2π)^{-d} ∫_{[-π,π]^d} g(θ) e^{-i k·θ} dθ` by the `nodes`-point
/// periodic trapezoid rule per dimension (`θ_j = -π + 2πj/nodes`). Exact for
/// trigonometric polynomials of bandwidth `< nodes/2`.
pub fn fourier_coeff_numeric(
    g: &dyn Fn(&[f64]) -> ComplexMatrix,
    k: &[i64],
    nodes: usize,
) -> Result<ComplexMatrix> {
    if nodes < 2 {
        return domain("need at least two quadrature nodes per dimension");
    }
    let d = k.len();
    let total = nodes
        .checked_pow(d as u32)
        .filter(|&t| t <= 1 << 26)
        .ok_or_else(|| Error::Resource(format!("{nodes}^{d} quadrature nodes")))?;
    let h = 2.0 * std::f64::consts::PI / nodes as f64;
    let mut acc: Option<ComplexMatrix> = None;
    let mut theta = vec![0.0; d];
    for r in 0..total {
        let mut rem = r;
        for l in (0..d).rev() {
            theta[l] = -std::f64::consts::PI + h * (rem % nodes) as f64;
            rem /= nodes;
        }
        let phase: f64 = k.iter().zip(&theta).map(|(&kl, &th)| kl as f64 * th).sum();
        let term = g(&theta).scale(Complex64::from_polar(1.0, -phase));
        acc = Some(match acc {
            Some(a) => a.add(&term)?,
            None => term,
        });
    }
    Ok(acc.expect("at least one node").scale(Complex64::new(1.0 / total as f64, 0.0)))
}

/// A separable GLT symbol `κ(x,θ) = Σ_i a_i(x) f_i(θ)` with scalar `a_i` on
/// `[0,1]^d` and `s×t` trigonometric polynomials `f_i` on `[-π,π]^d`.
/// Terms keep their insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct GltSymbol {
    levels: usize,
    s: usize,
    t: usize,
    terms: Vec<(CoeffFn, TrigPoly)>,
}

impl GltSymbol {
    /// The zero symbol (no terms).
    pub fn zero(levels: usize, s: usize, t: usize) -> Self {
        GltSymbol { levels, s, t, terms: Vec::new() }
    }

    pub fn term(a: CoeffFn, f: TrigPoly) -> Result<Self> {
        let (s, t) = f.block_dims();
        let mut k = Self::zero(f.levels(), s, t);
        k.push_term(a, f)?;
        Ok(k)
    }

    /// `κ(x,θ) = f(θ)`.
    pub fn from_trig(f: TrigPoly) -> Self {
        let levels = f.levels();
        Self::term(CoeffFn::one(levels), f).expect("matching levels")
    }

    /// `κ(x,θ) = a(x) I_s`.
    pub fn from_coeff(a: CoeffFn, s: usize) -> Self {
        let levels = a.levels();
        Self::term(a, TrigPoly::constant(levels, ComplexMatrix::identity(s))).expect("matching levels")
    }

    pub fn push_term(&mut self, a: CoeffFn, f: TrigPoly) -> Result<()> {
        if a.levels() != self.levels || f.levels() != self.levels {
            return domain(format!(
                "term on {} / {} levels for a {}-level symbol",
                a.levels(),
                f.levels(),
                self.levels
            ));
        }
        if f.block_dims() != (self.s, self.t) {
            return domain("term block size differs from the symbol's");
        }
        self.terms.push((a, f));
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn block_dims(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    pub fn terms(&self) -> &[(CoeffFn, TrigPoly)] {
        &self.terms
    }

    /// `κ(x,θ)`.
    pub fn eval(&self, x: &[f64], theta: &[f64]) -> Result<ComplexMatrix> {
        if x.len() != self.levels || theta.len() != self.levels {
            return domain(format!("point of dimension ({}, {}) for {} levels", x.len(), theta.len(), self.levels));
        }
        let mut out = ComplexMatrix::zeros(self.s, self.t);
        for (a, f) in &self.terms {
            let ax = a.eval(x)?;
            if ax != 0.0 {
                out = out.add(&f.eval(theta)?.scale(Complex64::new(ax, 0.0)))?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GltSymbol) -> Result<GltSymbol> {
        if (self.levels, self.s, self.t) != (other.levels, other.s, other.t) {
            return domain("adding symbols of different shapes");
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    /// `α κ`; the scalar is absorbed into the trigonometric factors.
    pub fn scale(&self, alpha: Complex64) -> GltSymbol {
        GltSymbol {
            terms: self.terms.iter().map(|(a, f)| (a.clone(), f.scale(alpha))).collect(),
            ..*self
        }
    }

    /// `κ ξ`, expanded termwise.
    pub fn mul(&self, other: &GltSymbol) -> Result<GltSymbol> {
        if self.levels != other.levels || self.t != other.s {
            return domain("symbol product with incompatible shapes");
        }
        let mut out = GltSymbol::zero(self.levels, self.s, other.t);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                out.push_term(CoeffFn::product(vec![a.clone(), b.clone()])?, f.mul(g)?)?;
            }
        }
        Ok(out)
    }

    /// `(κ_1 ⊗ κ_2)((x_1,x_2),(θ_1,θ_2)) = κ_1(x_1,θ_1) ⊗ κ_2(x_2,θ_2)`.
    pub fn tensor(&self, other: &GltSymbol) -> Result<GltSymbol> {
        let mut out =
            GltSymbol::zero(self.levels + other.levels, self.s * other.s, self.t * other.t);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                out.push_term(CoeffFn::tensor(vec![a.clone(), b.clone()])?, f.tensor(g)?)?;
            }
        }
        Ok(out)
    }

    pub fn tensor_all(parts: &[GltSymbol]) -> Result<GltSymbol> {
        let (first, rest) =
            parts.split_first().ok_or_else(|| Error::Domain("empty symbol tensor product".into()))?;
        rest.iter().try_fold(first.clone(), |acc, k| acc.tensor(k))
    }

    /// Real coefficients and Hermitian-symmetric trigonometric factors, so
    /// `κ(x,θ)` is Hermitian everywhere.
    pub fn is_hermitian(&self) -> bool {
        self.s == self.t && self.terms.iter().all(|(_, f)| f.is_hermitian_symmetric())
    }

    /// 0-based `x` coordinates and `θ` levels the symbol may depend on.
    pub fn active_dims(&self) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let mut xs = BTreeSet::new();
        let mut ths = BTreeSet::new();
        for (a, f) in &self.terms {
            if f.support().all(|(_, c)| c.max_abs() == 0.0) {
                continue;
            }
            xs.extend(a.variables_used().into_iter().map(|j| j - 1));
            ths.extend(f.active_levels());
        }
        (xs, ths)
    }
}

/// A reference symbol for distribution checks.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// A function of `θ ∈ [-π,π]^d` only.
    Trig(TrigPoly),
    /// A function of `(x,θ) ∈ [0,1]^d × [-π,π]^d`.
    Glt(GltSymbol),
}

impl Symbol {
    pub fn levels(&self) -> usize {
        match self {
            Symbol::Trig(f) => f.levels(),
            Symbol::Glt(k) => k.levels(),
        }
    }

    pub fn block_dims(&self) -> (usize, usize) {
        match self {
            Symbol::Trig(f) => f.block_dims(),
            Symbol::Glt(k) => k.block_dims(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        match self {
            Symbol::Trig(f) => f.is_hermitian_symmetric(),
            Symbol::Glt(k) => k.is_hermitian(),
        }
    }

    pub fn as_glt(&self) -> GltSymbol {
        match self {
            Symbol::Trig(f) => GltSymbol::from_trig(f.clone()),
            Symbol::Glt(k) => k.clone(),
        }
    }
}

impl From<TrigPoly> for Symbol {
    fn from(f: TrigPoly) -> Self {
        Symbol::Trig(f)
    }
}

impl From<GltSymbol> for Symbol {
    fn from(k: GltSymbol) -> Self {
        Symbol::Glt(k)
    }
}
