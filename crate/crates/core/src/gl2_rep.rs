//! Representation matrices of GL(2, C) on homogeneous degree-`L` sectors.
//!
//! Sector `L` is spanned by `f^L_m = phi_{m, L-m}`, `m = 0..=L`. The block
//! `T^L(g)` sends `f^L_m` to `sum_{m'} T^L_{m'm}(g) f^L_{m'}` where the
//! deformed two-mode vector is `prod (g11 a1^+ + g21 a2^+)^{m} (g12 a1^+ + g22 a2^+)^{L-m}`
//! applied to the vacuum and divided by `sqrt(m! (L-m)!)`. Expanding gives
//!
//! ```text
//! T^L_{m'm}(g) = sqrt(m'!(L-m')! / (m!(L-m)!))
//!     * sum_q C(m,q) C(L-m, m'-q) g11^q g21^(m-q) g12^(m'-q) g22^(L-m+q-m')
//! ```
//!
//! The square-root prefactor makes `T^L` a group homomorphism with
//! `T^L(g^dagger) = T^L(g)^dagger`; diagonal entries do not depend on it.

use crate::error::{invalid, Error, Result};
use crate::index_maps::{sector_start, truncation_dim};
use crate::serial::matrix_to_rows;
use crate::special_fn::{binomial, jacobi_complex, log_binomial, log_factorial, LogValue};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Block size above which entries are summed in log form.
pub const LOG_DOMAIN_LEVEL: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GL2Matrix {
    m: [[Complex64; 2]; 2],
    det: Complex64,
}

impl GL2Matrix {
    pub fn new(g11: Complex64, g12: Complex64, g21: Complex64, g22: Complex64) -> Result<Self> {
        let det = g11 * g22 - g12 * g21;
        let scale = [g11, g12, g21, g22].iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
        if !(det.norm() > 1e-12 * scale) || !det.is_finite() {
            return Err(Error::Singular(format!("det = {det} for entries of size {:.3e}", scale.sqrt())));
        }
        Ok(Self { m: [[g11, g12], [g21, g22]], det })
    }

    pub fn from_real(g11: f64, g12: f64, g21: f64, g22: f64) -> Result<Self> {
        Self::new(g11.into(), g12.into(), g21.into(), g22.into())
    }

    /// Row-major entries `[g11, g12, g21, g22]`.
    pub fn from_entries(e: [Complex64; 4]) -> Result<Self> {
        Self::new(e[0], e[1], e[2], e[3])
    }

    pub fn identity() -> Self {
        Self::from_real(1.0, 0.0, 0.0, 1.0).expect("identity is invertible")
    }

    pub fn diag(a: Complex64, d: Complex64) -> Result<Self> {
        Self::new(a, 0.0.into(), 0.0.into(), d)
    }

    /// Entry `g_{ij}` with 1-based indices as in `g11`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[i - 1][j - 1]
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn det(&self) -> Complex64 {
        self.det
    }

    pub fn adjoint(&self) -> Self {
        let [a, b, c, d] = self.entries();
        Self { m: [[a.conj(), c.conj()], [b.conj(), d.conj()]], det: self.det.conj() }
    }

    pub fn transpose(&self) -> Self {
        let [a, b, c, d] = self.entries();
        Self { m: [[a, c], [b, d]], det: self.det }
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.entries();
        let inv = 1.0 / self.det;
        Self { m: [[d * inv, -b * inv], [-c * inv, a * inv]], det: inv }
    }

    /// `(g^dagger)^{-1}`.
    pub fn dual(&self) -> Self {
        self.adjoint().inverse()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let e = |i: usize, j: usize| self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
        Self { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]], det: self.det * rhs.det }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let [a, b, cc, d] = self.entries();
        Self { m: [[a * c, b * c], [cc * c, d * c]], det: self.det * c * c }
    }

    /// Squared singular values, largest first.
    pub fn singular_values_sq(&self) -> (f64, f64) {
        let tr = self.m.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>();
        let d2 = self.det.norm_sqr();
        let disc = (tr * tr / 4.0 - d2).max(0.0).sqrt();
        let hi = tr / 2.0 + disc;
        (hi, d2 / hi)
    }

    pub fn condition_number(&self) -> f64 {
        let (hi, lo) = self.singular_values_sq();
        (hi / lo).sqrt()
    }

    /// `tr(g^dagger g)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.m.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_positive_hermitian(&self, tol: f64) -> bool {
        let [a, b, c, d] = self.entries();
        let herm = (b - c.conj()).norm() <= tol * (1.0 + b.norm()) && a.im.abs() <= tol && d.im.abs() <= tol;
        herm && a.re > 0.0 && self.det.re > 0.0
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries().iter().zip(other.entries()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `U diag(s1, s2) V^dagger` with Haar-like unitaries and `s_i` uniform in `[1/3, 3]`.
    pub fn random_well_conditioned<R: Rng>(rng: &mut R) -> Self {
        let s1 = rng.gen_range(1.0 / 3.0..3.0);
        let s2 = rng.gen_range(1.0 / 3.0..3.0);
        let u = random_unitary(rng);
        let v = random_unitary(rng);
        let d = Self::from_real(s1, 0.0, 0.0, s2).expect("positive diagonal");
        u.mul(&d).mul(&v.adjoint())
    }
}

fn random_unitary<R: Rng>(rng: &mut R) -> GL2Matrix {
    use std::f64::consts::PI;
    let theta: f64 = rng.gen_range(0.0..PI / 2.0);
    let (a, b, c) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
    let e = |x: f64| Complex64::from_polar(1.0, x);
    GL2Matrix::new(
        e(a) * theta.cos(),
        e(b) * theta.sin(),
        -e(c - b) * theta.sin(),
        e(c - a) * theta.cos(),
    )
    .expect("unitary matrices are invertible")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepBlock {
    pub level: usize,
    pub mat: DMatrix<Complex64>,
}

#[derive(Serialize)]
struct RepBlockJson {
    #[serde(rename = "L")]
    level: usize,
    mat: Vec<Vec<[f64; 2]>>,
}

impl Serialize for RepBlock {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepBlockJson { level: self.level, mat: matrix_to_rows(&self.mat) }.serialize(s)
    }
}

fn term_log(base: Complex64, power: usize) -> Option<(f64, f64)> {
    if power == 0 {
        Some((0.0, 0.0))
    } else if base == Complex64::new(0.0, 0.0) {
        None
    } else {
        Some((power as f64 * base.norm().ln(), power as f64 * base.arg()))
    }
}

fn entry_log_domain(g: &GL2Matrix, level: usize, mp: usize, m: usize) -> Complex64 {
    let (g11, g12, g21, g22) = (g.get(1, 1), g.get(1, 2), g.get(2, 1), g.get(2, 2));
    let norm = 0.5
        * (log_factorial(mp as u64) + log_factorial((level - mp) as u64)
            - log_factorial(m as u64)
            - log_factorial((level - m) as u64));
    let lo = (mp + m).saturating_sub(level);
    let hi = mp.min(m);
    let mut terms = Vec::new();
    for q in lo..=hi {
        let parts = [
            term_log(g11, q),
            term_log(g21, m - q),
            term_log(g12, mp - q),
            term_log(g22, level - m + q - mp),
        ];
        if parts.iter().any(Option::is_none) {
            continue;
        }
        let (lmag, phase) = parts.iter().flatten().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        let lmag = lmag + log_binomial(m as u64, q as u64) + log_binomial((level - m) as u64, (mp - q) as u64) + norm;
        terms.push((lmag, phase));
    }
    let Some(top) = terms.iter().map(|t| t.0).reduce(f64::max) else {
        return Complex64::new(0.0, 0.0);
    };
    let acc: Complex64 = terms.iter().map(|&(l, p)| Complex64::from_polar((l - top).exp(), p)).sum();
    acc * top.exp()
}

fn powers(base: Complex64, n: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(Complex64::new(1.0, 0.0));
    for k in 0..n {
        v.push(v[k] * base);
    }
    v
}

pub fn rep_block(g: &GL2Matrix, level: usize) -> RepBlock {
    let n = level + 1;
    if level > LOG_DOMAIN_LEVEL {
        return RepBlock { level, mat: DMatrix::from_fn(n, n, |mp, m| entry_log_domain(g, level, mp, m)) };
    }
    let (p11, p12, p21, p22) =
        (powers(g.get(1, 1), level), powers(g.get(1, 2), level), powers(g.get(2, 1), level), powers(g.get(2, 2), level));
    let fact: Vec<f64> = (0..=level as u64).map(log_factorial).collect();
    let mat = DMatrix::from_fn(n, n, |mp, m| {
        let norm = (0.5 * (fact[mp] + fact[level - mp] - fact[m] - fact[level - m])).exp();
        let lo = (mp + m).saturating_sub(level);
        let mut acc = Complex64::new(0.0, 0.0);
        for q in lo..=mp.min(m) {
            let c = binomial(m as u64, q as u64) * binomial((level - m) as u64, (mp - q) as u64);
            acc += p11[q] * p21[m - q] * p12[mp - q] * p22[level - m + q - mp] * c;
        }
        acc * norm
    });
    RepBlock { level, mat }
}

/// Diagonal entry at `(n1, n2)` by the q-sum with nonnegative ratio `h12 h21 / (h11 h22)`.
pub fn rep_diag_sum(h: &GL2Matrix, n1: u64, n2: u64) -> Complex64 {
    let (h11, h12, h21, h22) = (h.get(1, 1), h.get(1, 2), h.get(2, 1), h.get(2, 2));
    let level = (n1 + n2) as usize;
    if h11 == Complex64::new(0.0, 0.0) || h22 == Complex64::new(0.0, 0.0) {
        return rep_block(h, level).mat[(n1 as usize, n1 as usize)];
    }
    let rho = h12 * h21 / (h11 * h22);
    let sum: Complex64 = (0..=n1.min(n2)).map(|k| rho.powu(k as u32) * (binomial(n1, k) * binomial(n2, k))).sum();
    h11.powu(n1 as u32) * h22.powu(n2 as u32) * sum
}

/// Diagonal entry by the Jacobi form
/// `det(h)^n1 h22^(n2-n1) P_n1^(0, n2-n1)(1 + 2 h12 h21 / det h)` (roles of the
/// two modes swapped when `n2 < n1`).
pub fn rep_diag(h: &GL2Matrix, n1: u64, n2: u64) -> Complex64 {
    let det = h.det();
    let x = Complex64::new(1.0, 0.0) + 2.0 * h.get(1, 2) * h.get(2, 1) / det;
    let (small, large, other) = if n1 <= n2 { (n1, n2, h.get(2, 2)) } else { (n2, n1, h.get(1, 1)) };
    det.powu(small as u32) * other.powu((large - small) as u32) * jacobi_complex(small, 0.0, (large - small) as f64, x)
}

fn require_positive(h: &GL2Matrix) -> Result<()> {
    if !h.is_positive_hermitian(1e-12) {
        return Err(invalid("matrix must be positive Hermitian"));
    }
    Ok(())
}

/// [`rep_diag`] restricted to positive Hermitian `h`, where the value is real.
pub fn rep_diag_positive(h: &GL2Matrix, n1: u64, n2: u64) -> Result<f64> {
    require_positive(h)?;
    Ok(rep_diag(h, n1, n2).re)
}

/// Log of the diagonal entry for positive Hermitian `h`; all q-sum terms are
/// nonnegative so the shifted sum is stable at any degree.
pub fn rep_diag_log(h: &GL2Matrix, n1: u64, n2: u64) -> Result<LogValue> {
    require_positive(h)?;
    let (h11, h22) = (h.get(1, 1).re, h.get(2, 2).re);
    let r = h.get(1, 2).norm_sqr() / (h11 * h22);
    Ok(LogValue::from_ln(diag_q_sum_log(h11, h22, r, n1, n2)))
}

/// `ln( h11^n1 h22^n2 sum_k C(n1,k) C(n2,k) r^k )` for `h11, h22 > 0`, `r >= 0`.
pub fn diag_q_sum_log(h11: f64, h22: f64, r: f64, n1: u64, n2: u64) -> f64 {
    let base = n1 as f64 * h11.ln() + n2 as f64 * h22.ln();
    if r == 0.0 {
        return base;
    }
    let lr = r.ln();
    let terms = (0..=n1.min(n2)).map(|k| LogValue::from_ln(log_binomial(n1, k) + log_binomial(n2, k) + k as f64 * lr));
    base + LogValue::sum(terms).log_magnitude
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagOperator {
    pub l_max: usize,
    pub blocks: Vec<RepBlock>,
}

#[derive(Serialize)]
struct BlockDiagJson<'a> {
    l_max: usize,
    dim: usize,
    blocks: &'a [RepBlock],
}

impl Serialize for BlockDiagOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlockDiagJson { l_max: self.l_max, dim: self.dim(), blocks: &self.blocks }.serialize(s)
    }
}

impl BlockDiagOperator {
    pub fn identity(l_max: usize) -> Self {
        Self {
            l_max,
            blocks: (0..=l_max).map(|l| RepBlock { level: l, mat: DMatrix::identity(l + 1, l + 1) }).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        truncation_dim(self.l_max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for b in &self.blocks {
            let s = sector_start(b.level as u64) as usize;
            out.view_mut((s, s), (b.level + 1, b.level + 1)).copy_from(&b.mat);
        }
        out
    }

    fn zip(&self, other: &Self, f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>) -> Self {
        assert_eq!(self.l_max, other.l_max, "block operators have different truncations");
        Self {
            l_max: self.l_max,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| RepBlock { level: a.level, mat: f(&a.mat, &b.mat) })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            l_max: self.l_max,
            blocks: self.blocks.iter().map(|b| RepBlock { level: b.level, mat: b.mat.adjoint() }).collect(),
        }
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for b in &self.blocks {
            let s = sector_start(b.level as u64) as usize;
            let seg = &b.mat * v.rows(s, b.level + 1);
            out.rows_mut(s, b.level + 1).copy_from(&seg);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (&a.mat - &b.mat).iter().map(|c| c.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.mat.iter().map(|c| c.norm())).fold(0.0, f64::max)
    }
}

pub fn rep_full(g: &GL2Matrix, l_max: usize) -> BlockDiagOperator {
    BlockDiagOperator { l_max, blocks: (0..=l_max).map(|l| rep_block(g, l)).collect() }
}

pub fn dual(g: &GL2Matrix) -> GL2Matrix {
    g.dual()
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `max |T(g1) T(g2) - T(g1 g2)|` over the block, relative to the largest entry involved.
pub fn homomorphism_deviation(g1: &GL2Matrix, g2: &GL2Matrix, level: usize) -> f64 {
    let a = rep_block(g1, level).mat;
    let b = rep_block(g2, level).mat;
    let prod = &a * &b;
    let direct = rep_block(&g1.mul(g2), level).mat;
    let scale = (max_entry(&a) * max_entry(&b)).max(max_entry(&direct)).max(1.0);
    max_entry(&(prod - direct)) / scale
}

/// `max |T(g) T(g^{-1}) - I|`, relative to `max|T(g)| max|T(g^{-1})|`.
pub fn inverse_deviation(g: &GL2Matrix, level: usize) -> f64 {
    let a = rep_block(g, level).mat;
    let b = rep_block(&g.inverse(), level).mat;
    let scale = (max_entry(&a) * max_entry(&b)).max(1.0);
    max_entry(&(&a * &b - DMatrix::identity(level + 1, level + 1))) / scale
}

/// `max |T(g)^dagger - T(g^dagger)|`, relative to `max|T(g)|`.
pub fn star_deviation(g: &GL2Matrix, level: usize) -> f64 {
    let a = rep_block(g, level).mat;
    let b = rep_block(&g.adjoint(), level).mat;
    max_entry(&(a.adjoint() - b)) / max_entry(&a).max(1.0)
}
