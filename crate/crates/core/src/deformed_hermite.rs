//! Deformed complex Hermite polynomials `h^{g,L}_{n1,n2}` and their duals.
//!
//! With `u = g11 z + g21 zbar` and `v = g12 z + g22 zbar` the deformed
//! polynomial is `exp(-d_z d_zbar) u^n1 v^n2 / sqrt(n1! n2!)`. In the `(u, v)`
//! variables `d_z d_zbar = g11 g21 d_u^2 + (g11 g22 + g12 g21) d_u d_v + g12 g22 d_v^2`,
//! which gives a closed finite sum ([`deformed_explicit`]); for `g = I` it is
//! the usual Hermite sum.

use crate::error::{Error, Result};
use crate::gl2_rep::{rep_block, rep_diag_log, GL2Matrix};
use crate::hermite_core::{exp_contraction, hermite_coeffs, inner, modes_up_to, PolyCoeffs};
use crate::index_maps::{sector, truncation_dim, ModeIndex};
use crate::special_fn::{log_binomial, log_factorial, LogValue};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn lin_u(g: &GL2Matrix) -> PolyCoeffs {
    PolyCoeffs::linear(g.get(1, 1), g.get(2, 1))
}

fn lin_v(g: &GL2Matrix) -> PolyCoeffs {
    PolyCoeffs::linear(g.get(1, 2), g.get(2, 2))
}

fn inv_norm(idx: ModeIndex) -> f64 {
    (-0.5 * (log_factorial(idx.n1) + log_factorial(idx.n2))).exp()
}

/// Contraction route: expand `u^n1 v^n2 / sqrt(n1! n2!)` then apply `exp(-d_z d_zbar)`.
pub fn deformed_coeffs(g: &GL2Matrix, idx: ModeIndex) -> PolyCoeffs {
    let e = lin_u(g).powu(idx.n1 as u32).mul(&lin_v(g).powu(idx.n2 as u32)).scale(inv_norm(idx).into());
    exp_contraction(&e)
}

/// Closed-form sum over `(i, j, k)`:
/// `(-1)^(i+j+k) a^i b^j c^k / (i! j! k!) * n1!/(n1-2i-j)! * n2!/(n2-j-2k)! * u^(n1-2i-j) v^(n2-j-2k)`
/// with `a = g11 g21`, `b = g11 g22 + g12 g21`, `c = g12 g22`.
pub fn deformed_explicit(g: &GL2Matrix, idx: ModeIndex) -> PolyCoeffs {
    let (n1, n2) = (idx.n1 as usize, idx.n2 as usize);
    let a = g.get(1, 1) * g.get(2, 1);
    let b = g.get(1, 1) * g.get(2, 2) + g.get(1, 2) * g.get(2, 1);
    let c = g.get(1, 2) * g.get(2, 2);
    let u_pows: Vec<PolyCoeffs> = (0..=n1).scan(PolyCoeffs::constant(c1()), |acc, k| {
        let out = acc.clone();
        if k < n1 {
            *acc = acc.mul(&lin_u(g));
        }
        Some(out)
    }).collect();
    let v_pows: Vec<PolyCoeffs> = (0..=n2).scan(PolyCoeffs::constant(c1()), |acc, k| {
        let out = acc.clone();
        if k < n2 {
            *acc = acc.mul(&lin_v(g));
        }
        Some(out)
    }).collect();
    let mut total = PolyCoeffs::zero();
    for j in 0..=n1.min(n2) {
        for i in 0..=(n1 - j) / 2 {
            for k in 0..=(n2 - j) / 2 {
                let du = 2 * i + j;
                let dv = j + 2 * k;
                let lw = log_factorial(n1 as u64) - log_factorial((n1 - du) as u64) + log_factorial(n2 as u64)
                    - log_factorial((n2 - dv) as u64)
                    - log_factorial(i as u64)
                    - log_factorial(j as u64)
                    - log_factorial(k as u64);
                let sign = if (i + j + k) % 2 == 0 { 1.0 } else { -1.0 };
                let coef = a.powu(i as u32) * b.powu(j as u32) * c.powu(k as u32) * (sign * lw.exp());
                if coef == Complex64::new(0.0, 0.0) {
                    continue;
                }
                total = total.add(&u_pows[n1 - du].mul(&v_pows[n2 - dv]).scale(coef));
            }
        }
    }
    total.scale(inv_norm(idx).into())
}

/// Representation route: `sum_{m'} T^L_{m'm}(g) h_{m', L-m'}`.
pub fn deformed_by_rep(g: &GL2Matrix, idx: ModeIndex) -> PolyCoeffs {
    let s = sector(idx);
    let level = s.level as usize;
    let block = rep_block(g, level);
    (0..=level).fold(PolyCoeffs::zero(), |acc, mp| {
        let h = hermite_coeffs(ModeIndex::new(mp as u64, (level - mp) as u64));
        acc.add(&h.scale(block.mat[(mp, s.m as usize)]))
    })
}

/// Creation-operator route: `(A1^+)^n1 (A2^+)^n2 1 / sqrt(n1! n2!)` with
/// `a1^+ = z - d_zbar`, `a2^+ = zbar - d_z` acting on polynomials.
pub fn deformed_by_ladder(g: &GL2Matrix, idx: ModeIndex) -> PolyCoeffs {
    let a1 = |p: &PolyCoeffs| p.mul_z().sub(&p.d_zbar());
    let a2 = |p: &PolyCoeffs| p.mul_zbar().sub(&p.d_z());
    let big_a = |p: &PolyCoeffs, x: Complex64, y: Complex64| a1(p).scale(x).add(&a2(p).scale(y));
    let mut p = PolyCoeffs::constant(c1());
    for _ in 0..idx.n2 {
        p = big_a(&p, g.get(1, 2), g.get(2, 2));
    }
    for _ in 0..idx.n1 {
        p = big_a(&p, g.get(1, 1), g.get(2, 1));
    }
    p.scale(inv_norm(idx).into())
}

pub fn dual_coeffs(g: &GL2Matrix, idx: ModeIndex) -> PolyCoeffs {
    deformed_coeffs(&g.dual(), idx)
}

/// Largest pairwise coefficient difference between the three constructions,
/// relative to `max(1, largest coefficient)`.
pub fn construction_deviation(g: &GL2Matrix, idx: ModeIndex) -> f64 {
    let a = deformed_explicit(g, idx);
    let b = deformed_coeffs(g, idx);
    let c = deformed_by_rep(g, idx);
    let scale = a.max_abs().max(b.max_abs()).max(c.max_abs()).max(1.0);
    a.max_abs_diff(&b).max(a.max_abs_diff(&c)).max(b.max_abs_diff(&c)) / scale
}

#[derive(Debug, Clone)]
pub struct DeformedFamily {
    pub g: GL2Matrix,
    pub l_max: usize,
    /// Indexed by flat index.
    pub coeffs: Vec<PolyCoeffs>,
    pub dual_coeffs: Vec<PolyCoeffs>,
}

impl DeformedFamily {
    pub fn new(g: &GL2Matrix, l_max: usize) -> Self {
        let gd = g.dual();
        Self {
            g: *g,
            l_max,
            coeffs: modes_up_to(l_max).map(|i| deformed_coeffs(g, i)).collect(),
            dual_coeffs: modes_up_to(l_max).map(|i| deformed_coeffs(&gd, i)).collect(),
        }
    }

    pub fn get(&self, idx: ModeIndex) -> &PolyCoeffs {
        &self.coeffs[crate::index_maps::beta(idx) as usize]
    }

    pub fn get_dual(&self, idx: ModeIndex) -> &PolyCoeffs {
        &self.dual_coeffs[crate::index_maps::beta(idx) as usize]
    }
}

/// Gram matrix `G[n][n'] = <dual_n, deformed_n'>` and `max |G - I|`.
pub fn biorth_gram(g: &GL2Matrix, l_max: usize) -> (DMatrix<Complex64>, f64) {
    let fam = DeformedFamily::new(g, l_max);
    let dim = truncation_dim(l_max);
    let gram = DMatrix::from_fn(dim, dim, |i, j| inner(&fam.dual_coeffs[i], &fam.coeffs[j]));
    let dev = (&gram - DMatrix::identity(dim, dim)).iter().map(|c| c.norm()).fold(0.0, f64::max);
    (gram, dev)
}

fn gram_of(g: &GL2Matrix) -> GL2Matrix {
    g.adjoint().mul(g)
}

/// `||h^{g,L}_{n1,n2}||^2` as the diagonal entry of `T^L(g^dagger g)`.
pub fn norm_sq(g: &GL2Matrix, idx: ModeIndex) -> f64 {
    norm_sq_log(g, idx).to_f64()
}

pub fn norm_sq_log(g: &GL2Matrix, idx: ModeIndex) -> LogValue {
    rep_diag_log(&gram_of(g), idx.n1, idx.n2).expect("g^dagger g is positive Hermitian")
}

/// Squared norm of the dual polynomial: diagonal entry of `T^L((g^dagger g)^{-1})`.
pub fn dual_norm_sq_log(g: &GL2Matrix, idx: ModeIndex) -> LogValue {
    norm_sq_log(&g.dual(), idx)
}

pub fn dual_norm_sq(g: &GL2Matrix, idx: ModeIndex) -> f64 {
    dual_norm_sq_log(g, idx).to_f64()
}

/// Logarithms of the four norm bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBounds {
    pub log_lower: f64,
    pub log_upper: f64,
    pub log_lower_dual: f64,
    pub log_upper_dual: f64,
}

impl NormBounds {
    pub fn lower(&self) -> f64 {
        self.log_lower.exp()
    }
    pub fn upper(&self) -> f64 {
        self.log_upper.exp()
    }
    pub fn lower_dual(&self) -> f64 {
        self.log_lower_dual.exp()
    }
    pub fn upper_dual(&self) -> f64 {
        self.log_upper_dual.exp()
    }
}

/// `a^n1 d^n2 / sqrt(pi min(n1,n2)) <= ||h||^2 <= C(L,n1) a^n1 d^n2` with
/// `a, d` the diagonal of `g^dagger g`, and the dual pair with `d^n1 a^n2 / |det g|^(2L)`.
pub fn norm_bounds(g: &GL2Matrix, idx: ModeIndex) -> Result<NormBounds> {
    let (n1, n2) = (idx.n1, idx.n2);
    if n1.min(n2) == 0 {
        return Err(Error::InvalidParameter(format!(
            "norm bounds need n1, n2 >= 1 (got ({n1}, {n2})); the exact value is the leading term"
        )));
    }
    let h = gram_of(g);
    let (la, ld) = (h.get(1, 1).re.ln(), h.get(2, 2).re.ln());
    let level = n1 + n2;
    let log_min = 0.5 * (std::f64::consts::PI * n1.min(n2) as f64).ln();
    let lead = n1 as f64 * la + n2 as f64 * ld;
    let lead_dual = n1 as f64 * ld + n2 as f64 * la - level as f64 * g.det().norm_sqr().ln();
    Ok(NormBounds {
        log_lower: lead - log_min,
        log_upper: log_binomial(level, n1) + lead,
        log_lower_dual: lead_dual - log_min,
        log_upper_dual: log_binomial(level, n1) + lead_dual,
    })
}

/// Largest amount by which a log norm leaves its bound interval (primal or dual),
/// after a relative slack of `1e-12`; zero or negative when the sandwich holds.
pub fn sandwich_violation(g: &GL2Matrix, idx: ModeIndex) -> Result<f64> {
    let b = norm_bounds(g, idx)?;
    let v = norm_sq_log(g, idx).log_magnitude;
    let vd = dual_norm_sq_log(g, idx).log_magnitude;
    let excess = |x: f64, lo: f64, hi: f64| (lo - x).max(x - hi) - 1e-12 * x.abs().max(1.0);
    Ok(excess(v, b.log_lower, b.log_upper).max(excess(vd, b.log_lower_dual, b.log_upper_dual)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub level: u64,
    pub n1: u64,
    pub log_product: f64,
    pub log_lower_bound: f64,
    /// `log_product` minus the previous row's; `None` on the first row.
    pub log_growth: Option<f64>,
}

/// Norm products `||h||^2 ||h~||^2` at `n1 = floor(L/2)` for each requested level.
pub fn riesz_growth(g: &GL2Matrix, levels: &[u64]) -> Result<Vec<GrowthRow>> {
    let h = gram_of(g);
    let log_base = (h.get(1, 1).re * h.get(2, 2).re / g.det().norm_sqr()).ln();
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(levels.len());
    for &level in levels {
        let idx = ModeIndex::new(level / 2, level - level / 2);
        let log_product = norm_sq_log(g, idx).log_magnitude + dual_norm_sq_log(g, idx).log_magnitude;
        let m = idx.n1.min(idx.n2);
        let log_lower_bound = if m == 0 {
            f64::NEG_INFINITY
        } else {
            level as f64 * log_base - (std::f64::consts::PI * m as f64).ln()
        };
        let log_growth = rows.last().map(|r| log_product - r.log_product);
        rows.push(GrowthRow { level, n1: idx.n1, log_product, log_lower_bound, log_growth });
    }
    Ok(rows)
}

/// Per-index record for tabulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRecord {
    pub n1: u64,
    pub n2: u64,
    pub norm_sq: f64,
    pub dual_norm_sq: f64,
    pub lower: f64,
    pub upper: f64,
    pub product: f64,
}

pub fn bounds_record(g: &GL2Matrix, idx: ModeIndex) -> Result<BoundsRecord> {
    let b = norm_bounds(g, idx)?;
    let ns = norm_sq_log(g, idx).log_magnitude;
    let nd = dual_norm_sq_log(g, idx).log_magnitude;
    Ok(BoundsRecord {
        n1: idx.n1,
        n2: idx.n2,
        norm_sq: ns.exp(),
        dual_norm_sq: nd.exp(),
        lower: b.lower(),
        upper: b.upper(),
        product: (ns + nd).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn shear() -> GL2Matrix {
        GL2Matrix::from_real(1.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn deformed_examples() {
        let id = GL2Matrix::identity();
        for idx in modes_up_to(5) {
            assert!(deformed_coeffs(&id, idx).max_abs_diff(&hermite_coeffs(idx)) < 1e-13);
        }
        let d = GL2Matrix::from_real(2.0, 0.0, 0.0, 1.0).unwrap();
        assert!(deformed_coeffs(&d, ModeIndex::new(1, 0)).max_abs_diff(&PolyCoeffs::monomial(1, 0, c(2.0))) < 1e-15);
        let expect = PolyCoeffs::linear(c(1.0), c(1.0));
        assert!(deformed_coeffs(&shear(), ModeIndex::new(0, 1)).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn dual_examples() {
        let id = GL2Matrix::identity();
        assert!(dual_coeffs(&id, ModeIndex::new(2, 1)).max_abs_diff(&hermite_coeffs(ModeIndex::new(2, 1))) < 1e-14);
        let u = GL2Matrix::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), Complex64::new(0.0, 0.8), Complex64::new(0.6, 0.0)).unwrap();
        let idx = ModeIndex::new(2, 2);
        assert!(dual_coeffs(&u, idx).max_abs_diff(&deformed_coeffs(&u, idx)) < 1e-13);
        let d = GL2Matrix::from_real(2.0, 0.0, 0.0, 1.0).unwrap();
        assert!(dual_coeffs(&d, ModeIndex::new(1, 0)).max_abs_diff(&PolyCoeffs::monomial(1, 0, c(0.5))) < 1e-15);
        let g = GL2Matrix::new(Complex64::new(1.0, 0.3), c(0.2), Complex64::new(-0.4, 1.0), c(1.5)).unwrap();
        assert!(deformed_coeffs(&g.dual().dual(), idx).max_abs_diff(&deformed_coeffs(&g, idx)) < 1e-13);
    }

    #[test]
    fn explicit_sum_reduces_to_hermite_sum() {
        for idx in modes_up_to(8) {
            assert!(deformed_explicit(&GL2Matrix::identity(), idx).max_abs_diff(&hermite_coeffs(idx)) < 1e-12);
        }
    }

    #[test]
    fn four_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let g = GL2Matrix::random_well_conditioned(&mut rng);
            for idx in modes_up_to(6) {
                assert!(construction_deviation(&g, idx) <= 1e-10, "{idx:?}");
                let lad = deformed_by_ladder(&g, idx);
                let b = deformed_coeffs(&g, idx);
                assert!(lad.max_abs_diff(&b) <= 1e-10 * b.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn gram_examples() {
        let (_, dev) = biorth_gram(&GL2Matrix::identity(), 4);
        assert!(dev < 1e-13);
        let (_, dev) = biorth_gram(&shear(), 6);
        assert!(dev <= 1e-10, "{dev}");
        let g = GL2Matrix::random_well_conditioned(&mut ChaCha8Rng::seed_from_u64(2));
        let (_, dev) = biorth_gram(&g, 6);
        assert!(dev <= 1e-9, "{dev}");
    }

    #[test]
    fn norm_examples() {
        let d = GL2Matrix::from_real(2.0, 0.0, 0.0, 1.0).unwrap();
        assert!((norm_sq(&d, ModeIndex::new(2, 1)) - 16.0).abs() < 1e-12);
        assert!((norm_sq(&GL2Matrix::identity(), ModeIndex::new(3, 4)) - 1.0).abs() < 1e-14);
        assert!((norm_sq(&shear(), ModeIndex::new(1, 1)) - 3.0).abs() < 1e-13);
        assert!((dual_norm_sq(&shear(), ModeIndex::new(1, 1)) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn norm_identity_against_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..4 {
            let g = GL2Matrix::random_well_conditioned(&mut rng);
            for idx in modes_up_to(12).step_by(7) {
                let p = deformed_coeffs(&g, idx);
                let direct = inner(&p, &p).re;
                let v = norm_sq(&g, idx);
                assert!((direct - v).abs() <= 1e-10 * v, "{idx:?}: {direct} vs {v}");
            }
        }
    }

    #[test]
    fn bound_examples() {
        let b = norm_bounds(&shear(), ModeIndex::new(1, 1)).unwrap();
        assert!((b.lower() - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((b.upper() - 4.0).abs() < 1e-13);
        assert!((b.lower_dual() - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((b.upper_dual() - 4.0).abs() < 1e-13);
        let d = GL2Matrix::from_real(2.0, 0.0, 0.0, 1.0).unwrap();
        let b = norm_bounds(&d, ModeIndex::new(1, 1)).unwrap();
        assert!((b.lower() - 4.0 / std::f64::consts::PI.sqrt()).abs() < 1e-13 && (b.upper() - 8.0).abs() < 1e-13);
        assert!(norm_bounds(&d, ModeIndex::new(0, 3)).is_err());
    }

    #[test]
    fn growth_examples() {
        let d = GL2Matrix::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        for row in riesz_growth(&d, &[2, 7, 20]).unwrap() {
            assert!(row.log_product.abs() < 1e-12);
        }
        let rows = riesz_growth(&shear(), &[4, 8, 16]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].log_product > w[0].log_product));
        assert!(rows[0].log_growth.is_none() && rows[1].log_growth.unwrap() > 0.0);
        let u = GL2Matrix::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), Complex64::new(0.0, 0.8), Complex64::new(0.6, 0.0)).unwrap();
        for row in riesz_growth(&u, &[3, 10]).unwrap() {
            assert!(row.log_product.abs() < 1e-12);
        }
    }

    #[test]
    fn family_lookup() {
        let fam = DeformedFamily::new(&shear(), 3);
        assert_eq!(fam.coeffs.len(), 10);
        assert_eq!(fam.get(ModeIndex::new(0, 1)), &deformed_coeffs(&shear(), ModeIndex::new(0, 1)));
        assert_eq!(fam.get_dual(ModeIndex::new(1, 1)), &dual_coeffs(&shear(), ModeIndex::new(1, 1)));
    }
}
