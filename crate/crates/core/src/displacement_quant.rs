//! Displacement operators in the biorthogonal basis, bi-coherent states,
//! weight operators and the linear quantization map.
//!
//! `DisplacementMatrix::mat[(m, n)]` holds `<Psi_m | D(z) | phi_n>`, which does
//! not depend on `g`: the deformation only enters when vectors are mapped to
//! the flat basis through `T = rep_full(g)` and `T^{-dagger}`.

use crate::ddmat::DdMatrix;
use crate::deformed_hermite::norm_sq;
use crate::error::{invalid, Error, Result};
use crate::fock_ops::{leading_block_deviation, pseudo_pair, PseudoPair, TruncatedOperator};
use crate::gl2_rep::{rep_full, GL2Matrix};
use crate::index_maps::{beta_inv, sector_start, truncation_dim};
use crate::quadrature::{build_scheme, integrate_matrix, Measure, PlaneScheme, SchemeKind};
use crate::serial::matrix_to_rows;
use crate::special_fn::{laguerre_normalized_table, log_factorial};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// Shift tolerated between a quadrature and its doubled-node refinement.
pub const REFINEMENT_TOL: f64 = 1e-9;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `z1 ^ z2 = x1 y2 - x2 y1`.
pub fn wedge(z1: Complex64, z2: Complex64) -> f64 {
    z1.re * z2.im - z2.re * z1.im
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementMatrix {
    pub z: Complex64,
    pub l_max: usize,
    pub mat: DMatrix<Complex64>,
}

#[derive(Serialize)]
struct DisplacementJson {
    z: [f64; 2],
    l_max: usize,
    dim: usize,
    mat: Vec<Vec<[f64; 2]>>,
}

impl Serialize for DisplacementMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DisplacementJson { z: [self.z.re, self.z.im], l_max: self.l_max, dim: self.mat.nrows(), mat: matrix_to_rows(&self.mat) }
            .serialize(s)
    }
}

/// Elements `D_mn(z)` for `m, n < dim`.
///
/// With `t = |z|^2` and `l_k^(a)` the normalized Laguerre function
/// `sqrt(k!/(k+a)!) t^(a/2) e^(-t/2) L_k^(a)(t)`:
/// `D_mn = e^{i(m-n) arg z} l_n^(m-n)(t)` for `m >= n` and
/// `D_mn = (-e^{-i arg z})^(n-m) l_m^(n-m)(t)` otherwise.
pub fn displacement_elements(z: Complex64, dim: usize) -> DMatrix<Complex64> {
    let t = z.norm_sqr();
    let theta = if t == 0.0 { 0.0 } else { z.arg() };
    let mut mat = DMatrix::zeros(dim, dim);
    for alpha in 0..dim {
        let table = laguerre_normalized_table(dim - 1 - alpha, alpha as u64, t);
        let below = Complex64::from_polar(1.0, alpha as f64 * theta);
        let above = Complex64::from_polar(1.0, -(alpha as f64) * theta) * if alpha % 2 == 0 { 1.0 } else { -1.0 };
        for (k, &v) in table.iter().enumerate() {
            mat[(k + alpha, k)] = below * v;
            if alpha > 0 {
                mat[(k, k + alpha)] = above * v;
            }
        }
    }
    mat
}

pub fn displacement_matrix(z: Complex64, l_max: usize) -> DisplacementMatrix {
    DisplacementMatrix { z, l_max, mat: displacement_elements(z, truncation_dim(l_max)) }
}

/// `D~_mn(z) = conj(D_nm(-z))`, built from the elements of `D(-z)`.
pub fn dual_displacement_matrix(z: Complex64, l_max: usize) -> DisplacementMatrix {
    let minus = displacement_elements(-z, truncation_dim(l_max));
    DisplacementMatrix { z, l_max, mat: minus.adjoint() }
}

fn block_dim(max_sector: usize) -> usize {
    sector_start(max_sector as u64 + 1) as usize
}

fn check_sectors(l_max: usize, max_sector: usize) -> Result<()> {
    if max_sector > l_max {
        return Err(invalid(format!("sector bound {max_sector} exceeds l_max {l_max}")));
    }
    Ok(())
}

/// Max deviation of `D(z1) D(z2)` from `e^{-i z1^z2} D(z1 + z2)` on sectors `<= max_sector`.
pub fn compose_check(z1: Complex64, z2: Complex64, l_max: usize, max_sector: usize) -> Result<f64> {
    check_sectors(l_max, max_sector)?;
    let d1 = displacement_matrix(z1, l_max).mat;
    let d2 = displacement_matrix(z2, l_max).mat;
    let direct = displacement_matrix(z1 + z2, l_max).mat * Complex64::from_polar(1.0, -wedge(z1, z2));
    let n = block_dim(max_sector);
    let prod = d1.rows(0, n) * d2.columns(0, n);
    Ok(leading_block_deviation(&prod, &direct, n))
}

/// `e^{-|z|^2/2} z^n / sqrt(n!)` for `n < len`.
pub fn coherent_coeffs(z: Complex64, len: usize) -> DVector<Complex64> {
    let t = z.norm_sqr();
    DVector::from_fn(len, |n, _| {
        if t == 0.0 {
            return if n == 0 { Complex64::new(1.0, 0.0) } else { czero() };
        }
        let log_mag = -t / 2.0 + n as f64 * z.norm().ln() - 0.5 * log_factorial(n as u64);
        Complex64::from_polar(log_mag.exp(), n as f64 * z.arg())
    })
}

fn column_dd(v: &DVector<Complex64>) -> DdMatrix {
    DdMatrix::from_f64(DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

fn dd_to_vector(m: &DdMatrix) -> DVector<Complex64> {
    let f = m.to_f64();
    DVector::from_column_slice(f.as_slice())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovarianceReport {
    pub primal: f64,
    pub dual: f64,
}

/// `D(z) phi(z') = e^{-i z^z'} phi(z+z')` and its dual with `D~`, `Psi`,
/// compared in the flat basis on sectors `<= max_sector`.
pub fn covariance_check(z: Complex64, zp: Complex64, g: &GL2Matrix, l_max: usize, max_sector: usize) -> Result<CovarianceReport> {
    check_sectors(l_max, max_sector)?;
    let dim = truncation_dim(l_max);
    let n = block_dim(max_sector);
    let phase = Complex64::from_polar(1.0, -wedge(z, zp));
    let lhs = displacement_matrix(z, l_max).mat.rows(0, n) * coherent_coeffs(zp, dim);
    let rhs = coherent_coeffs(z + zp, n) * phase;
    let dual_lhs = dual_displacement_matrix(z, l_max).mat.rows(0, n) * coherent_coeffs(zp, dim);
    let t = rep_full(g, max_sector).to_dense();
    let t_dual = rep_full(&g.dual(), max_sector).to_dense();
    let dev = |m: &DMatrix<Complex64>, v: DVector<Complex64>| (m * v).iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(CovarianceReport { primal: dev(&t, &lhs - &rhs), dual: dev(&t_dual, &dual_lhs - &rhs) })
}

/// Norm-growth envelope `||phi_n|| <= r^n (n!)^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthEnvelope {
    pub r: f64,
    pub alpha: f64,
}

/// True iff `norms[n] <= r^n (n!)^alpha` for every supplied `n`.
pub fn norm_growth_check(norms: &[f64], r: f64, alpha: f64) -> bool {
    norms.iter().enumerate().all(|(n, &v)| {
        let log_bound = n as f64 * r.ln() + alpha * log_factorial(n as u64);
        v <= 0.0 || v.ln() <= log_bound + 1e-12
    })
}

/// Envelope for `||T F_n||`: the block `T_L` has operator norm at most
/// `||g||_2^L <= tr(g^dagger g)^(L/2)`, and `L <= n`, so `r = max(1, sqrt(tr))`, `alpha = 0`.
pub fn certified_growth(g: &GL2Matrix) -> GrowthEnvelope {
    GrowthEnvelope { r: g.frobenius_sq().sqrt().max(1.0), alpha: 0.0 }
}

/// `||F^g_n||` for flat indices `n < count`.
pub fn family_norms(g: &GL2Matrix, count: usize) -> Vec<f64> {
    (0..count as u64).map(|n| norm_sq(g, beta_inv(n)).sqrt()).collect()
}

/// `e^{-|z|^2} (sum_n (r|z|)^n / (n!)^(1/2 - alpha))^2`.
pub fn bicoherent_norm_bound(z: Complex64, env: GrowthEnvelope) -> f64 {
    let x = env.r * z.norm();
    if x == 0.0 {
        return 1.0;
    }
    let expo = 0.5 - env.alpha;
    let mut sum = 0.0f64;
    let mut n = 0u64;
    loop {
        let term = (n as f64 * x.ln() - expo * log_factorial(n)).exp();
        sum += term;
        if n as f64 > x * x && term < 1e-17 * sum {
            break;
        }
        n += 1;
    }
    (-z.norm_sqr()).exp() * sum * sum
}

#[derive(Debug, Clone, Serialize)]
pub struct BiCoherentPair {
    pub z: [f64; 2],
    pub n_cut: usize,
    pub tail_bound: f64,
    pub envelope: GrowthEnvelope,
    /// Coefficients `c_n(z)`, `n < n_cut`, zero beyond.
    #[serde(skip)]
    pub coeffs: DVector<Complex64>,
    #[serde(skip)]
    pub phi_vec: DVector<Complex64>,
    #[serde(skip)]
    pub psi_vec: DVector<Complex64>,
    pub overlap: [f64; 2],
}

impl BiCoherentPair {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z[0], self.z[1])
    }

    pub fn overlap(&self) -> Complex64 {
        Complex64::new(self.overlap[0], self.overlap[1])
    }
}

/// Smallest `N` with `e^{-|z|^2/2} sum_{n >= N} (r|z|)^n / sqrt(n!) <= eps`,
/// using the ratio bound `u_{n+1}/u_n = r|z|/sqrt(n+1)`; returns `(N, bound)`.
pub fn tail_cut(z: Complex64, r: f64, eps: f64) -> (usize, f64) {
    let x = r * z.norm();
    if x == 0.0 {
        return (1, 0.0);
    }
    let log_u = |n: usize| -z.norm_sqr() / 2.0 + n as f64 * x.ln() - 0.5 * log_factorial(n as u64);
    let mut n = 1usize;
    loop {
        let q = x / ((n + 1) as f64).sqrt();
        if q < 1.0 {
            let bound = log_u(n).exp() / (1.0 - q);
            if bound <= eps {
                return (n, bound);
            }
        }
        n += 1;
    }
}

/// `phi(z) = sum_{n < N} c_n(z) F^g_n`, `Psi(z) = sum_{n < N} c_n(z) F~^g_n`,
/// with `N` certified by [`tail_cut`] for both families.
pub fn bicoherent(z: Complex64, pair: &PseudoPair, eps: f64) -> Result<BiCoherentPair> {
    if !(eps > 0.0) {
        return Err(invalid(format!("tail tolerance must be positive, got {eps}")));
    }
    let env_phi = certified_growth(&pair.g);
    let env_psi = certified_growth(&pair.g.dual());
    let envelope = GrowthEnvelope { r: env_phi.r.max(env_psi.r), alpha: 0.0 };
    let (n_cut, tail_bound) = tail_cut(z, envelope.r, eps);
    let dim = pair.dim();
    if n_cut > dim {
        let mut l = pair.l_max;
        while truncation_dim(l) < n_cut {
            l += 1;
        }
        return Err(Error::TruncationTooSmall { required_l_max: l });
    }
    let mut coeffs = coherent_coeffs(z, dim);
    for k in n_cut..dim {
        coeffs[k] = czero();
    }
    let c = column_dd(&coeffs);
    let phi = pair.t_dd().mul(&c);
    let psi = pair.x_dd().adjoint().mul(&c);
    let overlap = psi.adjoint().mul(&phi).to_f64()[(0, 0)];
    Ok(BiCoherentPair {
        z: [z.re, z.im],
        n_cut,
        tail_bound,
        envelope,
        coeffs,
        phi_vec: dd_to_vector(&phi),
        psi_vec: dd_to_vector(&psi),
        overlap: [overlap.re, overlap.im],
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigenReport {
    /// `B(g) phi(z) - z phi(z)` on the safe block.
    pub lowering: f64,
    /// `B~(g) Psi(z) - z Psi(z)` on the safe block.
    pub dual_lowering: f64,
}

pub fn eigen_check(pair: &PseudoPair, state: &BiCoherentPair) -> EigenReport {
    let z = state.z();
    let c = column_dd(&state.coeffs);
    let phi = pair.t_dd().mul(&c);
    let psi = pair.x_dd().adjoint().mul(&c);
    let safe = pair.safe_dim();
    let residual = |lhs: DdMatrix, v: &DdMatrix| {
        let zv = DdMatrix { hi: &v.hi * z, lo: &v.lo * z };
        let diff = lhs.sub(&zv).to_f64();
        diff.rows(0, safe).iter().map(|c| c.norm()).fold(0.0, f64::max)
    };
    EigenReport {
        lowering: residual(pair.apply_lowering(&phi), &phi),
        dual_lowering: residual(pair.apply_dual_lowering(&psi), &psi),
    }
}

/// `K(z, z') = e^{-|z|^2/2} e^{-|z'|^2/2} e^{conj(z) z'}`.
pub fn kernel(z: Complex64, zp: Complex64) -> Complex64 {
    (z.conj() * zp - (z.norm_sqr() + zp.norm_sqr()) / 2.0).exp()
}

/// Quadrature value of `int K(z, z') K(z', z'') d^2z'/pi` minus `K(z, z'')`.
pub fn kernel_reproducing_error(z: Complex64, zpp: Complex64, kind: SchemeKind) -> Result<f64> {
    let scheme = build_scheme(kind)?;
    let val = crate::quadrature::integrate(|w| kernel(z, w) * kernel(w, zpp), &scheme, Measure::Flat);
    Ok((val - kernel(z, zpp)).norm())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolutionReport {
    pub l_max: usize,
    /// Sectors `<= check_sectors` are compared with the identity.
    pub check_sectors: usize,
    pub deviation: f64,
    /// Change of the checked block under doubled node counts.
    pub refinement_shift: f64,
    pub scheme: SchemeKind,
}

/// `int |c(z)><c(z)| dnu`, the coefficient Gram matrix of coherent states.
fn coherent_gram(scheme: &PlaneScheme, dim: usize) -> DMatrix<Complex64> {
    let inv_sqrt_fact: Vec<f64> = (0..dim as u64).map(|n| (-0.5 * log_factorial(n)).exp()).collect();
    integrate_matrix(
        |z| {
            let mut v = DVector::zeros(dim);
            let mut p = Complex64::new(1.0, 0.0);
            for n in 0..dim {
                v[n] = p * inv_sqrt_fact[n];
                p *= z;
            }
            &v * v.adjoint()
        },
        scheme,
        Measure::Gaussian,
        dim,
        dim,
    )
}

/// `int phi(z) Psi(z)^dagger d^2z/pi = T G T^{-1}` with `G` the coefficient
/// Gram matrix over the scheme's region; deviation from the identity on
/// sectors `<= l_max / 2`. Fails with `NotConverged` when doubling the node
/// counts moves the checked block by more than [`REFINEMENT_TOL`].
pub fn resolution_check(g: &GL2Matrix, l_max: usize, kind: SchemeKind) -> Result<ResolutionReport> {
    let pair = pseudo_pair(g, l_max)?;
    let dim = pair.dim();
    let check_sectors = l_max / 2;
    let n = block_dim(check_sectors);
    let resolve = |k: SchemeKind| -> Result<DMatrix<Complex64>> {
        let gram = coherent_gram(&build_scheme(k)?, dim);
        Ok(pair.conjugate(&TruncatedOperator::new(l_max, gram)).mat)
    };
    let coarse = resolve(kind)?;
    let fine = resolve(kind.refined())?;
    let refinement_shift = leading_block_deviation(&coarse, &fine, n);
    if refinement_shift > REFINEMENT_TOL {
        return Err(Error::NotConverged { delta: refinement_shift, tol: REFINEMENT_TOL });
    }
    let deviation = leading_block_deviation(&coarse, &DMatrix::identity(dim, dim), n);
    Ok(ResolutionReport { l_max, check_sectors, deviation, refinement_shift, scheme: kind })
}

fn check_s(s: f64) -> Result<()> {
    if !(s < 1.0) {
        return Err(invalid(format!("weight exponent s must be below 1, got {s}")));
    }
    Ok(())
}

/// `<phi_n | M_s | Psi_n> = 2/(1-s) ((s+1)/(s-1))^n`.
pub fn weight_operator_diag(s: f64, n: u32) -> Result<f64> {
    check_s(s)?;
    Ok(2.0 / (1.0 - s) * ((s + 1.0) / (s - 1.0)).powi(n as i32))
}

/// Polar scheme whose radial rule is exact for the `M_s` integrands.
pub fn weight_operator_scheme(s: f64, radial: usize, angular: usize) -> Result<SchemeKind> {
    check_s(s)?;
    Ok(SchemeKind::Polar { radial, angular, decay: (1.0 - s) / 2.0 })
}

/// `int e^{s|z|^2/2} D_nn(z) d^2z/pi` by quadrature.
pub fn weight_operator_numeric(s: f64, n: u32, kind: SchemeKind) -> Result<f64> {
    check_s(s)?;
    let scheme = build_scheme(kind)?;
    let n = n as usize;
    let val = crate::quadrature::integrate(
        |z| {
            let t = z.norm_sqr();
            Complex64::new((s * t / 2.0).exp() * laguerre_normalized_table(n, 0, t)[n], 0.0)
        },
        &scheme,
        Measure::Flat,
    );
    Ok(val.re)
}

type PlaneFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Weight function `w` with `w(0) = 1` and its first derivatives at the origin.
#[derive(Clone)]
pub struct WeightSpec {
    pub label: String,
    eval: PlaneFn,
    pub dz_at_0: Complex64,
    pub dzbar_at_0: Complex64,
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSpec")
            .field("label", &self.label)
            .field("dz_at_0", &self.dz_at_0)
            .field("dzbar_at_0", &self.dzbar_at_0)
            .finish()
    }
}

impl WeightSpec {
    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        dz_at_0: Complex64,
        dzbar_at_0: Complex64,
    ) -> Result<Self> {
        let spec = Self { label: label.into(), eval: Arc::new(eval), dz_at_0, dzbar_at_0 };
        let at0 = spec.eval(czero());
        if !((at0 - 1.0).norm() <= 1e-12) {
            return Err(invalid(format!("weight must equal 1 at the origin, got {at0}")));
        }
        Ok(spec)
    }

    pub fn constant() -> Self {
        Self::custom("constant", |_| Complex64::new(1.0, 0.0), czero(), czero()).expect("normalized")
    }

    /// `e^{s|z|^2/2}`.
    pub fn gauss_s(s: f64) -> Result<Self> {
        check_s(s)?;
        Self::custom(format!("gauss-s({s})"), move |z| Complex64::new((s * z.norm_sqr() / 2.0).exp(), 0.0), czero(), czero())
    }

    /// `e^{s|z|^2/2 + alpha z + beta conj(z)}`.
    pub fn shifted_gauss(s: f64, alpha: Complex64, beta: Complex64) -> Result<Self> {
        check_s(s)?;
        Self::custom(
            format!("shifted-gauss({s},{alpha},{beta})"),
            move |z| (s * z.norm_sqr() / 2.0 + alpha * z + beta * z.conj()).exp(),
            alpha,
            beta,
        )
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }
}

/// `A_z = B(g) - dzbar w(0) I` and `A_zbar = B~(g)^dagger + dz w(0) I`.
pub fn quantize_linear(w: &WeightSpec, pair: &PseudoPair) -> (TruncatedOperator, TruncatedOperator) {
    let eye = TruncatedOperator::identity(pair.l_max);
    let a = pair.a_op.add(&eye.scale(-w.dzbar_at_0));
    let b = pair.b_op.add(&eye.scale(w.dz_at_0));
    (a, b)
}

/// Safe-block deviation of `[A_z, A_zbar]` from the identity.
pub fn pseudo_canonical_deviation(w: &WeightSpec, pair: &PseudoPair) -> f64 {
    pair.shifted_commutator_deviation(-w.dzbar_at_0, w.dz_at_0)
}

/// Symbols with closed-form symplectic Fourier transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Symbol {
    /// `z e^{-lambda |z|^2}`.
    Z,
    /// `conj(z) e^{-lambda |z|^2}`.
    Zbar,
    /// `e^{-lambda |z|^2}`.
    One,
}

/// `F[f](-z)` for the regularized symbol. With `F[e^{-lambda|x|^2}](z) = e^{-|z|^2/lambda}/lambda`,
/// `F[x e^{-lambda|x|^2}](z) = (z/lambda^2) e^{-|z|^2/lambda}` and
/// `F[conj(x) e^{-lambda|x|^2}](z) = -(conj(z)/lambda^2) e^{-|z|^2/lambda}`.
pub fn symbol_fourier_at_minus(symbol: Symbol, lambda: f64, z: Complex64) -> Complex64 {
    let gauss = (-z.norm_sqr() / lambda).exp();
    match symbol {
        Symbol::Z => -z * gauss / (lambda * lambda),
        Symbol::Zbar => z.conj() * gauss / (lambda * lambda),
        Symbol::One => Complex64::new(gauss / lambda, 0.0),
    }
}

/// Polar scheme matched to the `e^{-|z|^2/lambda}` envelope of the oracle integrands.
pub fn oracle_scheme(lambda: f64, radial: usize, angular: usize) -> Result<SchemeKind> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("regularizer must be positive, got {lambda}")));
    }
    Ok(SchemeKind::Polar { radial, angular, decay: 1.0 / lambda + 0.5 })
}

/// `int F[f](-z) D(z) w(z) d^2z/pi` in biorthogonal coordinates.
pub fn quantize_oracle_canonical(symbol: Symbol, lambda: f64, w: &WeightSpec, l_max: usize, kind: SchemeKind) -> Result<DMatrix<Complex64>> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("regularizer must be positive, got {lambda}")));
    }
    let dim = truncation_dim(l_max);
    let run = |k: SchemeKind| -> Result<DMatrix<Complex64>> {
        let scheme = build_scheme(k)?;
        Ok(integrate_matrix(
            |z| displacement_elements(z, dim) * (symbol_fourier_at_minus(symbol, lambda, z) * w.eval(z)),
            &scheme,
            Measure::Flat,
            dim,
            dim,
        ))
    };
    let coarse = run(kind)?;
    let fine = run(kind.refined())?;
    let scale = fine.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let delta = leading_block_deviation(&coarse, &fine, dim);
    if delta > REFINEMENT_TOL * scale {
        return Err(Error::NotConverged { delta, tol: REFINEMENT_TOL * scale });
    }
    Ok(fine)
}

/// Regularized oracle `A_{f_lambda}` mapped to the flat basis by `T`.
pub fn quantize_regularized_oracle(
    symbol: Symbol,
    lambda: f64,
    w: &WeightSpec,
    pair: &PseudoPair,
    kind: SchemeKind,
) -> Result<TruncatedOperator> {
    let can = quantize_oracle_canonical(symbol, lambda, w, pair.l_max, kind)?;
    Ok(pair.conjugate(&TruncatedOperator::new(pair.l_max, can)))
}

/// `max |(A - target) P|` over the leading `n` flat indices, relative to `max |target P|`.
pub fn relative_block_error(a: &DMatrix<Complex64>, target: &DMatrix<Complex64>, n: usize) -> f64 {
    let scale = leading_block_deviation(target, &DMatrix::zeros(target.nrows(), target.ncols()), n);
    leading_block_deviation(a, target, n) / scale
}

/// Closed form of the `Z` oracle for `w = 1`: the only nonzero elements are
/// `(n-1, n) -> sqrt(n) (1 + lambda/2)^{-2} ((1 - lambda/2)/(1 + lambda/2))^{n-1}`.
pub fn oracle_z_closed_form(lambda: f64, n: usize) -> f64 {
    let (p, m) = (1.0 + lambda / 2.0, 1.0 - lambda / 2.0);
    (n as f64).sqrt() / (p * p) * (m / p).powi(n as i32 - 1)
}

/// Closed form of the `One` oracle for `w = 1`: diagonal `(1 + lambda/2)^{-1} ((1 - lambda/2)/(1 + lambda/2))^n`.
pub fn oracle_one_closed_form(lambda: f64, n: usize) -> f64 {
    let (p, m) = (1.0 + lambda / 2.0, 1.0 - lambda / 2.0);
    (m / p).powi(n as i32) / p
}
