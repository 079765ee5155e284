//! Truncated matrix realizations of the two-mode and flat-index ladder
//! operators, Cuntz isometries, the pseudo-boson pair `B(g)`, `B~(g)^dagger`
//! and the metric operators.
//!
//! All operators act on the flat basis `F_0 .. F_{D-1}` with
//! `D = (l_max+1)(l_max+2)/2`. Identities that move vectors across the top
//! sector are exact only on the safe block (sectors `<= l_max - 1`).

use crate::ddmat::DdMatrix;
use crate::error::{invalid, Error, Result};
use crate::gl2_rep::{rep_full, BlockDiagOperator, GL2Matrix};
use crate::index_maps::{beta, beta_inv, truncation_dim, ModeIndex};
use crate::serial::{matrix_to_le_bytes, matrix_to_rows};
use crate::special_fn::dot2_complex;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

/// Largest condition number of `g` accepted before inverting representation blocks.
pub const CONDITION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub l_max: usize,
    pub mat: DMatrix<Complex64>,
}

#[derive(Serialize)]
struct OperatorJson {
    l_max: usize,
    dim: usize,
    safe_dim: usize,
    mat: Vec<Vec<[f64; 2]>>,
}

impl Serialize for TruncatedOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson { l_max: self.l_max, dim: self.dim(), safe_dim: self.safe_dim(), mat: matrix_to_rows(&self.mat) }
            .serialize(s)
    }
}

/// Matrix product with every entry accumulated by a compensated dot product.
/// Exact zeros in `a` are skipped, which keeps block-sparse products cheap.
pub fn mul_compensated(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert_eq!(a.ncols(), b.nrows());
    let zero = Complex64::new(0.0, 0.0);
    let rows: Vec<Vec<(usize, Complex64)>> = (0..a.nrows())
        .map(|i| (0..a.ncols()).filter(|&k| a[(i, k)] != zero).map(|k| (k, a[(i, k)])).collect())
        .collect();
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| dot2_complex(rows[i].iter().map(|&(k, x)| (x, b[(k, j)]))))
}

/// `max |a_ij - b_ij|` over `i, j < n`.
pub fn leading_block_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, n: usize) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

impl TruncatedOperator {
    pub fn new(l_max: usize, mat: DMatrix<Complex64>) -> Self {
        assert_eq!(mat.nrows(), truncation_dim(l_max));
        assert_eq!(mat.ncols(), truncation_dim(l_max));
        Self { l_max, mat }
    }

    pub fn identity(l_max: usize) -> Self {
        let d = truncation_dim(l_max);
        Self::new(l_max, DMatrix::identity(d, d))
    }

    pub fn zeros(l_max: usize) -> Self {
        let d = truncation_dim(l_max);
        Self::new(l_max, DMatrix::zeros(d, d))
    }

    pub fn dim(&self) -> usize {
        truncation_dim(self.l_max)
    }

    pub fn safe_dim(&self) -> usize {
        self.l_max * (self.l_max + 1) / 2
    }

    pub fn safe_block(&self) -> DMatrix<Complex64> {
        self.mat.view((0, 0), (self.safe_dim(), self.safe_dim())).into_owned()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.l_max, self.mat.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.l_max, &self.mat * &other.mat)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.l_max, &self.mat + &other.mat)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.l_max, &self.mat * c)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::new(self.l_max, &self.mat * &other.mat - &other.mat * &self.mat)
    }

    pub fn mul_compensated(&self, other: &Self) -> Self {
        Self::new(self.l_max, mul_compensated(&self.mat, &other.mat))
    }

    /// Commutator with both products accumulated by compensated dot products.
    pub fn commutator_compensated(&self, other: &Self) -> Self {
        Self::new(self.l_max, mul_compensated(&self.mat, &other.mat) - mul_compensated(&other.mat, &self.mat))
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.mat * v
    }

    /// Largest safe-block entry of `self - other`.
    pub fn safe_deviation(&self, other: &Self) -> f64 {
        leading_block_deviation(&self.mat, &other.mat, self.safe_dim())
    }

    /// Largest safe-block entry of `self - c I`.
    pub fn safe_deviation_from_scalar(&self, c: Complex64) -> f64 {
        self.safe_deviation(&Self::identity(self.l_max).scale(c))
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_le_bytes(&self) -> Vec<u8> {
        matrix_to_le_bytes(&self.mat)
    }

    /// Conjugation `T X T^{-1}` by block-diagonal operators.
    pub fn conjugated(&self, t: &BlockDiagOperator, t_inv: &BlockDiagOperator) -> Self {
        let tx = mul_compensated(&t.to_dense(), &self.mat);
        Self::new(self.l_max, mul_compensated(&tx, &t_inv.to_dense()))
    }
}

fn check_l_max(l_max: usize) -> Result<()> {
    if l_max < 1 {
        return Err(invalid("truncation needs l_max >= 1"));
    }
    Ok(())
}

/// `B F_n = sqrt(n) F_{n-1}` and its adjoint.
pub fn ladder_b(l_max: usize) -> Result<(TruncatedOperator, TruncatedOperator)> {
    check_l_max(l_max)?;
    let d = truncation_dim(l_max);
    let mut b = DMatrix::zeros(d, d);
    for n in 1..d {
        b[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let b = TruncatedOperator::new(l_max, b);
    let bd = b.adjoint();
    Ok((b, bd))
}

#[derive(Debug, Clone)]
pub struct TwoMode {
    pub a1: TruncatedOperator,
    pub a1_dag: TruncatedOperator,
    pub a2: TruncatedOperator,
    pub a2_dag: TruncatedOperator,
}

pub fn two_mode(l_max: usize) -> Result<TwoMode> {
    check_l_max(l_max)?;
    let d = truncation_dim(l_max);
    let mut a1 = DMatrix::zeros(d, d);
    let mut a2 = DMatrix::zeros(d, d);
    for n in 0..d as u64 {
        let idx = beta_inv(n);
        if idx.n1 > 0 {
            a1[(beta(ModeIndex::new(idx.n1 - 1, idx.n2)) as usize, n as usize)] = Complex64::new((idx.n1 as f64).sqrt(), 0.0);
        }
        if idx.n2 > 0 {
            a2[(beta(ModeIndex::new(idx.n1, idx.n2 - 1)) as usize, n as usize)] = Complex64::new((idx.n2 as f64).sqrt(), 0.0);
        }
    }
    let a1 = TruncatedOperator::new(l_max, a1);
    let a2 = TruncatedOperator::new(l_max, a2);
    Ok(TwoMode { a1_dag: a1.adjoint(), a2_dag: a2.adjoint(), a1, a2 })
}

/// `A1 = conj(g11) a1 + conj(g21) a2`, `A2 = conj(g12) a1 + conj(g22) a2`.
pub fn deformed_two_mode(g: &GL2Matrix, l_max: usize) -> Result<TwoMode> {
    let m = two_mode(l_max)?;
    let comb = |x: Complex64, y: Complex64| m.a1.scale(x.conj()).add(&m.a2.scale(y.conj()));
    let big1 = comb(g.get(1, 1), g.get(2, 1));
    let big2 = comb(g.get(1, 2), g.get(2, 2));
    Ok(TwoMode { a1_dag: big1.adjoint(), a2_dag: big2.adjoint(), a1: big1, a2: big2 })
}

/// `B` with `sqrt(n)` carried as a double-double, so that `[B, B^dagger]`
/// is the identity to double-double accuracy before conjugation.
fn ladder_b_dd(l_max: usize) -> DdMatrix {
    let d = truncation_dim(l_max);
    let mut out = DdMatrix::from_f64(DMatrix::zeros(d, d));
    for n in 1..d {
        let hi = (n as f64).sqrt();
        let lo = (-hi).mul_add(hi, n as f64) / (2.0 * hi);
        out.hi[(n - 1, n)] = Complex64::new(hi, 0.0);
        out.lo[(n - 1, n)] = Complex64::new(lo, 0.0);
    }
    out
}

/// Number of Newton steps allowed when refining block inverses.
const REFINE_STEPS: usize = 6;

/// Dense double-double inverse of `t`, refined block by block from `x ~ t^{-1}`.
pub fn refined_block_inverse(t: &BlockDiagOperator, x: &BlockDiagOperator) -> DdMatrix {
    let d = truncation_dim(t.l_max);
    let mut out = DdMatrix::from_f64(DMatrix::zeros(d, d));
    for (tb, xb) in t.blocks.iter().zip(&x.blocks) {
        let n = tb.mat.nrows();
        let inv = DdMatrix::refine_inverse(&DdMatrix::from_f64(tb.mat.clone()), DdMatrix::from_f64(xb.mat.clone()), REFINE_STEPS);
        let start = tb.level * (tb.level + 1) / 2;
        out.hi.view_mut((start, start), (n, n)).copy_from(&inv.hi);
        out.lo.view_mut((start, start), (n, n)).copy_from(&inv.lo);
    }
    out
}

/// The pseudo-boson pair built from `T = rep_full(g)`.
///
/// `T(g~)^{-dagger} = T(g)` and `T(g~)^dagger = T(g)^{-1}`, so
/// `B~(g)^dagger = T B^dagger T^{-1}`. Both ladder operators are conjugations
/// by the same rounded `T` and its double-double inverse `X`, which makes every
/// algebraic identity hold to double-double accuracy even when `T` is badly
/// conditioned. The literal dual route is kept for cross-checks.
#[derive(Debug, Clone)]
pub struct PseudoPair {
    pub g: GL2Matrix,
    pub l_max: usize,
    /// `B(g)`, rounded to f64.
    pub a_op: TruncatedOperator,
    /// `B~(g)^dagger`, rounded to f64.
    pub b_op: TruncatedOperator,
    pub t: BlockDiagOperator,
    /// `rep_full(g^{-1})` as computed directly.
    pub t_inv: BlockDiagOperator,
    /// `rep_full(g~)` and `rep_full(g~^{-1})` as computed directly.
    pub t_dual: BlockDiagOperator,
    pub t_dual_inv: BlockDiagOperator,
    t_dd: DdMatrix,
    x_dd: DdMatrix,
    a_dd: DdMatrix,
    b_dd: DdMatrix,
}

pub fn check_condition(g: &GL2Matrix) -> Result<()> {
    let cond = g.condition_number();
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { cond, limit: CONDITION_LIMIT });
    }
    Ok(())
}

pub fn pseudo_pair(g: &GL2Matrix, l_max: usize) -> Result<PseudoPair> {
    check_condition(g)?;
    let (b, bd) = ladder_b(l_max)?;
    let gd = g.dual();
    let t = rep_full(g, l_max);
    let t_inv = rep_full(&g.inverse(), l_max);
    let t_dual = rep_full(&gd, l_max);
    let t_dual_inv = rep_full(&gd.inverse(), l_max);
    let t_dd = DdMatrix::from_f64(t.to_dense());
    let x_dd = refined_block_inverse(&t, &t_inv);
    let b_dd = ladder_b_dd(l_max);
    let a_dd = t_dd.mul(&b_dd).mul(&x_dd);
    let b_dd = t_dd.mul(&b_dd.adjoint()).mul(&x_dd);
    let _ = (b, bd);
    Ok(PseudoPair {
        g: *g,
        l_max,
        a_op: TruncatedOperator::new(l_max, a_dd.to_f64()),
        b_op: TruncatedOperator::new(l_max, b_dd.to_f64()),
        t,
        t_inv,
        t_dual,
        t_dual_inv,
        t_dd,
        x_dd,
        a_dd,
        b_dd,
    })
}

fn unit(d: usize, n: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(d);
    v[n] = Complex64::new(1.0, 0.0);
    v
}

/// Largest entry of `lhs_j - c_j rhs_{j+shift}` over columns `j` in `cols`,
/// where `rhs_{-1} = 0`.
fn shifted_column_deviation(
    lhs: &DdMatrix,
    rhs: &DdMatrix,
    cols: std::ops::Range<usize>,
    shift: isize,
    coef: impl Fn(usize) -> f64,
) -> f64 {
    let zero = DdMatrix::from_f64(DMatrix::zeros(lhs.nrows(), 1));
    cols.map(|j| {
        let k = j as isize + shift;
        let target = if k < 0 { zero.clone() } else { rhs.column(k as usize).scale_real(coef(j)) };
        lhs.column(j).max_abs_diff(&target)
    })
    .fold(0.0, f64::max)
}

impl PseudoPair {
    pub fn dim(&self) -> usize {
        truncation_dim(self.l_max)
    }

    pub fn safe_dim(&self) -> usize {
        self.l_max * (self.l_max + 1) / 2
    }

    /// `F^g_n = T F_n`.
    pub fn phi(&self, n: usize) -> DVector<Complex64> {
        self.t.apply(&unit(self.dim(), n))
    }

    /// `F~^g_n = T^{-dagger} F_n`, equal to `rep_full(g~) F_n`.
    pub fn psi(&self, n: usize) -> DVector<Complex64> {
        let col = self.x_dd.adjoint().column(n).to_f64();
        DVector::from_iterator(col.nrows(), col.iter().copied())
    }

    /// `rep_full(g~) F_n` computed directly.
    pub fn psi_literal(&self, n: usize) -> DVector<Complex64> {
        self.t_dual.apply(&unit(self.dim(), n))
    }

    /// `B~(g) = (b_op)^dagger`.
    pub fn b_tilde(&self) -> TruncatedOperator {
        self.b_op.adjoint()
    }

    /// `T X T^{-1}` in double-double, rounded.
    pub fn conjugate(&self, x: &TruncatedOperator) -> TruncatedOperator {
        let m = self.t_dd.mul(&DdMatrix::from_f64(x.mat.clone())).mul(&self.x_dd);
        TruncatedOperator::new(self.l_max, m.to_f64())
    }

    /// `(rep_full(g~) B rep_full(g~)^{-1})^dagger` evaluated literally.
    pub fn b_op_literal(&self) -> Result<TruncatedOperator> {
        let (b, _) = ladder_b(self.l_max)?;
        Ok(b.conjugated(&self.t_dual, &self.t_dual_inv).adjoint())
    }

    /// Relative mismatch between `T^{-dagger}` and the directly computed `rep_full(g~)`.
    pub fn dual_route_deviation(&self) -> f64 {
        let lit = DdMatrix::from_f64(self.t_dual.to_dense());
        self.x_dd.adjoint().max_abs_diff(&lit) / lit.max_abs()
    }

    /// Safe-block deviation of `[B(g), B~(g)^dagger]` from the identity.
    pub fn commutator_deviation(&self) -> f64 {
        self.shifted_commutator_deviation(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Safe-block deviation of `[B(g) + ca I, B~(g)^dagger + cb I]` from the identity,
    /// with the shifted operators formed before multiplying.
    pub fn shifted_commutator_deviation(&self, ca: Complex64, cb: Complex64) -> f64 {
        let d = self.dim();
        let shift = |c: Complex64| DdMatrix::from_f64(DMatrix::identity(d, d) * c);
        let a = self.a_dd.add(&shift(ca));
        let b = self.b_dd.add(&shift(cb));
        let comm = a.mul(&b).sub(&b.mul(&a));
        let diff = comm.sub(&DdMatrix::identity(d)).to_f64();
        leading_block_deviation(&diff, &DMatrix::zeros(d, d), self.safe_dim())
    }

    /// `T` as a double-double matrix.
    pub fn t_dd(&self) -> &DdMatrix {
        &self.t_dd
    }

    /// The refined inverse `X = T^{-1}`.
    pub fn x_dd(&self) -> &DdMatrix {
        &self.x_dd
    }

    /// `B(g) v = T (B (X v))` without forming `B(g)`.
    pub fn apply_lowering(&self, v: &DdMatrix) -> DdMatrix {
        self.t_dd.mul(&ladder_b_dd(self.l_max).mul(&self.x_dd.mul(v)))
    }

    /// `B~(g) v = X^dagger (B (T^dagger v))`.
    pub fn apply_dual_lowering(&self, v: &DdMatrix) -> DdMatrix {
        self.x_dd.adjoint().mul(&ladder_b_dd(self.l_max).mul(&self.t_dd.adjoint().mul(v)))
    }

    /// Largest residual of the four ladder relations on `F^g_n`, `F~^g_n`
    /// for `n` in the safe block.
    pub fn ladder_deviation(&self) -> f64 {
        let safe = self.safe_dim();
        let sq = |k: usize| (k as f64).sqrt();
        let psi = self.x_dd.adjoint();
        let lower_phi = self.a_dd.mul(&self.t_dd);
        let raise_phi = self.b_dd.mul(&self.t_dd);
        let lower_psi = self.b_dd.adjoint().mul(&psi);
        let raise_psi = self.a_dd.adjoint().mul(&psi);
        shifted_column_deviation(&lower_phi, &self.t_dd, 0..safe, -1, sq)
            .max(shifted_column_deviation(&raise_phi, &self.t_dd, 0..safe, 1, |k| sq(k + 1)))
            .max(shifted_column_deviation(&lower_psi, &psi, 0..safe, -1, sq))
            .max(shifted_column_deviation(&raise_psi, &psi, 0..safe, 1, |k| sq(k + 1)))
    }

    /// `max |<F~^g_m, F^g_n> - delta_mn|` over the whole truncation.
    pub fn biorthogonality_deviation(&self) -> f64 {
        self.x_dd.mul(&self.t_dd).max_abs_diff(&DdMatrix::identity(self.dim()))
    }

    /// `(T B^dagger B T^{-1}) F^g_n = n F^g_n` residual over the safe block.
    pub fn number_deviation(&self) -> f64 {
        let n_op = self.b_dd.mul(&self.a_dd);
        let applied = n_op.mul(&self.t_dd);
        shifted_column_deviation(&applied, &self.t_dd, 0..self.safe_dim(), 0, |k| k as f64)
    }

    /// `S_phi = T T^dagger` and `S_psi = X^dagger X = (T T^dagger)^{-1}` in double-double.
    fn metric_dd(&self) -> (DdMatrix, DdMatrix) {
        (self.t_dd.mul(&self.t_dd.adjoint()), self.x_dd.adjoint().mul(&self.x_dd))
    }

    /// Metric operators rounded to f64.
    pub fn metric_operators(&self) -> (TruncatedOperator, TruncatedOperator) {
        let (s_phi, s_psi) = self.metric_dd();
        (TruncatedOperator::new(self.l_max, s_phi.to_f64()), TruncatedOperator::new(self.l_max, s_psi.to_f64()))
    }

    /// Deviations of the metric identities: `S_phi S_psi = I`,
    /// `S_psi F^g_n = F~^g_n`, `S_phi F~^g_n = F^g_n`.
    pub fn metric_deviation(&self) -> MetricReport {
        let (s_phi, s_psi) = self.metric_dd();
        let psi = self.x_dd.adjoint();
        let eye = DdMatrix::identity(self.dim());
        MetricReport {
            product_identity: s_phi.mul(&s_psi).max_abs_diff(&eye),
            psi_from_phi: s_psi.mul(&self.t_dd).max_abs_diff(&psi),
            phi_from_psi: s_phi.mul(&psi).max_abs_diff(&self.t_dd),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricReport {
    pub product_identity: f64,
    pub psi_from_phi: f64,
    pub phi_from_psi: f64,
}

impl MetricReport {
    pub fn max(&self) -> f64 {
        self.product_identity.max(self.psi_from_phi).max(self.phi_from_psi)
    }
}

/// `S_n F_m = F_{beta(m, n)}` for `m + n <= l_max`.
pub fn cuntz_isometry(n: usize, l_max: usize) -> Result<TruncatedOperator> {
    if n > l_max {
        return Err(invalid(format!("Cuntz index {n} exceeds l_max {l_max}")));
    }
    let d = truncation_dim(l_max);
    let mut s = DMatrix::zeros(d, d);
    for m in 0..=(l_max - n) {
        s[(beta(ModeIndex::new(m as u64, n as u64)) as usize, m)] = Complex64::new(1.0, 0.0);
    }
    Ok(TruncatedOperator::new(l_max, s))
}

fn columns_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, cols: std::ops::Range<usize>) -> f64 {
    let mut worst = 0.0f64;
    for j in cols {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Deviations of the Cuntz relations, each checked on the columns where every
/// factor stays inside the truncation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CuntzReport {
    pub orthogonality: f64,
    pub range_projections: f64,
    pub kernel: f64,
    pub partial_isometry: f64,
    pub resolution: f64,
    pub ladder_intertwining: f64,
}

impl CuntzReport {
    pub fn max(&self) -> f64 {
        [self.orthogonality, self.range_projections, self.kernel, self.partial_isometry, self.resolution, self.ladder_intertwining]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn projector_onto(l_max: usize, n: usize) -> DMatrix<Complex64> {
    let d = truncation_dim(l_max);
    let mut p = DMatrix::zeros(d, d);
    for k in 0..d as u64 {
        if beta_inv(k).n2 == n as u64 {
            p[(k as usize, k as usize)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

pub fn cuntz_relations(l_max: usize) -> Result<CuntzReport> {
    check_l_max(l_max)?;
    let d = truncation_dim(l_max);
    let s: Vec<TruncatedOperator> = (0..=l_max).map(|n| cuntz_isometry(n, l_max)).collect::<Result<_>>()?;
    let modes = two_mode(l_max)?;
    let (b, bd) = ladder_b(l_max)?;
    let eye = DMatrix::<Complex64>::identity(d, d);
    let zero = DMatrix::<Complex64>::zeros(d, d);
    let mut rep = CuntzReport {
        orthogonality: 0.0,
        range_projections: 0.0,
        kernel: 0.0,
        partial_isometry: 0.0,
        resolution: 0.0,
        ladder_intertwining: 0.0,
    };
    let mut total = DMatrix::<Complex64>::zeros(d, d);
    for (n, sn) in s.iter().enumerate() {
        let range = sn.mat.adjoint() * &sn.mat;
        let dom_n = 0..(l_max - n + 1);
        total += &sn.mat * sn.mat.adjoint();
        rep.range_projections = rep.range_projections.max(
            (&sn.mat * sn.mat.adjoint() - projector_onto(l_max, n)).iter().map(|c| c.norm()).fold(0.0, f64::max),
        );
        for (m, sm) in s.iter().enumerate() {
            let prod = sm.mat.adjoint() * &sn.mat;
            let dom = 0..(l_max - m.max(n) + 1);
            let target = if m == n { &eye } else { &zero };
            rep.orthogonality = rep.orthogonality.max(columns_deviation(&prod, target, dom));
            // S_m S_n^dagger restricted to H_n is an isometry onto H_m
            let w = &sm.mat * sn.mat.adjoint();
            let ww = w.adjoint() * &w;
            let p_dom = DMatrix::from_fn(d, d, |i, j| {
                let idx = beta_inv(i as u64);
                if i == j && idx.n2 == n as u64 && idx.n1 as usize + m <= l_max {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            rep.partial_isometry = rep.partial_isometry.max((ww - p_dom).iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
        // kernel of S_n^dagger: phi_{m,k} with k != n
        for k in 0..d as u64 {
            if beta_inv(k).n2 != n as u64 {
                let col = sn.mat.adjoint().column(k as usize).iter().map(|c| c.norm()).fold(0.0, f64::max);
                rep.kernel = rep.kernel.max(col);
            }
        }
        let _ = range;
        let pairs = [
            (&modes.a1, &b.mat, dom_n.clone()),
            (&modes.a1_dag, &bd.mat, 0..(l_max - n)),
            (&modes.a2, &zero, dom_n.clone()),
            (&modes.a2_dag, &zero, 0..(l_max - n)),
        ];
        for (op, target, dom) in pairs {
            let lhs = sn.mat.adjoint() * &op.mat * &sn.mat;
            rep.ladder_intertwining = rep.ladder_intertwining.max(columns_deviation(&lhs, target, dom));
        }
    }
    rep.resolution = (total - eye).iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(rep)
}

/// `S_phi = T T^dagger` and `S_psi = T^{-dagger} T^{-1}`, rounded to f64.
pub fn metric_operators(g: &GL2Matrix, l_max: usize) -> Result<(TruncatedOperator, TruncatedOperator)> {
    Ok(pseudo_pair(g, l_max)?.metric_operators())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformed_hermite::{deformed_coeffs, norm_sq};
    use crate::hermite_core::hermite_expand;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vec_dev(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn shear() -> GL2Matrix {
        GL2Matrix::from_real(1.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn ladder_examples() {
        let (b, bd) = ladder_b(4).unwrap();
        let d = b.dim();
        assert_eq!(b.apply(&unit(d, 0)), DVector::zeros(d));
        assert!(vec_dev(&b.apply(&unit(d, 3)), &(unit(d, 2) * c(3f64.sqrt()))) < 1e-15);
        let comm = b.commutator(&bd);
        let mut expect = DMatrix::identity(d, d);
        expect[(d - 1, d - 1)] = c(-((d - 1) as f64));
        assert!((comm.mat - expect).iter().all(|x| x.norm() < 1e-12));
        assert!(ladder_b(0).is_err());
    }

    #[test]
    fn two_mode_examples() {
        let m = two_mode(5).unwrap();
        let d = m.a1.dim();
        let vac = unit(d, 0);
        assert_eq!(m.a1.apply(&vac), DVector::zeros(d));
        assert_eq!(m.a2.apply(&vac), DVector::zeros(d));
        let number = m.a1_dag.mul(&m.a1).add(&m.a2_dag.mul(&m.a2));
        for n in 0..m.a1.safe_dim() {
            let level = beta_inv(n as u64).total() as f64;
            assert!(vec_dev(&number.apply(&unit(d, n)), &(unit(d, n) * c(level))) < 1e-13);
        }
        let v = m.a1_dag.apply(&unit(d, beta(ModeIndex::new(1, 1)) as usize));
        assert!(vec_dev(&v, &(unit(d, beta(ModeIndex::new(2, 1)) as usize) * c(2f64.sqrt()))) < 1e-15);
        assert_eq!(m.a1.commutator(&m.a2).max_abs(), 0.0);
        assert!(m.a1.commutator(&m.a1_dag).safe_deviation_from_scalar(c(1.0)) < 1e-13);
        assert!(m.a1.commutator(&m.a2_dag).safe_deviation_from_scalar(c(0.0)) < 1e-13);
    }

    #[test]
    fn deformed_two_mode_examples() {
        let u = GL2Matrix::new(c(0.6), Complex64::new(0.0, 0.8), Complex64::new(0.0, 0.8), c(0.6)).unwrap();
        let m = deformed_two_mode(&u, 6).unwrap();
        assert!(m.a1.commutator(&m.a1_dag).safe_deviation_from_scalar(c(1.0)) < 1e-13);
        assert!(m.a1.commutator(&m.a2_dag).safe_deviation_from_scalar(c(0.0)) < 1e-13);
        let m = deformed_two_mode(&GL2Matrix::from_real(2.0, 0.0, 0.0, 1.0).unwrap(), 6).unwrap();
        assert!(m.a1.commutator(&m.a1_dag).safe_deviation_from_scalar(c(4.0)) < 1e-12);
        let g = GL2Matrix::random_well_conditioned(&mut ChaCha8Rng::seed_from_u64(4));
        let m = deformed_two_mode(&g, 7).unwrap();
        assert!(m.a1.commutator(&m.a2).max_abs() < 1e-13);
        let gg = g.adjoint().mul(&g);
        let ops = [(&m.a1, &m.a1_dag), (&m.a2, &m.a2_dag)];
        for i in 0..2 {
            for j in 0..2 {
                let dev = ops[i].0.commutator(ops[j].1).safe_deviation_from_scalar(gg.get(i + 1, j + 1));
                assert!(dev < 1e-11);
            }
        }
    }

    #[test]
    fn pair_examples() {
        let p = pseudo_pair(&shear(), 12).unwrap();
        assert!(p.commutator_deviation() <= 1e-8);
        let d = p.dim();
        assert!(p.a_op.apply(&p.phi(0)).iter().all(|x| x.norm() < 1e-15));
        assert!(p.b_tilde().apply(&p.psi(0)).iter().all(|x| x.norm() < 1e-15));
        assert_eq!(p.phi(0), unit(d, 0));
        assert_eq!(p.psi(0), unit(d, 0));
        assert!(p.ladder_deviation() <= 1e-8);
        assert!(p.biorthogonality_deviation() <= 1e-10);
        assert!(p.number_deviation() <= 1e-8);
        assert!(p.metric_deviation().max() <= 1e-8);
        assert!(p.dual_route_deviation() <= 1e-12);
        for n in 0..d {
            assert!(vec_dev(&p.psi(n), &p.psi_literal(n)) <= 1e-12 * p.t_dual.max_abs());
        }
        // the literal dual construction agrees with T B^dagger T^{-1}
        let literal = p.b_op_literal().unwrap();
        let dev = (literal.mat - &p.b_op.mat).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-12 * p.b_op.max_abs(), "{dev}");
    }

    #[test]
    fn pair_guards() {
        let bad = GL2Matrix::from_real(1e4, 0.0, 0.0, 1e-4).unwrap();
        assert!(matches!(pseudo_pair(&bad, 3), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn random_pairs_on_safe_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let g = GL2Matrix::random_well_conditioned(&mut rng);
            let p = pseudo_pair(&g, 12).unwrap();
            let scale = p.t.max_abs() * p.t_inv.max_abs();
            assert!(p.commutator_deviation() <= 1e-8, "{} (scale {scale:.2e})", p.commutator_deviation());
            assert!(p.ladder_deviation() <= 1e-8, "{}", p.ladder_deviation());
            assert!(p.number_deviation() <= 1e-8);
            assert!(p.biorthogonality_deviation() <= 1e-10);
            assert!(p.metric_deviation().max() <= 1e-8, "{:?}", p.metric_deviation());
            assert!(p.dual_route_deviation() <= 1e-10 * scale);
        }
    }

    #[test]
    fn cuntz_examples() {
        let s0 = cuntz_isometry(0, 4).unwrap();
        let d = s0.dim();
        assert_eq!(s0.apply(&unit(d, 0)), unit(d, 0));
        let s1 = cuntz_isometry(1, 4).unwrap();
        assert_eq!(s1.apply(&unit(d, 0)), unit(d, 1));
        assert!(cuntz_isometry(5, 4).is_err());
        let rep = cuntz_relations(8).unwrap();
        assert_eq!(rep.max(), 0.0, "{rep:?}");
    }

    #[test]
    fn metric_examples() {
        let (sp, ss) = metric_operators(&GL2Matrix::identity(), 4).unwrap();
        assert_eq!(sp, TruncatedOperator::identity(4));
        assert_eq!(ss, TruncatedOperator::identity(4));
        let g = shear();
        let (sp, ss) = metric_operators(&g, 6).unwrap();
        assert!((sp.mul(&ss).mat - DMatrix::identity(sp.dim(), sp.dim())).iter().all(|x| x.norm() < 1e-10));
        assert_eq!(sp.adjoint(), sp);
        // (T T^dagger)_nn is the squared norm for g^dagger; (T^dagger T)_nn for g
        let t = rep_full(&g, 6).to_dense();
        let gram = t.adjoint() * &t;
        for n in 0..sp.dim() {
            let idx = beta_inv(n as u64);
            assert!((gram[(n, n)].re - norm_sq(&g, idx)).abs() < 1e-10 * norm_sq(&g, idx));
            assert!((sp.mat[(n, n)].re - norm_sq(&g.adjoint(), idx)).abs() < 1e-10 * norm_sq(&g.adjoint(), idx));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let f = DVector::from_fn(sp.dim(), |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            assert!((f.adjoint() * &sp.mat * &f)[(0, 0)].re > 0.0);
            assert!((f.adjoint() * &ss.mat * &f)[(0, 0)].re > 0.0);
        }
    }

    #[test]
    fn creation_operators_build_deformed_polynomials() {
        let g = GL2Matrix::random_well_conditioned(&mut ChaCha8Rng::seed_from_u64(8));
        let l_max = 8;
        let m = deformed_two_mode(&g, l_max).unwrap();
        let t = rep_full(&g, l_max);
        for n in 0..truncation_dim(l_max) {
            let idx = beta_inv(n as u64);
            let mut v = unit(m.a1.dim(), 0);
            for _ in 0..idx.n2 {
                v = m.a2_dag.apply(&v);
            }
            for _ in 0..idx.n1 {
                v = m.a1_dag.apply(&v);
            }
            v /= Complex64::from((crate::special_fn::log_factorial(idx.n1) + crate::special_fn::log_factorial(idx.n2)).exp().sqrt());
            let poly = hermite_expand(&deformed_coeffs(&g, idx), l_max);
            let scale = poly.iter().map(|x| x.norm()).fold(1.0, f64::max);
            assert!(vec_dev(&v, &poly) <= 1e-10 * scale, "{idx:?}");
            assert!(vec_dev(&t.apply(&unit(m.a1.dim(), n)), &poly) <= 1e-10 * scale);
        }
    }

    #[test]
    fn binary_layout() {
        let (b, _) = ladder_b(1).unwrap();
        let bytes = b.to_le_bytes();
        assert_eq!(&bytes[0..8], &3u64.to_le_bytes());
        let back = crate::serial::matrix_from_le_bytes(&bytes).unwrap();
        assert_eq!(back, b.mat);
        let v = serde_json::to_value(&b).unwrap();
        assert_eq!(v["safe_dim"], 1);
    }
}
