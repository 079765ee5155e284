//! The acceptance battery: eleven numbered checks with pinned tolerances and
//! runtime budgets. Shared by the `acceptance` test target and the CLI.

use crate::asymptotics::{fixed_d_row, h_with_ratio, laplace_root, laplace_row};
use crate::deformed_hermite::{
    construction_deviation, deformed_coeffs, norm_sq, riesz_growth, sandwich_violation,
};
use crate::displacement_quant::{
    compose_check, covariance_check, displacement_matrix, oracle_scheme, pseudo_canonical_deviation,
    quantize_oracle_canonical, relative_block_error, resolution_check, weight_operator_diag,
    weight_operator_numeric, weight_operator_scheme, Symbol, WeightSpec,
};
use crate::fock_ops::{cuntz_relations, deformed_two_mode, ladder_b, pseudo_pair};
use crate::gl2_rep::{homomorphism_deviation, inverse_deviation, star_deviation, GL2Matrix};
use crate::hermite_core::{self, inner};
use crate::index_maps::{beta_inv, truncation_dim, ModeIndex};
use crate::quadrature::SchemeKind;
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    /// Headline number compared against `tolerance` (direction given by `lower_is_better`).
    pub measured: f64,
    pub tolerance: f64,
    pub lower_is_better: bool,
    pub runtime_s: f64,
    pub runtime_limit_s: f64,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let cmp = if self.lower_is_better { "<=" } else { ">=" };
        format!(
            "criterion {:>2} {}: {} | measured {:.3e} {cmp} {:.1e} | {:.2}s of {:.0}s | {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.measured,
            self.tolerance,
            self.runtime_s,
            self.runtime_limit_s,
            self.detail
        )
    }
}

struct Outcome {
    measured: f64,
    tolerance: f64,
    lower_is_better: bool,
    /// Extra conditions that must also hold.
    side_ok: bool,
    detail: String,
}

impl Outcome {
    fn at_most(measured: f64, tolerance: f64, detail: String) -> Self {
        Self { measured, tolerance, lower_is_better: true, side_ok: true, detail }
    }

    fn with_side(mut self, ok: bool) -> Self {
        self.side_ok &= ok;
        self
    }

    fn pass(&self) -> bool {
        let main = if self.lower_is_better { self.measured <= self.tolerance } else { self.measured >= self.tolerance };
        main && self.side_ok && self.measured.is_finite()
    }
}

pub const TITLES: [&str; 11] = [
    "complex Hermite orthonormality",
    "construction equivalence",
    "representation laws",
    "norm identity and bound sandwich",
    "non-Riesz growth",
    "asymptotic estimates",
    "operator algebra",
    "displacement algebra",
    "weight operator closed form",
    "resolution of identity",
    "quantization",
];

const LIMITS: [f64; 11] = [5.0, 10.0, 10.0, 20.0, 5.0, 30.0, 30.0, 60.0, 60.0, 60.0, 120.0];

/// `count` well-conditioned matrices drawn from a ChaCha8 stream seeded by `seed`.
pub fn random_gs(seed: u64, count: usize) -> Vec<GL2Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| GL2Matrix::random_well_conditioned(&mut rng)).collect()
}

/// The unipotent shear `[[1, 1], [0, 1]]`.
pub fn shear() -> GL2Matrix {
    GL2Matrix::from_real(1.0, 1.0, 0.0, 1.0).expect("invertible")
}

fn modes(max_level: usize) -> impl Iterator<Item = ModeIndex> {
    (0..truncation_dim(max_level) as u64).map(beta_inv)
}

fn c1() -> Result<Outcome> {
    let exact = hermite_core::exact::orthonormality_deviation(10);
    let float = hermite_core::orthonormality_deviation(10);
    Ok(Outcome::at_most(float, 1e-12, format!("exact backend deviation {exact}; degrees <= 10")).with_side(exact == 0.0))
}

fn c2() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for g in random_gs(2, 10) {
        for idx in modes(8) {
            worst = worst.max(construction_deviation(&g, idx));
        }
    }
    Ok(Outcome::at_most(worst, 1e-10, "explicit / contraction / representation, L <= 8, 10 random g".into()))
}

fn c3() -> Result<Outcome> {
    let gs = random_gs(3, 11);
    let mut worst = [0.0f64; 3];
    for pair in gs.windows(2) {
        for level in 0..=12 {
            worst[0] = worst[0].max(homomorphism_deviation(&pair[0], &pair[1], level));
            worst[1] = worst[1].max(inverse_deviation(&pair[0], level));
            worst[2] = worst[2].max(star_deviation(&pair[0], level));
        }
    }
    let m = worst.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::at_most(
        m,
        1e-10,
        format!("homomorphism {:.1e}, inverse {:.1e}, star {:.1e}; L <= 12", worst[0], worst[1], worst[2]),
    ))
}

fn c4() -> Result<Outcome> {
    let mut gs = random_gs(4, 20);
    let mut worst = 0.0f64;
    for g in &gs {
        for idx in modes(12) {
            let p = deformed_coeffs(g, idx);
            let by_inner = inner(&p, &p).re;
            let by_rep = norm_sq(g, idx);
            worst = worst.max((by_inner - by_rep).abs() / by_rep);
        }
    }
    gs.push(shear());
    // The lower bound is asymptotic: it is enforced for min(n1, n2) >= 4 and
    // only counted below that.
    let (mut violations, mut checked, mut small_violations) = (0usize, 0usize, 0usize);
    for g in &gs {
        for level in 2u64..=40 {
            for n1 in 1..level {
                let idx = ModeIndex::new(n1, level - n1);
                let bad = sandwich_violation(g, idx)? > 0.0;
                if n1.min(level - n1) >= 4 {
                    checked += 1;
                    violations += bad as usize;
                } else {
                    small_violations += bad as usize;
                }
            }
        }
    }
    Ok(Outcome::at_most(
        worst,
        1e-10,
        format!(
            "relative norm error, L <= 12, 20 random g; sandwich violations {violations} of {checked} (informational, min(n1,n2) < 4: {small_violations})"
        ),
    )
    .with_side(violations == 0))
}

fn c5() -> Result<Outcome> {
    let rows = riesz_growth(&shear(), &[10, 60])?;
    let growth = rows[1].log_growth.unwrap_or(f64::NAN) / std::f64::consts::LN_2;
    Ok(Outcome {
        measured: growth,
        tolerance: 40.0,
        lower_is_better: false,
        side_ok: true,
        detail: "log2 of norm-product ratio between L=60 and L=10, shear g".into(),
    })
}

fn c6() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for r in [0.2, 0.5, 0.8] {
        let h = h_with_ratio(1.3, 0.7, r)?;
        for d in [0u64, 1, 5] {
            worst = worst.max(fixed_d_row(&h, 200, d)?.log_error_per_level());
        }
        worst = worst.max(laplace_row(&h, 100, 2.0)?.log_error_per_level());
    }
    let mut limit_err = 0.0f64;
    for nu in [2.0, 3.0] {
        limit_err = limit_err.max((laplace_root(0.999, nu)?.xi_plus - nu / (1.0 + nu)).abs());
    }
    let mut nu1_err = 0.0f64;
    for r in [0.2, 0.5, 0.8] {
        nu1_err = nu1_err.max((laplace_root(r, 1.0)?.xi_plus - r.sqrt() / (1.0 + r.sqrt())).abs());
    }
    Ok(Outcome::at_most(
        worst,
        0.01,
        format!("r -> 1 root limit error {limit_err:.1e} (tol 1e-2); nu = 1 root error {nu1_err:.1e} (tol 1e-12)"),
    )
    .with_side(limit_err <= 1e-2 && nu1_err <= 1e-12))
}

/// Named safe-block deviations of the ladder, Cuntz, pseudo-boson and metric
/// identities, maximised over `gs`.
pub fn operator_algebra_parts(gs: &[GL2Matrix], l_max: usize) -> Result<Vec<(&'static str, f64)>> {
    let one = Complex64::new(1.0, 0.0);
    let (b, bd) = ladder_b(l_max)?;
    let mut worst = [0.0f64; 6];
    for g in gs {
        let m = deformed_two_mode(g, l_max)?;
        let gg = g.adjoint().mul(g);
        let ops = [(&m.a1, &m.a1_dag), (&m.a2, &m.a2_dag)];
        for i in 0..2 {
            for j in 0..2 {
                let dev = ops[i].0.commutator(ops[j].1).safe_deviation_from_scalar(gg.get(i + 1, j + 1));
                worst[0] = worst[0].max(dev);
            }
        }
        let p = pseudo_pair(g, l_max)?;
        let vals = [p.commutator_deviation(), p.ladder_deviation(), p.number_deviation(), p.biorthogonality_deviation(), p.metric_deviation().max()];
        for (w, v) in worst[1..].iter_mut().zip(vals) {
            *w = w.max(v);
        }
    }
    Ok(vec![
        ("ladder-commutator", b.commutator(&bd).safe_deviation_from_scalar(one)),
        ("two-mode-commutator", worst[0]),
        ("pseudo-commutator", worst[1]),
        ("cuntz", cuntz_relations(l_max)?.max()),
        ("ladder-relations", worst[2]),
        ("number", worst[3]),
        ("biorthogonality", worst[4]),
        ("metric", worst[5]),
    ])
}

fn c7() -> Result<Outcome> {
    let mut gs = random_gs(7, 10);
    gs.push(shear());
    gs.push(GL2Matrix::from_real(2.0, 0.0, 0.0, 1.0)?);
    let parts = operator_algebra_parts(&gs, 12)?;
    let worst = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let detail = parts.iter().map(|(n, v)| format!("{n} {v:.1e}")).collect::<Vec<_>>().join(", ");
    Ok(Outcome::at_most(worst, 1e-8, format!("L_max = 12, 12 matrices g; {detail}")))
}

/// Composition and covariance deviations on sectors `<= max_sector`, plus
/// `max |D(0) - I|` (exactly zero when the identity is reproduced).
pub fn displacement_parts(
    pairs: &[(Complex64, Complex64)],
    gs: &[GL2Matrix],
    l_max: usize,
    max_sector: usize,
) -> Result<Vec<(&'static str, f64)>> {
    let mut compose = 0.0f64;
    let (mut primal, mut dual) = (0.0f64, 0.0f64);
    for &(z1, z2) in pairs {
        compose = compose.max(compose_check(z1, z2, l_max, max_sector)?);
        for g in gs {
            let r = covariance_check(z1, z2, g, l_max, max_sector)?;
            primal = primal.max(r.primal);
            dual = dual.max(r.dual);
        }
    }
    let d = truncation_dim(l_max);
    let at_zero = displacement_matrix(Complex64::new(0.0, 0.0), l_max).mat - DMatrix::<Complex64>::identity(d, d);
    let at_zero = at_zero.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(vec![("composition", compose), ("covariance", primal), ("dual-covariance", dual), ("identity-at-zero", at_zero)])
}

fn c8() -> Result<Outcome> {
    let i = Complex64::new(0.0, 1.0);
    let mut pairs = vec![(Complex64::new(1.0, 0.0), i), (Complex64::new(0.6, 0.8), Complex64::new(-0.6, -0.8))];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..6 {
        let z1 = Complex64::from_polar(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let z2 = Complex64::from_polar(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        pairs.push((z1, z2));
    }
    let parts = displacement_parts(&pairs, &[GL2Matrix::identity(), shear()], 30, 10)?;
    let worst = parts[..3].iter().map(|p| p.1).fold(0.0, f64::max);
    let identity_exact = parts[3].1 == 0.0;
    Ok(Outcome::at_most(
        worst,
        1e-6,
        format!(
            "composition {:.1e}, covariance {:.1e} / {:.1e} over {} pairs, sectors <= 10 at L_max = 30; D(0) = I exactly: {identity_exact}",
            parts[0].1,
            parts[1].1,
            parts[2].1,
            pairs.len()
        ),
    )
    .with_side(identity_exact))
}

fn c9() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut special_ok = true;
    for s in [-3.0, -1.0, 0.0, 0.5] {
        let kind = weight_operator_scheme(s, 64, 64)?;
        for n in 0..=10u32 {
            let exact = weight_operator_diag(s, n)?;
            let num = weight_operator_numeric(s, n, kind)?;
            let err = if exact == 0.0 { num.abs() } else { (num - exact).abs() / exact.abs() };
            worst = worst.max(err);
            if s == 0.0 {
                special_ok &= (num - 2.0 * if n % 2 == 0 { 1.0 } else { -1.0 }).abs() <= 1e-6 * 2.0;
            }
            if s == -1.0 {
                special_ok &= (num - if n == 0 { 1.0 } else { 0.0 }).abs() <= 1e-6;
            }
        }
    }
    Ok(Outcome::at_most(worst, 1e-6, format!("s in {{-3,-1,0,0.5}}, n <= 10, 64x64 polar nodes; s=0 and s=-1 special values ok: {special_ok}"))
        .with_side(special_ok))
}

fn c10() -> Result<Outcome> {
    let disk = SchemeKind::Disk { radius: 6.0, radial: 64, angular: 64 };
    let mut worst = 0.0f64;
    let mut shift = 0.0f64;
    for g in [GL2Matrix::identity(), shear()] {
        let r = resolution_check(&g, 12, disk)?;
        worst = worst.max(r.deviation);
        shift = shift.max(r.refinement_shift);
    }
    let full = resolution_check(&GL2Matrix::identity(), 12, SchemeKind::polar(64, 64))?;
    Ok(Outcome::at_most(
        worst,
        1e-8,
        format!(
            "disk R = 6, 64x64 nodes, sectors <= 6 of L_max = 12; node-doubling shift {shift:.1e}; whole-plane rule gives {:.1e}",
            full.deviation
        ),
    ))
}

/// Relative errors of the regularized oracle against `B - d_zbar w(0)` and
/// `B^dagger + d_z w(0)` on sectors `<= 4`, per weight, and `|A_1 - I|` there.
pub fn oracle_parts(lambda: f64, weights: &[WeightSpec], radial: usize, angular: usize) -> Result<Vec<(String, f64)>> {
    let oracle_l = 5;
    let p4 = truncation_dim(4);
    let kind = oracle_scheme(lambda, radial, angular)?;
    let (b, bd) = ladder_b(oracle_l)?;
    let eye = DMatrix::<Complex64>::identity(b.dim(), b.dim());
    let mut parts = Vec::new();
    for w in weights {
        let a_target = &b.mat - &eye * w.dzbar_at_0;
        let b_target = &bd.mat + &eye * w.dz_at_0;
        let az = quantize_oracle_canonical(Symbol::Z, lambda, w, oracle_l, kind)?;
        let azb = quantize_oracle_canonical(Symbol::Zbar, lambda, w, oracle_l, kind)?;
        parts.push((format!("{} A_z", w.label), relative_block_error(&az, &a_target, p4)));
        parts.push((format!("{} A_zbar", w.label), relative_block_error(&azb, &b_target, p4)));
    }
    let one = quantize_oracle_canonical(Symbol::One, lambda, &WeightSpec::constant(), oracle_l, kind)?;
    parts.push(("unity".to_string(), crate::fock_ops::leading_block_deviation(&one, &eye, p4)));
    Ok(parts)
}

fn c11() -> Result<Outcome> {
    let weights = [
        WeightSpec::constant(),
        WeightSpec::gauss_s(0.5)?,
        WeightSpec::shifted_gauss(0.0, Complex64::new(0.1, 0.05), Complex64::new(-0.08, 0.1))?,
    ];
    let parts = oracle_parts(0.01, &weights, 48, 16)?;
    let worst = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut canonical = 0.0f64;
    let mut all_weights = weights.to_vec();
    all_weights.push(WeightSpec::gauss_s(-3.0)?);
    for g in [shear(), random_gs(11, 1)[0]] {
        let pair = pseudo_pair(&g, 12)?;
        for w in &all_weights {
            canonical = canonical.max(pseudo_canonical_deviation(w, &pair));
        }
    }
    let detail = parts.iter().map(|(n, v)| format!("{n} {v:.3}")).collect::<Vec<_>>().join(", ");
    Ok(Outcome::at_most(
        worst,
        0.02,
        format!("lambda = 0.01 on sectors <= 4: {detail}; pseudo-canonical {canonical:.1e} (tol 1e-8)"),
    )
    .with_side(canonical <= 1e-8))
}

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: u8) -> CriterionReport {
    let idx = (id as usize).checked_sub(1).filter(|&i| i < 11).expect("criterion ids run from 1 to 11");
    let start = Instant::now();
    let outcome = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        _ => c11(),
    };
    let runtime_s = start.elapsed().as_secs_f64();
    let limit = LIMITS[idx];
    match outcome {
        Ok(o) => CriterionReport {
            id,
            title: TITLES[idx],
            pass: o.pass() && runtime_s <= limit,
            measured: o.measured,
            tolerance: o.tolerance,
            lower_is_better: o.lower_is_better,
            runtime_s,
            runtime_limit_s: limit,
            detail: o.detail,
        },
        Err(e) => CriterionReport {
            id,
            title: TITLES[idx],
            pass: false,
            measured: f64::NAN,
            tolerance: f64::NAN,
            lower_is_better: true,
            runtime_s,
            runtime_limit_s: limit,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=11).map(run_criterion).collect()
}
