use clap::{Args, ValueEnum};
use num_complex::Complex64;
use pseudoboson::acceptance::{self, displacement_parts, operator_algebra_parts, oracle_parts, random_gs, shear};
use pseudoboson::asymptotics::{fixed_d_row, h_with_ratio, laplace_root, laplace_row, AsymptRow};
use pseudoboson::deformed_hermite::{
    biorth_gram, bounds_record, construction_deviation, deformed_coeffs, dual_norm_sq, norm_sq, riesz_growth,
    sandwich_violation,
};
use pseudoboson::displacement_quant::{
    bicoherent, eigen_check, kernel_reproducing_error, pseudo_canonical_deviation, resolution_check,
    weight_operator_diag, weight_operator_numeric, weight_operator_scheme, WeightSpec,
};
use pseudoboson::fock_ops::pseudo_pair;
use pseudoboson::gl2_rep::{homomorphism_deviation, inverse_deviation, rep_block, star_deviation, GL2Matrix};
use pseudoboson::hermite_core::{self, hermite_coeffs, inner};
use pseudoboson::index_maps::ModeIndex;
use pseudoboson::quadrature::SchemeKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use std::time::Instant;

use crate::parse;
use crate::report::{num, Check, Report, Table};
use crate::{CliError, Cmd, Common};

type Params = Map<String, Value>;

fn cpx(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn gmat(g: &GL2Matrix) -> Value {
    Value::Array(g.entries().iter().map(|&c| cpx(c)).collect())
}

fn matrix_or(s: &Option<String>, fallback: impl FnOnce() -> GL2Matrix) -> Result<GL2Matrix, CliError> {
    s.as_deref().map(parse::matrix).transpose().map(|g| g.unwrap_or_else(fallback))
}

fn tol(common: &Common, default: f64) -> Result<f64, CliError> {
    match common.tol {
        Some(t) if !(t >= 0.0 && t.is_finite()) => Err(CliError::Config(format!("--tol must be finite and >= 0, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

fn modes(max_level: u64) -> impl Iterator<Item = ModeIndex> {
    (0..=max_level).flat_map(|l| (0..=l).map(move |n1| ModeIndex::new(n1, l - n1)))
}

pub fn run(cmd: &Cmd) -> Result<(Report, &Common), CliError> {
    match cmd {
        Cmd::Hermite(a) => Ok((hermite(a)?, &a.common)),
        Cmd::Rep(a) => Ok((rep(a)?, &a.common)),
        Cmd::Deformed(a) => Ok((deformed(a)?, &a.common)),
        Cmd::Bounds(a) => Ok((bounds(a)?, &a.common)),
        Cmd::Asympt(a) => Ok((asympt(a)?, &a.common)),
        Cmd::Fock(a) => Ok((fock(a)?, &a.common)),
        Cmd::Displace(a) => Ok((displace(a)?, &a.common)),
        Cmd::Quantize(a) => Ok((quantize(a)?, &a.common)),
        Cmd::Suite(a) => Ok((suite(a)?, &a.common)),
    }
}

#[derive(Debug, Args)]
pub struct HermiteArgs {
    #[arg(long, default_value_t = 0)]
    pub n1: u64,
    #[arg(long, default_value_t = 0)]
    pub n2: u64,
    /// Evaluate h_{n1,n2} at this point (`re`, `re:im` or `a+bi`).
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<String>,
    /// Orthonormality is checked for total degrees up to this value.
    #[arg(long, default_value_t = 10)]
    pub max_degree: usize,
    /// Also check with exact rational arithmetic (tolerance 0).
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub common: Common,
}

fn hermite(a: &HermiteArgs) -> Result<Report, CliError> {
    let mut params = Params::new();
    params.insert("max_degree".into(), json!(a.max_degree));
    let mut checks = vec![Check::at_most("orthonormality", hermite_core::orthonormality_deviation(a.max_degree), tol(&a.common, 1e-12)?)];
    if a.exact {
        checks.push(Check::at_most("orthonormality-exact", hermite_core::exact::orthonormality_deviation(a.max_degree), 0.0));
    }
    let table = match &a.eval {
        Some(s) => {
            let z = parse::complex(s)?;
            let v = hermite_core::eval(&hermite_coeffs(ModeIndex::new(a.n1, a.n2)), z);
            params.insert("n1".into(), json!(a.n1));
            params.insert("n2".into(), json!(a.n2));
            params.insert("z".into(), cpx(z));
            let mut t = Table::new(&["n1", "n2", "z_re", "z_im", "value_re", "value_im"]);
            t.push(vec![json!(a.n1), json!(a.n2), num(z.re), num(z.im), num(v.re), num(v.im)]);
            Some(t)
        }
        None => None,
    };
    Ok(Report::new("hermite", params, checks, table))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepCheck {
    Homomorphism,
    Inverse,
    Star,
    All,
}

#[derive(Debug, Args)]
pub struct RepArgs {
    /// Matrix g, four comma-separated entries in row-major order; seeded random draw when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Second factor for the homomorphism law; seeded random draw when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<String>,
    /// Highest level checked (all levels 0..=L).
    #[arg(long = "L", default_value_t = 2)]
    pub level: usize,
    #[arg(long, value_enum, default_value_t = RepCheck::All)]
    pub check: RepCheck,
    /// Add the entries of the level-L block as a table.
    #[arg(long)]
    pub block: bool,
    #[command(flatten)]
    pub common: Common,
}

fn rep(a: &RepArgs) -> Result<Report, CliError> {
    let draws = random_gs(a.common.seed, 2);
    let g = matrix_or(&a.g, || draws[0])?;
    let g2 = matrix_or(&a.g2, || draws[1])?;
    let t = tol(&a.common, 1e-10)?;
    let worst = |f: &dyn Fn(usize) -> f64| (0..=a.level).map(f).fold(0.0, f64::max);
    let mut checks = Vec::new();
    if matches!(a.check, RepCheck::Homomorphism | RepCheck::All) {
        checks.push(Check::at_most("homomorphism", worst(&|l| homomorphism_deviation(&g, &g2, l)), t));
    }
    if matches!(a.check, RepCheck::Inverse | RepCheck::All) {
        checks.push(Check::at_most("inverse", worst(&|l| inverse_deviation(&g, l)), t));
    }
    if matches!(a.check, RepCheck::Star | RepCheck::All) {
        checks.push(Check::at_most("star", worst(&|l| star_deviation(&g, l)), t));
    }
    let mut params = Params::new();
    params.insert("g".into(), gmat(&g));
    params.insert("g2".into(), gmat(&g2));
    params.insert("L".into(), json!(a.level));
    let table = a.block.then(|| {
        let b = rep_block(&g, a.level);
        let mut t = Table::new(&["row", "col", "re", "im"]);
        for i in 0..b.mat.nrows() {
            for j in 0..b.mat.ncols() {
                t.push(vec![json!(i), json!(j), num(b.mat[(i, j)].re), num(b.mat[(i, j)].im)]);
            }
        }
        t
    });
    Ok(Report::new("rep", params, checks, table))
}

#[derive(Debug, Args)]
pub struct DeformedArgs {
    /// Matrix g (row-major entries); seeded random draw when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "L-max", default_value_t = 8)]
    pub l_max: u64,
    #[command(flatten)]
    pub common: Common,
}

fn deformed(a: &DeformedArgs) -> Result<Report, CliError> {
    let g = matrix_or(&a.g, || random_gs(a.common.seed, 1)[0])?;
    let t = tol(&a.common, 1e-10)?;
    let mut table = Table::new(&["n1", "n2", "norm_sq", "dual_norm_sq"]);
    let (mut construction, mut norm_identity) = (0.0f64, 0.0f64);
    for idx in modes(a.l_max) {
        construction = construction.max(construction_deviation(&g, idx));
        let p = deformed_coeffs(&g, idx);
        let ns = norm_sq(&g, idx);
        norm_identity = norm_identity.max((inner(&p, &p).re - ns).abs() / ns);
        table.push(vec![json!(idx.n1), json!(idx.n2), num(ns), num(dual_norm_sq(&g, idx))]);
    }
    let (_, biorth) = biorth_gram(&g, a.l_max as usize);
    let mut params = Params::new();
    params.insert("g".into(), gmat(&g));
    params.insert("L_max".into(), json!(a.l_max));
    let checks = vec![
        Check::at_most("construction", construction, t),
        Check::at_most("norm-identity", norm_identity, t),
        Check::at_most("biorthogonality", biorth, t),
    ];
    Ok(Report::new("deformed", params, checks, Some(table)))
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Matrix g (row-major entries); the shear 1,1,0,1 when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "L-max", default_value_t = 40)]
    pub l_max: u64,
    /// The sandwich is enforced only for min(n1, n2) >= this value.
    #[arg(long, default_value_t = 4)]
    pub min_n: u64,
    /// Levels at which norm products are compared (first and last are used).
    #[arg(long, default_value = "10,60")]
    pub growth_levels: String,
    /// Required growth of the norm product between those levels, in bits.
    #[arg(long, default_value_t = 40.0)]
    pub growth_bits: f64,
    #[command(flatten)]
    pub common: Common,
}

fn bounds(a: &BoundsArgs) -> Result<Report, CliError> {
    let g = matrix_or(&a.g, shear)?;
    let levels: Vec<u64> = parse::list(&a.growth_levels)?;
    if levels.len() < 2 {
        return Err(CliError::Config("--growth-levels needs at least two levels".into()));
    }
    let mut table = Table::new(&["n1", "n2", "norm_sq", "dual_norm_sq", "lower", "upper", "product"]);
    let mut excess = f64::NEG_INFINITY;
    for idx in modes(a.l_max).filter(|m| m.n1.min(m.n2) >= 1) {
        let r = bounds_record(&g, idx)?;
        table.push(vec![
            json!(r.n1),
            json!(r.n2),
            num(r.norm_sq),
            num(r.dual_norm_sq),
            num(r.lower),
            num(r.upper),
            num(r.product),
        ]);
        if idx.n1.min(idx.n2) >= a.min_n {
            excess = excess.max(sandwich_violation(&g, idx)?);
        }
    }
    let rows = riesz_growth(&g, &levels)?;
    let bits = (rows[rows.len() - 1].log_product - rows[0].log_product) / std::f64::consts::LN_2;
    let mut params = Params::new();
    params.insert("g".into(), gmat(&g));
    params.insert("L_max".into(), json!(a.l_max));
    params.insert("min_n".into(), json!(a.min_n));
    params.insert("growth_levels".into(), json!(levels));
    let excess = if excess == f64::NEG_INFINITY { 0.0 } else { excess };
    let checks = vec![
        Check::at_most("sandwich", excess, tol(&a.common, 0.0)?),
        Check::at_least("riesz-growth-bits", bits, a.growth_bits),
    ];
    Ok(Report::new("bounds", params, checks, Some(table)))
}

#[derive(Debug, Args)]
pub struct AsymptArgs {
    /// Diagonal entries of the positive matrix h = g^dagger g.
    #[arg(long, default_value_t = 1.3)]
    pub h11: f64,
    #[arg(long, default_value_t = 0.7)]
    pub h22: f64,
    /// Values of r = |h12|^2 / (h11 h22).
    #[arg(long, default_value = "0.2,0.5,0.8")]
    pub r: String,
    /// n1 for the fixed-difference rows.
    #[arg(long, default_value_t = 200)]
    pub n1: u64,
    /// Differences d = n2 - n1.
    #[arg(long, default_value = "0,1,5")]
    pub d: String,
    /// n1 for the Laplace rows.
    #[arg(long, default_value_t = 100)]
    pub laplace_n1: u64,
    /// Ratios nu = n2 / n1 for the Laplace rows.
    #[arg(long, default_value = "2")]
    pub nu: String,
    #[command(flatten)]
    pub common: Common,
}

fn asympt(a: &AsymptArgs) -> Result<Report, CliError> {
    let rs: Vec<f64> = parse::list(&a.r)?;
    let ds: Vec<u64> = parse::list(&a.d)?;
    let nus: Vec<f64> = parse::list(&a.nu)?;
    let mut table = Table::new(&["n1", "n2", "r", "nu_or_d", "log_exact", "log_estimate", "ratio"]);
    let mut worst = 0.0f64;
    let mut push = |row: AsymptRow, table: &mut Table| {
        worst = worst.max(row.log_error_per_level());
        table.push(vec![
            json!(row.n1),
            json!(row.n2),
            num(row.r),
            num(row.nu_or_d),
            num(row.log_exact),
            num(row.log_estimate),
            num(row.ratio),
        ]);
    };
    for &r in &rs {
        let h = h_with_ratio(a.h11, a.h22, r)?;
        for &d in &ds {
            push(fixed_d_row(&h, a.n1, d)?, &mut table);
        }
        for &nu in &nus {
            push(laplace_row(&h, a.laplace_n1, nu)?, &mut table);
        }
    }
    let mut limit = 0.0f64;
    for &nu in &nus {
        limit = limit.max((laplace_root(0.999, nu)?.xi_plus - nu / (1.0 + nu)).abs());
    }
    let mut nu1 = 0.0f64;
    for &r in &rs {
        nu1 = nu1.max((laplace_root(r, 1.0)?.xi_plus - r.sqrt() / (1.0 + r.sqrt())).abs());
    }
    let mut params = Params::new();
    params.insert("h11".into(), num(a.h11));
    params.insert("h22".into(), num(a.h22));
    params.insert("r".into(), json!(rs));
    let checks = vec![
        Check::at_most("log-error-per-level", worst, tol(&a.common, 0.01)?),
        Check::at_most("root-limit", limit, 1e-2).with_param("r", 0.999),
        Check::at_most("root-nu1", nu1, 1e-12),
    ];
    Ok(Report::new("asympt", params, checks, Some(table)))
}

#[derive(Debug, Args)]
pub struct FockArgs {
    /// Matrix g (row-major entries); the shear 1,1,0,1 when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "L-max", default_value_t = 12)]
    pub l_max: usize,
    /// Number of additional seeded random matrices.
    #[arg(long, default_value_t = 10)]
    pub random: usize,
    #[command(flatten)]
    pub common: Common,
}

fn fock(a: &FockArgs) -> Result<Report, CliError> {
    let mut gs = vec![matrix_or(&a.g, shear)?];
    gs.extend(random_gs(a.common.seed, a.random));
    let t = tol(&a.common, 1e-8)?;
    let checks = operator_algebra_parts(&gs, a.l_max)?.into_iter().map(|(n, v)| Check::at_most(n, v, t)).collect();
    let mut params = Params::new();
    params.insert("g".into(), gmat(&gs[0]));
    params.insert("L_max".into(), json!(a.l_max));
    params.insert("random".into(), json!(a.random));
    params.insert("seed".into(), json!(a.common.seed));
    Ok(Report::new("fock", params, checks, None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DisplaceCheck {
    /// Composition, covariance and D(0) = I.
    Algebra,
    /// Eigenvector property of bi-coherent states.
    Bicoherent,
    /// Resolution of the identity by bi-coherent states.
    Resolution,
    /// Reproducing property of the coherent-state kernel.
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlaneRule {
    /// Legendre radial nodes on a disk of radius --radius.
    Disk,
    /// Laguerre radial nodes over the whole plane.
    Plane,
}

#[derive(Debug, Args)]
pub struct DisplaceArgs {
    #[arg(long, value_enum, default_value_t = DisplaceCheck::Algebra)]
    pub check: DisplaceCheck,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub z1: String,
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub z2: String,
    /// Matrix g (row-major entries); the shear 1,1,0,1 when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Truncation; defaults to 30 (algebra), 25 (bicoherent) or 12 (resolution).
    #[arg(long = "L-max")]
    pub l_max: Option<usize>,
    /// Sectors compared in the algebra checks.
    #[arg(long, default_value_t = 10)]
    pub sectors: usize,
    /// Extra seeded point pairs with |z| <= 1 for the algebra checks.
    #[arg(long, default_value_t = 0)]
    pub pairs: usize,
    /// Tail bound for bi-coherent truncation.
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = PlaneRule::Disk)]
    pub rule: PlaneRule,
    #[arg(long, default_value_t = 6.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 64)]
    pub radial: usize,
    #[arg(long, default_value_t = 64)]
    pub angular: usize,
    #[command(flatten)]
    pub common: Common,
}

fn displace(a: &DisplaceArgs) -> Result<Report, CliError> {
    let z1 = parse::complex(&a.z1)?;
    let z2 = parse::complex(&a.z2)?;
    let g = matrix_or(&a.g, shear)?;
    let mut params = Params::new();
    params.insert("g".into(), gmat(&g));
    params.insert("z1".into(), cpx(z1));
    let checks = match a.check {
        DisplaceCheck::Algebra => {
            let l_max = a.l_max.unwrap_or(30);
            let mut pairs = vec![(z1, z2)];
            let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
            let mut draw = || Complex64::from_polar(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..std::f64::consts::TAU));
            for _ in 0..a.pairs {
                pairs.push((draw(), draw()));
            }
            params.insert("z2".into(), cpx(z2));
            params.insert("L_max".into(), json!(l_max));
            params.insert("sectors".into(), json!(a.sectors));
            let t = tol(&a.common, 1e-6)?;
            displacement_parts(&pairs, &[g], l_max, a.sectors)?
                .into_iter()
                .map(|(n, v)| Check::at_most(n, v, if n == "identity-at-zero" { 0.0 } else { t }))
                .collect()
        }
        DisplaceCheck::Bicoherent => {
            let l_max = a.l_max.unwrap_or(25);
            let pair = pseudo_pair(&g, l_max)?;
            let state = bicoherent(z1, &pair, a.eps)?;
            let e = eigen_check(&pair, &state);
            params.insert("L_max".into(), json!(l_max));
            params.insert("n_cut".into(), json!(state.n_cut));
            params.insert("tail_bound".into(), num(state.tail_bound));
            let t = tol(&a.common, 1e-7)?;
            vec![
                Check::at_most("lowering-eigen", e.lowering, t),
                Check::at_most("dual-lowering-eigen", e.dual_lowering, t),
                Check::at_most("overlap", (state.overlap() - 1.0).norm(), 1e-9),
            ]
        }
        DisplaceCheck::Resolution => {
            let l_max = a.l_max.unwrap_or(12);
            let kind = match a.rule {
                PlaneRule::Disk => SchemeKind::Disk { radius: a.radius, radial: a.radial, angular: a.angular },
                PlaneRule::Plane => SchemeKind::polar(a.radial, a.angular),
            };
            let r = resolution_check(&g, l_max, kind)?;
            params.insert("L_max".into(), json!(l_max));
            params.insert("check_sectors".into(), json!(r.check_sectors));
            params.insert("refinement_shift".into(), num(r.refinement_shift));
            params.insert("scheme".into(), serde_json::to_value(r.scheme).map_err(|e| CliError::Io(e.to_string()))?);
            vec![Check::at_most("resolution", r.deviation, tol(&a.common, 1e-8)?)]
        }
        DisplaceCheck::Kernel => {
            let err = kernel_reproducing_error(z1, z2, SchemeKind::polar(a.radial, a.angular))?;
            params.insert("z2".into(), cpx(z2));
            vec![Check::at_most("kernel-reproducing", err, tol(&a.common, 1e-8)?)]
        }
    };
    Ok(Report::new("displace", params, checks, None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightKind {
    /// w = 1.
    Constant,
    /// w = exp(s |z|^2 / 2).
    GaussS,
    /// exp(s |z|^2 / 2) times a first-order factor set by --alpha and --beta.
    ShiftedGauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantizeCheck {
    /// Diagonal of the weight operator against its closed form.
    WeightOperator,
    /// Regularized numeric quantization of z, zbar and 1.
    Oracle,
    /// Pseudo-canonical commutator of the quantized coordinates.
    Canonical,
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    #[arg(long, value_enum, default_value_t = QuantizeCheck::WeightOperator)]
    pub check: QuantizeCheck,
    #[arg(long, value_enum, default_value_t = WeightKind::GaussS)]
    pub weight: WeightKind,
    /// Comma-separated values of s.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: String,
    /// Largest diagonal index n of the weight operator.
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    #[arg(long, default_value_t = 64)]
    pub radial: usize,
    #[arg(long, default_value_t = 64)]
    pub angular: usize,
    /// Comma-separated regularization widths.
    #[arg(long, default_value = "0.01")]
    pub lambda: String,
    #[arg(long, default_value_t = 48)]
    pub oracle_radial: usize,
    #[arg(long, default_value_t = 16)]
    pub oracle_angular: usize,
    /// Matrix g (row-major entries) for the canonical check; the shear when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "L-max", default_value_t = 12)]
    pub l_max: usize,
    #[command(flatten)]
    pub common: Common,
}

fn weights(a: &QuantizeArgs, ss: &[f64]) -> Result<Vec<WeightSpec>, CliError> {
    let (alpha, beta) = (parse::complex(&a.alpha)?, parse::complex(&a.beta)?);
    ss.iter()
        .map(|&s| {
            Ok(match a.weight {
                WeightKind::Constant => WeightSpec::constant(),
                WeightKind::GaussS => WeightSpec::gauss_s(s)?,
                WeightKind::ShiftedGauss => WeightSpec::shifted_gauss(s, alpha, beta)?,
            })
        })
        .collect()
}

fn quantize(a: &QuantizeArgs) -> Result<Report, CliError> {
    let ss: Vec<f64> = parse::list(&a.s)?;
    let mut params = Params::new();
    params.insert("weight".into(), json!(format!("{:?}", a.weight)));
    params.insert("s".into(), json!(ss));
    let (checks, table) = match a.check {
        QuantizeCheck::WeightOperator => {
            let ss = match a.weight {
                WeightKind::GaussS => ss,
                WeightKind::Constant => vec![0.0],
                WeightKind::ShiftedGauss => {
                    return Err(CliError::Config("the weight-operator check needs --weight gauss-s or constant".into()))
                }
            };
            let mut table = Table::new(&["s", "n", "closed_form", "numeric", "rel_error"]);
            let mut worst = 0.0f64;
            for &s in &ss {
                let kind = weight_operator_scheme(s, a.radial, a.angular)?;
                for n in 0..=a.n_max {
                    let exact = weight_operator_diag(s, n)?;
                    let numeric = weight_operator_numeric(s, n, kind)?;
                    let err = if exact == 0.0 { numeric.abs() } else { (numeric - exact).abs() / exact.abs() };
                    worst = worst.max(err);
                    table.push(vec![num(s), json!(n), num(exact), num(numeric), num(err)]);
                }
            }
            params.insert("n_max".into(), json!(a.n_max));
            (vec![Check::at_most("weight-operator", worst, tol(&a.common, 1e-6)?)], Some(table))
        }
        QuantizeCheck::Oracle => {
            let lambdas: Vec<f64> = parse::list(&a.lambda)?;
            let ws = weights(a, &ss)?;
            let mut table = Table::new(&["lambda", "max_sector", "quantity", "rel_error"]);
            let mut worst = 0.0f64;
            for &lambda in &lambdas {
                for (name, err) in oracle_parts(lambda, &ws, a.oracle_radial, a.oracle_angular)? {
                    worst = worst.max(err);
                    table.push(vec![num(lambda), json!(4), json!(name), num(err)]);
                }
            }
            params.insert("lambda".into(), json!(lambdas));
            (vec![Check::at_most("oracle", worst, tol(&a.common, 0.02)?)], Some(table))
        }
        QuantizeCheck::Canonical => {
            let g = matrix_or(&a.g, shear)?;
            let pair = pseudo_pair(&g, a.l_max)?;
            let t = tol(&a.common, 1e-8)?;
            let checks = weights(a, &ss)?
                .iter()
                .map(|w| Check::at_most("pseudo-canonical", pseudo_canonical_deviation(w, &pair), t).with_param("weight", w.label.clone()))
                .collect();
            params.insert("g".into(), gmat(&g));
            params.insert("L_max".into(), json!(a.l_max));
            (checks, None)
        }
    };
    Ok(Report::new("quantize", params, checks, table))
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Criterion ids to run, e.g. `1-9` or `2,7,10`.
    #[arg(long, default_value = "1-11")]
    pub criteria: String,
    #[command(flatten)]
    pub common: Common,
}

fn suite(a: &SuiteArgs) -> Result<Report, CliError> {
    if a.common.tol.is_some() {
        return Err(CliError::Config("suite tolerances are fixed; --tol does not apply".into()));
    }
    let ids = parse::id_list(&a.criteria)?;
    let mut checks = Vec::new();
    for id in ids {
        let start = Instant::now();
        let r = acceptance::run_criterion(id);
        eprintln!("{}", r.line());
        eprintln!("  wall time {:.2}s", start.elapsed().as_secs_f64());
        let c = if r.lower_is_better {
            Check::at_most(format!("criterion-{id}"), r.measured, r.tolerance)
        } else {
            Check::at_least(format!("criterion-{id}"), r.measured, r.tolerance)
        };
        let mut c = c.with_param("title", r.title).with_param("detail", r.detail.clone()).with_param("runtime_limit_s", r.runtime_limit_s);
        c.pass = r.pass;
        checks.push(c);
    }
    let mut params = Params::new();
    params.insert("criteria".into(), json!(a.criteria));
    Ok(Report::new("suite", params, checks, None))
}
