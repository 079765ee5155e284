//! Large-degree estimates of the diagonal entries
//! `T^L_{n1,n2;n1,n2}(h) = h11^n1 h22^n2 sum_k C(n1,k) C(n2,k) r^k`,
//! `r = |h12|^2 / (h11 h22)`, for positive Hermitian `h`.
//!
//! Two regimes: fixed difference `d = n2 - n1`, and fixed ratio `nu = n2 / n1`
//! via the Laplace method around the stationary point `xi_+` of `A(xi)`.
//! Every estimate is checked against the exact log-domain q-sum.

use crate::error::{invalid, Result};
use crate::gl2_rep::{diag_q_sum_log, GL2Matrix};
use crate::special_fn::{log_binomial, LogValue};
use serde::Serialize;
use std::f64::consts::PI;

fn positive_parts(h: &GL2Matrix) -> Result<(f64, f64, f64)> {
    if !h.is_positive_hermitian(1e-12) {
        return Err(invalid("asymptotic estimates need a positive Hermitian h"));
    }
    let (h11, h22) = (h.get(1, 1).re, h.get(2, 2).re);
    Ok((h11, h22, h.get(1, 2).norm_sqr() / (h11 * h22)))
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("need 0 < r < 1, got r = {r}")));
    }
    Ok(())
}

/// Exact `ln T_diag(h)` by the q-sum.
pub fn exact_log(h: &GL2Matrix, n1: u64, n2: u64) -> Result<f64> {
    let (h11, h22, r) = positive_parts(h)?;
    Ok(diag_q_sum_log(h11, h22, r, n1, n2))
}

/// Fixed-`d` estimate
/// `h11^n1 h22^n2 (2 pi n1)^(-1/2) [2 r (1-r)]^(-1/4) (1 + sqrt r)^(n1+n2+1)`.
pub fn asympt_fixed_d(h: &GL2Matrix, n1: u64, d: u64) -> Result<LogValue> {
    let (h11, h22, r) = positive_parts(h)?;
    check_r(r)?;
    if n1 == 0 {
        return Err(invalid("n1 must be at least 1"));
    }
    let n2 = n1 + d;
    let v = n1 as f64 * h11.ln() + n2 as f64 * h22.ln() - 0.5 * (2.0 * PI * n1 as f64).ln()
        - 0.25 * (2.0 * r * (1.0 - r)).ln()
        + (n1 + n2 + 1) as f64 * (1.0 + r.sqrt()).ln();
    Ok(LogValue::from_ln(v))
}

/// Fixed-`d` estimate with the Darboux prefactor `(4 r)^(-1/4)` in place of
/// `[2 r (1-r)]^(-1/4)`; the two differ by the constant `((1-r)/2)^(1/4)`.
pub fn asympt_fixed_d_darboux(h: &GL2Matrix, n1: u64, d: u64) -> Result<LogValue> {
    let (_, _, r) = positive_parts(h)?;
    let plain = asympt_fixed_d(h, n1, d)?;
    Ok(LogValue::from_ln(plain.log_magnitude + 0.25 * ((1.0 - r) / 2.0).ln()))
}

/// Limit of `exact / asympt_fixed_d` as `n1 -> infinity`.
pub fn fixed_d_ratio_limit(r: f64) -> f64 {
    ((1.0 - r) / 2.0).powf(0.25)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceData {
    pub r: f64,
    pub nu: f64,
    pub xi_plus: f64,
    pub a_at_xi: f64,
    pub app_at_xi: f64,
    pub ap_at_xi: f64,
}

/// `A(xi) = -[2 xi ln xi - xi ln(nu r) + (1-xi) ln(1-xi) + (nu-xi) ln(1-xi/nu)]`.
pub fn a_fn(xi: f64, r: f64, nu: f64) -> f64 {
    -(2.0 * xi * xi.ln() - xi * (nu * r).ln() + (1.0 - xi) * (1.0 - xi).ln() + (nu - xi) * (1.0 - xi / nu).ln())
}

pub fn a_prime(xi: f64, r: f64, nu: f64) -> f64 {
    ((1.0 - xi) * (1.0 - xi / nu)).ln() - 2.0 * xi.ln() + (nu * r).ln()
}

pub fn a_second(xi: f64, nu: f64) -> f64 {
    -1.0 / (1.0 - xi) - 2.0 / xi - 1.0 / (nu - xi)
}

pub fn laplace_root(r: f64, nu: f64) -> Result<LaplaceData> {
    check_r(r)?;
    if !(nu >= 1.0 && nu.is_finite()) {
        return Err(invalid(format!("need nu >= 1, got nu = {nu}")));
    }
    let sr = r.sqrt();
    let xi = sr * ((r * (nu - 1.0).powi(2) + 4.0 * nu).sqrt() - sr * (1.0 + nu)) / (2.0 * (1.0 - r));
    Ok(LaplaceData {
        r,
        nu,
        xi_plus: xi,
        a_at_xi: a_fn(xi, r, nu),
        app_at_xi: a_second(xi, nu),
        ap_at_xi: a_prime(xi, r, nu),
    })
}

/// `h11^n1 h22^n2 (2 pi n1)^(-1/2) [xi (2 - (1 + 1/nu) xi)]^(-1/2) (1-xi)^(-n1) (1-xi/nu)^(-n2)`
/// with `n2 = round(nu n1)`.
pub fn asympt_laplace(h: &GL2Matrix, n1: u64, nu: f64) -> Result<LogValue> {
    let (h11, h22, r) = positive_parts(h)?;
    let data = laplace_root(r, nu)?;
    if n1 == 0 {
        return Err(invalid("n1 must be at least 1"));
    }
    let n2 = (nu * n1 as f64).round() as u64;
    let xi = data.xi_plus;
    let v = n1 as f64 * h11.ln() + n2 as f64 * h22.ln() - 0.5 * (2.0 * PI * n1 as f64).ln()
        - 0.5 * (xi * (2.0 - (1.0 + 1.0 / nu) * xi)).ln()
        - n1 as f64 * (1.0 - xi).ln()
        - n2 as f64 * (1.0 - xi / nu).ln();
    Ok(LogValue::from_ln(v))
}

/// Stirling form of `ln C(n1+n2, n1)`, the `r = 1` value of the q-sum.
pub fn stirling_r1_log(n1: u64, n2: u64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let s = a + b;
    0.5 * (s / (2.0 * PI * a * b)).ln() + s * s.ln() - a * a.ln() - b * b.ln()
}

/// `ln sum_k C(n1,k) C(n2,k)` at `r = 1`, which Vandermonde collapses to `ln C(n1+n2, n1)`.
pub fn r1_q_sum_log(n1: u64, n2: u64) -> (f64, f64) {
    (diag_q_sum_log(1.0, 1.0, 1.0, n1, n2), log_binomial(n1 + n2, n1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptRow {
    pub n1: u64,
    pub n2: u64,
    pub r: f64,
    pub nu_or_d: f64,
    pub log_exact: f64,
    pub log_estimate: f64,
    pub ratio: f64,
}

impl AsymptRow {
    pub const CSV_HEADER: &'static str = "n1,n2,r,nu_or_d,log_exact,log_estimate,ratio";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n1, self.n2, self.r, self.nu_or_d, self.log_exact, self.log_estimate, self.ratio
        )
    }

    /// `|log exact - log estimate| / L`.
    pub fn log_error_per_level(&self) -> f64 {
        (self.log_exact - self.log_estimate).abs() / (self.n1 + self.n2) as f64
    }
}

pub fn fixed_d_row(h: &GL2Matrix, n1: u64, d: u64) -> Result<AsymptRow> {
    let (_, _, r) = positive_parts(h)?;
    let est = asympt_fixed_d(h, n1, d)?.log_magnitude;
    let ex = exact_log(h, n1, n1 + d)?;
    Ok(AsymptRow { n1, n2: n1 + d, r, nu_or_d: d as f64, log_exact: ex, log_estimate: est, ratio: (ex - est).exp() })
}

pub fn laplace_row(h: &GL2Matrix, n1: u64, nu: f64) -> Result<AsymptRow> {
    let (_, _, r) = positive_parts(h)?;
    let est = asympt_laplace(h, n1, nu)?.log_magnitude;
    let n2 = (nu * n1 as f64).round() as u64;
    let ex = exact_log(h, n1, n2)?;
    Ok(AsymptRow { n1, n2, r, nu_or_d: nu, log_exact: ex, log_estimate: est, ratio: (ex - est).exp() })
}

/// Positive Hermitian `[[h11, sqrt(r h11 h22)], [.., h22]]`.
pub fn h_with_ratio(h11: f64, h22: f64, r: f64) -> Result<GL2Matrix> {
    let off = (r * h11 * h22).sqrt();
    GL2Matrix::from_real(h11, off, off, h22)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h_half() -> GL2Matrix {
        GL2Matrix::from_real(2.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn plain_fixed_d_is_off_by_a_constant() {
        let lim = fixed_d_ratio_limit(0.5);
        for (d, band) in [(0u64, 0.05), (1, 0.05), (5, 0.05)] {
            let row = fixed_d_row(&h_half(), 200, d).unwrap();
            assert!((row.ratio / lim - 1.0).abs() <= band, "d={d}: {} vs {lim}", row.ratio);
            let dar = asympt_fixed_d_darboux(&h_half(), 200, d).unwrap().log_magnitude;
            assert!(((row.log_exact - dar).exp() - 1.0).abs() <= band);
            assert!(row.log_error_per_level() <= 0.01);
        }
    }

    #[test]
    fn fixed_d_is_homogeneous() {
        let a = asympt_fixed_d(&h_half(), 50, 3).unwrap().log_magnitude;
        let b = asympt_fixed_d(&h_half().scale(3.0.into()), 50, 3).unwrap().log_magnitude;
        assert!((b - a - 103.0 * 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn fixed_d_rejects_degenerate_ratio() {
        let diag = GL2Matrix::from_real(2.0, 0.0, 0.0, 1.0).unwrap();
        assert!(asympt_fixed_d(&diag, 10, 0).is_err());
        assert!(asympt_fixed_d(&GL2Matrix::from_real(1.0, 0.5, 0.2, 1.0).unwrap(), 10, 0).is_err());
    }

    #[test]
    fn root_examples() {
        let d = laplace_root(0.999, 2.0).unwrap();
        assert!((d.xi_plus - 2.0 / 3.0).abs() <= 1e-2);
        let d = laplace_root(0.25, 1.0).unwrap();
        assert!((d.xi_plus - 1.0 / 3.0).abs() <= 1e-12);
        let d = laplace_root(0.5, 2.0).unwrap();
        assert!((d.xi_plus - (17f64.sqrt() - 3.0) / 2.0).abs() <= 1e-12);
        assert!(d.xi_plus * d.xi_plus + 3.0 * d.xi_plus - 2.0 < 1e-12);
        assert!(d.app_at_xi < 0.0);
        assert!(laplace_root(1.0, 2.0).is_err() && laplace_root(0.5, 0.5).is_err());
    }

    #[test]
    fn root_is_stationary() {
        for i in 1..=19 {
            let r = 0.05 * i as f64;
            for nu in [1.0, 1.5, 2.0, 3.0, 5.0, 8.0] {
                let d = laplace_root(r, nu).unwrap();
                assert!(d.ap_at_xi.abs() <= 1e-9, "r={r} nu={nu}: {}", d.ap_at_xi);
                assert!(d.xi_plus > 0.0 && d.xi_plus < 1.0);
                // root of xi^2 + r(1+nu)/(1-r) xi - r nu/(1-r)
                let q = d.xi_plus.powi(2) + r * (1.0 + nu) / (1.0 - r) * d.xi_plus - r * nu / (1.0 - r);
                assert!(q.abs() < 1e-12 * (1.0 + r * (1.0 + 2.0 * nu) / (1.0 - r)));
            }
        }
    }

    #[test]
    fn laplace_examples() {
        let a = laplace_row(&h_half(), 100, 2.0).unwrap();
        assert!(a.ratio > 0.9 && a.ratio < 1.1, "{}", a.ratio);
        let b = laplace_row(&h_half(), 100, 1.0).unwrap();
        let c = laplace_row(&h_half(), 300, 1.0).unwrap();
        assert!((c.ratio - 1.0).abs() < (b.ratio - 1.0).abs());
        for r in [0.2, 0.5, 0.8] {
            let h = h_with_ratio(1.3, 0.7, r).unwrap();
            let row = laplace_row(&h, 200, 2.0).unwrap();
            assert!(row.log_error_per_level() <= 0.01);
        }
    }

    #[test]
    fn r_equal_one_chain() {
        let (q, b) = r1_q_sum_log(300, 300);
        assert!((q - b).abs() < 1e-9);
        let s = stirling_r1_log(300, 300);
        assert!(((s - b).exp() - 1.0).abs() < 0.01);
        let (q, b) = r1_q_sum_log(17, 17);
        assert!((q.exp() - crate::special_fn::binomial(34, 17)).abs() < 1e-3);
        assert!((q - b).abs() < 1e-12);
    }

    #[test]
    fn csv_line_format() {
        let row = fixed_d_row(&h_half(), 10, 1).unwrap();
        assert_eq!(row.csv_line().split(',').count(), AsymptRow::CSV_HEADER.split(',').count());
    }
}
