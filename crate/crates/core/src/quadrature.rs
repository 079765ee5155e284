//! Cubature on the complex plane for the Gaussian measure
//! `dnu = e^{-|z|^2} d^2z / pi` and for the flat measure `d^2z / pi`.
//!
//! One-dimensional Gauss rules come from the Golub-Welsch eigenproblem, with
//! a Newton polish of each node and Christoffel-sum weights kept in log form so
//! that Laguerre weights far in the tail keep full relative accuracy.

use crate::error::{invalid, Error, Result};
use crate::special_fn::{factorial, neumaier_sum};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `int zbar^a z^b dnu`.
pub fn gaussian_moment(a: u64, b: u64) -> f64 {
    if a == b {
        factorial(a)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Gauss-Hermite rule in `x` and in `y`.
    TensorHermite { nodes_per_axis: usize },
    /// Gauss-Laguerre in `t = |z|^2` (scaled by `decay`, so the rule is exact for
    /// polynomials times `e^{-decay t}`) times a uniform angular rule.
    Polar { radial: usize, angular: usize, decay: f64 },
    /// Gauss-Legendre in `t` on `[0, radius^2]` times a uniform angular rule.
    Disk { radius: f64, radial: usize, angular: usize },
}

impl SchemeKind {
    pub fn polar(radial: usize, angular: usize) -> Self {
        SchemeKind::Polar { radial, angular, decay: 1.0 }
    }

    /// Same family with every node count doubled.
    pub fn refined(&self) -> Self {
        match *self {
            SchemeKind::TensorHermite { nodes_per_axis } => {
                SchemeKind::TensorHermite { nodes_per_axis: 2 * nodes_per_axis }
            }
            SchemeKind::Polar { radial, angular, decay } => {
                SchemeKind::Polar { radial: 2 * radial, angular: 2 * angular, decay }
            }
            SchemeKind::Disk { radius, radial, angular } => {
                SchemeKind::Disk { radius, radial: 2 * radial, angular: 2 * angular }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneNode {
    pub z: Complex64,
    /// Weight for `dnu`.
    pub w_gauss: f64,
    /// Weight for `d^2z / pi`.
    pub w_flat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    Gaussian,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneScheme {
    pub kind: SchemeKind,
    pub nodes: Vec<PlaneNode>,
    /// Polynomial exactness degree of the underlying one-dimensional rule.
    pub order: usize,
}

impl PlaneScheme {
    pub fn weight(&self, node: &PlaneNode, measure: Measure) -> f64 {
        match measure {
            Measure::Gaussian => node.w_gauss,
            Measure::Flat => node.w_flat,
        }
    }
}

/// One-dimensional Gauss rule with weights stored as logarithms.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub log_weights: Vec<f64>,
}

impl GaussRule {
    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Hermite,
    Laguerre,
    Legendre,
}

impl Family {
    fn diag(self, k: usize) -> f64 {
        match self {
            Family::Laguerre => 2.0 * k as f64 + 1.0,
            _ => 0.0,
        }
    }

    /// Off-diagonal `b_k` linking degrees `k-1` and `k`.
    fn off(self, k: usize) -> f64 {
        let k = k as f64;
        match self {
            Family::Hermite => (k / 2.0).sqrt(),
            Family::Laguerre => k,
            Family::Legendre => k / (4.0 * k * k - 1.0).sqrt(),
        }
    }

    fn log_mass(self) -> f64 {
        match self {
            Family::Hermite => 0.5 * std::f64::consts::PI.ln(),
            Family::Laguerre => 0.0,
            Family::Legendre => 2f64.ln(),
        }
    }
}

/// Orthonormal recurrence at `x`: returns `(p_n, p_n', ln sum_{k<n} p_k^2)` with
/// `p_n` and its derivative rescaled by a common positive factor.
fn orthonormal_eval(family: Family, n: usize, x: f64) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut p = (-0.5 * family.log_mass()).exp();
    let mut d_prev = 0.0;
    let mut d = 0.0;
    let mut sum_sq = 0.0;
    let mut log_scale = 0.0;
    for k in 0..n {
        sum_sq += p * p;
        let b_next = family.off(k + 1);
        let b_k = if k == 0 { 0.0 } else { family.off(k) };
        let p_next = ((x - family.diag(k)) * p - b_k * p_prev) / b_next;
        let d_next = (p + (x - family.diag(k)) * d - b_k * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        let mag = p.abs().max(p_prev.abs());
        if mag > 1e150 {
            let f = 1.0 / mag;
            p *= f;
            p_prev *= f;
            d *= f;
            d_prev *= f;
            sum_sq *= f * f;
            log_scale -= 2.0 * f.ln();
        }
    }
    (p, d, sum_sq.ln() + log_scale)
}

fn gauss_rule(family: Family, n: usize) -> Result<GaussRule> {
    if n == 0 {
        return Err(invalid("quadrature node count must be positive"));
    }
    let jac = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            family.diag(i)
        } else if i + 1 == j {
            family.off(j)
        } else if j + 1 == i {
            family.off(i)
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));
    let mut log_weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..2 {
            let (p, d, _) = orthonormal_eval(family, n, *x);
            if d != 0.0 && d.is_finite() {
                *x -= p / d;
            }
        }
        let (_, _, log_sum) = orthonormal_eval(family, n, *x);
        log_weights.push(-log_sum);
    }
    Ok(GaussRule { nodes, log_weights })
}

/// Nodes and weights for `int f(x) e^{-x^2} dx`.
pub fn gauss_hermite(n: usize) -> Result<GaussRule> {
    gauss_rule(Family::Hermite, n)
}

/// Nodes and weights for `int_0^inf f(x) e^{-x} dx`.
pub fn gauss_laguerre(n: usize) -> Result<GaussRule> {
    gauss_rule(Family::Laguerre, n)
}

/// Nodes and weights for `int_{-1}^{1} f(x) dx`.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_rule(Family::Legendre, n)
}

fn angles(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / count as f64))
        .collect()
}

pub fn build_scheme(kind: SchemeKind) -> Result<PlaneScheme> {
    match kind {
        SchemeKind::TensorHermite { nodes_per_axis } => {
            let rule = gauss_hermite(nodes_per_axis)?;
            let log_pi = std::f64::consts::PI.ln();
            let mut nodes = Vec::with_capacity(nodes_per_axis * nodes_per_axis);
            for (i, &x) in rule.nodes.iter().enumerate() {
                for (j, &y) in rule.nodes.iter().enumerate() {
                    let lw = rule.log_weights[i] + rule.log_weights[j] - log_pi;
                    nodes.push(PlaneNode {
                        z: Complex64::new(x, y),
                        w_gauss: lw.exp(),
                        w_flat: (lw + x * x + y * y).exp(),
                    });
                }
            }
            Ok(PlaneScheme { kind, nodes, order: 2 * nodes_per_axis - 1 })
        }
        SchemeKind::Polar { radial, angular, decay } => {
            if angular == 0 {
                return Err(invalid("angular node count must be positive"));
            }
            if !(decay > 0.0 && decay.is_finite()) {
                return Err(invalid(format!("polar decay rate must be positive, got {decay}")));
            }
            let rule = gauss_laguerre(radial)?;
            let dirs = angles(angular);
            let log_norm = -(decay.ln() + (angular as f64).ln());
            let mut nodes = Vec::with_capacity(radial * angular);
            for (k, &x) in rule.nodes.iter().enumerate() {
                let t = x / decay;
                let lw = rule.log_weights[k] + x + log_norm;
                for dir in &dirs {
                    nodes.push(PlaneNode { z: dir * t.sqrt(), w_gauss: (lw - t).exp(), w_flat: lw.exp() });
                }
            }
            Ok(PlaneScheme { kind, nodes, order: 2 * radial - 1 })
        }
        SchemeKind::Disk { radius, radial, angular } => {
            if angular == 0 {
                return Err(invalid("angular node count must be positive"));
            }
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(invalid(format!("disk radius must be positive, got {radius}")));
            }
            let rule = gauss_legendre(radial)?;
            let dirs = angles(angular);
            let half = radius * radius / 2.0;
            let mut nodes = Vec::with_capacity(radial * angular);
            for (k, &x) in rule.nodes.iter().enumerate() {
                let t = half * (1.0 + x);
                let wf = half * rule.log_weights[k].exp() / angular as f64;
                for dir in &dirs {
                    nodes.push(PlaneNode { z: dir * t.sqrt(), w_gauss: wf * (-t).exp(), w_flat: wf });
                }
            }
            Ok(PlaneScheme { kind, nodes, order: 2 * radial - 1 })
        }
    }
}

/// Weighted node sum in a fixed order.
pub fn integrate<F: Fn(Complex64) -> Complex64>(f: F, scheme: &PlaneScheme, measure: Measure) -> Complex64 {
    let vals: Vec<Complex64> = scheme.nodes.iter().map(|n| f(n.z) * scheme.weight(n, measure)).collect();
    Complex64::new(neumaier_sum(vals.iter().map(|v| v.re)), neumaier_sum(vals.iter().map(|v| v.im)))
}

/// Integrates on `kind` and on its refinement; fails when they differ by more than `tol`.
pub fn integrate_checked<F: Fn(Complex64) -> Complex64>(
    f: F,
    kind: SchemeKind,
    measure: Measure,
    tol: f64,
) -> Result<Complex64> {
    let coarse = integrate(&f, &build_scheme(kind)?, measure);
    let fine = integrate(&f, &build_scheme(kind.refined())?, measure);
    let delta = (fine - coarse).norm();
    if delta > tol {
        return Err(Error::NotConverged { delta, tol });
    }
    Ok(fine)
}

/// Operator-valued integral `sum_k w_k F(z_k)` of a matrix-valued integrand.
pub fn integrate_matrix<F: Fn(Complex64) -> DMatrix<Complex64>>(
    f: F,
    scheme: &PlaneScheme,
    measure: Measure,
    rows: usize,
    cols: usize,
) -> DMatrix<Complex64> {
    let mut acc = DMatrix::<Complex64>::zeros(rows, cols);
    for node in &scheme.nodes {
        acc += f(node.z) * Complex64::from(scheme.weight(node, measure));
    }
    acc
}

/// Vector-valued variant of [`integrate_matrix`].
pub fn integrate_vector<F: Fn(Complex64) -> DVector<Complex64>>(
    f: F,
    scheme: &PlaneScheme,
    measure: Measure,
    len: usize,
) -> DVector<Complex64> {
    let mut acc = DVector::<Complex64>::zeros(len);
    for node in &scheme.nodes {
        acc += f(node.z) * Complex64::from(scheme.weight(node, measure));
    }
    acc
}
