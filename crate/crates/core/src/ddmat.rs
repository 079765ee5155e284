//! Complex matrices stored as unevaluated double-double sums `hi + lo`.
//!
//! Conjugations `T X T^{-1}` by ill-conditioned representation blocks cancel
//! catastrophically in plain f64; carrying twice the working precision keeps
//! commutator and ladder identities exact to ~1e-30 relative.

use crate::special_fn::two_sum;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Dot2 accumulation returning the result as a normalized pair.
fn dot2_dd<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> (f64, f64) {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (x, y) in pairs {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let (t, se) = two_sum(s, p);
        s = t;
        c += se + pe;
    }
    fast_two_sum(s, c)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Sum as if computed in K-fold working precision (SumK), returned as a
/// normalized pair. `terms` is overwritten by the error-free transforms.
fn sum_k(terms: &mut [f64], k: usize) -> (f64, f64) {
    if terms.is_empty() {
        return (0.0, 0.0);
    }
    for _ in 1..k {
        for i in 1..terms.len() {
            let (s, e) = two_sum(terms[i], terms[i - 1]);
            terms[i] = s;
            terms[i - 1] = e;
        }
    }
    let last = terms.len() - 1;
    let tail: f64 = terms[..last].iter().sum();
    fast_two_sum(terms[last], tail)
}

fn add_dd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (s, e) = two_sum(a.0, b.0);
    fast_two_sum(s, e + a.1 + b.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdMatrix {
    pub hi: DMatrix<Complex64>,
    pub lo: DMatrix<Complex64>,
}

impl DdMatrix {
    pub fn from_f64(m: DMatrix<Complex64>) -> Self {
        let lo = DMatrix::zeros(m.nrows(), m.ncols());
        Self { hi: m, lo }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_f64(DMatrix::identity(n, n))
    }

    pub fn nrows(&self) -> usize {
        self.hi.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.hi.ncols()
    }

    /// Rounded to a single f64 matrix.
    pub fn to_f64(&self) -> DMatrix<Complex64> {
        &self.hi + &self.lo
    }

    pub fn adjoint(&self) -> Self {
        Self { hi: self.hi.adjoint(), lo: self.lo.adjoint() }
    }

    pub fn column(&self, j: usize) -> Self {
        Self { hi: self.hi.columns(j, 1).into_owned(), lo: self.lo.columns(j, 1).into_owned() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        let mut hi = DMatrix::zeros(self.nrows(), self.ncols());
        let mut lo = DMatrix::zeros(self.nrows(), self.ncols());
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                let (h, l) = (self.hi[(i, j)], self.lo[(i, j)]);
                let re = dot2_dd([(h.re, c), (l.re, c)]);
                let im = dot2_dd([(h.im, c), (l.im, c)]);
                hi[(i, j)] = Complex64::new(re.0, im.0);
                lo[(i, j)] = Complex64::new(re.1, im.1);
            }
        }
        Self { hi, lo }
    }

    fn zip(&self, other: &Self, sign: f64) -> Self {
        assert_eq!((self.nrows(), self.ncols()), (other.nrows(), other.ncols()));
        let mut hi = DMatrix::zeros(self.nrows(), self.ncols());
        let mut lo = DMatrix::zeros(self.nrows(), self.ncols());
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                let (a, al, b, bl) = (self.hi[(i, j)], self.lo[(i, j)], other.hi[(i, j)], other.lo[(i, j)]);
                let re = add_dd((a.re, al.re), (sign * b.re, sign * bl.re));
                let im = add_dd((a.im, al.im), (sign * b.im, sign * bl.im));
                hi[(i, j)] = Complex64::new(re.0, im.0);
                lo[(i, j)] = Complex64::new(re.1, im.1);
            }
        }
        Self { hi, lo }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, -1.0)
    }

    /// Product with `hi*hi + hi*lo + lo*hi` accumulated by Dot2; zero entries
    /// of the left factor are skipped.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols(), other.nrows());
        let zero = Complex64::new(0.0, 0.0);
        let rows: Vec<Vec<(usize, Complex64, Complex64)>> = (0..self.nrows())
            .map(|i| {
                (0..self.ncols())
                    .filter(|&k| self.hi[(i, k)] != zero || self.lo[(i, k)] != zero)
                    .map(|k| (k, self.hi[(i, k)], self.lo[(i, k)]))
                    .collect()
            })
            .collect();
        let (n, m) = (self.nrows(), other.ncols());
        let mut hi = DMatrix::zeros(n, m);
        let mut lo = DMatrix::zeros(n, m);
        for j in 0..m {
            for i in 0..n {
                let terms = || {
                    rows[i].iter().flat_map(move |&(k, ah, al)| {
                        let (bh, bl) = (other.hi[(k, j)], other.lo[(k, j)]);
                        [(ah, bh), (ah, bl), (al, bh)]
                    })
                };
                let re = dot2_dd(terms().flat_map(|(a, b)| [(a.re, b.re), (-a.im, b.im)]));
                let im = dot2_dd(terms().flat_map(|(a, b)| [(a.re, b.im), (a.im, b.re)]));
                hi[(i, j)] = Complex64::new(re.0, im.0);
                lo[(i, j)] = Complex64::new(re.1, im.1);
            }
        }
        Self { hi, lo }
    }

    /// `max |self - other|` entrywise, evaluated in double-double.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).to_f64().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_f64().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `I - self * x`, with every product split exactly and summed in
    /// triple working precision. Used for Newton residuals, whose accuracy
    /// bounds how well both one-sided residuals of a refined inverse converge.
    pub fn identity_residual(&self, x: &Self) -> Self {
        assert_eq!(self.ncols(), x.nrows());
        let zero = Complex64::new(0.0, 0.0);
        let (n, m) = (self.nrows(), x.ncols());
        let rows: Vec<Vec<(usize, Complex64, Complex64)>> = (0..n)
            .map(|i| {
                (0..self.ncols())
                    .filter(|&k| self.hi[(i, k)] != zero || self.lo[(i, k)] != zero)
                    .map(|k| (k, self.hi[(i, k)], self.lo[(i, k)]))
                    .collect()
            })
            .collect();
        let mut hi = DMatrix::zeros(n, m);
        let mut lo = DMatrix::zeros(n, m);
        let mut re_terms = Vec::new();
        let mut im_terms = Vec::new();
        for j in 0..m {
            for i in 0..n {
                re_terms.clear();
                im_terms.clear();
                if i == j {
                    re_terms.push(1.0);
                }
                for &(k, ah, al) in &rows[i] {
                    for a in [ah, al] {
                        for b in [x.hi[(k, j)], x.lo[(k, j)]] {
                            for (u, v, sign) in [(a.re, b.re, -1.0), (a.im, b.im, 1.0)] {
                                let (p, e) = two_prod(u, v);
                                re_terms.extend([sign * p, sign * e]);
                            }
                            for (u, v) in [(a.re, b.im), (a.im, b.re)] {
                                let (p, e) = two_prod(u, v);
                                im_terms.extend([-p, -e]);
                            }
                        }
                    }
                }
                let re = sum_k(&mut re_terms, 3);
                let im = sum_k(&mut im_terms, 3);
                hi[(i, j)] = Complex64::new(re.0, im.0);
                lo[(i, j)] = Complex64::new(re.1, im.1);
            }
        }
        Self { hi, lo }
    }

    /// Refines an approximate inverse `x0` of `t` by Newton steps
    /// `X <- X + X (I - T X)` with double-double residuals.
    pub fn refine_inverse(t_dd: &Self, x0: Self, max_steps: usize) -> Self {
        let mut x = x0;
        let mut best = (f64::INFINITY, x.clone());
        for _ in 0..=max_steps {
            let r = t_dd.identity_residual(&x);
            let size = r.max_abs();
            if size >= best.0 {
                break;
            }
            best = (size, x.clone());
            if size == 0.0 {
                break;
            }
            x = x.add(&x.mul(&r));
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_keeps_low_order_bits() {
        let a = DdMatrix::from_f64(DMatrix::from_row_slice(1, 2, &[Complex64::new(1e16, 0.0), Complex64::new(1.0, 0.0)]));
        let b = DdMatrix::from_f64(DMatrix::from_row_slice(2, 1, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]));
        let p = a.mul(&b);
        assert_eq!((p.hi[(0, 0)].re, p.lo[(0, 0)].re), (1e16, 1.0));
        let back = p.sub(&DdMatrix::from_f64(DMatrix::from_element(1, 1, Complex64::new(1e16, 0.0))));
        assert_eq!(back.to_f64()[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sum_k_is_exact_on_cancelling_terms() {
        let mut t = [1e300, 1.0, -1e300, 1e-300];
        assert_eq!(super::sum_k(&mut t, 3), (1.0, 1e-300));
    }

    #[test]
    fn refined_inverse_of_hilbert_like_matrix() {
        let n = 8;
        let h = DMatrix::from_fn(n, n, |i, j| Complex64::new(1.0 / (i + j + 1) as f64, 0.0));
        let x0 = h.clone().try_inverse().unwrap();
        let x = DdMatrix::refine_inverse(&DdMatrix::from_f64(h.clone()), DdMatrix::from_f64(x0), 6);
        let h = DdMatrix::from_f64(h);
        // cond(H_8) ~ 1.5e10; plain f64 leaves residuals near 1e-6
        assert!(h.identity_residual(&x).max_abs() < 1e-20, "{}", h.identity_residual(&x).max_abs());
        assert!(x.identity_residual(&h).max_abs() < 1e-20, "{}", x.identity_residual(&h).max_abs());
    }
}
