//! Normalized complex Hermite polynomials `h_{n1,n2}(z, zbar)` as dense
//! coefficient grids, with exact Gaussian inner products.

use crate::index_maps::{beta_inv, truncation_dim, ModeIndex};
use crate::quadrature::gaussian_moment;
use crate::special_fn::{log_binomial, log_factorial};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `sum_{j,k} c[j][k] z^j zbar^k`, stored row-major in `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PolyCoeffsJson", try_from = "PolyCoeffsJson")]
pub struct PolyCoeffs {
    deg_z: usize,
    deg_zbar: usize,
    coeff: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyCoeffsJson {
    pub deg_z: usize,
    pub deg_zbar: usize,
    pub coeff: Vec<Vec<[f64; 2]>>,
}

impl From<PolyCoeffs> for PolyCoeffsJson {
    fn from(p: PolyCoeffs) -> Self {
        let coeff = (0..=p.deg_z)
            .map(|j| (0..=p.deg_zbar).map(|k| [p.get(j, k).re, p.get(j, k).im]).collect())
            .collect();
        PolyCoeffsJson { deg_z: p.deg_z, deg_zbar: p.deg_zbar, coeff }
    }
}

impl TryFrom<PolyCoeffsJson> for PolyCoeffs {
    type Error = String;
    fn try_from(j: PolyCoeffsJson) -> Result<Self, String> {
        if j.coeff.len() != j.deg_z + 1 || j.coeff.iter().any(|r| r.len() != j.deg_zbar + 1) {
            return Err("coefficient grid shape does not match deg_z/deg_zbar".into());
        }
        let grid = j.coeff.iter().map(|r| r.iter().map(|c| Complex64::new(c[0], c[1])).collect()).collect();
        Ok(PolyCoeffs::from_grid(grid))
    }
}

impl PolyCoeffs {
    pub fn zero() -> Self {
        Self { deg_z: 0, deg_zbar: 0, coeff: vec![Complex64::new(0.0, 0.0)] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { deg_z: 0, deg_zbar: 0, coeff: vec![c] }
    }

    pub fn monomial(j: usize, k: usize, c: Complex64) -> Self {
        let mut p = Self::blank(j, k);
        p.set(j, k, c);
        p.trimmed()
    }

    /// `cz * z + czbar * zbar`.
    pub fn linear(cz: Complex64, czbar: Complex64) -> Self {
        Self::from_grid(vec![vec![Complex64::new(0.0, 0.0), czbar], vec![cz, Complex64::new(0.0, 0.0)]])
    }

    /// Builds from rows indexed by the power of `z`; ragged rows are zero-padded.
    pub fn from_grid(grid: Vec<Vec<Complex64>>) -> Self {
        let rows = grid.len().max(1);
        let cols = grid.iter().map(|r| r.len()).max().unwrap_or(1).max(1);
        let mut p = Self::blank(rows - 1, cols - 1);
        for (j, row) in grid.iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                p.set(j, k, c);
            }
        }
        p.trimmed()
    }

    fn blank(deg_z: usize, deg_zbar: usize) -> Self {
        Self { deg_z, deg_zbar, coeff: vec![Complex64::new(0.0, 0.0); (deg_z + 1) * (deg_zbar + 1)] }
    }

    fn set(&mut self, j: usize, k: usize, c: Complex64) {
        let w = self.deg_zbar + 1;
        self.coeff[j * w + k] = c;
    }

    fn trimmed(mut self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut dz = self.deg_z;
        while dz > 0 && (0..=self.deg_zbar).all(|k| self.get(dz, k) == zero) {
            dz -= 1;
        }
        let mut dzb = self.deg_zbar;
        while dzb > 0 && (0..=dz).all(|j| self.get(j, dzb) == zero) {
            dzb -= 1;
        }
        if dz != self.deg_z || dzb != self.deg_zbar {
            let mut out = Self::blank(dz, dzb);
            for j in 0..=dz {
                for k in 0..=dzb {
                    out.set(j, k, self.get(j, k));
                }
            }
            self = out;
        }
        self
    }

    pub fn deg_z(&self) -> usize {
        self.deg_z
    }

    pub fn deg_zbar(&self) -> usize {
        self.deg_zbar
    }

    /// Coefficient of `z^j zbar^k` (zero outside the grid).
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        if j > self.deg_z || k > self.deg_zbar {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeff[j * (self.deg_zbar + 1) + k]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let mut out = Self::blank(self.deg_z.max(other.deg_z), self.deg_zbar.max(other.deg_zbar));
        for j in 0..=out.deg_z {
            for k in 0..=out.deg_zbar {
                out.set(j, k, f(self.get(j, k), other.get(j, k)));
            }
        }
        out.trimmed()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeff.iter_mut().for_each(|x| *x *= c);
        out.trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::blank(self.deg_z + other.deg_z, self.deg_zbar + other.deg_zbar);
        for j in 0..=self.deg_z {
            for k in 0..=self.deg_zbar {
                let a = self.get(j, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for jj in 0..=other.deg_z {
                    for kk in 0..=other.deg_zbar {
                        let idx = (j + jj) * (out.deg_zbar + 1) + k + kk;
                        out.coeff[idx] += a * other.get(jj, kk);
                    }
                }
            }
        }
        out.trimmed()
    }

    pub fn powu(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    pub fn mul_z(&self) -> Self {
        self.mul(&Self::monomial(1, 0, Complex64::new(1.0, 0.0)))
    }

    pub fn mul_zbar(&self) -> Self {
        self.mul(&Self::monomial(0, 1, Complex64::new(1.0, 0.0)))
    }

    pub fn d_z(&self) -> Self {
        if self.deg_z == 0 {
            return Self::zero();
        }
        let mut out = Self::blank(self.deg_z - 1, self.deg_zbar);
        for j in 1..=self.deg_z {
            for k in 0..=self.deg_zbar {
                out.set(j - 1, k, self.get(j, k) * j as f64);
            }
        }
        out.trimmed()
    }

    pub fn d_zbar(&self) -> Self {
        if self.deg_zbar == 0 {
            return Self::zero();
        }
        let mut out = Self::blank(self.deg_z, self.deg_zbar - 1);
        for j in 0..=self.deg_z {
            for k in 1..=self.deg_zbar {
                out.set(j, k - 1, self.get(j, k) * k as f64);
            }
        }
        out.trimmed()
    }

    /// Horner evaluation in `z` with inner Horner in `zbar`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (0..=self.deg_z).rev() {
            let mut row = Complex64::new(0.0, 0.0);
            for k in (0..=self.deg_zbar).rev() {
                row = row * zb + self.get(j, k);
            }
            acc = acc * z + row;
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dz = self.deg_z.max(other.deg_z);
        let dzb = self.deg_zbar.max(other.deg_zbar);
        let mut m = 0.0f64;
        for j in 0..=dz {
            for k in 0..=dzb {
                m = m.max((self.get(j, k) - other.get(j, k)).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub fn hermite_coeffs(idx: ModeIndex) -> PolyCoeffs {
    let (n1, n2) = (idx.n1, idx.n2);
    let norm = -0.5 * (log_factorial(n1) + log_factorial(n2));
    let mut grid = vec![vec![Complex64::new(0.0, 0.0); n2 as usize + 1]; n1 as usize + 1];
    for k in 0..=n1.min(n2) {
        let mag = (log_factorial(k) + log_binomial(n1, k) + log_binomial(n2, k) + norm).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        grid[(n1 - k) as usize][(n2 - k) as usize] = Complex64::new(sign * mag, 0.0);
    }
    PolyCoeffs::from_grid(grid)
}

/// Applies `exp(-d_z d_zbar)` coefficientwise.
pub fn exp_contraction(p: &PolyCoeffs) -> PolyCoeffs {
    let mut grid = vec![vec![Complex64::new(0.0, 0.0); p.deg_zbar + 1]; p.deg_z + 1];
    for (j, row) in grid.iter_mut().enumerate() {
        for (k, out) in row.iter_mut().enumerate() {
            let tmax = (p.deg_z - j).min(p.deg_zbar - k);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..=tmax {
                let c = p.get(j + t, k + t);
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let lw = log_factorial((j + t) as u64) - log_factorial(j as u64)
                    + log_factorial((k + t) as u64)
                    - log_factorial(k as u64)
                    - log_factorial(t as u64);
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                acc += c * (sign * lw.exp());
            }
            *out = acc;
        }
    }
    PolyCoeffs::from_grid(grid)
}

pub fn eval(p: &PolyCoeffs, z: Complex64) -> Complex64 {
    p.eval(z)
}

/// `int conj(p) q dnu` through the moments `int zbar^m z^m dnu = m!`.
pub fn inner(p: &PolyCoeffs, q: &PolyCoeffs) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..=p.deg_z {
        for b in 0..=p.deg_zbar {
            let cp = p.get(a, b);
            if cp == Complex64::new(0.0, 0.0) {
                continue;
            }
            // conj(z^a zbar^b) z^j zbar^k = zbar^(a+k) z^(b+j); need a + k = b + j
            for k in 0..=q.deg_zbar {
                let Some(j) = (a + k).checked_sub(b) else { continue };
                if j > q.deg_z {
                    continue;
                }
                acc += cp.conj() * q.get(j, k) * gaussian_moment((a + k) as u64, (a + k) as u64);
            }
        }
    }
    acc
}

/// Coordinates `<h_n, p>` of `p` along the flat Hermite basis up to sector `l_max`.
pub fn hermite_expand(p: &PolyCoeffs, l_max: usize) -> DVector<Complex64> {
    DVector::from_iterator(
        truncation_dim(l_max),
        (0..truncation_dim(l_max) as u64).map(|n| inner(&hermite_coeffs(beta_inv(n)), p)),
    )
}

/// `(n1, n2)` with `n1 + n2 <= max_degree`, in flat order.
pub fn modes_up_to(max_degree: usize) -> impl Iterator<Item = ModeIndex> {
    (0..truncation_dim(max_degree) as u64).map(beta_inv)
}

/// Largest `|<h_a, h_b> - delta_ab|` over all modes of total degree `<= max_degree`.
pub fn orthonormality_deviation(max_degree: usize) -> f64 {
    let hs: Vec<PolyCoeffs> = modes_up_to(max_degree).map(hermite_coeffs).collect();
    let mut worst = 0.0f64;
    for (i, a) in hs.iter().enumerate() {
        for (j, b) in hs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(a, b) - target).norm());
        }
    }
    worst
}

/// Exact rational coefficients with the normalization kept as a squared factor.
pub mod exact {
    use super::ModeIndex;
    use crate::index_maps::truncation_dim;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    /// `sqrt(norm_sq) * sum_{j,k} coeff[j][k] z^j zbar^k`.
    #[derive(Debug, Clone, PartialEq)]
    pub struct ExactPoly {
        pub coeff: Vec<Vec<BigRational>>,
        pub norm_sq: BigRational,
    }

    /// The number `value * sqrt(scale)`.
    #[derive(Debug, Clone, PartialEq)]
    pub struct ExactInner {
        pub value: BigRational,
        pub scale: BigRational,
    }

    impl ExactInner {
        pub fn is_zero(&self) -> bool {
            self.value.is_zero()
        }

        pub fn is_one(&self) -> bool {
            self.value.is_positive() && &self.value * &self.value * &self.scale == BigRational::one()
        }

        /// `|x - target|` for `target` in {0, 1}; exact zero when the identity holds.
        pub fn deviation_from(&self, target: u8) -> f64 {
            let holds = if target == 0 { self.is_zero() } else { self.is_one() };
            if holds {
                return 0.0;
            }
            use num_traits::ToPrimitive;
            let v = self.value.to_f64().unwrap_or(f64::NAN) * self.scale.to_f64().unwrap_or(f64::NAN).sqrt();
            (v - target as f64).abs()
        }
    }

    fn factorial(n: usize) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
    }

    pub fn exp_contraction(coeff: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
        let dz = coeff.len();
        let dzb = coeff.first().map_or(0, |r| r.len());
        let mut out = vec![vec![BigRational::zero(); dzb]; dz];
        for j in 0..dz {
            for k in 0..dzb {
                let mut acc = BigRational::zero();
                let mut t = 0;
                while j + t < dz && k + t < dzb {
                    let c = &coeff[j + t][k + t];
                    if !c.is_zero() {
                        let w = BigRational::new(
                            factorial(j + t) * factorial(k + t),
                            factorial(j) * factorial(k) * factorial(t),
                        );
                        if t % 2 == 0 {
                            acc += w * c;
                        } else {
                            acc -= w * c;
                        }
                    }
                    t += 1;
                }
                out[j][k] = acc;
            }
        }
        out
    }

    /// The explicit sum `sum_k (-1)^k k! C(n1,k) C(n2,k) z^(n1-k) zbar^(n2-k)`.
    pub fn hermite(idx: ModeIndex) -> ExactPoly {
        let (n1, n2) = (idx.n1 as usize, idx.n2 as usize);
        let mut coeff = vec![vec![BigRational::zero(); n2 + 1]; n1 + 1];
        for k in 0..=n1.min(n2) {
            let c = factorial(n1) / factorial(n1 - k) * factorial(n2) / (factorial(k) * factorial(n2 - k));
            let c = BigRational::from_integer(c);
            coeff[n1 - k][n2 - k] = if k % 2 == 0 { c } else { -c };
        }
        ExactPoly { coeff, norm_sq: BigRational::new(BigInt::one(), factorial(n1) * factorial(n2)) }
    }

    /// The same polynomial from contraction of the monomial `z^n1 zbar^n2`.
    pub fn hermite_by_contraction(idx: ModeIndex) -> ExactPoly {
        let (n1, n2) = (idx.n1 as usize, idx.n2 as usize);
        let mut coeff = vec![vec![BigRational::zero(); n2 + 1]; n1 + 1];
        coeff[n1][n2] = BigRational::one();
        ExactPoly {
            coeff: exp_contraction(&coeff),
            norm_sq: BigRational::new(BigInt::one(), factorial(n1) * factorial(n2)),
        }
    }

    pub fn inner(p: &ExactPoly, q: &ExactPoly) -> ExactInner {
        let mut acc = BigRational::zero();
        for (a, row) in p.coeff.iter().enumerate() {
            for (b, cp) in row.iter().enumerate() {
                if cp.is_zero() {
                    continue;
                }
                for k in 0..q.coeff.first().map_or(0, |r| r.len()) {
                    let Some(j) = (a + k).checked_sub(b) else { continue };
                    if j >= q.coeff.len() {
                        continue;
                    }
                    let cq = &q.coeff[j][k];
                    if !cq.is_zero() {
                        acc += cp * cq * BigRational::from_integer(factorial(a + k));
                    }
                }
            }
        }
        ExactInner { value: acc, scale: &p.norm_sq * &q.norm_sq }
    }

    /// Largest deviation from orthonormality; exactly zero when every identity holds.
    pub fn orthonormality_deviation(max_degree: usize) -> f64 {
        let hs: Vec<ExactPoly> = (0..truncation_dim(max_degree) as u64)
            .map(|n| hermite(crate::index_maps::beta_inv(n)))
            .collect();
        let mut worst = 0.0f64;
        for (i, a) in hs.iter().enumerate() {
            for (j, b) in hs.iter().enumerate() {
                worst = worst.max(inner(a, b).deviation_from(u8::from(i == j)));
            }
        }
        worst
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn both_constructions_coincide() {
            for n1 in 0..=10 {
                for n2 in 0..=10 {
                    let idx = ModeIndex::new(n1, n2);
                    assert_eq!(hermite(idx), hermite_by_contraction(idx));
                }
            }
        }

        #[test]
        fn exact_orthonormality() {
            assert_eq!(orthonormality_deviation(6), 0.0);
        }
    }
}
