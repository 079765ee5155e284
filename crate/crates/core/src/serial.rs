//! Row-major encodings of complex matrices.
//!
//! JSON form: `[[ [re, im], ... ], ...]`. Binary form: a little-endian `u64`
//! row count, a `u64` column count, then `rows * cols` pairs of little-endian
//! `f64` (re, im) in row-major order.

use crate::error::{invalid, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn matrix_to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<Complex64>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(invalid("ragged matrix rows"));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_to_le_bytes(m: &DMatrix<Complex64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * m.len());
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

pub fn matrix_from_le_bytes(bytes: &[u8]) -> Result<DMatrix<Complex64>> {
    let word = |k: usize| -> Result<[u8; 8]> {
        bytes.get(8 * k..8 * k + 8).and_then(|s| s.try_into().ok()).ok_or_else(|| invalid("truncated matrix buffer"))
    };
    let rows = u64::from_le_bytes(word(0)?) as usize;
    let cols = u64::from_le_bytes(word(1)?) as usize;
    if bytes.len() != 16 + 16 * rows * cols {
        return Err(invalid("matrix buffer length does not match its header"));
    }
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let k = 2 + 2 * (i * cols + j);
            m[(i, j)] = Complex64::new(f64::from_le_bytes(word(k)?), f64::from_le_bytes(word(k + 1)?));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let m = DMatrix::from_fn(2, 3, |i, j| Complex64::new(i as f64 - 0.5, j as f64 * 1.25));
        assert_eq!(matrix_from_rows(&matrix_to_rows(&m)).unwrap(), m);
        let b = matrix_to_le_bytes(&m);
        assert_eq!(b.len(), 16 + 16 * 6);
        assert_eq!(&b[16..24], &(-0.5f64).to_le_bytes());
        assert_eq!(matrix_from_le_bytes(&b).unwrap(), m);
        assert!(matrix_from_le_bytes(&b[..40]).is_err());
        assert!(matrix_from_rows(&[vec![[0.0, 0.0]], vec![]]).is_err());
    }
}
