//! Fixed inputs shared by the criterion benches.

use num_complex::Complex64;
use pseudoboson::gl2_rep::GL2Matrix;

/// A generic complex matrix with condition number about 2.6.
pub fn sample_g() -> GL2Matrix {
    GL2Matrix::new(
        Complex64::new(1.2, 0.3),
        Complex64::new(-0.4, 0.5),
        Complex64::new(0.2, -0.1),
        Complex64::new(0.9, 0.4),
    )
    .expect("invertible")
}

pub fn sample_z() -> Complex64 {
    Complex64::new(0.6, -0.4)
}

#[cfg(test)]
mod tests {
    #[test]
    fn sample_is_well_conditioned() {
        let c = super::sample_g().condition_number();
        assert!(c > 1.0 && c < 5.0, "{c}");
    }
}
