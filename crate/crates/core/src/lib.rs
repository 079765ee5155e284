// Negated comparisons such as `!(x > 0.0)` are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod asymptotics;
pub mod ddmat;
pub mod deformed_hermite;
pub mod displacement_quant;
pub mod error;
pub mod fock_ops;
pub mod gl2_rep;
pub mod hermite_core;
pub mod index_maps;
pub mod quadrature;
pub mod serial;
pub mod special_fn;

pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
