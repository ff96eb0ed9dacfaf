//! Functional calculus, square functions and area integral functions for
//! sectorial matrices, with a catalog of test operators and verification suites.

// `!(x > 0.0)` style checks are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod error;
pub mod funcalc;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod quadratic;
pub mod quadrature;
pub mod sector;
pub mod symbols;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use sector::SectorialCertificate;
pub use symbols::Symbol;
