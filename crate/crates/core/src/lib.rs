pub mod cohom;
pub mod criteria;
pub mod error;
pub mod families;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod verdict;

pub use error::{Error, Result};
pub use field::{FpScalar, PrimeField};
pub use matrix::FpMatrix;
pub use poly::{Monomial, MultiPoly};
pub use verdict::{Verdict, VerdictKind, VerdictValue};
