// Series coefficients are kept as published; `!(a < b)` is the NaN-aware form.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod bounds;
pub mod cli;
pub mod counting;
pub mod energy;
pub mod error;
pub mod expr;
pub mod moments;
pub mod oracle;
pub mod potential;
pub mod quad;
pub mod regge;
pub mod specfun;
pub mod transform;

pub use error::{Error, Result};
