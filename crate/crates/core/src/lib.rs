//! Free-probability criteria for k-positivity of linear maps, with the GUE
//! random-matrix experiments built on them.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod freeconv;
pub mod kposcheck;
pub mod linalg;
pub mod measures;
pub mod positivity;
pub mod quadrature;
pub mod registry;
pub mod rmt;
pub mod witness;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
