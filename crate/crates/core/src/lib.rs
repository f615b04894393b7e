//! Single-excitation dynamics of emitters and scatterers side-coupled to a
//! tight-binding waveguide.

// Negated comparisons below deliberately reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod csvfmt;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod resolvent;
pub mod scattering;
pub mod scenario;

pub use error::{Error, Result};
