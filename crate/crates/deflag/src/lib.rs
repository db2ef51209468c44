#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Staggered (MAC) finite-volume solver for 1D reactive compressible Euler flow.
//!
//! The burnt zone is tracked by an indicator `G`; chemistry is a one-step
//! irreversible reaction relaxed with a time scale `epsilon`. The Euler part
//! is a pressure-correction scheme that conserves a discrete total energy.

pub mod chemistry;
pub mod error;
pub mod grid;
pub mod harness;
pub mod hydro;
pub mod oracle;
pub mod thermo;
pub mod transport;
pub mod tridiag;

pub use error::{Error, Result};
