#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decay;
pub mod error;
pub mod model;
pub mod quad;
pub mod resolvent;
pub mod resonance;

pub use error::{Error, Result};
