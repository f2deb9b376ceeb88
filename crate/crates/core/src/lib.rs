#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dantzig;
pub mod error;
pub mod inference;
pub mod lp;
pub mod numerics;
pub mod simulate;
pub mod synthesize;

pub use error::{Error, Result};
