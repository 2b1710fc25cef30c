//! Time-scale calculus on finite grids and a verification harness for Opial-type
//! inequalities, Lyapunov-type criteria and an integro-dynamic growth bound.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::needless_range_loop)]

pub mod cli;
pub mod dyneq;
pub mod error;
pub mod family;
pub mod grid;
pub mod monomial;
pub mod opial;
pub mod sum;
pub mod timescale;

pub use error::{Error, Result};
