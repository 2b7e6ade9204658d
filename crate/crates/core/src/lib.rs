#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod generator;
pub mod repfn;
pub mod solver;
pub mod spd;
pub mod verify;

pub use error::{Error, Result};
pub use generator::Generator;
pub use spd::{Matrix, SpdMatrix};
