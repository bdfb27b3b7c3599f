//! Pseudorandom subsets of prime fields built from polynomial families.

pub mod combin;
pub mod complexity;
pub mod curves;
pub mod error;
pub mod field;
pub mod measures;
pub mod par;
pub mod poly;
pub mod subsets;
pub mod sums;

pub use error::{Error, Result};
