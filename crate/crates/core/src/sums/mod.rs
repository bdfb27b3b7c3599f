//! Additive and multiplicative character sums.

pub mod acc;
pub mod additive;
pub mod characters;
pub mod fourier;

pub use acc::{ep, ComplexAcc, EpTable};

use num_complex::Complex64;
use serde::Serializer;

/// Serializes a complex number as `[re, im]`.
pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}
