//! Exact arithmetic in prime fields and their small extensions.
//!
//! Elements are plain `Copy` values interpreted relative to a field
//! descriptor; the descriptor is what carries the modulus. `Default` on an
//! element type is always the field's zero.

mod ext;
mod prime;
mod roots;

pub use ext::{find_irreducible, ExtField, FpnElem, MAX_EXT_ORDER};
pub use prime::{is_prime, PrimeField};
pub use roots::{multiplicative_order, prime_factors, primitive_root, DlogTable};

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::Result;

pub trait FiniteField: Send + Sync + Debug {
    type Elem: Copy + Eq + Ord + Hash + Debug + Default + Send + Sync + 'static;

    fn characteristic(&self) -> u64;
    fn degree(&self) -> u32;
    /// Number of elements, `p^n`.
    fn order(&self) -> u64;

    fn zero(&self) -> Self::Elem {
        Self::Elem::default()
    }
    fn one(&self) -> Self::Elem;
    /// Embeds an integer through its residue mod p.
    fn from_base(&self, v: u64) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem {
        let p = self.characteristic() as i64;
        self.from_base(v.rem_euclid(p) as u64)
    }

    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Result<Self::Elem>;

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Binary exponentiation; `pow(0, 0) = 1` (empty product).
    fn pow(&self, a: Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace to the prime field, as a residue in `[0, p)`.
    fn trace(&self, a: Self::Elem) -> u64;

    /// The `index`-th element in the field's fixed enumeration order.
    fn element(&self, index: u64) -> Self::Elem;
    /// Inverse of [`FiniteField::element`].
    fn index(&self, a: Self::Elem) -> u64;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    /// `Σ a_i b_i`.
    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        a.iter().zip(b).fold(self.zero(), |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    fn elements(&self) -> Elements<'_, Self>
    where
        Self: Sized,
    {
        Elements { field: self, next: 0 }
    }
}

/// Iterator over all field elements in enumeration order.
pub struct Elements<'a, F: FiniteField> {
    field: &'a F,
    next: u64,
}

impl<F: FiniteField> Iterator for Elements<'_, F> {
    type Item = F::Elem;

    fn next(&mut self) -> Option<F::Elem> {
        if self.next >= self.field.order() {
            return None;
        }
        let e = self.field.element(self.next);
        self.next += 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.field.order() - self.next) as usize;
        (left, Some(left))
    }
}

impl<F: FiniteField> ExactSizeIterator for Elements<'_, F> {}
