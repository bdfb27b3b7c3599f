use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FiniteField;

/// Data `(b, c, d)` of the bilinear inverse sum, as residues mod p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BilinearInstance {
    pub p: u64,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub d: Vec<u64>,
}

fn distinct(v: &[u64]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1])
}

impl BilinearInstance {
    pub fn new(p: u64, b: Vec<u64>, c: Vec<u64>, d: Vec<u64>) -> Result<Self> {
        let inst = Self { p, b, c, d };
        inst.validate()?;
        Ok(inst)
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInstance(m.to_string()));
        let k = self.b.len();
        if k == 0 || self.c.len() != k || self.d.len() != k {
            return bad("b, c, d must have the same length k ≥ 1");
        }
        if k as u64 >= self.p {
            return bad("need k < p");
        }
        if self.b.iter().chain(&self.c).chain(&self.d).any(|&x| x >= self.p) {
            return bad("residues must lie in [0, p)");
        }
        if !distinct(&self.b) || !distinct(&self.c) {
            return bad("the b_i and the c_i must be pairwise distinct");
        }
        if self.d.contains(&0) {
            return bad("every d_i must be nonzero");
        }
        Ok(())
    }

    /// Uniformly random admissible instance.
    pub fn random<R: Rng + ?Sized>(p: u64, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || k as u64 >= p {
            return Err(Error::InvalidInstance("need 1 ≤ k < p".into()));
        }
        let residues: Vec<u64> = (0..p).collect();
        let b = residues.choose_multiple(rng, k).copied().collect();
        let c = residues.choose_multiple(rng, k).copied().collect();
        let d = (0..k).map(|_| rng.gen_range(1..p)).collect();
        Self::new(p, b, c, d)
    }

    /// Translates `x ↦ x - β`, `y ↦ y - γ` with the smallest `β ∉ {b_i}` and
    /// `γ ∉ {c_i}`, so that every `b_i` and `c_i` becomes nonzero. Level-set
    /// counts are unchanged. Returns the shifted instance and `(β, γ)`.
    pub fn normalized(&self) -> (Self, u64, u64) {
        let p = self.p;
        let beta = (0..p).find(|x| !self.b.contains(x)).expect("k < p");
        let gamma = (0..p).find(|y| !self.c.contains(y)).expect("k < p");
        let shift = |v: &[u64], s: u64| v.iter().map(|&x| (x + p - s) % p).collect();
        (Self { p, b: shift(&self.b, beta), c: shift(&self.c, gamma), d: self.d.clone() }, beta, gamma)
    }

    pub fn is_normalized(&self) -> bool {
        !self.b.contains(&0) && !self.c.contains(&0)
    }

    /// The instance embedded in `field` (whose characteristic must be p).
    pub fn embed<F: FiniteField>(&self, field: &F) -> Result<Embedded<F::Elem>> {
        if field.characteristic() != self.p {
            return Err(Error::FieldMismatch);
        }
        let e = |v: &[u64]| v.iter().map(|&x| field.from_base(x)).collect();
        Ok(Embedded { b: e(&self.b), c: e(&self.c), d: e(&self.d) })
    }
}

#[derive(Debug, Clone)]
pub struct Embedded<E> {
    pub b: Vec<E>,
    pub c: Vec<E>,
    pub d: Vec<E>,
}
