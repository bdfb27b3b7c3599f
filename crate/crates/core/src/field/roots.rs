use serde::Serialize;

use super::{FiniteField, PrimeField};
use crate::error::{Error, Result};

/// Distinct prime factors of `n` in increasing order (trial division).
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of a nonzero element of `field`.
pub fn multiplicative_order<F: FiniteField>(field: &F, a: F::Elem) -> Result<u64> {
    if field.is_zero(a) {
        return Err(Error::ZeroInverse);
    }
    let mut ord = field.order() - 1;
    for l in prime_factors(ord) {
        while ord % l == 0 && field.pow(a, ord / l) == field.one() {
            ord /= l;
        }
    }
    Ok(ord)
}

/// Smallest generator of `F_p^*`.
pub fn primitive_root(field: &PrimeField) -> u64 {
    let p = field.p();
    let factors = prime_factors(p - 1);
    (1..p).find(|&g| factors.iter().all(|&l| field.pow(g, (p - 1) / l) != 1)).expect("F_p^* is cyclic")
}

/// Discrete logarithms to the canonical primitive root.
#[derive(Debug, Clone, Serialize)]
pub struct DlogTable {
    p: u64,
    generator: u64,
    // log[x] for x in 1..p; log[0] unused
    log: Vec<u32>,
    // exp[e] = g^e for e in 0..p-1
    exp: Vec<u32>,
}

impl DlogTable {
    pub fn new(field: &PrimeField) -> Result<Self> {
        let p = field.p();
        if p > u32::MAX as u64 {
            return Err(Error::Precondition(format!("dlog table for p = {p} does not fit")));
        }
        let g = primitive_root(field);
        let mut log = vec![u32::MAX; p as usize];
        let mut exp = Vec::with_capacity(p as usize - 1);
        let mut x = 1u64;
        for e in 0..p - 1 {
            log[x as usize] = e as u32;
            exp.push(x as u32);
            x = field.mul(x, g);
        }
        Ok(Self { p, generator: g, log, exp })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Exponent `e ∈ [0, p-1)` with `g^e = x`; `None` for zero.
    pub fn log(&self, x: u64) -> Option<u64> {
        let x = x % self.p;
        (x != 0).then(|| self.log[x as usize] as u64)
    }

    pub fn exp(&self, e: u64) -> u64 {
        self.exp[(e % (self.p - 1)) as usize] as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::is_prime;

    #[test]
    fn primitive_roots_small() {
        assert_eq!(primitive_root(&PrimeField::new(7).unwrap()), 3);
        assert_eq!(primitive_root(&PrimeField::new(3).unwrap()), 2);
        assert_eq!(primitive_root(&PrimeField::new(5).unwrap()), 2);
    }

    #[test]
    fn primitive_root_has_full_order() {
        for p in (3..=499).filter(|&p| is_prime(p)) {
            let f = PrimeField::new(p).unwrap();
            let g = primitive_root(&f);
            for l in prime_factors(p - 1) {
                assert_ne!(f.pow(g, (p - 1) / l), 1, "p={p}");
            }
            assert_eq!(multiplicative_order(&f, g).unwrap(), p - 1);
            // canonical: nothing smaller generates
            assert!((1..g).all(|h| multiplicative_order(&f, h).unwrap() < p - 1));
        }
    }

    #[test]
    fn dlog_examples() {
        let t = DlogTable::new(&PrimeField::new(7).unwrap()).unwrap();
        assert_eq!(t.log(1), Some(0));
        assert_eq!(t.log(t.generator()), Some(1));
        assert_eq!(t.log(6), Some(3));
        assert_eq!(t.log(0), None);
    }

    #[test]
    fn dlog_is_bijection() {
        for p in [3u64, 13, 101, 499] {
            let f = PrimeField::new(p).unwrap();
            let t = DlogTable::new(&f).unwrap();
            let mut seen = vec![false; p as usize - 1];
            for x in 1..p {
                let e = t.log(x).unwrap();
                assert!(e < p - 1);
                assert!(!seen[e as usize]);
                seen[e as usize] = true;
                assert_eq!(f.pow(t.generator(), e), x);
                assert_eq!(t.exp(e), x);
            }
        }
    }

    #[test]
    fn factorization() {
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(9972), vec![2, 3, 277]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
    }
}
