use serde::Serialize;

use super::FiniteField;
use crate::error::{Error, Result};

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime field `F_p` for an odd prime `p`. Elements are residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Table of inverses indexed by residue; entry 0 is 0.
    pub fn inverse_table(&self) -> Vec<u64> {
        let p = self.p as usize;
        let mut inv = vec![0u64; p];
        if p > 1 {
            inv[1] = 1;
        }
        for i in 2..p {
            // inv(i) = -(p / i) * inv(p mod i)
            inv[i] = (self.p - (self.p / i as u64) * inv[p % i] % self.p) % self.p;
        }
        inv
    }
}

impl FiniteField for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn order(&self) -> u64 {
        self.p
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_base(&self, v: u64) -> u64 {
        v % self.p
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p <= u32::MAX as u64 {
            a * b % self.p
        } else {
            mul_mod_u64(a, b, self.p)
        }
    }

    fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }

    fn trace(&self, a: u64) -> u64 {
        a
    }
    fn element(&self, index: u64) -> u64 {
        index
    }
    fn index(&self, a: u64) -> u64 {
        a
    }

    fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        if self.p < (1 << 31) {
            // products stay below 2^62, four of them fit in a u64
            let mut acc = 0u64;
            for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
                acc += x * y;
                if i % 4 == 3 {
                    acc %= self.p;
                }
            }
            acc % self.p
        } else {
            let acc: u128 = a.iter().zip(b).map(|(&x, &y)| (x as u128 * y as u128) % self.p as u128).sum();
            (acc % self.p as u128) as u64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(9973));
        assert!(!is_prime(9975));
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn rejects_non_primes() {
        assert_eq!(PrimeField::new(2), Err(Error::NotPrime(2)));
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert!(PrimeField::new(3).is_ok());
    }

    #[test]
    fn basic_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.add(3, 5), 1);
        assert_eq!(f.mul(0, 6), 0);
        assert_eq!(f.inv(3).unwrap(), 5);
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.inv(6).unwrap(), 6);
        assert_eq!(f.inv(0), Err(Error::ZeroInverse));
        assert_eq!(f.pow(2, 3), 1);
        assert_eq!(f.pow(0, 0), 1);
        assert_eq!(f.from_i64(-1), 6);
    }

    #[test]
    fn inverses_exhaustive() {
        for p in (3..=101).filter(|&p| is_prime(p)) {
            let f = PrimeField::new(p).unwrap();
            let table = f.inverse_table();
            for a in 1..p {
                let i = f.inv(a).unwrap();
                assert_eq!(f.mul(a, i), 1);
                assert_eq!(table[a as usize], i);
                assert_eq!(f.pow(a, p - 1), 1);
            }
        }
    }

    #[test]
    fn dot_matches_naive() {
        let f = PrimeField::new(9973).unwrap();
        let a: Vec<u64> = (0..11).map(|i| (i * 1237 + 5) % 9973).collect();
        let b: Vec<u64> = (0..11).map(|i| (i * 7919 + 3) % 9973).collect();
        let naive = a.iter().zip(&b).fold(0, |s, (&x, &y)| (s + x * y) % 9973);
        assert_eq!(f.dot(&a, &b), naive);
    }
}
