use serde::Serialize;

use super::{roots::prime_factors, FiniteField, PrimeField};
use crate::error::{budget, Error, Result};
use crate::poly::Poly;

/// Largest extension field we tabulate.
pub const MAX_EXT_ORDER: u64 = 1 << 20;

/// Element of `F_{p^n}`: coefficients in the modulus basis packed as base-p
/// digits, constant coefficient least significant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FpnElem(pub u32);

/// `F_{p^n} = F_p[X] / (modulus)` with Zech-style log/antilog tables.
#[derive(Debug, Clone)]
pub struct ExtField {
    p: u64,
    n: u32,
    q: u64,
    modulus: Poly<u64>,
    log: Vec<u32>,
    exp: Vec<u32>,
    trace: Vec<u32>,
    generator: FpnElem,
}

/// Monic irreducible polynomial of degree `n` over `F_p`: the first one when
/// the lower coefficients `(c_0, …, c_{n-1})` are read as a base-p number
/// with `c_0` least significant.
pub fn find_irreducible(p: u64, n: u32) -> Result<Poly<u64>> {
    let base = PrimeField::new(p)?;
    if n == 0 {
        return Err(Error::Precondition("extension degree must be at least 1".into()));
    }
    let count = p.checked_pow(n).ok_or(Error::BudgetExceeded { what: "irreducible scan", needed: u128::MAX, cap: u64::MAX as u128 })?;
    for idx in 0..count {
        let mut coeffs = digits(idx, p, n);
        coeffs.push(1);
        let f = Poly::new(coeffs);
        if f.is_irreducible(&base)? {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn digits(mut idx: u64, p: u64, n: u32) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

impl ExtField {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        let q = (p as u128).saturating_pow(n);
        budget("extension field order", q, MAX_EXT_ORDER as u128)?;
        let modulus = find_irreducible(p, n)?;
        Self::with_modulus(p, modulus)
    }

    pub fn with_modulus(p: u64, modulus: Poly<u64>) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let n = modulus.degree().filter(|&d| d >= 1).ok_or_else(|| Error::Precondition("modulus must have degree ≥ 1".into()))? as u32;
        let q = p.checked_pow(n).filter(|&q| q <= MAX_EXT_ORDER).ok_or(Error::BudgetExceeded {
            what: "extension field order",
            needed: (p as u128).saturating_pow(n),
            cap: MAX_EXT_ORDER as u128,
        })?;
        if modulus.leading() != Some(1) || !modulus.is_irreducible(&base)? {
            return Err(Error::Precondition("modulus must be monic irreducible".into()));
        }
        let mut field = ExtField { p, n, q, modulus, log: Vec::new(), exp: Vec::new(), trace: Vec::new(), generator: FpnElem(0) };
        field.build_tables();
        Ok(field)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let factors = prime_factors(q - 1);
        let one = FpnElem(1);
        let g = (1..q)
            .map(|i| FpnElem(i as u32))
            .find(|&g| factors.iter().all(|&l| self.pow_by_reduction(g, (q - 1) / l) != one))
            .expect("F_q^* is cyclic");
        let mut log = vec![u32::MAX; q as usize];
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut x = one;
        for e in 0..q - 1 {
            log[x.0 as usize] = e as u32;
            exp.push(x.0);
            x = self.mul_by_reduction(x, g);
        }
        debug_assert_eq!(x, one);
        self.generator = g;
        self.log = log;
        self.exp = exp;
        self.trace = (0..q)
            .map(|i| {
                let x = FpnElem(i as u32);
                let mut t = x;
                let mut s = x;
                for _ in 1..self.n {
                    t = self.pow(t, self.p);
                    s = self.add(s, t);
                }
                assert!((s.0 as u64) < self.p, "trace must land in the prime field");
                s.0
            })
            .collect();
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &Poly<u64> {
        &self.modulus
    }

    pub fn generator(&self) -> FpnElem {
        self.generator
    }

    pub fn coeffs(&self, a: FpnElem) -> Vec<u64> {
        digits(a.0 as u64, self.p, self.n)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FpnElem> {
        if coeffs.len() != self.n as usize {
            return Err(Error::FieldMismatch);
        }
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        Ok(FpnElem(idx as u32))
    }

    /// Multiplication by schoolbook product and long division by the
    /// modulus; independent of the log tables.
    pub fn mul_by_reduction(&self, a: FpnElem, b: FpnElem) -> FpnElem {
        let base = PrimeField::new(self.p).expect("validated at construction");
        let pa = Poly::new(self.coeffs(a));
        let pb = Poly::new(self.coeffs(b));
        let (_, r) = pa.mul(&base, &pb).divrem(&base, &self.modulus).expect("monic modulus");
        let mut c = r.coeffs().to_vec();
        c.resize(self.n as usize, 0);
        self.from_coeffs(&c).expect("length n")
    }

    pub fn pow_by_reduction(&self, a: FpnElem, mut e: u64) -> FpnElem {
        let mut base = a;
        let mut acc = FpnElem(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_by_reduction(acc, base);
            }
            base = self.mul_by_reduction(base, base);
            e >>= 1;
        }
        acc
    }
}

impl FiniteField for ExtField {
    type Elem = FpnElem;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        self.n
    }
    fn order(&self) -> u64 {
        self.q
    }
    fn one(&self) -> FpnElem {
        FpnElem(1)
    }
    fn from_base(&self, v: u64) -> FpnElem {
        FpnElem((v % self.p) as u32)
    }

    fn add(&self, a: FpnElem, b: FpnElem) -> FpnElem {
        if self.n == 1 {
            return FpnElem(((a.0 as u64 + b.0 as u64) % self.p) as u32);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut out, mut pw) = (0u64, 1u64);
        for _ in 0..self.n {
            out += ((x % self.p + y % self.p) % self.p) * pw;
            pw *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FpnElem(out as u32)
    }

    fn neg(&self, a: FpnElem) -> FpnElem {
        let (mut x, mut out, mut pw) = (a.0 as u64, 0u64, 1u64);
        for _ in 0..self.n {
            out += ((self.p - x % self.p) % self.p) * pw;
            pw *= self.p;
            x /= self.p;
        }
        FpnElem(out as u32)
    }

    fn sub(&self, a: FpnElem, b: FpnElem) -> FpnElem {
        self.add(a, self.neg(b))
    }

    fn mul(&self, a: FpnElem, b: FpnElem) -> FpnElem {
        if a.0 == 0 || b.0 == 0 {
            return FpnElem(0);
        }
        let e = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % (self.q - 1);
        FpnElem(self.exp[e as usize])
    }

    fn inv(&self, a: FpnElem) -> Result<FpnElem> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let e = (self.q - 1 - self.log[a.0 as usize] as u64) % (self.q - 1);
        Ok(FpnElem(self.exp[e as usize]))
    }

    fn pow(&self, a: FpnElem, e: u64) -> FpnElem {
        if e == 0 {
            return FpnElem(1);
        }
        if a.0 == 0 {
            return FpnElem(0);
        }
        let l = (self.log[a.0 as usize] as u128 * e as u128) % (self.q - 1) as u128;
        FpnElem(self.exp[l as usize])
    }

    fn trace(&self, a: FpnElem) -> u64 {
        self.trace[a.0 as usize] as u64
    }

    fn element(&self, index: u64) -> FpnElem {
        FpnElem(index as u32)
    }

    fn index(&self, a: FpnElem) -> u64 {
        a.0 as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_moduli() {
        assert_eq!(find_irreducible(7, 1).unwrap().coeffs(), &[0, 1]);
        assert_eq!(find_irreducible(3, 2).unwrap().coeffs(), &[1, 0, 1]);
        assert_eq!(find_irreducible(5, 2).unwrap().coeffs(), &[2, 0, 1]);
        // X^3 + 2X + 1 is the first cubic over F_3 without a root
        let f = find_irreducible(3, 3).unwrap();
        let base = PrimeField::new(3).unwrap();
        assert!((0..3).all(|x| f.eval(&base, x) != 0));
    }

    #[test]
    fn square_of_generator_in_f9() {
        // X^2 + 1 modulus: t·t = -1 = 2
        let f = ExtField::new(3, 2).unwrap();
        let t = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f.coeffs(f.mul(t, t)), vec![2, 0]);
        assert_eq!(f.mul_by_reduction(t, t), f.mul(t, t));
        assert_eq!(f.mul(f.zero(), t), f.zero());
    }

    #[test]
    fn enumeration_cardinality() {
        let f3 = ExtField::new(3, 1).unwrap();
        assert_eq!(f3.elements().map(|e| e.0).collect::<Vec<_>>(), vec![0, 1, 2]);
        let f9 = ExtField::new(3, 2).unwrap();
        assert_eq!(f9.elements().count(), 9);
        let f25 = ExtField::new(5, 2).unwrap();
        let mut all: Vec<_> = f25.elements().collect();
        all.dedup();
        assert_eq!(all.len(), 25);
    }

    #[test]
    fn table_mul_matches_reduction() {
        for (p, n) in [(3, 2), (5, 2), (3, 3), (7, 2), (2 + 3, 3)] {
            let f = ExtField::new(p, n).unwrap();
            for a in f.elements() {
                for b in f.elements().step_by(3) {
                    assert_eq!(f.mul(a, b), f.mul_by_reduction(a, b));
                }
                if a.0 != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
            }
        }
    }

    #[test]
    fn trace_of_base_field_element() {
        let f = ExtField::new(5, 2).unwrap();
        for v in 0..5 {
            assert_eq!(f.trace(f.from_base(v)), (2 * v) % 5);
        }
        assert_eq!(f.trace(f.zero()), 0);
    }

    #[test]
    fn trace_matches_power_sum_oracle() {
        for (p, n) in [(5u64, 2u32), (3, 3), (13, 2), (7, 3)] {
            let f = ExtField::new(p, n).unwrap();
            for x in f.elements() {
                // x + x^p + ... computed without the log tables
                let mut term = x;
                let mut sum = vec![0u64; n as usize];
                for _ in 0..n {
                    for (s, c) in sum.iter_mut().zip(f.coeffs(term)) {
                        *s = (*s + c) % p;
                    }
                    term = f.pow_by_reduction(term, p);
                }
                assert!(sum[1..].iter().all(|&c| c == 0));
                assert_eq!(f.trace(x), sum[0]);
            }
        }
    }

    #[test]
    fn oversized_extension_rejected() {
        assert!(matches!(ExtField::new(1009, 3), Err(Error::BudgetExceeded { .. })));
    }
}
