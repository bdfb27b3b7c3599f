//! Dense univariate polynomials over a [`FiniteField`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FiniteField;

/// Coefficients lowest degree first with trailing zeros stripped; the zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

/// A set of pairwise-distinct roots `A`, standing for `f_A = Π (X - a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootProduct<E> {
    roots: Vec<E>,
}

impl<E: Copy + Eq + Ord> RootProduct<E> {
    pub fn new(mut roots: Vec<E>) -> Result<Self> {
        roots.sort();
        if roots.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("roots of f_A must be pairwise distinct".into()));
        }
        Ok(Self { roots })
    }

    pub fn roots(&self) -> &[E] {
        &self.roots
    }
}

impl<E: Copy + Eq + Default> Poly<E> {
    pub fn new(mut coeffs: Vec<E>) -> Self {
        while coeffs.last() == Some(&E::default()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: E) -> Self {
        Self::new(vec![c])
    }

    pub fn x<F: FiniteField<Elem = E>>(field: &F) -> Self {
        Self::new(vec![field.zero(), field.one()])
    }

    /// `c · X^e`.
    pub fn monomial(c: E, e: usize) -> Self {
        let mut coeffs = vec![E::default(); e + 1];
        coeffs[e] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<E> {
        self.coeffs.last().copied()
    }

    /// Coefficient of `X^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> E {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn eval<F: FiniteField<Elem = E>>(&self, field: &F, x: E) -> E {
        self.coeffs.iter().rev().fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add<F: FiniteField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| field.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub<F: FiniteField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| field.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg<F: FiniteField<Elem = E>>(&self, field: &F) -> Self {
        Self::new(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn scale<F: FiniteField<Elem = E>>(&self, field: &F, c: E) -> Self {
        Self::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul<F: FiniteField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == field.zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Self::new(out)
    }

    pub fn pow<F: FiniteField<Elem = E>>(&self, field: &F, e: u32) -> Self {
        (0..e).fold(Self::constant(field.one()), |acc, _| acc.mul(field, self))
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn divrem<F: FiniteField<Elem = E>>(&self, field: &F, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead_inv = field.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![field.zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = field.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c == field.zero() {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = field.sub(rem[i + j], field.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn monic<F: FiniteField<Elem = E>>(&self, field: &F) -> Result<Self> {
        let lead = self.leading().ok_or(Error::ZeroPolynomial)?;
        Ok(self.scale(field, field.inv(lead)?))
    }

    /// Formal derivative in characteristic p.
    pub fn derivative<F: FiniteField<Elem = E>>(&self, field: &F) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| field.mul(c, field.from_base(i as u64))).collect())
    }

    /// Monic gcd by Euclid's algorithm.
    pub fn gcd<F: FiniteField<Elem = E>>(field: &F, a: &Self, b: &Self) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.divrem(field, &y)?;
            x = y;
            y = r;
        }
        x.monic(field)
    }

    /// No repeated root over the algebraic closure. A constant is squarefree;
    /// a nonconstant polynomial with vanishing derivative is a p-th power.
    pub fn is_squarefree<F: FiniteField<Elem = E>>(&self, field: &F) -> Result<bool> {
        let deg = self.degree().ok_or(Error::ZeroPolynomial)?;
        let d = self.derivative(field);
        if d.is_zero() {
            return Ok(deg == 0);
        }
        Ok(Self::gcd(field, self, &d)?.degree() == Some(0))
    }

    /// `self^e mod m`.
    pub fn powmod<F: FiniteField<Elem = E>>(&self, field: &F, mut e: u64, m: &Self) -> Result<Self> {
        let mut base = self.divrem(field, m)?.1;
        let mut acc = Self::constant(field.one()).divrem(field, m)?.1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base).divrem(field, m)?.1;
            }
            base = base.mul(field, &base).divrem(field, m)?.1;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Rabin's test over the coefficient field `F_q`: `f` of degree n is
    /// irreducible iff `X^{q^n} ≡ X (mod f)` and `gcd(X^{q^{n/r}} - X, f) = 1`
    /// for every prime `r | n`.
    pub fn is_irreducible<F: FiniteField<Elem = E>>(&self, field: &F) -> Result<bool> {
        let n = self.degree().ok_or(Error::ZeroPolynomial)?;
        if n == 0 {
            return Ok(false);
        }
        if n == 1 {
            return Ok(true);
        }
        let q = field.order();
        let x = Self::x(field);
        // frob[i] = X^{q^i} mod f
        let mut frob = vec![x.divrem(field, self)?.1];
        for i in 1..=n {
            let next = frob[i - 1].powmod(field, q, self)?;
            frob.push(next);
        }
        if frob[n].sub(field, &x).divrem(field, self)?.1 != Self::zero() {
            return Ok(false);
        }
        for r in crate::field::prime_factors(n as u64) {
            let h = frob[n / r as usize].sub(field, &x);
            if Self::gcd(field, &h, self)?.degree() != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Unique polynomial of degree `< points.len()` through the points.
    pub fn interpolate<F: FiniteField<Elem = E>>(field: &F, points: &[(E, E)]) -> Result<Self>
    where
        E: Ord,
    {
        let mut xs: Vec<E> = points.iter().map(|&(x, _)| x).collect();
        xs.sort();
        if xs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateNode);
        }
        let master = Self::from_roots(field, &RootProduct { roots: xs });
        let mut acc = vec![field.zero(); points.len()];
        for &(xi, yi) in points {
            if yi == field.zero() {
                continue;
            }
            // master / (X - xi) by synthetic division
            let mut basis = vec![field.zero(); points.len()];
            let mut carry = field.zero();
            for k in (0..points.len()).rev() {
                carry = field.add(master.coeff(k + 1), field.mul(carry, xi));
                basis[k] = carry;
            }
            let denom = Self::new(basis.clone()).eval(field, xi);
            let c = field.mul(yi, field.inv(denom)?);
            for (a, b) in acc.iter_mut().zip(&basis) {
                *a = field.add(*a, field.mul(c, *b));
            }
        }
        Ok(Self::new(acc))
    }

    /// `f_A = Π_{a ∈ A} (X - a)`.
    pub fn from_roots<F: FiniteField<Elem = E>>(field: &F, roots: &RootProduct<E>) -> Self {
        let mut coeffs = vec![field.one()];
        for &a in &roots.roots {
            let na = field.neg(a);
            let mut next = vec![field.zero(); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = field.add(next[i + 1], c);
                next[i] = field.add(next[i], field.mul(c, na));
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    /// Every root lying in the field itself, by exhaustive scan.
    pub fn distinct_roots_in_field<F: FiniteField<Elem = E>>(&self, field: &F) -> Result<Vec<E>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(field.elements().filter(|&x| self.eval(field, x) == field.zero()).collect())
    }
}

/// A polynomial with a caller-supplied factorization
/// `poly = lead · Π factor_i^{mult_i}` into distinct monic irreducibles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factored<E> {
    pub poly: Poly<E>,
    pub factors: Vec<(Poly<E>, u32)>,
}

impl<E: Copy + Eq + Ord + Default> Factored<E> {
    /// Builds the product from its factors (leading coefficient 1).
    pub fn from_factors<F: FiniteField<Elem = E>>(field: &F, factors: Vec<(Poly<E>, u32)>) -> Self {
        let poly = factors.iter().fold(Poly::constant(field.one()), |acc, (f, m)| acc.mul(field, &f.pow(field, *m)));
        Self { poly, factors }
    }

    /// Checks that the factors are distinct monic irreducibles with positive
    /// multiplicity whose product matches `poly` up to its leading coefficient.
    pub fn validate<F: FiniteField<Elem = E>>(&self, field: &F) -> Result<()> {
        let lead = self.poly.leading().ok_or(Error::ZeroPolynomial)?;
        let bad = |why: &str| Err(Error::InconsistentFactorization(why.to_string()));
        for (i, (f, m)) in self.factors.iter().enumerate() {
            if *m == 0 {
                return bad("zero multiplicity");
            }
            if f.leading() != Some(field.one()) || !f.is_irreducible(field)? {
                return bad("factor is not monic irreducible");
            }
            if self.factors[..i].iter().any(|(g, _)| g == f) {
                return bad("repeated factor");
            }
        }
        let product = Self::from_factors(field, self.factors.clone()).poly.scale(field, lead);
        if product != self.poly {
            return bad("product mismatch");
        }
        Ok(())
    }

    /// Number of distinct roots in the algebraic closure.
    pub fn distinct_root_count_closure<F: FiniteField<Elem = E>>(&self, field: &F) -> Result<usize> {
        self.validate(field)?;
        Ok(self.factors.iter().map(|(f, _)| f.degree().unwrap_or(0)).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{is_prime, ExtField, PrimeField};
    use proptest::prelude::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn roots(f: &PrimeField, a: &[u64]) -> Poly<u64> {
        Poly::from_roots(f, &RootProduct::new(a.to_vec()).unwrap())
    }

    #[test]
    fn eval_examples() {
        let f5 = fp(5);
        assert_eq!(Poly::new(vec![1, 1]).eval(&f5, 1), 2);
        assert_eq!(Poly::<u64>::zero().eval(&f5, 3), 0);
        let f7 = fp(7);
        assert_eq!(roots(&f7, &[1, 2]).eval(&f7, 3), 2);
    }

    #[test]
    fn interpolation_examples() {
        let f5 = fp(5);
        assert_eq!(Poly::interpolate(&f5, &[(0, 1), (1, 2)]).unwrap(), Poly::new(vec![1, 1]));
        assert_eq!(Poly::interpolate(&f5, &[(0, 3), (2, 3), (4, 3)]).unwrap(), Poly::constant(3));
        let f7 = fp(7);
        assert_eq!(Poly::interpolate(&f7, &[(1, 1), (2, 3)]).unwrap(), Poly::new(vec![6, 2]));
        assert_eq!(Poly::interpolate(&f7, &[(1, 1), (1, 3)]), Err(Error::DuplicateNode));
        assert_eq!(Poly::interpolate(&f7, &[]).unwrap(), Poly::zero());
    }

    #[test]
    fn derivative_examples() {
        let f5 = fp(5);
        assert_eq!(Poly::monomial(1, 2).derivative(&f5), Poly::new(vec![0, 2]));
        assert!(Poly::monomial(1u64, 5).derivative(&f5).is_zero());
        let f3 = fp(3);
        assert_eq!(Poly::new(vec![1, 1, 0, 1]).derivative(&f3), Poly::constant(1));
    }

    #[test]
    fn gcd_examples() {
        let f5 = fp(5);
        let a = Poly::new(vec![4, 0, 1]); // X^2 - 1
        let b = Poly::new(vec![4, 1]); // X - 1
        assert_eq!(Poly::gcd(&f5, &a, &b).unwrap(), Poly::new(vec![4, 1]));
        assert_eq!(Poly::gcd(&f5, &Poly::new(vec![2, 4]), &Poly::zero()).unwrap(), Poly::new(vec![3, 1]));
        let f7 = fp(7);
        let x1 = Poly::new(vec![6, 1]);
        let x2 = Poly::new(vec![5, 1]);
        assert_eq!(Poly::gcd(&f7, &x1.mul(&f7, &x1), &x1.mul(&f7, &x2)).unwrap(), Poly::new(vec![6, 1]));
        assert_eq!(Poly::gcd(&f7, &Poly::zero(), &Poly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn squarefree_examples() {
        let f5 = fp(5);
        let x1 = Poly::new(vec![4, 1]);
        assert!(!x1.mul(&f5, &x1).is_squarefree(&f5).unwrap());
        assert!(Poly::constant(3).is_squarefree(&f5).unwrap());
        assert!(Poly::new(vec![1, 0, 1]).is_squarefree(&fp(3)).unwrap());
        assert!(!Poly::monomial(1u64, 5).is_squarefree(&f5).unwrap());
        assert_eq!(Poly::<u64>::zero().is_squarefree(&f5), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn from_roots_examples() {
        let f7 = fp(7);
        assert_eq!(roots(&f7, &[]), Poly::constant(1));
        assert_eq!(roots(&f7, &[0]), Poly::new(vec![0, 1]));
        assert_eq!(roots(&f7, &[1, 2]), Poly::new(vec![2, 4, 1]));
        assert!(RootProduct::new(vec![1u64, 1]).is_err());
    }

    #[test]
    fn roots_in_field_examples() {
        let f5 = fp(5);
        assert_eq!(Poly::new(vec![4, 0, 1]).distinct_roots_in_field(&f5).unwrap(), vec![1, 4]);
        assert!(Poly::new(vec![2, 0, 1]).distinct_roots_in_field(&f5).unwrap().is_empty());
        let f7 = fp(7);
        assert_eq!(roots(&f7, &[1, 2, 3]).distinct_roots_in_field(&f7).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn closure_root_counts() {
        let f7 = fp(7);
        let l1 = Poly::new(vec![6, 1]);
        let l2 = Poly::new(vec![5, 1]);
        let fac = Factored::from_factors(&f7, vec![(l1.clone(), 2), (l2.clone(), 1)]);
        assert_eq!(fac.distinct_root_count_closure(&f7).unwrap(), 2);
        let q = Poly::new(vec![1, 0, 1]); // -1 is a non-square mod 7
        let fac = Factored::from_factors(&f7, vec![(q, 1)]);
        assert_eq!(fac.distinct_root_count_closure(&f7).unwrap(), 2);
        let fa = Factored::from_factors(&f7, vec![(l1.clone(), 1), (l2.clone(), 1), (Poly::new(vec![0, 1]), 1)]);
        assert_eq!(fa.distinct_root_count_closure(&f7).unwrap(), 3);
        // claimed polynomial disagrees with the factors
        let bad = Factored { poly: l1.clone(), factors: vec![(l2, 1)] };
        assert!(matches!(bad.distinct_root_count_closure(&f7), Err(Error::InconsistentFactorization(_))));
        // reducible "factor"
        let bad = Factored::from_factors(&f7, vec![(Poly::new(vec![6, 0, 1]), 1)]);
        assert!(bad.validate(&f7).is_err());
    }

    #[test]
    fn irreducibility_over_extension_coefficients() {
        // X^2 - t is irreducible over F_9 exactly when t is a non-square there
        let f9 = ExtField::new(3, 2).unwrap();
        for t in f9.elements().skip(1) {
            let poly = Poly::new(vec![f9.neg(t), f9.zero(), f9.one()]);
            let is_square = f9.elements().any(|y| f9.mul(y, y) == t);
            assert_eq!(poly.is_irreducible(&f9).unwrap(), !is_square);
        }
    }

    #[test]
    fn from_roots_squarefree_exhaustive() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = fp(p);
            for size in 0..=3usize {
                for a in itertools::Itertools::combinations(0..p, size) {
                    assert!(roots(&f, &a).is_squarefree(&f).unwrap());
                }
            }
        }
    }

    /// Multiplicity oracle: trial division by all monic linear and monic
    /// irreducible quadratic polynomials. Complete for degree ≤ 4, where a
    /// repeated factor has degree at most 2.
    fn has_repeated_factor(f: &PrimeField, poly: &Poly<u64>) -> bool {
        let p = f.p();
        let mut cands: Vec<Poly<u64>> = (0..p).map(|a| Poly::new(vec![a, 1])).collect();
        for c0 in 0..p {
            for c1 in 0..p {
                if (0..p).all(|x| (x * x + c1 * x + c0) % p != 0) {
                    cands.push(Poly::new(vec![c0, c1, 1]));
                }
            }
        }
        cands.iter().any(|g| {
            let sq = g.mul(f, g);
            poly.divrem(f, &sq).unwrap().1.is_zero()
        })
    }

    #[test]
    fn squarefree_agrees_with_trial_division() {
        for p in [3u64, 5, 7] {
            let f = fp(p);
            for deg in 0..=4u32 {
                for idx in 0..p.pow(deg) {
                    let mut c: Vec<u64> = (0..deg).map(|i| idx / p.pow(i) % p).collect();
                    c.push(1);
                    let poly = Poly::new(c);
                    assert_eq!(poly.is_squarefree(&f).unwrap(), !has_repeated_factor(&f, &poly), "{poly:?} p={p}");
                }
            }
        }
    }

    fn arb_prime() -> impl Strategy<Value = u64> {
        prop::sample::select((3u64..=101).filter(|&p| is_prime(p)).collect::<Vec<_>>())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn interpolant_reproduces_data(p in arb_prime(), seed in any::<u64>(), n in 1usize..6) {
            let f = fp(p);
            let n = n.min(p as usize);
            let mut xs: Vec<u64> = (0..p).collect();
            let mut s = seed;
            for i in (1..xs.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                xs.swap(i, (s >> 33) as usize % (i + 1));
            }
            let pts: Vec<(u64, u64)> = xs[..n].iter().enumerate().map(|(i, &x)| (x, (seed >> (i * 7)) % p)).collect();
            let g = Poly::interpolate(&f, &pts).unwrap();
            prop_assert!(g.degree().map_or(true, |d| d < n));
            for &(x, y) in &pts {
                prop_assert_eq!(g.eval(&f, x), y);
            }
        }

        #[test]
        fn ring_axioms(p in arb_prime(),
                       a in prop::collection::vec(0u64..101, 0..6),
                       b in prop::collection::vec(0u64..101, 0..6),
                       c in prop::collection::vec(0u64..101, 0..6)) {
            let f = fp(p);
            let mk = |v: &Vec<u64>| Poly::new(v.iter().map(|x| x % p).collect());
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            prop_assert_eq!(a.mul(&f, &b).mul(&f, &c), a.mul(&f, &b.mul(&f, &c)));
            prop_assert_eq!(a.mul(&f, &b.add(&f, &c)), a.mul(&f, &b).add(&f, &a.mul(&f, &c)));
            prop_assert_eq!(a.mul(&f, &b), b.mul(&f, &a));
            if !b.is_zero() {
                let (q, r) = a.divrem(&f, &b).unwrap();
                prop_assert_eq!(q.mul(&f, &b).add(&f, &r), a.clone());
                prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
            }
        }
    }
}
