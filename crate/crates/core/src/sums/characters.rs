//! Multiplicative characters of `F_p^*` via the discrete logarithm.

use num_complex::Complex64;
use serde::Serialize;

use super::acc::ComplexAcc;
use crate::error::{Error, Result};
use crate::field::{DlogTable, FiniteField, PrimeField};
use crate::poly::{Factored, Poly};
use crate::subsets::ResidueSet;
use rand::Rng;

/// `χ_a(x) = e_{p-1}(a · log_g x)` for the canonical primitive root `g`;
/// `χ_a(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultCharacter {
    pub p: u64,
    pub a: u64,
}

/// Roots of unity of order `p - 1` plus the dlog table, shared read-only.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    dlog: DlogTable,
    roots: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(field: &PrimeField) -> Result<Self> {
        let dlog = DlogTable::new(field)?;
        let m = field.p() - 1;
        let roots = (0..m).map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64)).collect();
        Ok(Self { dlog, roots })
    }

    pub fn p(&self) -> u64 {
        self.dlog.p()
    }

    pub fn dlog(&self) -> &DlogTable {
        &self.dlog
    }

    /// Character with exponent `a mod (p-1)`.
    pub fn character(&self, a: u64) -> MultCharacter {
        MultCharacter { p: self.p(), a: a % (self.p() - 1) }
    }

    /// The conjugate character, exponent `-a`.
    pub fn conj(&self, chi: MultCharacter) -> MultCharacter {
        self.character(self.p() - 1 - chi.a)
    }

    /// Exponent `j` with `χ(x) = ζ_{p-1}^j`, or `None` at `x = 0`.
    pub fn exponent(&self, chi: MultCharacter, x: u64) -> Option<u64> {
        let m = self.p() - 1;
        self.dlog.log(x % self.p()).map(|l| (chi.a as u128 * l as u128 % m as u128) as u64)
    }

    pub fn value(&self, chi: MultCharacter, x: u64) -> Complex64 {
        self.exponent(chi, x).map_or(Complex64::new(0.0, 0.0), |j| self.roots[j as usize])
    }

    /// Order of `χ` in the character group.
    pub fn order(&self, chi: MultCharacter) -> u64 {
        let m = self.p() - 1;
        m / gcd(chi.a, m)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `Σ_{s ∈ S, s ≠ 0} χ(s)`.
pub fn char_sum_over_set(table: &CharacterTable, chi: MultCharacter, set: &ResidueSet) -> ComplexAcc {
    set.iter().filter(|&s| s != 0).map(|s| table.value(chi, s)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub p: u64,
    pub pairs: u64,
    pub exact_holds: bool,
    pub max_float_error: f64,
}

/// `Σ_χ χ(x) χ̄(y) = (p-1)[x = y]` on `F_p^*`, exactly and in floating point.
///
/// The exact route tallies the exponents `a·(log x - log y)` over all `a`:
/// the sum is `p - 1` when they are all zero and vanishes when the tally is
/// uniform over a nontrivial subgroup of `Z/(p-1)`.
pub fn orthogonality_check(table: &CharacterTable) -> OrthogonalityReport {
    let p = table.p();
    let m = p - 1;
    let mut exact = true;
    let mut max_err = 0.0f64;
    let mut tally = vec![0u64; m as usize];
    for x in 1..p {
        for y in 1..p {
            tally.iter_mut().for_each(|t| *t = 0);
            let mut acc = ComplexAcc::new();
            for a in 0..m {
                let chi = table.character(a);
                let jx = table.exponent(chi, x).expect("x ≠ 0");
                let jy = table.exponent(table.conj(chi), y).expect("y ≠ 0");
                tally[((jx + jy) % m) as usize] += 1;
                acc.add(table.value(chi, x) * table.value(table.conj(chi), y));
            }
            let expected = if x == y { m as f64 } else { 0.0 };
            max_err = max_err.max((acc.value() - expected).norm());
            exact &= if x == y { tally[0] == m } else { uniform_on_subgroup(&tally) };
        }
    }
    OrthogonalityReport { p, pairs: m * m, exact_holds: exact, max_float_error: max_err }
}

/// True when the tally is constant on a subgroup `gZ/mZ` of order > 1 and
/// zero elsewhere, so the weighted root-of-unity sum vanishes exactly.
fn uniform_on_subgroup(tally: &[u64]) -> bool {
    let m = tally.len();
    let support: Vec<usize> = (0..m).filter(|&j| tally[j] > 0).collect();
    let g = support.iter().fold(m, |acc, &j| gcd(acc as u64, j as u64) as usize);
    let c = tally[0];
    g < m && (0..m).all(|j| tally[j] == if j % g == 0 { c } else { 0 })
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchySchwarzReport {
    pub p: u64,
    pub set_size_nonzero: usize,
    /// `Σ_{χ ≠ χ_0} |Σ_{s ∈ S} χ(s)|`.
    pub l1_nonprincipal: f64,
    /// `p √|S \ {0}|`.
    pub bound: f64,
    pub bound_holds: bool,
    /// `Σ_χ |Σ_{s ∈ S} χ(s)|²`.
    pub second_moment: f64,
    /// `φ(p) |S \ {0}|`.
    pub second_moment_expected: u64,
    pub second_moment_holds: bool,
}

pub fn cauchy_schwarz_bound_check(table: &CharacterTable, set: &ResidueSet) -> CauchySchwarzReport {
    let p = table.p();
    let size = set.nonzero_len();
    let mut l1 = 0.0;
    let mut second = ComplexAcc::new();
    for a in 0..p - 1 {
        let v = char_sum_over_set(table, table.character(a), set).value();
        if a != 0 {
            l1 += v.norm();
        }
        second.add(Complex64::new(v.norm_sqr(), 0.0));
    }
    let bound = p as f64 * (size as f64).sqrt();
    let expected = (p - 1) * size as u64;
    let second_moment = second.value().re;
    CauchySchwarzReport {
        p,
        set_size_nonzero: size,
        l1_nonprincipal: l1,
        bound,
        bound_holds: l1 <= bound + 1e-6 * p as f64,
        second_moment,
        second_moment_expected: expected,
        second_moment_holds: (second_moment - expected as f64).abs() <= 1e-6 * (expected.max(1) as f64),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    pub p: u64,
    pub character_order: u64,
    /// Distinct roots in the algebraic closure.
    pub m: usize,
    pub modulus: f64,
    /// `(m - 1)√p`.
    pub bound: f64,
    pub holds: bool,
}

/// `|Σ_{x ∈ F_p} χ(f(x))| ≤ (m - 1)√p` for `χ` of order `d' > 1` and `f` not
/// a constant times a `d'`-th power.
pub fn weil_lemma3_check(field: &PrimeField, table: &CharacterTable, f: &Factored<u64>, chi: MultCharacter) -> Result<WeilReport> {
    let order = table.order(chi);
    if order == 1 {
        return Err(Error::Precondition("χ must be nonprincipal".into()));
    }
    let m = f.distinct_root_count_closure(field)?;
    if f.factors.iter().all(|(_, mult)| u64::from(*mult) % order == 0) {
        return Err(Error::Precondition(format!("f is a constant times a {order}-th power")));
    }
    let p = field.p();
    let acc: ComplexAcc = (0..p).map(|x| table.value(chi, f.poly.eval(field, x))).collect();
    let modulus = acc.value().norm();
    let bound = (m as f64 - 1.0) * (p as f64).sqrt();
    Ok(WeilReport { p, character_order: order, m, modulus, bound, holds: modulus <= bound + acc.tolerance() })
}

/// A random `f = Π P_i^{m_i}` over distinct monic linear or irreducible
/// quadratic `P_i`, with a nonprincipal `χ` for which `f` is not a constant
/// times a power of order `ord χ`.
pub fn random_weil_instance<R: Rng + ?Sized>(field: &PrimeField, table: &CharacterTable, rng: &mut R) -> (Factored<u64>, MultCharacter) {
    let p = field.p();
    loop {
        let mut factors: Vec<(Poly<u64>, u32)> = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let f = if rng.gen_bool(0.7) {
                Poly::new(vec![field.neg(rng.gen_range(0..p)), 1])
            } else {
                loop {
                    let g = Poly::new(vec![rng.gen_range(0..p), rng.gen_range(0..p), 1]);
                    if g.is_irreducible(field).unwrap_or(false) {
                        break g;
                    }
                }
            };
            if factors.iter().all(|(g, _)| *g != f) {
                factors.push((f, rng.gen_range(1..=3)));
            }
        }
        let chi = table.character(rng.gen_range(1..p - 1));
        let order = table.order(chi);
        if factors.iter().any(|(_, m)| u64::from(*m) % order != 0) {
            return (Factored::from_factors(field, factors), chi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RootProduct;

    fn setup(p: u64) -> (PrimeField, CharacterTable) {
        let f = PrimeField::new(p).unwrap();
        let t = CharacterTable::new(&f).unwrap();
        (f, t)
    }

    #[test]
    fn set_sums() {
        let (_, t) = setup(7);
        let s = ResidueSet::from_elements(7, [0, 1, 2, 4]).unwrap();
        assert!((char_sum_over_set(&t, t.character(0), &s).value() - 3.0).norm() < 1e-12);
        let all = ResidueSet::from_elements(7, 0..7).unwrap();
        for a in 1..6 {
            assert!(char_sum_over_set(&t, t.character(a), &all).value().norm() < 1e-9);
        }
        let squares = ResidueSet::from_elements(7, [1, 2, 4]).unwrap();
        let legendre = t.character(3);
        assert_eq!(t.order(legendre), 2);
        assert!((char_sum_over_set(&t, legendre, &squares).value() - 3.0).norm() < 1e-9);
    }

    #[test]
    fn orthogonality_small_primes() {
        for p in [3u64, 5, 13] {
            let (_, t) = setup(p);
            let r = orthogonality_check(&t);
            assert!(r.exact_holds && r.max_float_error < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn subgroup_tally() {
        assert!(uniform_on_subgroup(&[2, 0, 2, 0]));
        assert!(!uniform_on_subgroup(&[4, 0, 0, 0]));
        assert!(!uniform_on_subgroup(&[1, 2, 1, 0]));
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let (_, t) = setup(31);
        let single = ResidueSet::from_elements(31, [1]).unwrap();
        let r = cauchy_schwarz_bound_check(&t, &single);
        assert!((r.l1_nonprincipal - 29.0).abs() < 1e-9 && r.bound_holds && r.second_moment_holds);
        let units = ResidueSet::from_elements(31, 1..31).unwrap();
        let r = cauchy_schwarz_bound_check(&t, &units);
        assert!(r.l1_nonprincipal < 1e-9 && r.second_moment_holds);
    }

    #[test]
    fn weil_examples() {
        let (f, t) = setup(7);
        let legendre = t.character(3);
        let lin = |a: u64| Poly::new(vec![(7 - a) % 7, 1]);
        let fac = Factored::from_factors(&f, vec![(lin(1), 1), (lin(2), 1)]);
        let r = weil_lemma3_check(&f, &t, &fac, legendre).unwrap();
        assert!((r.modulus - 1.0).abs() < 1e-9 && r.holds);
        let x = Factored::from_factors(&f, vec![(lin(0), 1)]);
        let r = weil_lemma3_check(&f, &t, &x, legendre).unwrap();
        assert!(r.modulus < 1e-9 && r.bound == 0.0 && r.holds);
        let sq = Factored::from_factors(&f, vec![(lin(1), 2)]);
        assert!(weil_lemma3_check(&f, &t, &sq, legendre).is_err());

        let (f, t) = setup(13);
        let cubic = t.character(4);
        assert_eq!(t.order(cubic), 3);
        let fa = Poly::from_roots(&f, &RootProduct::new(vec![1, 5, 9]).unwrap());
        let factors = vec![(Poly::new(vec![12, 1]), 1), (Poly::new(vec![8, 1]), 1), (Poly::new(vec![4, 1]), 1)];
        let fac = Factored { poly: fa, factors };
        let r = weil_lemma3_check(&f, &t, &fac, cubic).unwrap();
        assert!(r.holds && (r.bound - 2.0 * 13f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn random_weil_instances_hold() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for p in [11u64, 31, 101] {
            let (f, t) = setup(p);
            for _ in 0..50 {
                let (fac, chi) = random_weil_instance(&f, &t, &mut rng);
                fac.validate(&f).unwrap();
                assert!(weil_lemma3_check(&f, &t, &fac, chi).unwrap().holds);
            }
        }
    }
}
