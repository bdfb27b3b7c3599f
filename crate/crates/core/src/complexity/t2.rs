//! Counting `d`-subsets `A` with prescribed nonzero values of `f_A` on
//! `B ∪ C`, directly and through the multiplicative character expansion.

use num_complex::Complex64;
use serde::Serialize;

use super::family::PartitionInstance;
use crate::combin::{binomial, next_combination};
use crate::error::{budget, Error, Result};
use crate::field::{FiniteField, PrimeField};
use crate::subsets::ResidueSet;
use crate::sums::characters::CharacterTable;
use crate::sums::ComplexAcc;

pub const MAX_T2_SUBSETS: u128 = 10_000_000;
pub const MAX_T2_EXPANSION: u128 = 100_000_000;

fn f_a(field: &PrimeField, a: &[u64], x: u64) -> u64 {
    a.iter().fold(1, |acc, &r| field.mul(acc, field.sub(x, r)))
}

/// Calls `visit` on every `d`-subset of `F_p`, including `d = 0`.
fn for_each_subset(p: u64, d: usize, mut visit: impl FnMut(&[u64])) {
    if d as u64 > p {
        return;
    }
    let mut a: Vec<u64> = (0..d as u64).collect();
    loop {
        visit(&a);
        if !next_combination(&mut a, p) {
            break;
        }
    }
}

fn targets(set: &ResidueSet) -> (Vec<u64>, Vec<u64>) {
    (set.iter().filter(|&x| x != 0).collect(), set.complement().iter().filter(|&x| x != 0).collect())
}

/// `#{A : |A| = d, f_A(b) ∈ S \ {0} on B, f_A(c) ∈ Sᶜ \ {0} on C}`.
pub fn t2_count(field: &PrimeField, set: &ResidueSet, d: usize, part: &PartitionInstance) -> Result<u64> {
    let p = field.p();
    if set.p() != p {
        return Err(Error::FieldMismatch);
    }
    budget("d-subsets", binomial(p, d as u64), MAX_T2_SUBSETS)?;
    let mut n = 0;
    for_each_subset(p, d, |a| {
        let ok = part.b.iter().all(|&b| {
            let v = f_a(field, a, b);
            v != 0 && set.contains(v)
        }) && part.c.iter().all(|&c| {
            let v = f_a(field, a, c);
            v != 0 && !set.contains(v)
        });
        n += u64::from(ok);
    });
    Ok(n)
}

/// `Φ_n` over `Z`, from `X^n - 1 = Π_{m | n} Φ_m`.
fn cyclotomic(n: usize) -> Vec<i128> {
    let mut poly = vec![0i128; n + 1];
    poly[0] = -1;
    poly[n] = 1;
    for m in (1..n).filter(|m| n % m == 0) {
        poly = exact_div(&poly, &cyclotomic(m));
    }
    poly
}

/// Quotient of `a` by a monic `b`, asserting a zero remainder.
fn exact_div(a: &[i128], b: &[i128]) -> Vec<i128> {
    let (q, r) = divrem(a, b);
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

fn divrem(a: &[i128], b: &[i128]) -> (Vec<i128>, Vec<i128>) {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    if r.len() <= db {
        return (vec![0], r);
    }
    let mut q = vec![0i128; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db];
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] -= c * bj;
        }
    }
    r.truncate(db);
    (q, r)
}

#[derive(Debug, Clone, Serialize)]
pub struct T2IdentityReport {
    pub p: u64,
    pub d: usize,
    pub k: usize,
    pub count: u64,
    /// `(p - 1)^k T_2`.
    pub lhs: i128,
    /// Right side in `Z[ζ_{p-1}]`, reduced modulo `Φ_{p-1}`; should be the constant `lhs`.
    pub reduced_rhs: Vec<i128>,
    pub exact_holds: bool,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub float_rhs: Complex64,
    pub float_holds: bool,
}

/// Both sides of `φ(p)^k T_2 = Σ_A Π_j Σ_χ Σ_r χ(f_A(b_j)) χ̄(r)`.
///
/// The exact route records each character value `ζ^e` by its exponent, so a
/// factor is a vector of counts indexed by `e mod (p-1)` and the product over
/// `j` is a cyclic convolution.
pub fn t2_character_identity_check(field: &PrimeField, set: &ResidueSet, d: usize, part: &PartitionInstance) -> Result<T2IdentityReport> {
    let p = field.p();
    let k = part.len();
    let n = (p - 1) as usize;
    let work = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX).saturating_mul(binomial(p, d as u64));
    budget("character expansion", work, MAX_T2_EXPANSION)?;
    let count = t2_count(field, set, d, part)?;
    let table = CharacterTable::new(field)?;
    let dlog = table.dlog();
    let (inside, outside) = targets(set);
    let rows: Vec<(u64, &[u64])> =
        part.b.iter().map(|&b| (b, inside.as_slice())).chain(part.c.iter().map(|&c| (c, outside.as_slice()))).collect();
    let chars: Vec<_> = (0..n as u64).map(|a| table.character(a)).collect();

    let mut exact = vec![0i128; n];
    let mut float = ComplexAcc::new();
    for_each_subset(p, d, |a| {
        let mut prod = vec![0i128; n];
        prod[0] = 1;
        let mut fprod = Complex64::new(1.0, 0.0);
        for &(x, ts) in &rows {
            let v = f_a(field, a, x);
            let mut factor = vec![0i128; n];
            let mut ffactor = ComplexAcc::new();
            if let Some(lv) = dlog.log(v) {
                for j in 0..n as u64 {
                    for &t in ts {
                        let lt = dlog.log(t).expect("t nonzero");
                        factor[((j * (lv + n as u64 - lt)) % n as u64) as usize] += 1;
                    }
                }
                for &chi in &chars {
                    let cv = table.value(chi, v);
                    for &t in ts {
                        ffactor.add(cv * table.value(table.conj(chi), t));
                    }
                }
            }
            let mut next = vec![0i128; n];
            for (i, &x) in prod.iter().enumerate().filter(|(_, &x)| x != 0) {
                for (j, &y) in factor.iter().enumerate().filter(|(_, &y)| y != 0) {
                    next[(i + j) % n] += x * y;
                }
            }
            prod = next;
            fprod *= ffactor.value();
        }
        for (e, x) in exact.iter_mut().zip(prod) {
            *e += x;
        }
        float.add(fprod);
    });
    let (_, mut reduced) = divrem(&exact, &cyclotomic(n));
    while reduced.len() > 1 && reduced.last() == Some(&0) {
        reduced.pop();
    }
    let lhs = (n as i128).pow(k as u32) * count as i128;
    let fv = float.value();
    let exact_holds = reduced.first().copied().unwrap_or(0) == lhs && reduced.iter().skip(1).all(|&c| c == 0);
    let float_holds = (fv.re - lhs as f64).abs() <= 1e-3 && fv.im.abs() <= 1e-3;
    Ok(T2IdentityReport { p, d, k, count, lhs, reduced_rhs: reduced, exact_holds, float_rhs: fv, float_holds })
}
