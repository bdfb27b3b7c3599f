//! Sumset representation counts and the pair count behind the `α` branch.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FiniteField, PrimeField};
use crate::subsets::ResidueSet;

/// `r(n) = #{(s₁, s₂) ∈ S₁ × S₂ : s₁ + s₂ = n}`.
pub fn representation_counts(s1: &ResidueSet, s2: &ResidueSet) -> Vec<u64> {
    let p = s1.p();
    let mut r = vec![0u64; p as usize];
    for a in s1.iter() {
        for b in s2.iter() {
            r[((a + b) % p) as usize] += 1;
        }
    }
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct PollardRow {
    pub t: u64,
    pub lhs: u64,
    pub rhs: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PollardReport {
    pub p: u64,
    pub rows: Vec<PollardRow>,
    pub holds: bool,
}

/// `Σ_n min(t, r(n)) ≥ t · min(p, |S₁| + |S₂| - 1 - t)` for `1 ≤ t ≤ min(|S₁|, |S₂|)`.
pub fn green_ruzsa_verify(s1: &ResidueSet, s2: &ResidueSet) -> Result<PollardReport> {
    if s1.p() != s2.p() {
        return Err(Error::FieldMismatch);
    }
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Precondition("both sets must be nonempty".into()));
    }
    let p = s1.p();
    let r = representation_counts(s1, s2);
    let (n1, n2) = (s1.len() as u64, s2.len() as u64);
    let rows: Vec<PollardRow> =
        (1..=n1.min(n2)).map(|t| PollardRow { t, lhs: r.iter().map(|&x| x.min(t)).sum(), rhs: t * p.min(n1 + n2 - 1 - t) }).collect();
    Ok(PollardReport { p, holds: rows.iter().all(|r| r.lhs >= r.rhs), rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition34Report {
    pub p: u64,
    pub alpha: u64,
    pub d: usize,
    pub set_size: usize,
    /// `#{(s, s') ∈ S² : (1 - ᾱ)s + ᾱs' ∉ S}` by direct scan.
    pub count: u64,
    /// `Σ_{n ∉ S} r(n)` for `S₁ = (1-ᾱ)S`, `S₂ = ᾱS`.
    pub sumset_count: u64,
    /// `|S|(d - 1)`.
    pub required: u64,
    pub holds: bool,
    /// `(|S|/2)(|S|/2 - 1)`.
    pub floor: f64,
    pub floor_holds: bool,
}

pub fn condition34_check(field: &PrimeField, set: &ResidueSet, alpha: u64, d: usize) -> Result<Condition34Report> {
    let p = field.p();
    if set.p() != p {
        return Err(Error::FieldMismatch);
    }
    let alpha = alpha % p;
    if alpha == 0 || alpha == 1 {
        return Err(Error::Precondition("α must avoid 0 and 1".into()));
    }
    let n = set.len();
    if n as u64 + 2 <= 4 * d as u64 {
        return Err(Error::Precondition(format!("need |S| > 4d - 2, got |S| = {n}")));
    }
    let ai = field.inv(alpha)?;
    let om = field.sub(1, ai);
    let mut count = 0;
    for s in set.iter() {
        for s2 in set.iter() {
            count += u64::from(!set.contains(field.add(field.mul(om, s), field.mul(ai, s2))));
        }
    }
    let scaled = |c: u64| ResidueSet::from_elements(p, set.iter().map(|s| field.mul(c, s))).expect("residues");
    let r = representation_counts(&scaled(om), &scaled(ai));
    let sumset_count = (0..p).filter(|&x| !set.contains(x)).map(|x| r[x as usize]).sum();
    let required = (n * (d - 1)) as u64;
    let half = n as f64 / 2.0;
    let floor = half * (half - 1.0);
    Ok(Condition34Report {
        p,
        alpha,
        d,
        set_size: n,
        count,
        sumset_count,
        required,
        holds: count > required,
        floor,
        floor_holds: count as f64 >= floor,
    })
}
