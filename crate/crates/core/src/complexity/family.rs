//! Polynomial families, witness search and exact complexity.
//!
//! The complexity of `{R(f, S) : f ∈ P_i}` is the largest `k` such that every
//! `k`-subset of `F_p` is shattered by the membership masks
//! `m_f = {x : f(x) ∈ S}`. Masks are `u128`, so `p < 128`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combin::{binomial, for_each_in_rank_range, unrank};
use crate::error::{budget, Error, Result};
use crate::field::PrimeField;
use crate::par::{find_first, map_chunks, Exec};
use crate::poly::{Poly, RootProduct};
use crate::subsets::ResidueSet;

pub const MAX_FAMILY: u128 = 10_000_000;
/// Mask-projection steps allowed per `complexity_exact` level.
pub const MAX_SHATTER_WORK: u128 = 4_000_000_000;
const MAX_MASK_P: u64 = 128;
const SAMPLE_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    P1,
    P2,
    P3,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(Family::P1),
            "P2" => Ok(Family::P2),
            "P3" => Ok(Family::P3),
            _ => Err(Error::InvalidInstance(format!("unknown family `{s}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// `P1`: degree `≤ d`; `P2`: squarefree of degree `≤ d` (nonzero constants
/// included); `P3`: `f_A = Π_{a∈A} (X - a)` with `|A| = d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyKind {
    pub family: Family,
    pub d: usize,
}

impl FamilyKind {
    pub fn new(family: Family, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInstance("degree bound d must be at least 1".into()));
        }
        Ok(Self { family, d })
    }

    fn check_field(&self, p: u64) -> Result<()> {
        if self.family == Family::P3 && self.d as u64 > p {
            return Err(Error::InvalidInstance(format!("P3 needs d <= p, got d = {} > {p}", self.d)));
        }
        Ok(())
    }

    /// Size of the candidate space walked in canonical order.
    pub fn candidates(&self, p: u64) -> u128 {
        match self.family {
            Family::P1 | Family::P2 => (p as u128).checked_pow(self.d as u32 + 1).unwrap_or(u128::MAX),
            Family::P3 => binomial(p, self.d as u64),
        }
    }

    /// Candidate `idx`: base-`p` digits as coefficients (constant term first)
    /// for P1/P2, the `idx`-th `d`-subset in lexicographic order for P3.
    pub fn candidate(&self, field: &PrimeField, idx: u64) -> Poly<u64> {
        let p = field.p();
        match self.family {
            Family::P1 | Family::P2 => {
                let mut rest = idx;
                Poly::new(
                    (0..=self.d)
                        .map(|_| {
                            let c = rest % p;
                            rest /= p;
                            c
                        })
                        .collect(),
                )
            }
            Family::P3 => {
                let roots = unrank(p, self.d, idx as u128);
                Poly::from_roots(field, &RootProduct::new(roots).expect("distinct by construction"))
            }
        }
    }

    fn admits_candidate(&self, field: &PrimeField, f: &Poly<u64>) -> bool {
        match self.family {
            Family::P2 => f.is_squarefree(field).unwrap_or(false),
            _ => true,
        }
    }

    /// Membership test, independent of the enumeration.
    pub fn contains(&self, field: &PrimeField, f: &Poly<u64>) -> bool {
        let deg_ok = f.degree().is_none_or(|d| d <= self.d);
        match self.family {
            Family::P1 => deg_ok,
            Family::P2 => deg_ok && f.is_squarefree(field).unwrap_or(false),
            Family::P3 => {
                f.degree() == Some(self.d)
                    && f.leading() == Some(1)
                    && f.distinct_roots_in_field(field).map(|r| r.len() == self.d).unwrap_or(false)
            }
        }
    }

    fn enumeration_budget(&self, p: u64) -> Result<u64> {
        self.check_field(p)?;
        let n = self.candidates(p);
        budget("family members", n, MAX_FAMILY)?;
        Ok(n as u64)
    }
}

/// `A = B ∪ C` with values required in `S` on `B` and outside `S` on `C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInstance {
    pub b: Vec<u64>,
    pub c: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(p: u64, mut b: Vec<u64>, mut c: Vec<u64>) -> Result<Self> {
        b.sort_unstable();
        c.sort_unstable();
        let mut all: Vec<u64> = b.iter().chain(&c).copied().collect();
        if let Some(&x) = all.iter().find(|&&x| x >= p) {
            return Err(Error::InvalidInstance(format!("point {x} is not a residue mod {p}")));
        }
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInstance("B and C must be disjoint sets of distinct points".into()));
        }
        Ok(Self { b, c })
    }

    pub fn len(&self) -> usize {
        self.b.len() + self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Split of the sorted points `a` by the bits of `pattern` (bit `j` set: `a[j] ∈ B`).
    fn from_pattern(a: &[u64], pattern: u64) -> Self {
        let (b, c) = a.iter().enumerate().fold((vec![], vec![]), |(mut b, mut c), (j, &x)| {
            if pattern >> j & 1 == 1 {
                b.push(x)
            } else {
                c.push(x)
            }
            (b, c)
        });
        Self { b, c }
    }

    pub fn realized_by(&self, field: &PrimeField, set: &ResidueSet, f: &Poly<u64>) -> bool {
        self.b.iter().all(|&x| set.contains(f.eval(field, x))) && self.c.iter().all(|&x| !set.contains(f.eval(field, x)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessCertificate {
    pub partition: PartitionInstance,
    /// Coefficients, constant term first.
    pub witness: Vec<u64>,
    pub verified: bool,
}

impl WitnessCertificate {
    fn new(kind: &FamilyKind, field: &PrimeField, set: &ResidueSet, partition: PartitionInstance, f: Poly<u64>) -> Self {
        let verified = kind.contains(field, &f) && partition.realized_by(field, set, &f);
        Self { partition, witness: f.coeffs().to_vec(), verified }
    }
}

/// First family member, in canonical order, realizing the partition.
pub fn find_witness(
    kind: &FamilyKind,
    field: &PrimeField,
    set: &ResidueSet,
    partition: &PartitionInstance,
    exec: Exec,
) -> Result<Option<WitnessCertificate>> {
    let p = field.p();
    if set.p() != p {
        return Err(Error::FieldMismatch);
    }
    if partition.len() as u64 > p {
        return Err(Error::InvalidInstance("more points than field elements".into()));
    }
    let n = kind.enumeration_budget(p)?;
    let hit = find_first(exec, n, |i| {
        let f = kind.candidate(field, i);
        partition.realized_by(field, set, &f) && kind.admits_candidate(field, &f)
    });
    Ok(hit.map(|i| WitnessCertificate::new(kind, field, set, partition.clone(), kind.candidate(field, i))))
}

/// Distinct membership masks over the whole family.
pub fn member_masks(kind: &FamilyKind, field: &PrimeField, set: &ResidueSet, exec: Exec) -> Result<Vec<u128>> {
    let p = field.p();
    if p >= MAX_MASK_P {
        return Err(Error::Precondition(format!("mask search needs p < {MAX_MASK_P}")));
    }
    if set.p() != p {
        return Err(Error::FieldMismatch);
    }
    let n = kind.enumeration_budget(p)?;
    let parts = map_chunks(exec, n, 4096, |range| {
        let mut out = Vec::new();
        for i in range {
            let f = kind.candidate(field, i);
            if !kind.admits_candidate(field, &f) {
                continue;
            }
            out.push((0..p).filter(|&x| set.contains(f.eval(field, x))).fold(0u128, |m, x| m | 1 << x));
        }
        out.sort_unstable();
        out.dedup();
        out
    });
    let mut masks: Vec<u128> = parts.into_iter().flatten().collect();
    masks.sort_unstable();
    masks.dedup();
    Ok(masks)
}

/// Smallest pattern over `a` (bit `j` ↔ `a[j]`) realized by no mask.
fn missing_pattern(masks: &[u128], a: &[u64]) -> Option<u64> {
    let k = a.len();
    let want = 1usize << k;
    let mut seen = vec![0u64; want.div_ceil(64)];
    let mut count = 0;
    for &m in masks {
        let pat = a.iter().enumerate().fold(0usize, |acc, (j, &x)| acc | ((m >> x & 1) as usize) << j);
        if seen[pat / 64] >> (pat % 64) & 1 == 0 {
            seen[pat / 64] |= 1 << (pat % 64);
            count += 1;
            if count == want {
                return None;
            }
        }
    }
    (0..want).find(|&i| seen[i / 64] >> (i % 64) & 1 == 0).map(|i| i as u64)
}

/// First `k`-subset (lexicographic) that the masks fail to shatter.
fn first_unshattered(masks: &[u128], p: u64, k: usize, exec: Exec) -> Option<(Vec<u64>, u64)> {
    let total = binomial(p, k as u64);
    const CHUNK: u128 = 512;
    const BLOCK: u128 = CHUNK * 64;
    let mut start = 0u128;
    while start < total {
        let end = (start + BLOCK).min(total);
        let hits = map_chunks(exec, (end - start).div_ceil(CHUNK) as u64, 1, |r| {
            let lo = start + r.start as u128 * CHUNK;
            let hi = (lo + CHUNK).min(end);
            let mut found = None;
            for_each_in_rank_range(p, k, lo..hi, |a| {
                if found.is_none() {
                    if let Some(pat) = missing_pattern(masks, a) {
                        found = Some((a.to_vec(), pat));
                    }
                }
            });
            found
        });
        if let Some(hit) = hits.into_iter().flatten().next() {
            return Some(hit);
        }
        start = end;
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexityReport {
    pub family: Family,
    pub d: usize,
    pub p: u64,
    pub set: Vec<u64>,
    /// Largest verified `k`.
    pub k: usize,
    pub k_max: usize,
    /// The search stopped at `k_max` without finding a failure.
    pub capped: bool,
    /// The search stopped on budget; `k` is a lower bound.
    pub partial: bool,
    /// A partition of size `k + 1` with no witness.
    pub failing_partition: Option<PartitionInstance>,
    /// Direct enumeration of the family confirms the failing partition.
    pub failure_confirmed: bool,
    pub witness_samples: Vec<WitnessCertificate>,
    /// `|F_i(S, d)|`: distinct sets `R(f, S)`.
    pub distinct_sets: usize,
    /// `⌊(d+1) log₂ p⌋`, checked for P3.
    pub clamp: u64,
    pub clamp_holds: bool,
}

/// Exact complexity, searching `k = 1, 2, …` up to `k_max`.
pub fn complexity_exact(kind: &FamilyKind, field: &PrimeField, set: &ResidueSet, k_max: usize, exec: Exec) -> Result<ComplexityReport> {
    complexity_exact_with_budget(kind, field, set, k_max, MAX_SHATTER_WORK, exec)
}

/// As [`complexity_exact`], stopping with a partial report once a level
/// would need more than `work_cap` mask projections.
pub fn complexity_exact_with_budget(
    kind: &FamilyKind,
    field: &PrimeField,
    set: &ResidueSet,
    k_max: usize,
    work_cap: u128,
    exec: Exec,
) -> Result<ComplexityReport> {
    let p = field.p();
    let masks = member_masks(kind, field, set, exec)?;
    let k_max = k_max.min(p as usize);
    let mut k = 0;
    let mut partial = false;
    let mut failing = None;
    while k < k_max {
        let next = k + 1;
        // past the pigeonhole bound the very first subset fails
        let work = if 1u128 << next.min(100) > masks.len() as u128 {
            masks.len() as u128
        } else {
            binomial(p, next as u64).saturating_mul(masks.len() as u128 * next as u128)
        };
        if work > work_cap {
            partial = true;
            break;
        }
        match first_unshattered(&masks, p, next, exec) {
            Some((a, pat)) => {
                failing = Some(PartitionInstance::from_pattern(&a, pat));
                break;
            }
            None => k = next,
        }
    }
    let failure_confirmed = match &failing {
        Some(part) => find_witness(kind, field, set, part, exec)?.is_none(),
        None => false,
    };
    if failing.is_some() && !failure_confirmed {
        return Err(Error::Precondition("mask search and direct search disagree".into()));
    }
    let mut witness_samples = Vec::new();
    if k > 0 {
        let a: Vec<u64> = (0..k as u64).collect();
        for pat in (0..1u64 << k).take(SAMPLE_WITNESSES) {
            let part = PartitionInstance::from_pattern(&a, pat);
            if let Some(w) = find_witness(kind, field, set, &part, exec)? {
                witness_samples.push(w);
            }
        }
    }
    let clamp = k3_upper_clamp(p, kind.d);
    Ok(ComplexityReport {
        family: kind.family,
        d: kind.d,
        p,
        set: set.to_vec(),
        k,
        k_max,
        capped: !partial && failing.is_none(),
        partial,
        failing_partition: failing,
        failure_confirmed,
        witness_samples,
        distinct_sets: masks.len(),
        clamp,
        clamp_holds: kind.family != Family::P3 || k as u64 <= clamp,
    })
}

/// `⌊(d + 1) log₂ p⌋`, i.e. the largest `m` with `2^m ≤ p^{d+1}`.
pub fn k3_upper_clamp(p: u64, d: usize) -> u64 {
    let mut pow: u128 = 1;
    for _ in 0..=d {
        match pow.checked_mul(p as u128) {
            Some(v) => pow = v,
            None => return ((d + 1) as f64 * (p as f64).log2()).floor() as u64,
        }
    }
    127 - pow.leading_zeros() as u64
}
