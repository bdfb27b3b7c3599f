//! Exponential sums with reciprocal arguments.

use num_complex::Complex64;
use serde::Serialize;

use super::acc::{ComplexAcc, EpTable};
use crate::combin::{binomial, for_each_in_rank_range};
use crate::error::{budget, Error, Result};
use crate::field::{FiniteField, PrimeField};
use crate::par::{map_chunks, Exec};

/// Largest number of subsets [`expsum_eq4`] will enumerate.
pub const MAX_SUBSET_TERMS: u128 = 50_000_000;
const RANK_CHUNK: u128 = 4096;

/// `Σ_{x ∈ F_p^*} e_p(a · x⁻¹)`.
pub fn inverse_complete_sum(field: &PrimeField, a: u64) -> Result<ComplexAcc> {
    let p = field.p();
    if a % p == 0 {
        return Err(Error::Precondition("a must be nonzero mod p".into()));
    }
    let table = EpTable::new(p);
    let inv = field.inverse_table();
    Ok((1..p).map(|x| table.get(field.mul(a, inv[x as usize]))).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct EhnReport {
    pub s: usize,
    pub q: u64,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub value: Complex64,
    pub modulus: f64,
    /// `(2s - 2)√q + 1`.
    pub bound: f64,
    pub holds: bool,
}

/// `Σ_{n ∈ F_q \ {-e_j}} ψ(Σ_j d_j (n + e_j)⁻¹)` with `ψ = e_p ∘ Tr`,
/// together with the bound `(2s - 2)√q + 1`.
pub fn ehn_sum<F: FiniteField>(field: &F, d: &[F::Elem], e: &[F::Elem]) -> Result<EhnReport> {
    let s = d.len();
    if s == 0 || e.len() != s {
        return Err(Error::Precondition("d and e must have the same positive length".into()));
    }
    if d.iter().all(|&x| field.is_zero(x)) {
        return Err(Error::Precondition("some d_j must be nonzero".into()));
    }
    let mut sorted = e.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("the e_j must be pairwise distinct".into()));
    }
    let table = EpTable::new(field.characteristic());
    let mut acc = ComplexAcc::new();
    'outer: for n in field.elements() {
        let mut arg = field.zero();
        for (&dj, &ej) in d.iter().zip(e) {
            let t = field.add(n, ej);
            if field.is_zero(t) {
                continue 'outer;
            }
            arg = field.add(arg, field.mul(dj, field.inv(t)?));
        }
        acc.add(table.get(field.trace(arg)));
    }
    let q = field.order();
    let value = acc.value();
    let bound = (2.0 * s as f64 - 2.0) * (q as f64).sqrt() + 1.0;
    Ok(EhnReport { s, q, value, modulus: value.norm(), bound, holds: value.norm() <= bound + acc.tolerance() })
}

/// Data of the sum `S(h, b)`: `k` rows `h_m`, `b_{m,1..d}` and the set `B`
/// the variables avoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumSpec4 {
    pub h: Vec<u64>,
    /// `b[m][j]`, `k` rows of length `d`.
    pub b: Vec<Vec<u64>>,
    pub excluded: Vec<u64>,
}

impl SumSpec4 {
    pub fn k(&self) -> usize {
        self.h.len()
    }

    pub fn d(&self) -> usize {
        self.b.first().map_or(0, Vec::len)
    }

    fn validate(&self, p: u64) -> Result<()> {
        let bad = |m: &str| Err(Error::Precondition(m.to_string()));
        if self.h.is_empty() || self.b.len() != self.h.len() {
            return bad("need k ≥ 1 rows of h and b");
        }
        if self.h.iter().any(|&h| h % p == 0) {
            return bad("every h_m must be nonzero");
        }
        let d = self.d();
        if d == 0 || self.b.iter().any(|row| row.len() != d) {
            return bad("every row of b needs the same length d ≥ 1");
        }
        if self.b.iter().flatten().chain(&self.excluded).any(|&x| x >= p) {
            return bad("residues must lie in [0, p)");
        }
        for j in 0..d {
            for m in 0..self.k() {
                for l in 0..m {
                    if self.b[m][j] == self.b[l][j] {
                        return bad("b_{m,j} must differ from b_{l,j} for m ≠ l");
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Σ_{{a_1 < ⋯ < a_d} ⊆ F_p \ B} e_p(Σ_m h_m Π_j (b_{m,j} - a_j)⁻¹)`.
///
/// Subsets are listed in increasing order and `a_j` is the `j`-th smallest
/// element. A variable landing on a pole `a_j = b_{m,j}` is an error.
pub fn expsum_eq4(field: &PrimeField, spec: &SumSpec4, exec: Exec) -> Result<ComplexAcc> {
    let p = field.p();
    spec.validate(p)?;
    let mut domain: Vec<u64> = (0..p).filter(|x| !spec.excluded.contains(x)).collect();
    domain.dedup();
    let d = spec.d();
    if d > domain.len() {
        return Err(Error::Precondition(format!("d = {d} exceeds |F_p \\ B| = {}", domain.len())));
    }
    let total = binomial(domain.len() as u64, d as u64);
    budget("subset sum terms", total, MAX_SUBSET_TERMS)?;
    let table = EpTable::new(p);
    let inv = field.inverse_table();
    let chunks = total.div_ceil(RANK_CHUNK) as u64;
    let partial = map_chunks(exec, chunks, 1, |range| -> Result<ComplexAcc> {
        let mut acc = ComplexAcc::new();
        let mut pole = false;
        let lo = range.start as u128 * RANK_CHUNK;
        let hi = (range.end as u128 * RANK_CHUNK).min(total);
        for_each_in_rank_range(domain.len() as u64, d, lo..hi, |comb| {
            let mut arg = 0u64;
            for (hm, row) in spec.h.iter().zip(&spec.b) {
                let mut prod = *hm % p;
                for (&bj, &ci) in row.iter().zip(comb) {
                    let diff = field.sub(bj, domain[ci as usize]);
                    if diff == 0 {
                        pole = true;
                        return;
                    }
                    prod = field.mul(prod, inv[diff as usize]);
                }
                arg = field.add(arg, prod);
            }
            acc.add(table.get(arg));
        });
        if pole {
            return Err(Error::Precondition("a variable hits a pole b_{m,j}".into()));
        }
        Ok(acc)
    });
    let mut acc = ComplexAcc::new();
    for part in partial {
        acc.merge(&part?);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub p: u64,
    pub d: usize,
    pub h: u64,
    pub b: u64,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub s: Complex64,
    /// `-C(p-1, d-1) - Σ_{A'} Σ_{a ∈ A'} e_p(h (b-a)^{-2} Π_{a' ≠ a} (b-a')⁻¹)`
    /// over `(d-1)`-subsets `A'` of `F_p \ {b}`.
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub rhs: Complex64,
    /// `|S - rhs|`: the identity read with `S` on the left.
    pub literal_residual: f64,
    /// `|d·S - rhs|`: each `d`-subset arises from `d` choices of the last variable.
    pub counted_residual: f64,
    pub tolerance: f64,
    pub literal_holds: bool,
    pub counted_holds: bool,
    /// `|S + p^{d-1}/(d-1)!| / p^{d-3/2}`.
    pub ratio_factorial_main_term: f64,
    /// `|S + C(p-1, d-1)| / p^{d-3/2}`.
    pub ratio_binomial_main_term: f64,
    /// `|S + C(p-1, d-1)/d| / p^{d-3/2}`.
    pub ratio_counted_main_term: f64,
}

/// Evaluates both sides of the decomposition obtained by completing the sum
/// over the last variable in `S(h, b)`.
pub fn lemma1_decomposition_check(field: &PrimeField, h: u64, b: u64, d: usize, exec: Exec) -> Result<Lemma1Report> {
    let p = field.p();
    if d < 2 {
        return Err(Error::Precondition("d must be at least 2".into()));
    }
    let (h, b) = (h % p, b % p);
    let spec = SumSpec4 { h: vec![h], b: vec![vec![b; d]], excluded: vec![b] };
    let s_acc = expsum_eq4(field, &spec, exec)?;
    let s = s_acc.value();

    let table = EpTable::new(p);
    let inv = field.inverse_table();
    let domain: Vec<u64> = (0..p).filter(|&x| x != b).collect();
    let total = binomial(domain.len() as u64, d as u64 - 1);
    budget("subset sum terms", total, MAX_SUBSET_TERMS)?;
    let chunks = total.div_ceil(RANK_CHUNK) as u64;
    let partial = map_chunks(exec, chunks, 1, |range| {
        let mut acc = ComplexAcc::new();
        let lo = range.start as u128 * RANK_CHUNK;
        let hi = (range.end as u128 * RANK_CHUNK).min(total);
        for_each_in_rank_range(domain.len() as u64, d - 1, lo..hi, |comb| {
            let c = comb.iter().fold(h, |acc, &i| field.mul(acc, inv[field.sub(b, domain[i as usize]) as usize]));
            for &i in comb {
                let t = inv[field.sub(b, domain[i as usize]) as usize];
                acc.add(table.get(field.mul(c, t)));
            }
        });
        acc
    });
    let mut inner = ComplexAcc::new();
    for part in &partial {
        inner.merge(part);
    }
    let lead = binomial(p - 1, d as u64 - 1) as f64;
    let rhs = Complex64::new(-lead, 0.0) - inner.value();
    let tolerance = 1e-6 * (s_acc.terms() + inner.terms()).max(1) as f64;
    let literal_residual = (s - rhs).norm();
    let counted_residual = (s * d as f64 - rhs).norm();
    let scale = (p as f64).powf(d as f64 - 1.5);
    let factorial: f64 = (1..d).map(|i| i as f64).product();
    let pf = (p as f64).powi(d as i32 - 1) / factorial;
    Ok(Lemma1Report {
        p,
        d,
        h,
        b,
        s,
        rhs,
        literal_residual,
        counted_residual,
        tolerance,
        literal_holds: literal_residual <= tolerance,
        counted_holds: counted_residual <= tolerance,
        ratio_factorial_main_term: (s + pf).norm() / scale,
        ratio_binomial_main_term: (s + lead).norm() / scale,
        ratio_counted_main_term: (s + lead / d as f64).norm() / scale,
    })
}
