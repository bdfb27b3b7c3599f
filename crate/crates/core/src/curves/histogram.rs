//! Level-set counts `N_n(λ)` of `Σ d_i ((x - b_i)(y - c_i))⁻¹ = λ` and the
//! bilinear sum, both by one pass over the plane.

use num_complex::Complex64;
use serde::Serialize;

use super::instance::BilinearInstance;
use crate::error::{budget, Result};
use crate::field::FiniteField;
use crate::par::{map_chunks, Exec};
use crate::sums::{ComplexAcc, EpTable};

/// Largest `q²` a plane pass may visit.
pub const MAX_PAIRS: u128 = 100_000_000;
/// Fixed number of x-slices; partial results merge in slice order.
const SLICES: u64 = 64;

/// Visits `λ(x, y)` for every `x ∉ {b_i}`, `y ∉ {c_i}`, slicing the x-range.
/// Returns one accumulator per slice, in slice order.
pub(crate) fn scan_plane<F, T, I, V>(field: &F, inst: &BilinearInstance, exec: Exec, init: I, visit: V) -> Result<Vec<T>>
where
    F: FiniteField,
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, F::Elem) + Sync + Send,
{
    inst.validate()?;
    let q = field.order();
    budget("plane pairs", q as u128 * q as u128, MAX_PAIRS)?;
    let e = inst.embed(field)?;
    let k = inst.k();
    let ys: Vec<F::Elem> = field.elements().filter(|y| !e.c.contains(y)).collect();
    // inv_c[i * ys.len() + t] = (ys[t] - c_i)⁻¹
    let mut inv_c = Vec::with_capacity(k * ys.len());
    for &ci in &e.c {
        for &y in &ys {
            inv_c.push(field.inv(field.sub(y, ci))?);
        }
    }
    let slice = q.div_ceil(SLICES);
    Ok(map_chunks(exec, q, slice, |range| {
        let mut acc = init();
        let mut u = vec![field.zero(); k];
        for xi in range {
            let x = field.element(xi);
            if e.b.contains(&x) {
                continue;
            }
            for i in 0..k {
                u[i] = field.mul(e.d[i], field.inv(field.sub(x, e.b[i])).expect("x ∉ b"));
            }
            for t in 0..ys.len() {
                let mut lambda = field.mul(u[0], inv_c[t]);
                for i in 1..k {
                    lambda = field.add(lambda, field.mul(u[i], inv_c[i * ys.len() + t]));
                }
                visit(&mut acc, lambda);
            }
        }
        acc
    }))
}

/// `N_n(λ)` for every `λ ∈ F_q`, indexed by the field's enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaHistogram {
    pub p: u64,
    pub n: u32,
    pub q: u64,
    pub k: usize,
    pub counts: Vec<u64>,
}

impl LambdaHistogram {
    pub fn mass(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(q - k)²`.
    pub fn expected_mass(&self) -> u64 {
        (self.q - self.k as u64).pow(2)
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// `Σ_λ N(λ) ψ(λ)` with `ψ = e_p ∘ Tr`.
    pub fn character_sum<F: FiniteField>(&self, field: &F) -> Complex64 {
        let table = EpTable::new(self.p);
        let acc: ComplexAcc =
            self.counts.iter().enumerate().map(|(i, &c)| table.get(field.trace(field.element(i as u64))) * c as f64).collect();
        acc.value()
    }
}

pub fn histogram_nn<F: FiniteField>(field: &F, inst: &BilinearInstance, exec: Exec) -> Result<LambdaHistogram> {
    let q = field.order();
    let parts = scan_plane(field, inst, exec, || vec![0u32; q as usize], |t, l| t[field.index(l) as usize] += 1)?;
    let mut counts = vec![0u64; q as usize];
    for part in parts {
        for (c, v) in counts.iter_mut().zip(part) {
            *c += v as u64;
        }
    }
    Ok(LambdaHistogram { p: inst.p, n: field.degree(), q, k: inst.k(), counts })
}

#[derive(Debug, Clone, Serialize)]
pub struct BilinearReport {
    pub p: u64,
    pub q: u64,
    pub k: usize,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub value: Complex64,
    pub modulus: f64,
    /// `(q - k)²`.
    pub trivial_bound: f64,
    /// `44^{4k} q`.
    pub theorem_bound: f64,
    pub holds: bool,
    pub terms: u64,
}

/// `S(b, c, d) = Σ_{x ∉ {b_i}, y ∉ {c_i}} ψ(Σ d_i ((x - b_i)(y - c_i))⁻¹)`.
pub fn bilinear_sum<F: FiniteField>(field: &F, inst: &BilinearInstance, exec: Exec) -> Result<BilinearReport> {
    let table = EpTable::new(inst.p);
    let parts = scan_plane(field, inst, exec, ComplexAcc::new, |acc, l| acc.add(table.get(field.trace(l))))?;
    let mut acc = ComplexAcc::new();
    for part in &parts {
        acc.merge(part);
    }
    let q = field.order();
    let k = inst.k();
    let value = acc.value();
    let trivial_bound = ((q - k as u64) as f64).powi(2);
    let theorem_bound = 44f64.powi(4 * k as i32) * q as f64;
    let bound = trivial_bound.min(theorem_bound);
    Ok(BilinearReport {
        p: inst.p,
        q,
        k,
        value,
        modulus: value.norm(),
        trivial_bound,
        theorem_bound,
        holds: value.norm() <= bound + acc.tolerance(),
        terms: acc.terms(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ExtField, PrimeField};

    fn simple(p: u64) -> BilinearInstance {
        BilinearInstance::new(p, vec![0], vec![0], vec![1]).unwrap()
    }

    #[test]
    fn k1_histogram_is_flat_off_zero() {
        let f = PrimeField::new(7).unwrap();
        let h = histogram_nn(&f, &simple(7), Exec::Sequential).unwrap();
        assert_eq!(h.counts, vec![0, 6, 6, 6, 6, 6, 6]);
        assert_eq!(h.mass(), h.expected_mass());
    }

    #[test]
    fn k1_bilinear_sum_is_minus_p_plus_one() {
        let f = PrimeField::new(7).unwrap();
        let r = bilinear_sum(&f, &simple(7), Exec::Sequential).unwrap();
        assert!((r.value - Complex64::new(-6.0, 0.0)).norm() < 1e-9);
        assert!(r.holds);
    }

    #[test]
    fn histogram_oracle_matches_direct_sum() {
        let f = PrimeField::new(31).unwrap();
        let inst = BilinearInstance::new(31, vec![1, 5, 9], vec![2, 3, 30], vec![4, 1, 17]).unwrap();
        let h = histogram_nn(&f, &inst, Exec::Parallel).unwrap();
        assert_eq!(h.mass(), 28 * 28);
        assert!(h.max_count() <= 3 * 31);
        let r = bilinear_sum(&f, &inst, Exec::Parallel).unwrap();
        assert!((h.character_sum(&f) - r.value).norm() < 1e-6 * 31.0 * 31.0);
    }

    #[test]
    fn extension_histogram_mass_and_policy_independence() {
        let f = ExtField::new(5, 2).unwrap();
        let inst = BilinearInstance::new(5, vec![1, 2], vec![0, 3], vec![1, 4]).unwrap();
        let a = histogram_nn(&f, &inst, Exec::Sequential).unwrap();
        let b = histogram_nn(&f, &inst, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mass(), 23 * 23);
        assert!(a.max_count() <= 2 * 25);
        let r = bilinear_sum(&f, &inst, Exec::Sequential).unwrap();
        assert!((a.character_sum(&f) - r.value).norm() < 1e-6 * 625.0);
    }

    #[test]
    fn budget_is_enforced() {
        let f = PrimeField::new(10_007).unwrap();
        assert!(histogram_nn(&f, &simple(10_007), Exec::Sequential).is_err());
    }
}
