//! The variety `V_n` cut out by `u_i u_1 (b_1 - b_i) + u_i - u_1 = 0` and
//! `v_i v_1 (c_1 - c_i) + v_i - v_1 = 0`, its exponential sums, and their
//! expansion with auxiliary multiplier variables.

use num_complex::Complex64;
use serde::Serialize;

use super::histogram::bilinear_sum;
use super::instance::BilinearInstance;
use crate::error::{budget, Result};
use crate::field::FiniteField;
use crate::par::{map_slice, Exec};
use crate::sums::{ComplexAcc, EpTable};

/// Largest `|V_n|` summed directly.
pub const MAX_VARIETY_POINTS: u128 = 200_000_000;
/// Largest number of terms in the expanded sum.
pub const MAX_PHI_TERMS: u128 = 10_000_000;

/// Every solution of the `u`-equations, found by scanning `u_1`: for each
/// `u_1` the remaining `u_i = u_1 / (1 + u_1 (b_1 - b_i))` are forced, and
/// `u_1` is admissible exactly when no denominator vanishes.
pub fn solutions<F: FiniteField>(field: &F, b: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    let mut out = Vec::new();
    'u1: for u1 in field.elements() {
        let mut u = vec![u1];
        for &bi in &b[1..] {
            let den = field.add(field.one(), field.mul(u1, field.sub(b[0], bi)));
            if field.is_zero(den) {
                // u_i · 0 = u_1 would force u_1 = 0, but then den = 1
                continue 'u1;
            }
            u.push(field.mul(u1, field.inv(den).expect("nonzero")));
        }
        out.push(u);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Relation9Report {
    pub q: u64,
    pub k: usize,
    pub u_solutions: u64,
    pub v_solutions: u64,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub s_n: Complex64,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub s_n_star: Complex64,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub diff: Complex64,
    /// Points with `u = 0` or `v = 0`: `U + V - 1`.
    pub expected_diff: u64,
    /// `2(q - 1) + 1`.
    pub stated_constant: u64,
    pub matches_expected: bool,
    pub matches_stated_constant: bool,
    /// `S_n^*` agrees with the bilinear sum over `F_q`.
    pub star_equals_bilinear: bool,
}

/// `S_n(V, d)` over all of `V_n` and the part with every coordinate nonzero.
pub fn variety_sums<F: FiniteField>(field: &F, inst: &BilinearInstance, exec: Exec) -> Result<(ComplexAcc, ComplexAcc, u64, u64)> {
    inst.validate()?;
    let e = inst.embed(field)?;
    let us = solutions(field, &e.b);
    let vs = solutions(field, &e.c);
    budget("variety points", us.len() as u128 * vs.len() as u128 * inst.k() as u128, MAX_VARIETY_POINTS)?;
    let table = EpTable::new(inst.p);
    // weights w_i = d_i u_i, so the phase is Σ w_i v_i
    let parts = map_slice(exec, &us, |u| {
        let w: Vec<F::Elem> = u.iter().zip(&e.d).map(|(&ui, &di)| field.mul(di, ui)).collect();
        let nonzero_u = !field.is_zero(u[0]);
        let (mut all, mut star) = (ComplexAcc::new(), ComplexAcc::new());
        for v in &vs {
            let z = table.get(field.trace(field.dot(&w, v)));
            all.add(z);
            if nonzero_u && !field.is_zero(v[0]) {
                star.add(z);
            }
        }
        (all, star)
    });
    let (mut all, mut star) = (ComplexAcc::new(), ComplexAcc::new());
    for (a, s) in &parts {
        all.merge(a);
        star.merge(s);
    }
    Ok((all, star, us.len() as u64, vs.len() as u64))
}

pub fn relation9_verify<F: FiniteField>(field: &F, inst: &BilinearInstance, exec: Exec) -> Result<Relation9Report> {
    let (all, star, nu, nv) = variety_sums(field, inst, exec)?;
    let q = field.order();
    let diff = all.value() - star.value();
    let expected_diff = nu + nv - 1;
    let stated_constant = 2 * (q - 1) + 1;
    let tol = all.tolerance() + star.tolerance();
    let bil = bilinear_sum(field, inst, exec)?;
    Ok(Relation9Report {
        q,
        k: inst.k(),
        u_solutions: nu,
        v_solutions: nv,
        s_n: all.value(),
        s_n_star: star.value(),
        diff,
        expected_diff,
        stated_constant,
        matches_expected: (diff - expected_diff as f64).norm() <= tol,
        matches_stated_constant: (diff - stated_constant as f64).norm() <= tol,
        star_equals_bilinear: (bil.value - star.value()).norm() <= tol + 1e-9 * bil.terms as f64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiReport {
    pub q: u64,
    pub k: usize,
    pub variables: usize,
    pub terms: u64,
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub s_phi: Complex64,
    /// `S_n(V, d) · q^{2(k-1)}`.
    #[serde(serialize_with = "crate::sums::ser_complex")]
    pub scaled_variety_sum: Complex64,
    pub error: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Full enumeration of `Σ ψ(φ(u, v, g, h))` over `F_q^{4k-2}` against
/// `q^{2(k-1)} S_n(V, d)`.
pub fn phi_identity_verify<F: FiniteField>(field: &F, inst: &BilinearInstance, exec: Exec) -> Result<PhiReport> {
    inst.validate()?;
    let k = inst.k();
    let q = field.order();
    let vars = 4 * k - 2;
    let terms = (q as u128).saturating_pow(vars as u32);
    budget("phi terms", terms, MAX_PHI_TERMS)?;
    let e = inst.embed(field)?;
    let table = EpTable::new(inst.p);
    let phi = |x: &[F::Elem]| -> F::Elem {
        let (u, rest) = x.split_at(k);
        let (v, rest) = rest.split_at(k);
        let (g, h) = rest.split_at(k - 1);
        let mut acc = field.mul(e.d[0], field.mul(u[0], v[0]));
        for i in 1..k {
            acc = field.add(acc, field.mul(e.d[i], field.mul(u[i], v[i])));
            let cu = field.sub(field.add(field.mul(field.mul(u[i], u[0]), field.sub(e.b[0], e.b[i])), u[i]), u[0]);
            let cv = field.sub(field.add(field.mul(field.mul(v[i], v[0]), field.sub(e.c[0], e.c[i])), v[i]), v[0]);
            acc = field.add(acc, field.add(field.mul(g[i - 1], cu), field.mul(h[i - 1], cv)));
        }
        acc
    };
    // split on the first coordinate, odometer over the rest
    let firsts: Vec<F::Elem> = field.elements().collect();
    let parts = map_slice(exec, &firsts, |&x0| {
        let mut acc = ComplexAcc::new();
        let mut idx = vec![0u64; vars - 1];
        let mut x = vec![field.zero(); vars];
        x[0] = x0;
        loop {
            for (slot, &i) in x[1..].iter_mut().zip(&idx) {
                *slot = field.element(i);
            }
            acc.add(table.get(field.trace(phi(&x))));
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return acc;
                }
                idx[pos] += 1;
                if idx[pos] < q {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    });
    let mut acc = ComplexAcc::new();
    for part in &parts {
        acc.merge(part);
    }
    let (all, _, _, _) = variety_sums(field, inst, exec)?;
    let scaled = all.value() * (q as f64).powi(2 * (k as i32 - 1));
    let error = (acc.value() - scaled).norm();
    let tolerance = 1e-6 * (q as f64).powf(vars as f64 / 2.0);
    Ok(PhiReport {
        q,
        k,
        variables: vars,
        terms: acc.terms(),
        s_phi: acc.value(),
        scaled_variety_sum: scaled,
        error,
        tolerance,
        holds: error <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ExtField, PrimeField};

    #[test]
    fn relation9_k1_matches_stated_constant() {
        let f = PrimeField::new(7).unwrap();
        let inst = BilinearInstance::new(7, vec![0], vec![0], vec![1]).unwrap();
        let r = relation9_verify(&f, &inst, Exec::Sequential).unwrap();
        assert!((r.s_n - Complex64::new(7.0, 0.0)).norm() < 1e-9);
        assert!((r.s_n_star - Complex64::new(-6.0, 0.0)).norm() < 1e-9);
        assert_eq!(r.expected_diff, 13);
        assert!(r.matches_expected && r.matches_stated_constant && r.star_equals_bilinear);
    }

    #[test]
    fn relation9_k2_counts_missing_u1() {
        let f = PrimeField::new(11).unwrap();
        let inst = BilinearInstance::new(11, vec![1, 4], vec![2, 7], vec![3, 5]).unwrap();
        let r = relation9_verify(&f, &inst, Exec::Sequential).unwrap();
        assert_eq!(r.u_solutions, 10);
        assert_eq!(r.expected_diff, 19);
        assert!(r.matches_expected && !r.matches_stated_constant && r.star_equals_bilinear);
    }

    #[test]
    fn relation9_over_extension() {
        let f = ExtField::new(3, 2).unwrap();
        let inst = BilinearInstance::new(3, vec![0, 1], vec![1, 2], vec![1, 2]).unwrap();
        let r = relation9_verify(&f, &inst, Exec::Sequential).unwrap();
        assert_eq!(r.u_solutions, 9 - 2 + 1);
        assert!(r.matches_expected && r.star_equals_bilinear);
    }

    #[test]
    fn phi_identity_small() {
        let f = PrimeField::new(5).unwrap();
        let k1 = BilinearInstance::new(5, vec![2], vec![3], vec![1]).unwrap();
        let r = phi_identity_verify(&f, &k1, Exec::Sequential).unwrap();
        assert_eq!(r.terms, 25);
        assert!(r.holds);
        let k2 = BilinearInstance::new(5, vec![1, 2], vec![3, 4], vec![1, 3]).unwrap();
        let r = phi_identity_verify(&f, &k2, Exec::Parallel).unwrap();
        assert_eq!(r.terms, 15_625);
        assert!(r.holds, "{r:?}");
    }
}
