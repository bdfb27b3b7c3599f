//! Explicit squarefree witnesses of degree `≤ d` for partitions of `d + 2`
//! points, when `4d - 2 < |S| < (p - d + 1)/2`.
//!
//! With `A = B ∪ C`, `ℓ = |B|`, each branch builds a Lagrange interpolant `f`
//! and picks `g = u f + v`, avoiding the values of `u` that put a point on
//! the wrong side of `S` or a root of `g` on a root of `f'`. Every output is
//! re-verified by evaluation and a squarefree test; a candidate that fails
//! (possible only through roots of `f'` outside `F_p`) is skipped.

use serde::Serialize;

use super::family::PartitionInstance;
use crate::combin::{binomial, for_each_in_rank_range};
use crate::error::{Error, Result};
use crate::field::{FiniteField, PrimeField};
use crate::par::{map_chunks, Exec};
use crate::poly::Poly;
use crate::subsets::ResidueSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `ℓ = 0`: a nonzero constant outside `S`.
    Constant,
    /// `ℓ = d + 2`: a nonzero constant in `S`.
    AllInside,
    /// `ℓ = 1`, every `f_i(a_i) = 0`: `f = Σ f_i`.
    SingleSum,
    /// `ℓ = 1`, some `f_{i₀}(a_{i₀}) ≠ 0`.
    SinglePivot,
    /// `ℓ ≥ 2`, every `f_i(a_i) = 1`: `f = Σ f_i - 1`.
    MultiSum,
    /// `ℓ ≥ 2`, `α = f_{i₀}(a_{i₀}) = 0`.
    MultiPivotZero,
    /// `ℓ ≥ 2`, `α ∉ {0, 1}`: search `(s, s')`.
    Alpha,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem4Trace {
    pub branch: Branch,
    pub ell: usize,
    /// The point `a_{i₀}`.
    pub i0: Option<u64>,
    pub alpha: Option<u64>,
    /// Common nonzero value of `f` on the opposite side, read off `f`.
    pub mu: Option<u64>,
    /// `R(v)` for the chosen `v`.
    pub forbidden: Vec<u64>,
    /// `(d - 1) + 2|S|`.
    pub forbidden_bound: usize,
    pub u: Option<u64>,
    pub v: Option<u64>,
    pub s_pair: Option<(u64, u64)>,
    /// Pairs `(s, s')` with `(1 - ᾱ)s + ᾱs' ∉ S`.
    pub admissible_pairs: Option<usize>,
    /// Pairs of those discarded for meeting a root of `f'`.
    pub excluded_pairs: Option<usize>,
    pub derivative_roots: Vec<u64>,
    pub z_outside_field: bool,
    /// Candidates rejected by the final verification.
    pub rejected: usize,
}

impl Theorem4Trace {
    fn new(branch: Branch, ell: usize, d: usize, s: usize) -> Self {
        Self {
            branch,
            ell,
            i0: None,
            alpha: None,
            mu: None,
            forbidden: vec![],
            forbidden_bound: d - 1 + 2 * s,
            u: None,
            v: None,
            s_pair: None,
            admissible_pairs: None,
            excluded_pairs: None,
            derivative_roots: vec![],
            z_outside_field: false,
            rejected: 0,
        }
    }
}

/// `4d - 2 < |S| < (p - d + 1)/2` and `d + 2 ≤ p`.
pub fn hypotheses_hold(p: u64, d: usize, s: usize) -> bool {
    let (d, s) = (d as u64, s as u64);
    d >= 1 && d + 2 <= p && 4 * d - 2 < s && 2 * s + d < p + 1
}

fn check_input(field: &PrimeField, set: &ResidueSet, part: &PartitionInstance, d: usize) -> Result<()> {
    let p = field.p();
    if set.p() != p {
        return Err(Error::FieldMismatch);
    }
    if !hypotheses_hold(p, d, set.len()) {
        return Err(Error::Precondition(format!(
            "need d + 2 <= p and 4d - 2 < |S| < (p - d + 1)/2; got p = {p}, d = {d}, |S| = {}",
            set.len()
        )));
    }
    if part.len() != d + 2 {
        return Err(Error::Precondition(format!("need |B ∪ C| = d + 2 = {}, got {}", d + 2, part.len())));
    }
    PartitionInstance::new(p, part.b.clone(), part.c.clone()).map(|_| ())
}

/// Degree `≤ d`, squarefree, nonzero, with the membership pattern.
pub fn verify_witness(field: &PrimeField, set: &ResidueSet, part: &PartitionInstance, d: usize, g: &Poly<u64>) -> bool {
    g.degree().is_some_and(|k| k <= d) && g.is_squarefree(field).unwrap_or(false) && part.realized_by(field, set, g)
}

struct Ctx<'a> {
    field: &'a PrimeField,
    set: &'a ResidueSet,
    part: &'a PartitionInstance,
    d: usize,
}

impl Ctx<'_> {
    /// Interpolant of degree `≤ d` with value `zero_on` at `zeros` and 1 at `ones`.
    fn interpolant(&self, zeros: impl Iterator<Item = u64>, ones: impl Iterator<Item = u64>) -> Result<Poly<u64>> {
        let pts: Vec<(u64, u64)> = zeros.map(|x| (x, 0)).chain(ones.map(|x| (x, 1))).collect();
        Poly::interpolate(self.field, &pts)
    }

    fn derivative_roots(&self, f: &Poly<u64>, trace: &mut Theorem4Trace) -> Result<Vec<u64>> {
        let df = f.derivative(self.field);
        if df.is_zero() {
            return Ok(vec![]);
        }
        let roots = df.distinct_roots_in_field(self.field)?;
        // deg gcd(f', X^p - X) equals the number of distinct roots in F_p
        trace.z_outside_field = roots.len() < df.degree().unwrap_or(0);
        trace.derivative_roots = roots.clone();
        Ok(roots)
    }

    /// Tries `g = u f + v` for `v ∈ S \ {0}` ascending and `u ∉ R(v)` ascending.
    fn affine(&self, f: &Poly<u64>, forbid: impl Fn(u64) -> Vec<u64>, mut trace: Theorem4Trace) -> Result<(Poly<u64>, Theorem4Trace)> {
        let fd = self.field;
        let p = fd.p();
        let zs = self.derivative_roots(f, &mut trace)?;
        for v in self.set.iter().filter(|&v| v != 0) {
            let mut r: Vec<u64> = zs
                .iter()
                .map(|&z| f.eval(fd, z))
                .filter(|&fz| fz != 0)
                .map(|fz| fd.neg(fd.mul(v, fd.inv(fz).expect("nonzero"))))
                .chain(forbid(v))
                .collect();
            r.sort_unstable();
            r.dedup();
            if r.len() as u64 >= p {
                return Err(Error::ExhaustedSearch(format!("|R(v)| = {} >= p at v = {v}", r.len())));
            }
            for u in (0..p).filter(|u| r.binary_search(u).is_err()) {
                let g = f.scale(fd, u).add(fd, &Poly::constant(v));
                if verify_witness(fd, self.set, self.part, self.d, &g) {
                    trace.u = Some(u);
                    trace.v = Some(v);
                    trace.forbidden = r;
                    return Ok((g, trace));
                }
                trace.rejected += 1;
            }
        }
        Err(Error::ExhaustedSearch(format!("no affine witness: {trace:?}")))
    }

    /// `(s - v) · c⁻¹` for `s ∈ S`.
    fn shifted(&self, v: u64, c: u64) -> Vec<u64> {
        let fd = self.field;
        let ci = fd.inv(c).expect("nonzero");
        self.set.iter().map(|s| fd.mul(fd.sub(s, v), ci)).collect()
    }

    fn constant(&self, branch: Branch, value: Option<u64>) -> Result<(Poly<u64>, Theorem4Trace)> {
        let mut trace = Theorem4Trace::new(branch, self.part.b.len(), self.d, self.set.len());
        let w = value.ok_or_else(|| Error::ExhaustedSearch("no nonzero constant on the required side".into()))?;
        trace.v = Some(w);
        let g = Poly::constant(w);
        if !verify_witness(self.field, self.set, self.part, self.d, &g) {
            return Err(Error::ExhaustedSearch(format!("constant {w} fails verification")));
        }
        Ok((g, trace))
    }

    fn single(&self) -> Result<(Poly<u64>, Theorem4Trace)> {
        let fd = self.field;
        let a1 = self.part.b[0];
        let cs = &self.part.c;
        let ell = 1;
        let fs: Vec<Poly<u64>> =
            cs.iter().map(|&ai| self.interpolant(std::iter::once(a1), cs.iter().copied().filter(|&x| x != ai))).collect::<Result<_>>()?;
        let diag: Vec<u64> = fs.iter().zip(cs).map(|(f, &a)| f.eval(fd, a)).collect();
        match diag.iter().position(|&x| x != 0) {
            None => {
                let f = fs.iter().fold(Poly::zero(), |acc, g| acc.add(fd, g));
                let mu = self.common_value(&f, cs)?;
                let mut trace = Theorem4Trace::new(Branch::SingleSum, ell, self.d, self.set.len());
                trace.mu = Some(mu);
                self.affine(&f, |v| self.shifted(v, mu), trace)
            }
            Some(i) => {
                let alpha = diag[i];
                let mut trace = Theorem4Trace::new(Branch::SinglePivot, ell, self.d, self.set.len());
                trace.i0 = Some(cs[i]);
                trace.alpha = Some(alpha);
                self.affine(
                    &fs[i],
                    |v| {
                        let mut r = self.shifted(v, 1);
                        r.extend(self.shifted(v, alpha));
                        r
                    },
                    trace,
                )
            }
        }
    }

    /// The value of `f` on `pts`, which the construction makes constant and nonzero.
    fn common_value(&self, f: &Poly<u64>, pts: &[u64]) -> Result<u64> {
        let vals: Vec<u64> = pts.iter().map(|&x| f.eval(self.field, x)).collect();
        if vals.iter().any(|&v| v != vals[0]) || vals[0] == 0 {
            return Err(Error::ExhaustedSearch(format!("interpolant sum takes values {vals:?}")));
        }
        Ok(vals[0])
    }

    fn multi(&self) -> Result<(Poly<u64>, Theorem4Trace)> {
        let fd = self.field;
        let bs = &self.part.b;
        let cs = &self.part.c;
        let ell = bs.len();
        let fs: Vec<Poly<u64>> =
            bs.iter().map(|&ai| self.interpolant(bs.iter().copied().filter(|&x| x != ai), cs.iter().copied())).collect::<Result<_>>()?;
        let diag: Vec<u64> = fs.iter().zip(bs).map(|(f, &a)| f.eval(fd, a)).collect();
        let Some(i) = diag.iter().position(|&x| x != 1) else {
            let f = fs.iter().fold(Poly::constant(fd.neg(1)), |acc, g| acc.add(fd, g));
            let mu = self.common_value(&f, cs)?;
            let mut trace = Theorem4Trace::new(Branch::MultiSum, ell, self.d, self.set.len());
            trace.mu = Some(mu);
            return self.affine(&f, |v| self.shifted(v, mu), trace);
        };
        let alpha = diag[i];
        let f = &fs[i];
        if alpha == 0 {
            let mut trace = Theorem4Trace::new(Branch::MultiPivotZero, ell, self.d, self.set.len());
            trace.i0 = Some(bs[i]);
            trace.alpha = Some(0);
            return self.affine(f, |v| self.shifted(v, 1), trace);
        }
        let mut trace = Theorem4Trace::new(Branch::Alpha, ell, self.d, self.set.len());
        trace.i0 = Some(bs[i]);
        trace.alpha = Some(alpha);
        let zs = self.derivative_roots(f, &mut trace)?;
        let ai = fd.inv(alpha).expect("alpha nonzero");
        let one_minus = fd.sub(1, ai);
        let fz: Vec<u64> = zs.iter().map(|&z| fd.mul(ai, f.eval(fd, z))).collect();
        let mut admissible = 0;
        let mut excluded = 0;
        let mut found = None;
        for s in self.set.iter() {
            for s2 in self.set.iter() {
                if self.set.contains(fd.add(fd.mul(one_minus, s), fd.mul(ai, s2))) {
                    continue;
                }
                admissible += 1;
                // u f(z) + v at each root z of f'
                if fz.iter().any(|&t| fd.add(fd.mul(fd.sub(1, t), s), fd.mul(t, s2)) == 0) {
                    excluded += 1;
                    continue;
                }
                if found.is_none() {
                    let u = fd.mul(fd.sub(s2, s), ai);
                    let g = f.scale(fd, u).add(fd, &Poly::constant(s));
                    if verify_witness(fd, self.set, self.part, self.d, &g) {
                        found = Some((g, s, s2, u));
                    } else {
                        trace.rejected += 1;
                    }
                }
            }
        }
        trace.admissible_pairs = Some(admissible);
        trace.excluded_pairs = Some(excluded);
        let (g, s, s2, u) = found.ok_or_else(|| Error::ExhaustedSearch(format!("no (s, s') pair: {trace:?}")))?;
        trace.s_pair = Some((s, s2));
        trace.u = Some(u);
        trace.v = Some(s);
        Ok((g, trace))
    }
}

/// Builds a squarefree `g` of degree `≤ d` with `g(B) ⊂ S` and `g(C) ∩ S = ∅`.
pub fn theorem4_construct(field: &PrimeField, set: &ResidueSet, part: &PartitionInstance, d: usize) -> Result<(Poly<u64>, Theorem4Trace)> {
    check_input(field, set, part, d)?;
    let ctx = Ctx { field, set, part, d };
    let ell = part.b.len();
    if ell == 0 {
        ctx.constant(Branch::Constant, set.complement().iter().find(|&w| w != 0))
    } else if ell == d + 2 {
        ctx.constant(Branch::AllInside, set.iter().find(|&w| w != 0))
    } else if ell == 1 {
        ctx.single()
    } else {
        ctx.multi()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub points: Vec<u64>,
    pub b: Vec<u64>,
    pub branch: Option<Branch>,
    pub witness: Vec<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub p: u64,
    pub d: usize,
    pub set: Vec<u64>,
    pub partitions: u64,
    pub successes: u64,
    pub branch_counts: std::collections::BTreeMap<Branch, u64>,
    pub z_outside_field: u64,
    pub rejected_candidates: u64,
    pub max_forbidden: usize,
    pub forbidden_within_bound: bool,
    /// First few failures, if any.
    pub failures: Vec<SweepRow>,
    pub all_verified: bool,
}

/// Runs the construction on every `(d+2)`-subset and every split of it.
pub fn theorem4_sweep(field: &PrimeField, set: &ResidueSet, d: usize, exec: Exec) -> Result<SweepReport> {
    let p = field.p();
    if !hypotheses_hold(p, d, set.len()) {
        return Err(Error::Precondition(format!(
            "need d + 2 <= p and 4d - 2 < |S| < (p - d + 1)/2; got p = {p}, d = {d}, |S| = {}",
            set.len()
        )));
    }
    let k = d + 2;
    let total = binomial(p, k as u64);
    crate::error::budget("partition sweep", total << k, 1 << 26)?;
    const CHUNK: u64 = 256;
    let parts = map_chunks(exec, total as u64, CHUNK, |r| {
        let mut rep = SweepReport {
            p,
            d,
            set: vec![],
            partitions: 0,
            successes: 0,
            branch_counts: Default::default(),
            z_outside_field: 0,
            rejected_candidates: 0,
            max_forbidden: 0,
            forbidden_within_bound: true,
            failures: vec![],
            all_verified: true,
        };
        for_each_in_rank_range(p, k, r.start as u128..r.end as u128, |a| {
            for pat in 0..1u32 << k {
                let (b, c): (Vec<u64>, Vec<u64>) = a.iter().enumerate().fold((vec![], vec![]), |(mut b, mut c), (j, &x)| {
                    if pat >> j & 1 == 1 {
                        b.push(x)
                    } else {
                        c.push(x)
                    }
                    (b, c)
                });
                rep.partitions += 1;
                let part = PartitionInstance { b: b.clone(), c };
                match theorem4_construct(field, set, &part, d) {
                    Ok((g, t)) => {
                        // independent of the constructor's own check
                        let ok = verify_witness(field, set, &part, d, &g);
                        rep.successes += u64::from(ok);
                        *rep.branch_counts.entry(t.branch).or_default() += 1;
                        rep.z_outside_field += u64::from(t.z_outside_field);
                        rep.rejected_candidates += t.rejected as u64;
                        rep.max_forbidden = rep.max_forbidden.max(t.forbidden.len());
                        rep.forbidden_within_bound &= t.forbidden.len() <= t.forbidden_bound && (t.forbidden.len() as u64) < p;
                        if !ok && rep.failures.len() < 8 {
                            rep.failures.push(SweepRow {
                                points: a.to_vec(),
                                b,
                                branch: Some(t.branch),
                                witness: g.coeffs().to_vec(),
                                error: Some("verification failed".into()),
                            });
                        }
                    }
                    Err(e) => {
                        if rep.failures.len() < 8 {
                            rep.failures.push(SweepRow {
                                points: a.to_vec(),
                                b,
                                branch: None,
                                witness: vec![],
                                error: Some(e.to_string()),
                            });
                        }
                    }
                }
            }
        });
        rep
    });
    let mut out = SweepReport {
        p,
        d,
        set: set.to_vec(),
        partitions: 0,
        successes: 0,
        branch_counts: Default::default(),
        z_outside_field: 0,
        rejected_candidates: 0,
        max_forbidden: 0,
        forbidden_within_bound: true,
        failures: vec![],
        all_verified: false,
    };
    for r in parts {
        out.partitions += r.partitions;
        out.successes += r.successes;
        for (b, n) in r.branch_counts {
            *out.branch_counts.entry(b).or_default() += n;
        }
        out.z_outside_field += r.z_outside_field;
        out.rejected_candidates += r.rejected_candidates;
        out.max_forbidden = out.max_forbidden.max(r.max_forbidden);
        out.forbidden_within_bound &= r.forbidden_within_bound;
        out.failures.extend(r.failures.into_iter().take(8 - out.failures.len().min(8)));
    }
    out.all_verified = out.successes == out.partitions;
    Ok(out)
}
