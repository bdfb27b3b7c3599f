//! Point-count deviations: the exceptional `λ` where the plane curve
//! `g_λ = 0` can be singular, and the effect of the excluded lines.

use std::collections::BTreeMap;

use serde::Serialize;

use super::gpoly::{Bivariate, GLambda};
use super::histogram::{histogram_nn, LambdaHistogram, MAX_PAIRS};
use super::instance::BilinearInstance;
use crate::error::{budget, Error, Result};
use crate::field::{ExtField, FiniteField, FpnElem, MAX_EXT_ORDER};
use crate::par::{map_chunks, Exec};
use crate::poly::{Poly, RootProduct};

/// `K = 9(k-1)² + 4(k-1) + 2`.
pub fn exception_cap(k: usize) -> u64 {
    let k1 = k as u64 - 1;
    9 * k1 * k1 + 4 * k1 + 2
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop2Exception {
    /// Index of `λ` in the field enumeration (the residue itself when n = 1).
    pub lambda: u64,
    pub count: u64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop2Report {
    pub q: u64,
    pub k: usize,
    /// `ν = 2k²`.
    pub nu: u64,
    /// `ν √q`.
    pub threshold: f64,
    pub cap: u64,
    pub exceptions: Vec<Prop2Exception>,
    pub max_deviation: f64,
    pub mass_exact: bool,
    /// `max_λ N(λ) ≤ k q`.
    pub trivial_bound_holds: bool,
    pub pass: bool,
}

/// Counts the `λ` with `|N_n(λ) - q| > 2k² √q`.
pub fn prop2_verify(hist: &LambdaHistogram) -> Prop2Report {
    let k = hist.k;
    let q = hist.q;
    let nu = 2 * (k * k) as u64;
    let threshold = nu as f64 * (q as f64).sqrt();
    let mut exceptions = Vec::new();
    let mut max_deviation = 0.0f64;
    for (i, &c) in hist.counts.iter().enumerate() {
        let dev = (c as f64 - q as f64).abs();
        max_deviation = max_deviation.max(dev);
        if dev > threshold {
            exceptions.push(Prop2Exception { lambda: i as u64, count: c, deviation: dev });
        }
    }
    let cap = exception_cap(k);
    let mass_exact = hist.mass() == hist.expected_mass();
    let trivial_bound_holds = hist.max_count() <= k as u64 * q;
    Prop2Report {
        q,
        k,
        nu,
        threshold,
        cap,
        pass: exceptions.len() as u64 <= cap && mass_exact && trivial_bound_holds,
        exceptions,
        max_deviation,
        mass_exact,
        trivial_bound_holds,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// `g_λ(0, 0) = 0`.
    Origin,
    /// `x = 0`, `y ≠ 0`: `g_λ = ∂g_λ/∂y = 0`.
    XAxis,
    /// `y = 0`, `x ≠ 0`: `g_λ = ∂g_λ/∂x = 0`.
    YAxis,
    /// Torus point with `P_1 = P_2 = 0`.
    Torus,
    /// Singular point with a coordinate in `F_{p²} \\ F_p` whose `λ` is rational.
    Conjugate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalReport {
    pub q: u64,
    pub k: usize,
    /// Exceptional `λ` (field indices) with the systems producing each.
    pub lambdas: BTreeMap<u64, Vec<Source>>,
    pub origin_lambdas: usize,
    pub x_axis_lambdas: usize,
    pub y_axis_lambdas: usize,
    pub torus_lambdas: usize,
    /// `λ` reached only through points defined over `F_{p²}`.
    pub conjugate_lambdas: usize,
    /// Whether the `F_{p²}` scan ran (prime fields with `p² ≤ 2^20`).
    pub conjugate_scan: bool,
    /// Common zeros of `P_1`, `P_2` in the whole plane.
    pub common_zeros: u64,
    /// `9(k-1)²`.
    pub bezout_bound: u64,
    pub common_zeros_within_bezout: bool,
    /// Off the excluded lines, `P_1 = P_2 = 0` exactly when both partials of
    /// `g_λ` vanish at the `λ` through the point.
    pub partials_agree: bool,
    /// No singular point of any `g_λ` lies on a line `x = b_i` or `y = c_j`.
    pub line_singularity_free: bool,
    /// `|exceptional| ≤ 9(k-1)² + 4(k-1) + 1`.
    pub count_within_bound: bool,
    /// Adding `λ = 0` stays within `K`.
    pub with_zero_within_cap: bool,
    pub pass: bool,
}

struct Pieces<E> {
    g: Bivariate<E>,
    h: Bivariate<E>,
    gx: Bivariate<E>,
    gy: Bivariate<E>,
    hx: Bivariate<E>,
    hy: Bivariate<E>,
}

impl<E: Copy + Eq + Ord + Default> Pieces<E> {
    fn new<F: FiniteField<Elem = E>>(field: &F, gl: &GLambda<E>) -> Self {
        Self { gx: gl.g.d_dx(field), gy: gl.g.d_dy(field), hx: gl.h.d_dx(field), hy: gl.h.d_dy(field), g: gl.g.clone(), h: gl.h.clone() }
    }

    /// `λ = G/H` at a point off the lines, with the partials of `g_λ` there.
    fn at<F: FiniteField<Elem = E>>(&self, field: &F, x: E, y: E) -> Option<(E, E, E)> {
        let hv = self.h.eval(field, x, y);
        if field.is_zero(hv) {
            return None;
        }
        let lambda = field.mul(self.g.eval(field, x, y), field.inv(hv).ok()?);
        let px = field.sub(self.gx.eval(field, x, y), field.mul(lambda, self.hx.eval(field, x, y)));
        let py = field.sub(self.gy.eval(field, x, y), field.mul(lambda, self.hy.eval(field, x, y)));
        Some((lambda, px, py))
    }
}

/// `Σ d_i Π_{j≠i} (X - b_j)^{ex} (Y - c_j)^{ey}`.
fn weighted_products<F: FiniteField>(field: &F, gl: &GLambda<F::Elem>, d: &[F::Elem], ex: u32, ey: u32) -> Result<Bivariate<F::Elem>> {
    let k = gl.k;
    let dx = ex as usize * (k - 1);
    let dy = ey as usize * (k - 1);
    let mut out = Bivariate::zero(dx, dy);
    for i in 0..k {
        let mut bs = gl.b.clone();
        bs.remove(i);
        let mut cs = gl.c.clone();
        cs.remove(i);
        let a = Poly::from_roots(field, &RootProduct::new(bs)?).pow(field, ex);
        let b = Poly::from_roots(field, &RootProduct::new(cs)?).pow(field, ey);
        out.add_scaled(field, &Bivariate::outer(field, &a, &b, dx, dy), d[i]);
    }
    Ok(out)
}

/// Brute-force analysis of the singular systems on a normalized instance.
pub fn exceptional_lambdas<F: FiniteField>(field: &F, inst: &BilinearInstance, exec: Exec) -> Result<ExceptionalReport> {
    if !inst.is_normalized() {
        return Err(Error::Precondition("shift the instance so that no b_i or c_i is 0".into()));
    }
    let q = field.order();
    budget("plane pairs", q as u128 * q as u128, MAX_PAIRS)?;
    let k = inst.k();
    let e = inst.embed(field)?;
    let gl = GLambda::new(field, inst)?;
    let pieces = Pieces::new(field, &gl);
    let p1 = weighted_products(field, &gl, &e.d, 2, 1)?;
    let p2 = weighted_products(field, &gl, &e.d, 1, 2)?;
    let zero = field.zero();

    #[derive(Default)]
    struct Tally {
        common: u64,
        agree: bool,
        found: Vec<(u64, Source)>,
    }
    let parts = map_chunks(exec, q, q.div_ceil(64), |range| {
        let mut t = Tally { agree: true, ..Tally::default() };
        for xi in range {
            let x = field.element(xi);
            for y in field.elements() {
                let both = field.is_zero(p1.eval(field, x, y)) && field.is_zero(p2.eval(field, x, y));
                t.common += u64::from(both);
                let Some((lambda, px, py)) = pieces.at(field, x, y) else { continue };
                let li = field.index(lambda);
                t.agree &= both == (field.is_zero(px) && field.is_zero(py));
                match (x == zero, y == zero) {
                    (true, true) => t.found.push((li, Source::Origin)),
                    (true, false) if field.is_zero(py) => t.found.push((li, Source::XAxis)),
                    (false, true) if field.is_zero(px) => t.found.push((li, Source::YAxis)),
                    (false, false) if both => t.found.push((li, Source::Torus)),
                    _ => {}
                }
            }
        }
        t
    });
    let mut lambdas: BTreeMap<u64, Vec<Source>> = BTreeMap::new();
    let mut common = 0;
    let mut agree = true;
    let mut per_source: BTreeMap<Source, std::collections::BTreeSet<u64>> = BTreeMap::new();
    for t in parts {
        common += t.common;
        agree &= t.agree;
        for (l, s) in t.found {
            per_source.entry(s).or_default().insert(l);
            let v = lambdas.entry(l).or_default();
            if !v.contains(&s) {
                v.push(s);
                v.sort();
            }
        }
    }
    let conjugate_scan = field.degree() == 1 && q * q <= MAX_EXT_ORDER;
    if conjugate_scan {
        for l in conjugate_lambdas(inst, exec)? {
            let li = field.index(field.from_base(l));
            let v = lambdas.entry(li).or_default();
            if v.is_empty() {
                per_source.entry(Source::Conjugate).or_default().insert(li);
                v.push(Source::Conjugate);
            }
        }
    }
    // partial derivatives at (b_i, c_j), i ≠ j; the λ-term vanishes there
    let mut line_ok = true;
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let (x, y) = (e.b[i], e.c[j]);
            line_ok &= !field.is_zero(pieces.gx.eval(field, x, y)) && field.is_zero(pieces.hx.eval(field, x, y));
            let (x, y) = (e.b[j], e.c[i]);
            line_ok &= !field.is_zero(pieces.gy.eval(field, x, y)) && field.is_zero(pieces.hy.eval(field, x, y));
        }
    }
    let count = |s: Source| per_source.get(&s).map_or(0, |v| v.len());
    let k1 = (k - 1) as u64;
    let bezout_bound = 9 * k1 * k1;
    let total = lambdas.len() as u64;
    let with_zero = total + u64::from(!lambdas.contains_key(&field.index(zero)));
    let count_within_bound = total <= bezout_bound + 4 * k1 + 1
        && count(Source::Origin) == 1
        && count(Source::XAxis) as u64 <= 2 * k1
        && count(Source::YAxis) as u64 <= 2 * k1;
    let report = ExceptionalReport {
        q,
        k,
        origin_lambdas: count(Source::Origin),
        x_axis_lambdas: count(Source::XAxis),
        y_axis_lambdas: count(Source::YAxis),
        torus_lambdas: count(Source::Torus),
        conjugate_lambdas: count(Source::Conjugate),
        conjugate_scan,
        lambdas,
        common_zeros: common,
        bezout_bound,
        common_zeros_within_bezout: common <= bezout_bound,
        partials_agree: agree,
        line_singularity_free: line_ok,
        count_within_bound,
        with_zero_within_cap: with_zero <= exception_cap(k),
        pass: false,
    };
    let pass = report.common_zeros_within_bezout
        && report.partials_agree
        && report.line_singularity_free
        && report.count_within_bound
        && report.with_zero_within_cap;
    Ok(ExceptionalReport { pass, ..report })
}

/// `Y ↦ B(x, Y)`.
fn at_x<F: FiniteField>(field: &F, b: &Bivariate<F::Elem>, x: F::Elem) -> Poly<F::Elem> {
    let dy = b.coeffs[0].len();
    let coeffs = (0..dy).map(|j| b.coeffs.iter().rev().fold(field.zero(), |acc, row| field.add(field.mul(acc, x), row[j]))).collect();
    Poly::new(coeffs)
}

/// `X ↦ B(X, y)`.
fn at_y<F: FiniteField>(field: &F, b: &Bivariate<F::Elem>, y: F::Elem) -> Poly<F::Elem> {
    Poly::new(b.coeffs.iter().map(|row| row.iter().rev().fold(field.zero(), |a, &c| field.add(field.mul(a, y), c))).collect())
}

/// `G_v H - G H_v` for a partial `v`.
fn wronskian<F: FiniteField>(
    field: &F,
    g: &Bivariate<F::Elem>,
    gv: &Bivariate<F::Elem>,
    h: &Bivariate<F::Elem>,
    hv: &Bivariate<F::Elem>,
    at: impl Fn(&Bivariate<F::Elem>) -> Poly<F::Elem>,
) -> Poly<F::Elem> {
    at(gv).mul(field, &at(h)).sub(field, &at(g).mul(field, &at(hv)))
}

/// Rational `λ` (residues) produced by singular points of `g_λ` with a
/// coordinate in `F_{p²} \ F_p`. Such points come in conjugate pairs over
/// a single rational `λ`, which a scan of `F_p²` alone cannot see.
pub fn conjugate_lambdas(inst: &BilinearInstance, exec: Exec) -> Result<Vec<u64>> {
    let big = ExtField::new(inst.p, 2)?;
    let q = big.order();
    let e = inst.embed(&big)?;
    let gl = GLambda::new(&big, inst)?;
    let pieces = Pieces::new(&big, &gl);
    let p1 = weighted_products(&big, &gl, &e.d, 2, 1)?;
    let p2 = weighted_products(&big, &gl, &e.d, 1, 2)?;
    let zero = big.zero();
    let rational = |v: FpnElem| big.coeffs(v).iter().skip(1).all(|&c| c == 0);
    // which partials must vanish: torus points need both, axis points one
    let keep = |x: FpnElem, y: FpnElem, need_x: bool, need_y: bool| -> Option<u64> {
        if rational(x) && rational(y) {
            return None;
        }
        let (lambda, px, py) = pieces.at(&big, x, y)?;
        let singular = (!need_x || big.is_zero(px)) && (!need_y || big.is_zero(py));
        (rational(lambda) && singular).then(|| big.coeffs(lambda)[0])
    };
    let found = map_chunks(exec, q, q.div_ceil(64), |range| -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for xi in range {
            let x = big.element(xi);
            if x == zero || e.b.contains(&x) {
                continue;
            }
            let a = at_x(&big, &p1, x);
            let b = at_x(&big, &p2, x);
            if a.is_zero() && b.is_zero() {
                return Err(Error::Precondition("P_1 and P_2 share a vertical line".into()));
            }
            let common = Poly::gcd(&big, &a, &b)?;
            if common.degree().unwrap_or(0) == 0 {
                continue;
            }
            for y in common.distinct_roots_in_field(&big)? {
                if y != zero && !e.c.contains(&y) {
                    out.extend(keep(x, y, true, true));
                }
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    // the axis systems: x = 0 needs ∂g_λ/∂y = 0, y = 0 needs ∂g_λ/∂x = 0
    let wy = wronskian(&big, &pieces.g, &pieces.gy, &pieces.h, &pieces.hy, |b| at_x(&big, b, zero));
    let wx = wronskian(&big, &pieces.g, &pieces.gx, &pieces.h, &pieces.hx, |b| at_y(&big, b, zero));
    if wy.degree().unwrap_or(0) > 0 {
        for y in wy.distinct_roots_in_field(&big)? {
            if y != zero && !e.c.contains(&y) {
                all.extend(keep(zero, y, false, true));
            }
        }
    }
    if wx.degree().unwrap_or(0) > 0 {
        for x in wx.distinct_roots_in_field(&big)? {
            if x != zero && !e.b.contains(&x) {
                all.extend(keep(x, zero, true, false));
            }
        }
    }
    for part in found {
        all.extend(part?);
    }
    all.sort_unstable();
    all.dedup();
    Ok(all)
}

#[derive(Debug, Clone, Serialize)]
pub struct ContainmentReport {
    /// `2k² √q + 2k`.
    pub threshold: f64,
    /// Large deviations at `λ` outside the exceptional set and `λ ≠ 0`.
    pub uncovered: Vec<u64>,
    pub holds: bool,
}

/// Every `λ` whose deviation exceeds `2k²√q + 2k` must be `0` or exceptional.
pub fn containment_check<F: FiniteField>(field: &F, prop2: &Prop2Report, exc: &ExceptionalReport) -> ContainmentReport {
    let k = prop2.k as f64;
    let threshold = 2.0 * k * k * (prop2.q as f64).sqrt() + 2.0 * k;
    let zero = field.index(field.zero());
    let uncovered: Vec<u64> = prop2
        .exceptions
        .iter()
        .filter(|e| e.deviation > threshold && e.lambda != zero && !exc.lambdas.contains_key(&e.lambda))
        .map(|e| e.lambda)
        .collect();
    ContainmentReport { threshold, holds: uncovered.is_empty(), uncovered }
}

#[derive(Debug, Clone, Serialize)]
pub struct LineEffectReport {
    pub q: u64,
    pub k: usize,
    /// Zeros of `g_λ` lying on the excluded lines; the same for every `λ`.
    pub line_zeros: Vec<u64>,
    pub max_difference: u64,
    /// `k(k - 1)`: the points `(b_i, c_j)` with `i ≠ j`.
    pub predicted_difference: u64,
    pub bound: u64,
    pub bound_holds: bool,
    /// `λ` (field indices) with `N' - N > 2k`.
    pub violations: usize,
}

/// `N'_n(λ)` (all zeros of `g_λ`) by evaluating `G` and `H` on the whole
/// plane: a point with `H ≠ 0` lies on exactly one curve, `λ = G/H`; a point
/// with `G = H = 0` lies on every curve.
pub fn line_effect_check<F: FiniteField>(field: &F, inst: &BilinearInstance, exec: Exec) -> Result<(LineEffectReport, Vec<u64>)> {
    let q = field.order();
    budget("plane pairs", q as u128 * q as u128, MAX_PAIRS)?;
    let gl = GLambda::new(field, inst)?;
    let parts = map_chunks(exec, q, q.div_ceil(64), |range| {
        let mut tally = vec![0u64; q as usize];
        let mut everywhere = 0u64;
        for xi in range {
            let x = field.element(xi);
            for y in field.elements() {
                let hv = gl.h.eval(field, x, y);
                let gv = gl.g.eval(field, x, y);
                if !field.is_zero(hv) {
                    let l = field.mul(gv, field.inv(hv).expect("nonzero"));
                    tally[field.index(l) as usize] += 1;
                } else if field.is_zero(gv) {
                    everywhere += 1;
                }
            }
        }
        (tally, everywhere)
    });
    let mut n_prime = vec![0u64; q as usize];
    let mut everywhere = 0;
    for (t, e) in parts {
        everywhere += e;
        for (a, b) in n_prime.iter_mut().zip(t) {
            *a += b;
        }
    }
    for v in n_prime.iter_mut() {
        *v += everywhere;
    }
    let hist = histogram_nn(field, inst, exec)?;
    let diffs: Vec<u64> = n_prime.iter().zip(&hist.counts).map(|(a, b)| a - b).collect();
    let k = inst.k() as u64;
    let bound = 2 * k;
    let max_difference = diffs.iter().copied().max().unwrap_or(0);
    let report = LineEffectReport {
        q,
        k: inst.k(),
        line_zeros: diffs.clone(),
        max_difference,
        predicted_difference: k * (k - 1),
        bound,
        bound_holds: max_difference <= bound,
        violations: diffs.iter().filter(|&&d| d > bound).count(),
    };
    Ok((report, n_prime))
}
