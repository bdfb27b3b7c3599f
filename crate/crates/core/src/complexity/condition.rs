//! The sufficient condition for `K_3(S, d) ≥ k` with `S` an interval of
//! length `βp`, evaluated in log space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::is_prime;

/// Logarithms closer than this are reported as a near tie.
const NEAR_TIE: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub p: u64,
    pub beta: f64,
    pub d: usize,
    pub k: usize,
    /// `ln C(p-k, d) + ln min_ℓ β^ℓ (1-β-1/p)^{k-ℓ}`.
    pub log_main: f64,
    /// `ln((44^{4k} + 2k + 2d - 2) p^{d-1} (ln 9p)^k)`.
    pub log_error: f64,
    /// `ℓ` attaining the minimum (`0` or `k`).
    pub argmin_ell: usize,
    /// Sign of `main - error`: `-1`, `0` (only if `C(p-k, d) = 0` and the error is 0), or `1`.
    pub sign: i8,
    /// The two terms are within a factor 2; the sign rests on floating point.
    pub near_tie: bool,
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

pub fn theorem1_condition(p: u64, beta: f64, d: usize, k: usize) -> Result<ConditionReport> {
    if !(beta > 0.0 && beta < 1.0) || d == 0 || k == 0 {
        return Err(Error::Precondition("need 0 < β < 1, d ≥ 1, k ≥ 1".into()));
    }
    if p as f64 <= 2.0 / (1.0 - beta) {
        return Err(Error::Precondition(format!("need p > 2/(1 - β) = {}", 2.0 / (1.0 - beta))));
    }
    let pf = p as f64;
    let gap = 1.0 - beta - 1.0 / pf;
    let (argmin_ell, log_min) =
        (0..=k).map(|l| (l, l as f64 * beta.ln() + (k - l) as f64 * gap.ln())).min_by(|a, b| a.1.total_cmp(&b.1)).expect("k ≥ 1");
    let log_main = if (p as usize) < k { f64::NEG_INFINITY } else { ln_binomial(p - k as u64, d as u64) + log_min };
    // ln(44^{4k} + c) = 4k ln 44 + ln(1 + c / 44^{4k})
    let c = (2 * k + 2 * d - 2) as f64;
    let lead = 4.0 * k as f64 * 44f64.ln();
    let log_error = lead + (c * (-lead).exp()).ln_1p() + (d as f64 - 1.0) * pf.ln() + k as f64 * (9.0 * pf).ln().ln();
    let diff = log_main - log_error;
    Ok(ConditionReport {
        p,
        beta,
        d,
        k,
        log_main,
        log_error,
        argmin_ell,
        sign: if diff > 0.0 { 1 } else { -1 },
        near_tie: diff.abs() < NEAR_TIE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverReport {
    pub beta: f64,
    pub d: usize,
    pub k: usize,
    /// Smallest integer `p` past which the condition holds, by bisection on
    /// the real-variable form (assumes a single sign change past the start).
    pub crossover: Option<u128>,
    /// First prime at or after the crossover, when it fits in `u64`.
    pub first_prime: Option<u64>,
    pub samples: Vec<(f64, f64)>,
}

fn diff_at(p: f64, beta: f64, d: usize, k: usize) -> f64 {
    let gap = 1.0 - beta - 1.0 / p;
    let log_min = (k as f64 * beta.ln()).min(k as f64 * gap.ln());
    let n = p - k as f64;
    let mut lb = 0.0;
    for i in 0..d {
        lb += ((n - i as f64) / (i + 1) as f64).ln();
    }
    let c = (2 * k + 2 * d - 2) as f64;
    let lead = 4.0 * k as f64 * 44f64.ln();
    lb + log_min - (lead + (c * (-lead).exp()).ln_1p() + (d as f64 - 1.0) * p.ln() + k as f64 * (9.0 * p).ln().ln())
}

/// Locates where the condition turns positive as `p` grows. Reported, not asserted.
pub fn theorem1_crossover(beta: f64, d: usize, k: usize) -> Result<CrossoverReport> {
    if !(beta > 0.0 && beta < 1.0) || d == 0 || k == 0 {
        return Err(Error::Precondition("need 0 < β < 1, d ≥ 1, k ≥ 1".into()));
    }
    let start = (2.0 / (1.0 - beta)).floor() + 1.0 + (d + k) as f64;
    let mut samples = vec![];
    let mut lo = start;
    let mut hi = None;
    let mut x = start;
    while x < 1e36 {
        let v = diff_at(x, beta, d, k);
        samples.push((x, v));
        if v > 0.0 {
            hi = Some(x);
            break;
        }
        lo = x;
        x *= 2.0;
    }
    let Some(mut hi) = hi.map(|h| h as u128) else {
        return Ok(CrossoverReport { beta, d, k, crossover: None, first_prime: None, samples });
    };
    let mut lo = lo as u128;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if diff_at(mid as f64, beta, d, k) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let first_prime = u64::try_from(hi).ok().and_then(|h| (h..).take(100_000).find(|&n| is_prime(n)));
    Ok(CrossoverReport { beta, d, k, crossover: Some(hi), first_prime, samples })
}
