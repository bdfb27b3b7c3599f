//! Well-distribution measure `W` and correlation measures `C_k`, computed
//! exactly over the common denominator of the balanced sequence.

use serde::Serialize;

use crate::combin::{binomial, for_each_in_rank_range};
use crate::error::{budget, Error, Result};
use crate::par::{map_chunks, Exec};
use crate::subsets::BalancedSeq;

/// Largest `N` accepted by [`measure_w`].
pub const MAX_W_N: u64 = 5000;
/// Work cap for [`measure_ck`]: `C(N-1, k-1) · N` at `N = 500`, `k = 3`.
pub const MAX_CK_WORK: u128 = 124_251 * 500;

/// An exact rational in lowest terms with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: i128,
    pub den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i128;
        let s = den.signum();
        Self { num: s * num / g, den: s * den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WResult {
    pub value: Rational,
    /// Lexicographically smallest maximizing `(a, b, t)`.
    pub a: u64,
    pub b: u64,
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CkResult {
    pub value: Rational,
    pub m: u64,
    /// `0 ≤ d_1 < … < d_k ≤ N - M`.
    pub d: Vec<u64>,
}

/// Max over prefix pairs `i < j` of `|q[j] - q[i]|`, with the smallest `i`
/// and then the smallest `j` attaining it.
fn best_window(q: &[i128]) -> (i128, usize, usize) {
    let (mut lo, mut hi) = (q[0], q[0]);
    for &v in q {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let best = hi - lo;
    // suffix extremes over q[i+1..]
    let n = q.len();
    let mut suf_max = vec![i128::MIN; n];
    let mut suf_min = vec![i128::MAX; n];
    for i in (0..n - 1).rev() {
        suf_max[i] = suf_max[i + 1].max(q[i + 1]);
        suf_min[i] = suf_min[i + 1].min(q[i + 1]);
    }
    for i in 0..n - 1 {
        if suf_max[i] - q[i] == best || q[i] - suf_min[i] == best {
            let j = (i + 1..n).find(|&j| (q[j] - q[i]).abs() == best).expect("attained");
            return (best, i, j);
        }
    }
    (0, 0, 1)
}

/// `W(R, N) = max |Σ_{j<t} e_{aj+b}|` over `a, t ≥ 1`, `1 ≤ b ≤ b + (t-1)a ≤ N`.
pub fn measure_w(seq: &BalancedSeq, exec: Exec) -> Result<WResult> {
    let n = seq.n() as u64;
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    budget("W sequence length", n as u128, MAX_W_N as u128)?;
    let e = &seq.num;
    let per_a = |a: u64| -> (i128, u64, u64) {
        let mut best: Option<(i128, u64, u64)> = None;
        for class in 0..a.min(n) {
            let mut q = vec![0i128];
            let mut idx = class;
            while idx < n {
                q.push(q.last().unwrap() + e[idx as usize] as i128);
                idx += a;
            }
            let (v, i, j) = best_window(&q);
            let b = class + 1 + i as u64 * a;
            let cand = (v, b, (j - i) as u64);
            best = Some(match best {
                Some(cur) if cur.0 > v || (cur.0 == v && cur.1 < b) => cur,
                _ => cand,
            });
        }
        best.expect("a ≥ 1 and n ≥ 1")
    };
    let per_chunk = map_chunks(exec, n, 16, |range| range.map(|i| (i + 1, per_a(i + 1))).collect::<Vec<_>>());
    let mut best = (i128::MIN, 0, 0, 0);
    for (a, (v, b, t)) in per_chunk.into_iter().flatten() {
        if v > best.0 {
            best = (v, a, b, t);
        }
    }
    Ok(WResult { value: Rational::new(best.0, seq.denom as i128), a: best.1, b: best.2, t: best.3 })
}

/// `C_k(R, N) = max |Σ_{n ≤ M} e_{n+d_1} ⋯ e_{n+d_k}|` over `M ≥ 1` and
/// `0 ≤ d_1 < ⋯ < d_k ≤ N - M`.
///
/// For each difference pattern `d_i - d_1` the inner sums over all `(M, d_1)`
/// are contiguous windows of one product sequence.
pub fn measure_ck(seq: &BalancedSeq, k: usize, exec: Exec) -> Result<CkResult> {
    let n = seq.n() as u64;
    if k == 0 || k as u64 > n {
        return Err(Error::Precondition(format!("need 1 ≤ k ≤ N, got k = {k}, N = {n}")));
    }
    let patterns = binomial(n - 1, k as u64 - 1);
    budget("C_k enumeration", patterns.saturating_mul(n as u128), MAX_CK_WORK)?;
    let e = &seq.num;
    let eval = |gaps: &[u64]| -> (i128, u64, u64) {
        // gaps are d_2-d_1 < … < d_k-d_1, all in 1..N
        let span = gaps.last().copied().unwrap_or(0);
        let mut q = Vec::with_capacity((n - span + 1) as usize);
        q.push(0i128);
        for m in 0..n - span {
            let mut prod = e[m as usize] as i128;
            for &g in gaps {
                prod *= e[(m + g) as usize] as i128;
            }
            q.push(q.last().unwrap() + prod);
        }
        let (v, i, j) = best_window(&q);
        (v, (j - i) as u64, i as u64)
    };
    let chunk = 256u128;
    let chunks = patterns.div_ceil(chunk) as u64;
    let per_chunk = map_chunks(exec, chunks, 1, |range| {
        let mut best: Option<(i128, u64, Vec<u64>)> = None;
        for c in range {
            let lo = c as u128 * chunk;
            let hi = (lo + chunk).min(patterns);
            for_each_in_rank_range(n - 1, k - 1, lo..hi, |comb| {
                let gaps: Vec<u64> = comb.iter().map(|x| x + 1).collect();
                let (v, m, d1) = eval(&gaps);
                if best.as_ref().map_or(true, |b| v > b.0) {
                    let mut d = vec![d1];
                    d.extend(gaps.iter().map(|g| g + d1));
                    best = Some((v, m, d));
                }
            });
        }
        best
    });
    let mut best: Option<(i128, u64, Vec<u64>)> = None;
    for cand in per_chunk.into_iter().flatten() {
        if best.as_ref().map_or(true, |b| cand.0 > b.0) {
            best = Some(cand);
        }
    }
    let (v, m, d) = best.expect("at least one pattern");
    let den = (seq.denom as i128).pow(k as u32);
    Ok(CkResult { value: Rational::new(v, den), m, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subsets::IndexedSet;
    use itertools::Itertools;

    fn seq(n: u64, members: &[u64]) -> BalancedSeq {
        BalancedSeq::new(&IndexedSet::new(n, members.iter().copied()).unwrap())
    }

    /// Literal maximum over every admissible `(a, b, t)`.
    fn w_oracle(s: &BalancedSeq) -> (i128, (u64, u64, u64)) {
        let n = s.n() as u64;
        let mut best = (i128::MIN, (0, 0, 0));
        for a in 1..=n {
            for b in 1..=n {
                for t in 1..=n {
                    if b + (t - 1) * a > n {
                        break;
                    }
                    let sum: i128 = (0..t).map(|j| s.num[(a * j + b - 1) as usize] as i128).sum();
                    if sum.abs() > best.0 {
                        best = (sum.abs(), (a, b, t));
                    }
                }
            }
        }
        best
    }

    /// Literal maximum over every admissible `(M, d_1, …, d_k)`.
    fn ck_oracle(s: &BalancedSeq, k: usize) -> i128 {
        let n = s.n() as u64;
        let mut best = 0;
        for m in 1..=n {
            for d in (0..=n - m).combinations(k) {
                let sum: i128 = (1..=m).map(|i| d.iter().map(|&dj| s.num[(i + dj - 1) as usize] as i128).product::<i128>()).sum();
                best = best.max(sum.abs());
            }
        }
        best
    }

    #[test]
    fn w_examples() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(measure_w(&seq(6, &[]), exec).unwrap().value, Rational::new(0, 1));
            assert_eq!(measure_w(&seq(6, &[1, 2, 3, 4, 5, 6]), exec).unwrap().value, Rational::new(0, 1));
            let w = measure_w(&seq(4, &[1]), exec).unwrap();
            assert_eq!(w.value, Rational::new(3, 4));
            assert_eq!((w.a, w.b, w.t), (1, 1, 1));
        }
    }

    #[test]
    fn ck_examples() {
        assert_eq!(measure_ck(&seq(5, &[]), 2, Exec::Sequential).unwrap().value.num, 0);
        let s = seq(4, &[1]);
        let c2 = measure_ck(&s, 2, Exec::Sequential).unwrap();
        assert_eq!(c2.value, Rational::new(ck_oracle(&s, 2), 16));
        assert!(measure_ck(&s, 5, Exec::Sequential).is_err());
    }

    #[test]
    fn w_matches_oracle_and_argmax_is_lexicographic() {
        for n in 1..=9u64 {
            for mask in 0u32..1 << n {
                let members: Vec<u64> = (1..=n).filter(|&m| mask >> (m - 1) & 1 == 1).collect();
                let s = seq(n, &members);
                let w = measure_w(&s, Exec::Sequential).unwrap();
                let (v, arg) = w_oracle(&s);
                assert_eq!(w.value, Rational::new(v, n as i128));
                assert_eq!((w.a, w.b, w.t), arg);
            }
        }
    }

    #[test]
    fn ck_matches_oracle() {
        for n in 1..=8u64 {
            for mask in 0u32..1 << n {
                let members: Vec<u64> = (1..=n).filter(|&m| mask >> (m - 1) & 1 == 1).collect();
                let s = seq(n, &members);
                for k in 1..=3.min(n as usize) {
                    let c = measure_ck(&s, k, Exec::Sequential).unwrap();
                    assert_eq!(c.value, Rational::new(ck_oracle(&s, k), (n as i128).pow(k as u32)));
                    // the reported argmax attains the value
                    let sum: i128 = (1..=c.m).map(|i| c.d.iter().map(|&dj| s.num[(i + dj - 1) as usize] as i128).product::<i128>()).sum();
                    assert_eq!(Rational::new(sum.abs(), (n as i128).pow(k as u32)), c.value);
                    assert!(*c.d.last().unwrap() <= n - c.m);
                }
            }
        }
    }

    #[test]
    fn measures_invariant_under_complement() {
        for n in 1..=12u64 {
            for mask in (0u32..1 << n).step_by(7) {
                let r = IndexedSet::new(n, (1..=n).filter(|&m| mask >> (m - 1) & 1 == 1)).unwrap();
                let (s, sc) = (BalancedSeq::new(&r), BalancedSeq::new(&r.complement()));
                assert_eq!(measure_w(&s, Exec::Sequential).unwrap().value, measure_w(&sc, Exec::Sequential).unwrap().value);
                for k in 1..=2.min(n as usize) {
                    assert_eq!(measure_ck(&s, k, Exec::Sequential).unwrap().value, measure_ck(&sc, k, Exec::Sequential).unwrap().value);
                }
            }
        }
    }

    #[test]
    fn w_dominates_contiguous_windows() {
        for n in [5u64, 9, 12] {
            for mask in (0u32..1 << n).step_by(5) {
                let members: Vec<u64> = (1..=n).filter(|&m| mask >> (m - 1) & 1 == 1).collect();
                let s = seq(n, &members);
                let c1 = measure_ck(&s, 1, Exec::Sequential).unwrap();
                let w = measure_w(&s, Exec::Sequential).unwrap();
                assert!(w.value >= c1.value);
                // k = 1 against a direct prefix-sum oracle
                let mut q = vec![0i128];
                for &x in &s.num {
                    q.push(q.last().unwrap() + x as i128);
                }
                let direct = q.iter().max().unwrap() - q.iter().min().unwrap();
                assert_eq!(c1.value, Rational::new(direct, n as i128));
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let members: Vec<u64> = (1..=300).filter(|m| m * m % 301 < 150).collect();
        let s = seq(300, &members);
        assert_eq!(measure_w(&s, Exec::Sequential).unwrap(), measure_w(&s, Exec::Parallel).unwrap());
        assert_eq!(measure_ck(&s, 2, Exec::Sequential).unwrap(), measure_ck(&s, 2, Exec::Parallel).unwrap());
    }

    #[test]
    fn caps_are_enforced() {
        let s = seq(5001, &[1]);
        assert!(matches!(measure_w(&s, Exec::Sequential), Err(Error::BudgetExceeded { .. })));
        let s = seq(600, &[1]);
        assert!(matches!(measure_ck(&s, 3, Exec::Sequential), Err(Error::BudgetExceeded { .. })));
    }
}
