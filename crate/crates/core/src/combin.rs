//! Binomials and k-subsets in lexicographic order.

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th k-subset of `0..n` in lexicographic order.
pub fn unrank(n: u64, k: usize, mut rank: u128) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0u64;
    for slot in 0..k {
        let rest = (k - slot - 1) as u64;
        loop {
            let block = binomial(n - next - 1, rest);
            if rank < block {
                break;
            }
            rank -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advances `c` to the next k-subset of `0..n`; false after the last one.
pub fn next_combination(c: &mut [u64], n: u64) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - (k - i) as u64 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visits the k-subsets with lexicographic ranks in `ranks`, in order.
pub fn for_each_in_rank_range(n: u64, k: usize, ranks: std::ops::Range<u128>, mut f: impl FnMut(&[u64])) {
    if ranks.is_empty() {
        return;
    }
    let mut c = unrank(n, k, ranks.start);
    let mut r = ranks.start;
    loop {
        f(&c);
        r += 1;
        if r >= ranks.end || !next_combination(&mut c, n) {
            break;
        }
    }
}
