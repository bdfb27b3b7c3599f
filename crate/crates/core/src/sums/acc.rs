//! Compensated complex accumulation and the additive character `e_p`.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Neumaier-compensated sum of complex terms.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexAcc {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
    terms: u64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl ComplexAcc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
        self.terms += 1;
    }

    /// Folds in a partial accumulator; callers merge in a fixed order.
    pub fn merge(&mut self, other: &ComplexAcc) {
        neumaier(&mut self.re, &mut self.re_c, other.re);
        neumaier(&mut self.re, &mut self.re_c, other.re_c);
        neumaier(&mut self.im, &mut self.im_c, other.im);
        neumaier(&mut self.im, &mut self.im_c, other.im_c);
        self.terms += other.terms;
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Slack for comparing this sum against an exact value.
    pub fn tolerance(&self) -> f64 {
        1e-9 * (self.terms.max(1) as f64)
    }
}

impl FromIterator<Complex64> for ComplexAcc {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexAcc::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// `e_p(x) = exp(2πi x / p)` for an integer `x`.
pub fn ep(x: i128, p: u64) -> Complex64 {
    let r = x.rem_euclid(p as i128) as f64;
    Complex64::from_polar(1.0, TAU * r / p as f64)
}

/// `e_p(r)` for every residue `r`, so inner loops avoid trigonometry.
#[derive(Debug, Clone)]
pub struct EpTable {
    p: u64,
    table: Vec<Complex64>,
}

impl EpTable {
    pub fn new(p: u64) -> Self {
        Self { p, table: (0..p).map(|r| ep(r as i128, p)).collect() }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn get(&self, residue: u64) -> Complex64 {
        self.table[residue as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ep_basics() {
        assert!((ep(0, 7) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((ep(7, 7) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((ep(-1, 7) - ep(6, 7)).norm() < 1e-15);
        for p in [3u64, 7, 101, 499] {
            let s: ComplexAcc = (0..p).map(|x| ep(x as i128, p)).collect();
            assert!(s.value().norm() <= 1e-9 * p as f64);
            assert_eq!(s.terms(), p);
        }
    }

    #[test]
    fn compensation_beats_naive_summation() {
        let mut acc = ComplexAcc::new();
        let mut naive = 0.0f64;
        acc.add(Complex64::new(1e16, 0.0));
        naive += 1e16;
        for _ in 0..1000 {
            acc.add(Complex64::new(1.0, 0.0));
            naive += 1.0;
        }
        acc.add(Complex64::new(-1e16, 0.0));
        naive -= 1e16;
        assert_eq!(acc.value().re, 1000.0);
        assert_ne!(naive, 1000.0);
    }

    #[test]
    fn merge_equals_single_pass() {
        let terms: Vec<Complex64> = (0..1000).map(|x| ep(x * x, 997)).collect();
        let whole: ComplexAcc = terms.iter().copied().collect();
        let mut merged = ComplexAcc::new();
        for chunk in terms.chunks(64) {
            merged.merge(&chunk.iter().copied().collect());
        }
        assert!((whole.value() - merged.value()).norm() < 1e-12);
        assert_eq!(merged.terms(), 1000);
    }
}
