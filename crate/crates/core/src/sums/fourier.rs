//! Finite Fourier expansion of the interval indicator `h_β`.

use num_complex::Complex64;
use serde::Serialize;

use super::acc::{ComplexAcc, EpTable};
use crate::error::{Error, Result};

/// `α_h` for every `|h| < p/2`, stored by residue `h mod p`.
#[derive(Debug, Clone)]
pub struct FourierCoeffs {
    p: u64,
    beta: f64,
    /// `⌊βp⌋`.
    floor_bp: u64,
    alpha: Vec<Complex64>,
}

/// `⌊βp⌋`, absorbing binary rounding just below an integer.
pub fn floor_beta_p(beta: f64, p: u64) -> u64 {
    (beta * p as f64 + 1e-9).floor() as u64
}

impl FourierCoeffs {
    /// `α_0 = ⌊βp⌋/p`, `α_h = (1 - e_p(-h⌊βp⌋)) / (p (1 - e_p(-h)))`.
    pub fn new(beta: f64, p: u64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Precondition(format!("β = {beta} must lie in (0, 1)")));
        }
        if p < 3 || p % 2 == 0 {
            return Err(Error::Precondition("p must be an odd prime".into()));
        }
        let floor_bp = floor_beta_p(beta, p);
        let table = EpTable::new(p);
        let pf = p as f64;
        let alpha = (0..p)
            .map(|h| {
                if h == 0 {
                    Complex64::new(floor_bp as f64 / pf, 0.0)
                } else {
                    let num = Complex64::new(1.0, 0.0) - table.get((p - h * floor_bp % p) % p);
                    let den = (Complex64::new(1.0, 0.0) - table.get(p - h)) * pf;
                    num / den
                }
            })
            .collect();
        Ok(Self { p, beta, floor_bp, alpha })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn floor_beta_p(&self) -> u64 {
        self.floor_bp
    }

    /// `α_h` for `|h| < p/2`.
    pub fn alpha(&self, h: i64) -> Complex64 {
        self.alpha[h.rem_euclid(self.p as i64) as usize]
    }

    /// `Σ_{|h| < p/2} α_h e_p(hx)`.
    pub fn reconstruct(&self, x: i64, table: &EpTable) -> Complex64 {
        let p = self.p as i64;
        let half = (p - 1) / 2;
        let acc: ComplexAcc = (-half..=half).map(|h| self.alpha(h) * table.get((h * x).rem_euclid(p) as u64)).collect();
        acc.value()
    }

    /// The indicator the closed forms expand: `1` iff `x mod p < ⌊βp⌋`.
    pub fn indicator(&self, x: i64) -> u8 {
        u8::from((x.rem_euclid(self.p as i64) as u64) < self.floor_bp)
    }

    /// The indicator read as `0 ≤ r_p(x) < βp`.
    pub fn strict_real_indicator(&self, x: i64) -> u8 {
        u8::from(((x.rem_euclid(self.p as i64)) as f64) < self.beta * self.p as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierReport {
    pub p: u64,
    pub beta: f64,
    pub floor_beta_p: u64,
    pub alpha0_exact: bool,
    /// `max_{h ≠ 0} 2|h|·|α_h|`, at most 1 when the coefficient bound holds.
    pub max_scaled_alpha: f64,
    pub coefficient_bound_holds: bool,
    pub max_reconstruction_error: f64,
    pub reconstruction_holds: bool,
    /// Residues where `0 ≤ r_p(x) < βp` disagrees with the expansion.
    pub strict_real_mismatch: Vec<u64>,
}

/// Checks `α_0`, the bound `|α_h| ≤ 1/(2|h|)` and pointwise reconstruction.
pub fn fourier_check(beta: f64, p: u64, tol: f64) -> Result<FourierReport> {
    let fc = FourierCoeffs::new(beta, p)?;
    let table = EpTable::new(p);
    let half = (p as i64 - 1) / 2;
    // the correctly rounded ⌊βp⌋/p, and ⌊βp⌋ itself as the interval length
    let alpha0_exact = fc.alpha(0) == Complex64::new(fc.floor_bp as f64 / p as f64, 0.0)
        && (0..p as i64).filter(|&x| fc.indicator(x) == 1).count() as u64 == fc.floor_bp
        && (fc.floor_bp as f64) <= beta * p as f64 + 1e-9
        && beta * (p as f64) < (fc.floor_bp + 1) as f64;
    let max_scaled_alpha = (1..=half).flat_map(|h| [h, -h]).map(|h| 2.0 * h.unsigned_abs() as f64 * fc.alpha(h).norm()).fold(0.0, f64::max);
    let mut max_err = 0.0f64;
    let mut mismatch = Vec::new();
    for x in 0..p as i64 {
        let v = fc.reconstruct(x, &table);
        max_err = max_err.max((v - Complex64::new(fc.indicator(x) as f64, 0.0)).norm());
        if fc.indicator(x) != fc.strict_real_indicator(x) {
            mismatch.push(x as u64);
        }
    }
    Ok(FourierReport {
        p,
        beta,
        floor_beta_p: fc.floor_bp,
        alpha0_exact,
        max_scaled_alpha,
        coefficient_bound_holds: max_scaled_alpha <= 1.0 + 1e-12,
        max_reconstruction_error: max_err,
        reconstruction_holds: max_err <= tol,
        strict_real_mismatch: mismatch,
    })
}
