//! The bivariate polynomial `g_λ` whose zeros off the lines `x = b_i`,
//! `y = c_i` form the level set `λ`, and its Newton polygon.

use serde::Serialize;

use super::instance::BilinearInstance;
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::poly::{Poly, RootProduct};

/// Dense bivariate polynomial, `coeffs[i][j]` multiplying `X^i Y^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bivariate<E> {
    pub coeffs: Vec<Vec<E>>,
}

impl<E: Copy + Eq + Default> Bivariate<E> {
    pub fn zero(dx: usize, dy: usize) -> Self {
        Self { coeffs: vec![vec![E::default(); dy + 1]; dx + 1] }
    }

    /// `a(X) · b(Y)`.
    pub fn outer<F: FiniteField<Elem = E>>(field: &F, a: &Poly<E>, b: &Poly<E>, dx: usize, dy: usize) -> Self {
        let mut out = Self::zero(dx, dy);
        for (i, &ai) in a.coeffs().iter().enumerate() {
            for (j, &bj) in b.coeffs().iter().enumerate() {
                out.coeffs[i][j] = field.mul(ai, bj);
            }
        }
        out
    }

    pub fn add_scaled<F: FiniteField<Elem = E>>(&mut self, field: &F, other: &Self, s: E) {
        for (row, orow) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (c, &o) in row.iter_mut().zip(orow) {
                *c = field.add(*c, field.mul(s, o));
            }
        }
    }

    pub fn eval<F: FiniteField<Elem = E>>(&self, field: &F, x: E, y: E) -> E {
        self.coeffs.iter().rev().fold(field.zero(), |acc, row| {
            let ry = row.iter().rev().fold(field.zero(), |a, &c| field.add(field.mul(a, y), c));
            field.add(field.mul(acc, x), ry)
        })
    }

    pub fn d_dx<F: FiniteField<Elem = E>>(&self, field: &F) -> Self {
        let dy = self.coeffs[0].len() - 1;
        let mut out = Self::zero(self.coeffs.len().saturating_sub(2), dy);
        for i in 1..self.coeffs.len() {
            for j in 0..=dy {
                out.coeffs[i - 1][j] = field.mul(field.from_base(i as u64), self.coeffs[i][j]);
            }
        }
        out
    }

    pub fn d_dy<F: FiniteField<Elem = E>>(&self, field: &F) -> Self {
        let dy = self.coeffs[0].len() - 1;
        let mut out = Self::zero(self.coeffs.len() - 1, dy.saturating_sub(1));
        for (i, row) in self.coeffs.iter().enumerate() {
            for j in 1..row.len() {
                out.coeffs[i][j - 1] = field.mul(field.from_base(j as u64), row[j]);
            }
        }
        out
    }

    /// Exponents `(i, j)` with a nonzero coefficient.
    pub fn support(&self) -> Vec<(i64, i64)> {
        let mut s = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != E::default() {
                    s.push((i as i64, j as i64));
                }
            }
        }
        s
    }
}

/// `g_λ = G - λ H` with `G = Σ d_i Π_{j≠i} (X - b_j)(Y - c_j)` and
/// `H = Π (X - b_i)(Y - c_i)`, stored as the pair `(G, H)`.
#[derive(Debug, Clone)]
pub struct GLambda<E> {
    pub k: usize,
    pub g: Bivariate<E>,
    pub h: Bivariate<E>,
    pub b: Vec<E>,
    pub c: Vec<E>,
}

impl<E: Copy + Eq + Ord + Default> GLambda<E> {
    pub fn new<F: FiniteField<Elem = E>>(field: &F, inst: &BilinearInstance) -> Result<Self> {
        inst.validate()?;
        let e = inst.embed(field)?;
        let k = inst.k();
        let prod = |v: &[E]| Ok::<_, Error>(Poly::from_roots(field, &RootProduct::new(v.to_vec())?));
        let mut g = Bivariate::zero(k, k);
        for i in 0..k {
            let mut bs = e.b.clone();
            bs.remove(i);
            let mut cs = e.c.clone();
            cs.remove(i);
            g.add_scaled(field, &Bivariate::outer(field, &prod(&bs)?, &prod(&cs)?, k, k), e.d[i]);
        }
        let h = Bivariate::outer(field, &prod(&e.b)?, &prod(&e.c)?, k, k);
        Ok(Self { k, g, h, b: e.b, c: e.c })
    }

    /// Coefficient grid of `g_λ`.
    pub fn at<F: FiniteField<Elem = E>>(&self, field: &F, lambda: E) -> Bivariate<E> {
        let mut out = self.g.clone();
        out.add_scaled(field, &self.h, field.neg(lambda));
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonReport {
    /// Hull vertices of the support together with the origin, counterclockwise.
    pub polygon: Vec<(i64, i64)>,
    pub is_square: bool,
    pub commode: bool,
    pub nondegenerate: bool,
    pub nu: u64,
}

/// Convex hull by the monotone chain, collinear points dropped.
pub fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &pt in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
                hull.pop();
            }
            hull.push(pt);
        }
        hull.pop();
    }
    hull
}

/// Newton polygon, commode and non-degeneracy of `g_λ` for `λ ≠ 0` on a
/// normalized instance (no `b_i` or `c_i` equal to 0).
///
/// The faces away from the origin are the edges `i = k` and `j = k`, with
/// face polynomials `X^k · A(Y)` and `Y^k · B(X)`; when `p ∤ k` such a face
/// has a critical point on the torus exactly when `A` (or `B`) has a
/// repeated root.
pub fn newton_check<F: FiniteField>(field: &F, inst: &BilinearInstance, lambda: F::Elem) -> Result<NewtonReport> {
    if field.is_zero(lambda) {
        return Err(Error::Precondition("λ must be nonzero".into()));
    }
    if !inst.is_normalized() {
        return Err(Error::Precondition("shift the instance so that no b_i or c_i is 0".into()));
    }
    let k = inst.k();
    if k as u64 % field.characteristic() == 0 {
        return Err(Error::Precondition("p divides k; the face criterion does not apply".into()));
    }
    let gl = GLambda::new(field, inst)?.at(field, lambda);
    let mut support = gl.support();
    support.push((0, 0));
    let polygon = convex_hull(support);
    let kk = k as i64;
    let is_square = polygon == vec![(0, 0), (kk, 0), (kk, kk), (0, kk)];
    let zero = field.zero();
    let commode = gl.coeffs[k][0] != zero && gl.coeffs[0][k] != zero;
    let right = Poly::new(gl.coeffs[k].clone());
    let top = Poly::new(gl.coeffs.iter().map(|row| row[k]).collect());
    let face_ok = |f: &Poly<F::Elem>| -> Result<bool> { Ok(!f.is_zero() && f.is_squarefree(field)?) };
    let nondegenerate = face_ok(&right)? && face_ok(&top)?;
    Ok(NewtonReport { polygon, is_square, commode, nondegenerate, nu: 2 * (k * k - k) as u64 })
}
