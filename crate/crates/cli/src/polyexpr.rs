//! Parser for polynomial arguments such as `X`, `3X^2 - X + 5` or `2*x^3+1`.

use anyhow::{bail, Context, Result};
use fpcx::poly::Poly;

/// Coefficients reduced mod `p`, constant term first.
pub fn parse_poly(s: &str, p: u64) -> Result<Poly<u64>> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        bail!("empty polynomial");
    }
    let mut coeffs: Vec<i128> = vec![];
    let mut rest = src.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = 1i128;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if !first {
            bail!("expected + or - in `{s}`");
        }
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        rest = tail;
        let (c, e) = parse_term(term).with_context(|| format!("bad term `{term}` in `{s}`"))?;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, 0);
        }
        coeffs[e] += sign * c;
    }
    let m = p as i128;
    Ok(Poly::new(coeffs.into_iter().map(|c| c.rem_euclid(m) as u64).collect()))
}

fn parse_term(t: &str) -> Result<(i128, usize)> {
    let Some(i) = t.find(['x', 'X']) else {
        return Ok((t.parse()?, 0));
    };
    let (c, var) = t.split_at(i);
    let c = c.strip_suffix('*').unwrap_or(c);
    let c = if c.is_empty() { 1 } else { c.parse()? };
    let e = match &var[1..] {
        "" => 1,
        pow => pow.strip_prefix('^').context("expected ^ after X")?.parse()?,
    };
    if e > 64 {
        bail!("exponent {e} too large");
    }
    Ok((c, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_poly("X", 13).unwrap().coeffs(), &[0, 1]);
        assert_eq!(parse_poly("3X^2 - X + 5", 13).unwrap().coeffs(), &[5, 12, 3]);
        assert_eq!(parse_poly("2*x^3+1", 7).unwrap().coeffs(), &[1, 0, 0, 2]);
        assert_eq!(parse_poly("-4", 7).unwrap().coeffs(), &[3]);
        assert!(parse_poly("7X", 7).unwrap().is_zero());
        assert!(parse_poly("X^", 7).is_err());
        assert!(parse_poly("2Y", 7).is_err());
    }
}
