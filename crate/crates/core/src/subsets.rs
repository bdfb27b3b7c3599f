//! The sets `S ⊆ F_p` and the index sets `R(f, S) ⊆ {1, …, p}`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FiniteField, PrimeField};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetSpec {
    /// `{r, r+1, …, r+s-1}` mod p.
    Interval {
        r: u64,
        s: u64,
    },
    /// Inverses of the nonzero members of `{r, …, r+s-1}`.
    InverseInterval {
        r: u64,
        s: u64,
    },
    /// Image of `x ↦ x^ℓ` on `F_p^*`.
    PowerResidues {
        ell: u64,
    },
    Explicit {
        elements: Vec<u64>,
    },
}

impl SubsetSpec {
    pub fn realize(&self, field: &PrimeField) -> Result<ResidueSet> {
        let p = field.p();
        let mut set = ResidueSet::empty(p);
        let check_len = |s: u64| {
            if s == 0 || s > p {
                Err(Error::InvalidSubset(format!("interval length {s} outside 1..={p}")))
            } else {
                Ok(())
            }
        };
        match self {
            SubsetSpec::Interval { r, s } => {
                check_len(*s)?;
                for i in 0..*s {
                    set.insert((r % p + i) % p);
                }
            }
            SubsetSpec::InverseInterval { r, s } => {
                check_len(*s)?;
                for i in 0..*s {
                    let x = (r % p + i) % p;
                    if x != 0 {
                        set.insert(field.inv(x)?);
                    }
                }
            }
            SubsetSpec::PowerResidues { ell } => {
                if *ell == 0 || (p - 1) % ell != 0 {
                    return Err(Error::InvalidSubset(format!("{ell} does not divide p-1 = {}", p - 1)));
                }
                for x in 1..p {
                    set.insert(field.pow(x, *ell));
                }
            }
            SubsetSpec::Explicit { elements } => {
                for &x in elements {
                    if x >= p {
                        return Err(Error::InvalidSubset(format!("element {x} not in [0, {p})")));
                    }
                    set.insert(x);
                }
            }
        }
        Ok(set)
    }
}

impl FromStr for SubsetSpec {
    type Err = Error;

    /// `interval:r:s`, `invinterval:r:s`, `powers:ell` or `explicit:a,b,c`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidSubset(format!("cannot parse subset `{text}`"));
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["interval", r, s] => Ok(SubsetSpec::Interval { r: num(r)?, s: num(s)? }),
            ["invinterval", r, s] => Ok(SubsetSpec::InverseInterval { r: num(r)?, s: num(s)? }),
            ["powers", ell] => Ok(SubsetSpec::PowerResidues { ell: num(ell)? }),
            ["explicit", list] => {
                let elements = if list.trim().is_empty() { Vec::new() } else { list.split(',').map(num).collect::<Result<_>>()? };
                Ok(SubsetSpec::Explicit { elements })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetSpec::Interval { r, s } => write!(f, "interval:{r}:{s}"),
            SubsetSpec::InverseInterval { r, s } => write!(f, "invinterval:{r}:{s}"),
            SubsetSpec::PowerResidues { ell } => write!(f, "powers:{ell}"),
            SubsetSpec::Explicit { elements } => {
                let list: Vec<String> = elements.iter().map(u64::to_string).collect();
                write!(f, "explicit:{}", list.join(","))
            }
        }
    }
}

/// Fixed-universe bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    fn new(universe: u64) -> Self {
        Self { words: vec![0; universe.div_ceil(64) as usize], len: 0 }
    }

    fn insert(&mut self, i: u64) {
        let (w, b) = ((i / 64) as usize, i % 64);
        if self.words[w] >> b & 1 == 0 {
            self.words[w] |= 1 << b;
            self.len += 1;
        }
    }

    fn contains(&self, i: u64) -> bool {
        self.words.get((i / 64) as usize).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as u64;
                word &= word - 1;
                Some(w as u64 * 64 + b)
            })
        })
    }
}

/// A subset of `F_p` as a bitset over `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    p: u64,
    bits: Bits,
}

impl ResidueSet {
    pub fn empty(p: u64) -> Self {
        Self { p, bits: Bits::new(p) }
    }

    pub fn from_elements(p: u64, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        SubsetSpec::Explicit { elements: elements.into_iter().collect() }.realize(&PrimeField::new(p)?)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn insert(&mut self, x: u64) {
        assert!(x < self.p, "residue {x} out of range");
        self.bits.insert(x);
    }

    pub fn contains(&self, x: u64) -> bool {
        self.bits.contains(x)
    }

    pub fn len(&self) -> usize {
        self.bits.len
    }

    pub fn is_empty(&self) -> bool {
        self.bits.len == 0
    }

    /// Number of nonzero members, `|S \ {0}|`.
    pub fn nonzero_len(&self) -> usize {
        self.len() - usize::from(self.contains(0))
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter()
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// `F_p \ S`.
    pub fn complement(&self) -> Self {
        let mut out = Self::empty(self.p);
        for x in (0..self.p).filter(|&x| !self.contains(x)) {
            out.insert(x);
        }
        out
    }
}

/// A subset of `{1, …, N}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexedSet {
    n: u64,
    bits: Bits,
}

impl IndexedSet {
    pub fn new(n: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut bits = Bits::new(n + 1);
        for m in members {
            if m == 0 || m > n {
                return Err(Error::Precondition(format!("index {m} not in 1..={n}")));
            }
            bits.insert(m);
        }
        Ok(Self { n, bits })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn contains(&self, m: u64) -> bool {
        self.bits.contains(m)
    }

    pub fn len(&self) -> usize {
        self.bits.len
    }

    pub fn is_empty(&self) -> bool {
        self.bits.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter()
    }

    pub fn complement(&self) -> Self {
        Self::new(self.n, (1..=self.n).filter(|&m| !self.contains(m))).expect("in range")
    }
}

/// `R(f, S) = {n ∈ {1, …, p} : f(n) mod p ∈ S}`; `n = p` is evaluated at 0.
pub fn construct_r(field: &PrimeField, f: &Poly<u64>, set: &ResidueSet) -> IndexedSet {
    let p = field.p();
    let members = (1..=p).filter(|&n| set.contains(f.eval(field, n % p)));
    IndexedSet::new(p, members).expect("indices lie in 1..=p")
}

/// The balanced sequence `e_n = [n ∈ R] - |R|/N`, stored as numerators over `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancedSeq {
    /// `num[n-1]` is `N · e_n`.
    pub num: Vec<i64>,
    pub denom: i64,
}

impl BalancedSeq {
    pub fn new(r: &IndexedSet) -> Self {
        let n = r.n() as i64;
        let size = r.len() as i64;
        let num = (1..=r.n()).map(|m| if r.contains(m) { n - size } else { -size }).collect();
        Self { num, denom: n }
    }

    pub fn n(&self) -> usize {
        self.num.len()
    }
}
