//! Permutations of `{0, .., n-1}` stored as image tables.
//!
//! `a.compose(&b)` applies `b` first: the result maps `x` to `a(b(x))`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A bijection of `{0, .., n-1}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    /// Build from an image table, rejecting non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return Err(Error::NotBijective);
            }
            seen[y] = true;
        }
        Ok(Perm { images })
    }

    /// Build from disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let y = cycle[(k + 1) % cycle.len()];
                if x >= n || y >= n {
                    return Err(Error::Invalid(format!("cycle point out of range: {x}")));
                }
                images[x] = y;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i == y)
    }

    /// `self(other(x))` — `other` acts first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&y| self.images[y]).collect(),
        }
    }

    pub fn compose_checked(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::DomainMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(self.compose(other))
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Perm { images }
    }

    /// `self^k` for any integer `k` (negative powers via the inverse).
    pub fn pow(&self, k: i64) -> Perm {
        let n = self.degree();
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Perm::identity(n);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = sq.compose(&acc);
            }
            sq = sq.compose(&sq);
            e >>= 1;
        }
        acc
    }

    /// `x^{-1} * self * x` (so the result maps `x^{-1}(a) -> x^{-1}(self(a))`).
    pub fn conjugate_by(&self, x: &Perm) -> Perm {
        x.inverse().compose(&self.compose(x))
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// Multiplicative order (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        let mut ord: u64 = 1;
        for len in self.cycle_lengths() {
            ord = lcm(ord, len as u64);
        }
        ord
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycle_lengths().iter().map(|l| l - 1).sum::<usize>() % 2 == 0
    }

    pub fn smallest_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|&(i, &y)| i != y).map(|(i, _)| i)
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.images[x] == x
    }

    /// True when the point set `s` is mapped onto itself.
    pub fn fixes_setwise(&self, s: &[usize]) -> bool {
        let image: Vec<usize> = s.iter().map(|&x| self.images[x]).collect();
        s.iter().all(|x| image.contains(x))
    }

    /// Restriction to a set equals the restriction of `other`.
    pub fn agrees_on(&self, other: &Perm, s: &[usize]) -> bool {
        s.iter().all(|&x| self.images[x] == other.images[x])
    }
}

impl core::fmt::Debug for Perm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{self}")
    }
}

/// Text format shared by all tools: `perm N: i0 i1 ... i(N-1)`.
impl core::fmt::Display for Perm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "perm {}:", self.degree())?;
        for &y in &self.images {
            write!(f, " {y}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for Perm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rest = s
            .strip_prefix("perm ")
            .ok_or_else(|| Error::Parse(String::from("expected `perm N: ...`")))?;
        let (n_str, imgs) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(String::from("missing `:` in permutation record")))?;
        let n: usize = n_str
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree `{}`", n_str.trim())))?;
        let images: Vec<usize> = imgs
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad image `{t}`"))))
            .collect::<Result<_>>()?;
        if images.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} images, got {}",
                images.len()
            )));
        }
        Perm::from_images(images).map_err(|_| Error::Parse(String::from("images are not a bijection")))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Parse several `perm N: ...` records, one per line; blank lines and lines
/// starting with `#` are skipped.
pub fn parse_perm_lines(text: &str) -> Result<Vec<Perm>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse::<Perm>()?);
    }
    if let Some(first) = out.first() {
        let n = first.degree();
        if out.iter().any(|g| g.degree() != n) {
            return Err(Error::DomainMismatch {
                left: n,
                right: out.iter().map(Perm::degree).find(|&d| d != n).unwrap_or(n),
            });
        }
    }
    Ok(out)
}

#[allow(unused)]
fn display_string(p: &Perm) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_factor_first() {
        let a = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        let b = Perm::from_images(vec![2, 3, 0, 1]).unwrap();
        // result(x) = a(b(x)), evaluated pointwise by hand
        assert_eq!(a.compose(&b).images(), &[2, 3, 1, 0]);
    }

    #[test]
    fn identity_and_inverse_laws() {
        let g = Perm::from_cycles(5, &[&[0, 3, 1]]).unwrap();
        let id = Perm::identity(5);
        assert_eq!(g.compose(&id), g);
        assert_eq!(id.compose(&g), g);
        assert!(g.compose(&g.inverse()).is_identity());
        assert!(g.inverse().compose(&g).is_identity());
    }

    #[test]
    fn inverse_solves_images_pointwise() {
        let g = Perm::from_images(vec![1, 2, 0, 3]).unwrap();
        assert_eq!(g.inverse().images(), &[2, 0, 1, 3]);
    }

    #[test]
    fn involution_is_its_own_inverse() {
        let g = Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap();
        assert_eq!(g.inverse(), g);
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn rejects_non_bijections() {
        assert_eq!(Perm::from_images(vec![0, 0, 1]), Err(Error::NotBijective));
        assert_eq!(Perm::from_images(vec![0, 3]), Err(Error::NotBijective));
    }

    #[test]
    fn pow_matches_repeated_composition() {
        let g = Perm::from_cycles(6, &[&[0, 1, 2, 3, 4]]).unwrap();
        let mut acc = Perm::identity(6);
        for k in 0..=5 {
            assert_eq!(g.pow(k), acc, "power {k}");
            acc = g.compose(&acc);
        }
        assert_eq!(g.pow(-1), g.inverse());
        assert_eq!(g.pow(-3), g.inverse().pow(3));
    }

    #[test]
    fn text_round_trip_and_rejection() {
        let g = Perm::from_cycles(4, &[&[0, 2]]).unwrap();
        let s = display_string(&g);
        assert_eq!(s, "perm 4: 2 1 0 3");
        assert_eq!(s.parse::<Perm>().unwrap(), g);
        assert!("perm 3: 0 0 1".parse::<Perm>().is_err());
        assert!("perm 3: 0 1".parse::<Perm>().is_err());
    }

    #[test]
    fn parity() {
        assert!(Perm::identity(4).is_even());
        assert!(!Perm::from_cycles(4, &[&[0, 1]]).unwrap().is_even());
        assert!(Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap().is_even());
    }
}
