//! Orbital partitions and 2-closures.
//!
//! The orbitals of `G` are its orbits on ordered pairs of points. The
//! 2-closure `G^(2)` is the largest group preserving every orbital; a
//! permutation lies in `G^(2)` exactly when it maps every orbital into
//! itself, which makes membership an `O(N^2)` table check. The full closure
//! group is computed by colored-digraph automorphism backtracking and is
//! kept separate from membership testing: the conjugation pipeline only ever
//! needs membership.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::autosearch::PairColoring;
use crate::group::PermutationGroup;
use crate::perm::Perm;
use crate::{Error, Result, DEFAULT_POINT_CAP};

/// Coloring of ordered point pairs by G-orbitals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalPartition {
    degree: usize,
    /// row-major `degree * degree` table of orbital indices
    color_of: Vec<u32>,
    count: usize,
}

impl OrbitalPartition {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn orbital_count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn color(&self, a: usize, b: usize) -> u32 {
        self.color_of[a * self.degree + b]
    }

    /// True iff `x` maps every orbital into itself, i.e. `x` lies in the
    /// 2-closure of the group these orbitals came from.
    pub fn preserved_by(&self, x: &Perm) -> bool {
        if x.degree() != self.degree {
            return false;
        }
        for a in 0..self.degree {
            let xa = x.apply(a);
            for b in 0..self.degree {
                if self.color(xa, x.apply(b)) != self.color(a, b) {
                    return false;
                }
            }
        }
        true
    }

    pub fn as_pair_coloring(&self) -> PairColoring {
        PairColoring::from_table(self.degree, self.color_of.clone())
    }

    /// Debug dump, one line per orbital: `orbital <k>: (a,b) ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for k in 0..self.count {
            out.push_str(&format!("orbital {k}:"));
            for a in 0..self.degree {
                for b in 0..self.degree {
                    if self.color(a, b) == k as u32 {
                        out.push_str(&format!(" ({a},{b})"));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Orbits of `G` on ordered pairs, colors indexed by first-seen order under
/// ascending row-major pair enumeration.
pub fn orbitals(g: &PermutationGroup) -> OrbitalPartition {
    let n = g.degree();
    let total = n * n;
    let mut parent: Vec<usize> = (0..total).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for a in 0..n {
        for b in 0..n {
            for gen in g.generators() {
                let from = a * n + b;
                let to = gen.apply(a) * n + gen.apply(b);
                let rf = find(&mut parent, from);
                let rt = find(&mut parent, to);
                if rf != rt {
                    parent[rf] = rt;
                }
            }
        }
    }

    let mut color_of = vec![u32::MAX; total];
    let mut next = 0u32;
    for pair in 0..total {
        let r = find(&mut parent, pair);
        if color_of[r] == u32::MAX {
            color_of[r] = next;
            next += 1;
        }
        color_of[pair] = color_of[r];
    }
    OrbitalPartition { degree: n, color_of, count: next as usize }
}

/// Membership test in `G^(2)`.
pub fn in_two_closure(g: &PermutationGroup, x: &Perm) -> Result<bool> {
    if x.degree() != g.degree() {
        return Err(Error::DomainMismatch { left: g.degree(), right: x.degree() });
    }
    Ok(orbitals(g).preserved_by(x))
}

/// The full group of orbital-preserving permutations, computed by colored
/// automorphism backtracking. Reserved for oracles and the CLI; the
/// conjugation pipeline uses membership only.
pub fn two_closure(g: &PermutationGroup) -> Result<PermutationGroup> {
    two_closure_with_cap(g, DEFAULT_POINT_CAP)
}

pub fn two_closure_with_cap(g: &PermutationGroup, cap: usize) -> Result<PermutationGroup> {
    if g.degree() > cap {
        return Err(Error::PointCapExceeded { points: g.degree(), cap });
    }
    let orb = orbitals(g);
    let gens = orb.as_pair_coloring().automorphism_generators();
    let closure = PermutationGroup::from_generators(g.degree(), gens)?;
    for gen in g.generators() {
        if !closure.contains(gen) {
            return Err(Error::ContractViolation {
                stage: "two_closure",
                detail: String::from("computed closure does not contain the group"),
            });
        }
    }
    Ok(closure)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein() -> PermutationGroup {
        PermutationGroup::from_generators(
            4,
            vec![
                Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap(),
                Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn sym(n: usize) -> PermutationGroup {
        PermutationGroup::from_generators(
            n,
            vec![
                Perm::from_cycles(n, &[&[0, 1]]).unwrap(),
                Perm::from_images((1..n).chain(core::iter::once(0)).collect()).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn symmetric_group_has_two_orbitals() {
        let orb = orbitals(&sym(4));
        assert_eq!(orb.orbital_count(), 2);
    }

    #[test]
    fn trivial_group_has_all_singleton_orbitals() {
        let g = PermutationGroup::trivial(3);
        assert_eq!(orbitals(&g).orbital_count(), 9);
    }

    #[test]
    fn klein_has_four_orbitals() {
        // orbits of pairs under the 4 translations: each orbital is
        // {(x, x+s)} for a fixed difference s
        let orb = orbitals(&klein());
        assert_eq!(orb.orbital_count(), 4);
        for s in 0..4 {
            let c = orb.color(0, s);
            for x in 0..4usize {
                let y = x ^ s;
                assert_eq!(orb.color(x, y), c);
            }
        }
    }

    #[test]
    fn group_elements_are_in_their_own_closure() {
        let g = klein();
        let orb = orbitals(&g);
        for gen in g.generators() {
            assert!(orb.preserved_by(gen));
        }
    }

    #[test]
    fn transposition_not_in_klein_closure() {
        // (0,2) and (1,3) share a color but (0 1) sends (0,2) to (1,2)
        let g = klein();
        let x = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        assert!(!in_two_closure(&g, &x).unwrap());
    }

    #[test]
    fn anything_is_in_sym_closure() {
        let g = sym(4);
        let x = Perm::from_cycles(4, &[&[0, 3]]).unwrap();
        assert!(in_two_closure(&g, &x).unwrap());
    }

    #[test]
    fn klein_is_two_closed() {
        let g = klein();
        let c = two_closure(&g).unwrap();
        assert_eq!(c.order_u64(), Some(4));
        assert!(c.equals_group(&g));
    }

    #[test]
    fn sym_is_its_own_closure() {
        let g = sym(5);
        let c = two_closure(&g).unwrap();
        assert_eq!(c.order_u64(), Some(120));
    }

    #[test]
    fn closure_is_idempotent() {
        let g = PermutationGroup::from_generators(
            6,
            vec![Perm::from_cycles(6, &[&[0, 1, 2], &[3, 4, 5]]).unwrap()],
        )
        .unwrap();
        let c1 = two_closure(&g).unwrap();
        let c2 = two_closure(&c1).unwrap();
        assert!(c1.equals_group(&c2));
    }

    #[test]
    fn membership_agrees_with_full_group_exhaustively_small() {
        // exhaustive over Sym(4) for a couple of subgroups
        let groups = vec![
            klein(),
            PermutationGroup::from_generators(4, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()])
                .unwrap(),
        ];
        let all = sym(4).elements(100).unwrap();
        for g in groups {
            let orb = orbitals(&g);
            let full = two_closure(&g).unwrap();
            for x in &all {
                assert_eq!(orb.preserved_by(x), full.contains(x));
            }
        }
    }

    #[test]
    fn dump_format() {
        let g = sym(3);
        let text = orbitals(&g).dump();
        assert!(text.starts_with("orbital 0: (0,0)"));
    }

    #[test]
    fn cap_exceeded_error() {
        let g = PermutationGroup::trivial(9);
        assert!(matches!(
            two_closure_with_cap(&g, 8).unwrap_err(),
            Error::PointCapExceeded { .. }
        ));
    }
}
