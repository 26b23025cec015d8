//! Cayley digraphs of elementary abelian groups, their automorphism groups,
//! isomorphism testing, and canonical forms.
//!
//! Vertices are the points `0..p^n` under the vector labeling of [`crate::ea`];
//! `(x, y)` is an arc exactly when `y - x` (coordinatewise mod p) lies in the
//! connection set. Adjacency is stored as one `u128` bit row per vertex,
//! which covers every degree up to the 81-point cap.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::autosearch::PairColoring;
use crate::ea;
use crate::group::PermutationGroup;
use crate::perm::Perm;
use crate::{checked_degree, Error, Result, DEFAULT_POINT_CAP};

/// A subset of the group, stored as a bitmask over point codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConnectionSet {
    pub p: usize,
    pub n: usize,
    mask: u128,
}

impl ConnectionSet {
    pub fn new(p: usize, n: usize, members: &[usize]) -> Result<Self> {
        let degree = checked_degree(p, n, DEFAULT_POINT_CAP)?;
        let mut mask = 0u128;
        for &m in members {
            if m >= degree {
                return Err(Error::Invalid(format!("set member {m} out of range for {degree} points")));
            }
            mask |= 1 << m;
        }
        Ok(ConnectionSet { p, n, mask })
    }

    pub fn from_mask(p: usize, n: usize, mask: u128) -> Result<Self> {
        let degree = checked_degree(p, n, DEFAULT_POINT_CAP)?;
        if degree < 128 && mask >> degree != 0 {
            return Err(Error::Invalid(String::from("mask has bits outside the point range")));
        }
        Ok(ConnectionSet { p, n, mask })
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask >> x & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        let degree = self.p.pow(self.n as u32);
        (0..degree).filter(|&x| self.contains(x)).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Image under a point permutation (used for the Aut(R) action on sets).
    pub fn apply_perm(&self, g: &Perm) -> ConnectionSet {
        let degree = self.p.pow(self.n as u32);
        let mut mask = 0u128;
        for x in 0..degree {
            if self.contains(x) {
                mask |= 1 << g.apply(x);
            }
        }
        ConnectionSet { p: self.p, n: self.n, mask }
    }
}

/// A digraph on `degree` points with `u128` adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    degree: usize,
    rows: Vec<u128>,
}

impl Digraph {
    pub fn from_rows(degree: usize, rows: Vec<u128>) -> Result<Self> {
        if rows.len() != degree || degree > 128 {
            return Err(Error::Invalid(String::from("bad adjacency row count")));
        }
        Ok(Digraph { degree, rows })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn has_arc(&self, x: usize, y: usize) -> bool {
        self.rows[x] >> y & 1 == 1
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn out_degree(&self, x: usize) -> usize {
        self.rows[x].count_ones() as usize
    }

    pub fn in_degree(&self, y: usize) -> usize {
        (0..self.degree).filter(|&x| self.has_arc(x, y)).count()
    }

    /// The digraph with vertex `x` renamed to `pi(x)`.
    pub fn relabel(&self, pi: &Perm) -> Digraph {
        let mut rows = alloc::vec![0u128; self.degree];
        for x in 0..self.degree {
            for y in 0..self.degree {
                if self.has_arc(x, y) {
                    rows[pi.apply(x)] |= 1 << pi.apply(y);
                }
            }
        }
        Digraph { degree: self.degree, rows }
    }

    fn coloring(&self) -> PairColoring {
        PairColoring::from_fn(self.degree, |a, b| u32::from(self.has_arc(a, b)))
    }

    pub fn automorphism_group(&self) -> PermutationGroup {
        PermutationGroup::from_generators(self.degree, self.coloring().automorphism_generators())
            .expect("generators share the degree")
    }

    /// Relabeling-invariant encoding: the adjacency rows of the canonically
    /// labeled digraph, each packed little-endian into `ceil(degree/8)` bytes.
    pub fn canonical_form(&self) -> Vec<u8> {
        let (lab, _) = self.coloring().canonical_labeling();
        let bytes_per_row = self.degree.div_ceil(8);
        let mut out = Vec::with_capacity(self.degree * bytes_per_row);
        for i in 0..self.degree {
            let mut row = 0u128;
            for j in 0..self.degree {
                if self.has_arc(lab.apply(i), lab.apply(j)) {
                    row |= 1 << j;
                }
            }
            out.extend(row.to_le_bytes().iter().take(bytes_per_row));
        }
        out
    }

    /// A vertex bijection carrying arcs of `self` onto arcs of `other`, if any.
    pub fn isomorphism_to(&self, other: &Digraph) -> Result<Option<Perm>> {
        if self.degree != other.degree {
            return Err(Error::DomainMismatch { left: self.degree, right: other.degree });
        }
        let (lab1, enc1) = self.coloring().canonical_labeling();
        let (lab2, enc2) = other.coloring().canonical_labeling();
        if enc1 != enc2 {
            return Ok(None);
        }
        // positions agree, so vertex x of self maps to lab2(lab1^{-1}(x))
        let phi = lab2.compose(&lab1.inverse());
        for x in 0..self.degree {
            for y in 0..self.degree {
                if self.has_arc(x, y) != other.has_arc(phi.apply(x), phi.apply(y)) {
                    return Err(Error::ContractViolation {
                        stage: "isomorphism_to",
                        detail: String::from("canonical labelings disagree with arc check"),
                    });
                }
            }
        }
        Ok(Some(phi))
    }
}

/// A Cayley digraph together with its connection set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyDigraph {
    pub p: usize,
    pub n: usize,
    set: ConnectionSet,
    graph: Digraph,
}

/// Build the Cayley digraph of `Z_p^n` with the given connection set; the
/// arc `(x, y)` is present iff `y - x` lies in the set. Loops appear at every
/// vertex exactly when the identity is a member.
pub fn build_cayley(set: ConnectionSet) -> CayleyDigraph {
    let (p, n) = (set.p, set.n);
    let degree = p.pow(n as u32);
    let mut rows = alloc::vec![0u128; degree];
    for x in 0..degree {
        for y in 0..degree {
            if set.contains(ea::point_sub(p, n, y, x)) {
                rows[x] |= 1 << y;
            }
        }
    }
    CayleyDigraph { p, n, set, graph: Digraph { degree, rows } }
}

impl CayleyDigraph {
    pub fn connection_set(&self) -> &ConnectionSet {
        &self.set
    }

    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }

    pub fn degree(&self) -> usize {
        self.graph.degree
    }

    pub fn automorphism_group(&self) -> PermutationGroup {
        self.graph.automorphism_group()
    }

    pub fn canonical_form(&self) -> Vec<u8> {
        self.graph.canonical_form()
    }

    pub fn are_isomorphic(&self, other: &CayleyDigraph) -> Result<Option<Perm>> {
        self.graph.isomorphism_to(&other.graph)
    }
}

/// Lowercase hex of a canonical form, the external census encoding.
pub fn canonical_hex(form: &[u8]) -> String {
    let mut s = String::with_capacity(form.len() * 2);
    for b in form {
        s.push_str(&format!("{b:02x}"));
    }
    s
}
