//! Backtracking engine for automorphism groups and canonical labelings of
//! edge-colored digraphs (colorings of ordered point pairs).
//!
//! One engine serves three consumers: digraph automorphism groups, canonical
//! forms for the census, and full 2-closure computations (orbital colorings).
//!
//! The search individualizes vertices inside the first non-singleton cell of
//! an iteratively refined ordered partition. Leaf encodings are compared in
//! "border" order (grow the top-left square one row+column at a time), which
//! makes the encoding of the already-discrete prefix a true prefix of the
//! leaf encoding, so partial comparisons against the current best are sound.
//! Automorphisms discovered from equal leaves prune sibling branches by
//! orbits.

use alloc::vec;
use alloc::vec::Vec;

use crate::perm::Perm;

/// A coloring of ordered pairs `(a, b)` of `{0,..,n-1}` by integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairColoring {
    degree: usize,
    table: Vec<u32>,
}

impl PairColoring {
    pub fn from_table(degree: usize, table: Vec<u32>) -> Self {
        assert_eq!(table.len(), degree * degree);
        PairColoring { degree, table }
    }

    pub fn from_fn<F: Fn(usize, usize) -> u32>(degree: usize, f: F) -> Self {
        let mut table = Vec::with_capacity(degree * degree);
        for a in 0..degree {
            for b in 0..degree {
                table.push(f(a, b));
            }
        }
        PairColoring { degree, table }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn color(&self, a: usize, b: usize) -> u32 {
        self.table[a * self.degree + b]
    }

    /// True when the coloring is constant on the diagonal and constant off
    /// it; every labeling is then equivalent.
    fn is_uniform(&self) -> bool {
        let n = self.degree;
        if n == 0 {
            return true;
        }
        let diag = self.color(0, 0);
        let mut off = None;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    if self.color(a, b) != diag {
                        return false;
                    }
                } else {
                    match off {
                        None => off = Some(self.color(a, b)),
                        Some(c) => {
                            if self.color(a, b) != c {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Generators of the group of color-preserving permutations.
    pub fn automorphism_generators(&self) -> Vec<Perm> {
        let n = self.degree;
        if n <= 1 {
            return Vec::new();
        }
        if self.is_uniform() {
            // full symmetric group
            let mut cycle: Vec<usize> = (1..n).collect();
            cycle.push(0);
            return vec![
                Perm::from_cycles(n, &[&[0, 1]]).unwrap(),
                Perm::from_images(cycle).unwrap(),
            ];
        }
        let mut s = Searcher::new(self, false);
        s.run();
        s.auts
    }

    /// Canonical labeling: a permutation `lab` (position -> vertex) whose
    /// relabeled color table is minimal, plus that table in row-major order.
    /// The table is invariant under any relabeling of the input.
    pub fn canonical_labeling(&self) -> (Perm, Vec<u32>) {
        let n = self.degree;
        if self.is_uniform() {
            let lab = Perm::identity(n);
            let table = self.table.clone();
            return (lab, table);
        }
        let mut s = Searcher::new(self, true);
        s.run();
        let lab_images = s.best.expect("search visits at least one leaf").1;
        let lab = Perm::from_images(lab_images).unwrap();
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(self.color(lab.apply(i), lab.apply(j)));
            }
        }
        (lab, table)
    }

    pub fn is_preserved_by(&self, x: &Perm) -> bool {
        let n = self.degree;
        (0..n).all(|a| (0..n).all(|b| self.color(x.apply(a), x.apply(b)) == self.color(a, b)))
    }
}

type Cells = Vec<Vec<usize>>;

struct Searcher<'a> {
    c: &'a PairColoring,
    n: usize,
    canonical: bool,
    /// first leaf reached: (border encoding, labeling)
    first: Option<(Vec<u32>, Vec<usize>)>,
    /// best (minimal) leaf in canonical mode
    best: Option<(Vec<u32>, Vec<usize>)>,
    auts: Vec<Perm>,
    nodes: u64,
}

impl<'a> Searcher<'a> {
    fn new(c: &'a PairColoring, canonical: bool) -> Self {
        Searcher { c, n: c.degree(), canonical, first: None, best: None, auts: Vec::new(), nodes: 0 }
    }

    fn run(&mut self) {
        let start: Cells = vec![(0..self.n).collect()];
        let mut individualized = Vec::new();
        self.search(start, &mut individualized);
    }

    /// Border-order encoding of a full labeling.
    fn border_encoding(&self, lab: &[usize]) -> Vec<u32> {
        let mut enc = Vec::with_capacity(self.n * self.n);
        for k in 0..self.n {
            for j in 0..=k {
                enc.push(self.c.color(lab[k], lab[j]));
            }
            for i in 0..k {
                enc.push(self.c.color(lab[i], lab[k]));
            }
        }
        enc
    }

    /// Border encoding of the discrete prefix (first `m` positions known).
    fn prefix_encoding(&self, prefix: &[usize]) -> Vec<u32> {
        let m = prefix.len();
        let mut enc = Vec::with_capacity(m * m);
        for k in 0..m {
            for j in 0..=k {
                enc.push(self.c.color(prefix[k], prefix[j]));
            }
            for i in 0..k {
                enc.push(self.c.color(prefix[i], prefix[k]));
            }
        }
        enc
    }

    /// Compare a node's known prefix against a recorded leaf encoding.
    fn prefix_cmp(prefix: &[u32], full: &[u32]) -> core::cmp::Ordering {
        let len = prefix.len().min(full.len());
        prefix[..len].cmp(&full[..len])
    }

    fn search(&mut self, cells: Cells, individualized: &mut Vec<usize>) {
        self.nodes += 1;
        let cells = self.refine(cells);

        // positions of the leading run of singleton cells
        let mut prefix: Vec<usize> = Vec::new();
        for cell in &cells {
            if cell.len() == 1 {
                prefix.push(cell[0]);
            } else {
                break;
            }
        }
        let penc = self.prefix_encoding(&prefix);
        if let Some((first_enc, _)) = &self.first {
            if !self.canonical {
                // aut mode: only leaves equal to the first leaf matter
                if Self::prefix_cmp(&penc, first_enc) != core::cmp::Ordering::Equal {
                    return;
                }
            }
        }
        if self.canonical {
            if let Some((best_enc, _)) = &self.best {
                if Self::prefix_cmp(&penc, best_enc) == core::cmp::Ordering::Greater {
                    return;
                }
            }
        }

        let target = cells.iter().position(|c| c.len() > 1);
        let Some(ti) = target else {
            // leaf: fully discrete
            let lab: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let enc = self.border_encoding(&lab);
            if let Some((first_enc, first_lab)) = &self.first {
                if &enc == first_enc {
                    self.record_aut(first_lab.clone(), lab.clone());
                }
            } else {
                self.first = Some((enc.clone(), lab.clone()));
            }
            if self.canonical {
                match &self.best {
                    Some((best_enc, best_lab)) => {
                        if &enc < best_enc {
                            self.best = Some((enc, lab));
                        } else if &enc == best_enc && best_lab != &lab {
                            self.record_aut(best_lab.clone(), lab);
                        }
                    }
                    None => self.best = Some((enc, lab)),
                }
            }
            return;
        };

        let candidates = cells[ti].clone();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &candidates {
            if self.equivalent_to_tried(v, &tried, individualized) {
                continue;
            }
            tried.push(v);
            let mut child = cells.clone();
            let rest: Vec<usize> = child[ti].iter().copied().filter(|&w| w != v).collect();
            child[ti] = vec![v];
            child.insert(ti + 1, rest);
            individualized.push(v);
            self.search(child, individualized);
            individualized.pop();
        }
    }

    fn record_aut(&mut self, lab1: Vec<usize>, lab2: Vec<usize>) {
        // equal encodings: lab2 . lab1^{-1} preserves the coloring
        let l1 = Perm::from_images(lab1).unwrap();
        let l2 = Perm::from_images(lab2).unwrap();
        let a = l2.compose(&l1.inverse());
        debug_assert!(self.c.is_preserved_by(&a));
        if !a.is_identity() && !self.auts.contains(&a) {
            self.auts.push(a);
        }
    }

    /// Is `v` in the orbit of an already-tried candidate under the known
    /// automorphisms that fix every individualized vertex?
    fn equivalent_to_tried(&self, v: usize, tried: &[usize], individualized: &[usize]) -> bool {
        if tried.is_empty() || self.auts.is_empty() {
            return false;
        }
        let fixing: Vec<&Perm> = self
            .auts
            .iter()
            .filter(|a| individualized.iter().all(|&x| a.apply(x) == x))
            .collect();
        if fixing.is_empty() {
            return false;
        }
        // orbit of v under <fixing>
        let mut seen = vec![false; self.n];
        seen[v] = true;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            if tried.contains(&x) {
                return true;
            }
            for a in &fixing {
                for y in [a.apply(x), a.inverse().apply(x)] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        false
    }

    /// Iterated color refinement of an ordered partition. Cells split by the
    /// multiset of colors toward and from each existing cell; sub-cells are
    /// ordered by signature value, which keeps the partition order invariant
    /// under relabeling.
    fn refine(&self, mut cells: Cells) -> Cells {
        loop {
            let mut changed = false;
            let snapshot = cells.clone();
            let mut next: Cells = Vec::with_capacity(cells.len());
            for cell in cells.drain(..) {
                if cell.len() == 1 {
                    next.push(cell);
                    continue;
                }
                let mut keyed: Vec<(Vec<u32>, usize)> = cell
                    .iter()
                    .map(|&v| (self.signature(v, &snapshot), v))
                    .collect();
                keyed.sort();
                let mut run_start = 0;
                for idx in 1..=keyed.len() {
                    if idx == keyed.len() || keyed[idx].0 != keyed[run_start].0 {
                        let sub: Vec<usize> = keyed[run_start..idx].iter().map(|&(_, v)| v).collect();
                        if sub.len() != keyed.len() {
                            changed = true;
                        }
                        next.push(sub);
                        run_start = idx;
                    }
                }
            }
            cells = next;
            if !changed {
                return cells;
            }
        }
    }

    fn signature(&self, v: usize, cells: &Cells) -> Vec<u32> {
        let mut sig = Vec::with_capacity(2 * self.n);
        for cell in cells {
            let mut out: Vec<u32> = cell.iter().map(|&u| self.c.color(v, u)).collect();
            let mut inn: Vec<u32> = cell.iter().map(|&u| self.c.color(u, v)).collect();
            out.sort_unstable();
            inn.sort_unstable();
            sig.extend(out);
            sig.extend(inn);
        }
        sig
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::PermutationGroup;
    use alloc::vec;

    fn digraph_coloring(n: usize, arcs: &[(usize, usize)]) -> PairColoring {
        PairColoring::from_fn(n, |a, b| u32::from(arcs.contains(&(a, b))))
    }

    /// Brute-force oracle: filter all of Sym(n).
    fn naive_auts(c: &PairColoring) -> usize {
        let n = c.degree();
        let sym = PermutationGroup::from_generators(
            n,
            vec![
                Perm::from_cycles(n, &[&[0, 1]]).unwrap(),
                Perm::from_images((1..n).chain(core::iter::once(0)).collect()).unwrap(),
            ],
        )
        .unwrap();
        sym.elements(50_000)
            .unwrap()
            .into_iter()
            .filter(|p| c.is_preserved_by(p))
            .count()
    }

    #[test]
    fn four_cycle_automorphisms() {
        // undirected 4-cycle as a digraph with arcs both ways: dihedral, order 8
        let arcs = [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2), (3, 0), (0, 3)];
        let c = digraph_coloring(4, &arcs);
        let g = PermutationGroup::from_generators(4, c.automorphism_generators()).unwrap();
        assert_eq!(g.order_u64(), Some(8));
        assert_eq!(naive_auts(&c), 8);
    }

    #[test]
    fn directed_cycle_automorphisms() {
        let arcs = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let c = digraph_coloring(5, &arcs);
        let g = PermutationGroup::from_generators(5, c.automorphism_generators()).unwrap();
        assert_eq!(g.order_u64(), Some(5));
    }

    #[test]
    fn uniform_colorings_give_symmetric() {
        let c = PairColoring::from_fn(5, |a, b| u32::from(a == b));
        let g = PermutationGroup::from_generators(5, c.automorphism_generators()).unwrap();
        assert_eq!(g.order_u64(), Some(120));
    }

    #[test]
    fn asymmetric_graph_trivial_group() {
        // path with a pendant making it asymmetric: 0-1-2-3 plus arc 1->3
        let arcs = [(0, 1), (1, 2), (2, 3), (1, 3)];
        let c = digraph_coloring(4, &arcs);
        assert!(c.automorphism_generators().is_empty());
        assert_eq!(naive_auts(&c), 1);
    }

    #[test]
    fn canonical_invariance_under_relabeling() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let arcs = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (0, 4)];
        let c = digraph_coloring(5, &arcs);
        let (_, canon) = c.canonical_labeling();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..30 {
            let mut images: Vec<usize> = (0..5).collect();
            images.shuffle(&mut rng);
            let pi = Perm::from_images(images).unwrap();
            let relabeled =
                PairColoring::from_fn(5, |a, b| c.color(pi.inverse().apply(a), pi.inverse().apply(b)));
            let (_, canon2) = relabeled.canonical_labeling();
            assert_eq!(canon, canon2);
        }
    }

    #[test]
    fn canonical_separates_nonisomorphic() {
        let path = digraph_coloring(4, &[(0, 1), (1, 2), (2, 3)]);
        let cycle = digraph_coloring(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_ne!(path.canonical_labeling().1, cycle.canonical_labeling().1);
    }

    #[test]
    fn multicolor_orbital_style() {
        // two edge colors: a colored square where opposite edges share colors
        let c = PairColoring::from_fn(4, |a, b| match (a, b) {
            (0, 1) | (2, 3) => 1,
            (1, 2) | (3, 0) => 2,
            _ => 0,
        });
        let g = PermutationGroup::from_generators(4, c.automorphism_generators()).unwrap();
        // color-preserving: the rotation by two steps and the swap of diagonals
        assert_eq!(g.order_u64(), Some(naive_auts(&c) as u64));
    }
}
