//! Permutation groups backed by a base and strong generating set.
//!
//! The chain is built by a deterministic incremental Schreier–Sims: base
//! points are chosen in ascending numeric order, every Schreier generator is
//! sifted and either absorbed or pushed deeper. Groups are immutable after
//! construction; derived groups (stabilizers, conjugates, kernels) are new
//! objects.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::Rng;

use crate::perm::Perm;
use crate::{Error, Result};

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    /// Generators of the group at this level (they fix all earlier base points).
    gens: Vec<Perm>,
    /// `transversal[y]` maps `point` to `y`; `None` outside the orbit.
    transversal: Vec<Option<Perm>>,
    /// cached inverses of the transversal elements (sifting hot path)
    transversal_inv: Vec<Option<Perm>>,
    orbit: Vec<usize>,
    /// Schreier pairs (orbit point, generator index) whose product already
    /// sifted to the identity once; sifting success is a one-sided membership
    /// proof and deeper groups only grow, so it never needs rechecking.
    verified: alloc::collections::BTreeSet<(usize, usize)>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[point] = Some(Perm::identity(degree));
        let mut transversal_inv = vec![None; degree];
        transversal_inv[point] = Some(Perm::identity(degree));
        Level {
            point,
            gens: Vec::new(),
            transversal,
            transversal_inv,
            orbit: vec![point],
            verified: alloc::collections::BTreeSet::new(),
        }
    }

    /// Extend the orbit and transversal for the current generator list.
    /// Existing tree edges are never replaced, so coset representatives stay
    /// stable across generator additions (the verified-pair cache relies on
    /// this).
    fn sync_orbit(&mut self) {
        let mut head = 0;
        while head < self.orbit.len() {
            let y = self.orbit[head];
            head += 1;
            for g in &self.gens {
                let z = g.apply(y);
                if self.transversal[z].is_none() {
                    let t = g.compose(self.transversal[y].as_ref().unwrap());
                    self.transversal_inv[z] = Some(t.inverse());
                    self.transversal[z] = Some(t);
                    self.orbit.push(z);
                }
            }
        }
    }
}

/// A permutation group with stabilizer chain (order, membership, orbits).
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermutationGroup {
    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> Self {
        PermutationGroup { degree, generators: Vec::new(), levels: Vec::new() }
    }

    /// Group generated by `gens`; an empty list gives the trivial group.
    pub fn from_generators(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        Self::with_base_hint(degree, gens, &[])
    }

    /// Like [`Self::from_generators`] but forcing the first base points,
    /// which makes chained point stabilizers directly readable.
    pub fn with_base_hint(degree: usize, gens: Vec<Perm>, base_hint: &[usize]) -> Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DomainMismatch { left: degree, right: g.degree() });
            }
        }
        let mut group = PermutationGroup { degree, generators: gens.clone(), levels: Vec::new() };
        for &pt in base_hint {
            group.levels.push(Level::new(pt, degree));
        }
        for g in gens {
            group.insert_strong_generator(&g);
        }
        group.schreier_sims();
        Ok(group)
    }

    /// Add a permutation to the generator lists of every level whose earlier
    /// base points it fixes, extending the base when it fixes all of them.
    /// Returns the deepest level it was added to.
    fn insert_strong_generator(&mut self, p: &Perm) -> usize {
        if p.is_identity() {
            return 0;
        }
        let mut deepest = 0;
        while deepest < self.levels.len() && p.fixes(self.levels[deepest].point) {
            deepest += 1;
        }
        if deepest == self.levels.len() {
            let pt = p.smallest_moved().expect("non-identity");
            self.levels.push(Level::new(pt, self.degree));
        }
        if self.levels[deepest].gens.contains(p) {
            return deepest;
        }
        for lvl in 0..=deepest {
            self.levels[lvl].gens.push(p.clone());
        }
        deepest
    }

    /// Bottom-up verification: a level passes when every one of its Schreier
    /// generators sifts to the identity through the deeper levels; residues
    /// are inserted where sifting stopped and that level is reverified. When
    /// level 0 passes, orbit lengths multiply to the group order.
    fn schreier_sims(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        for lvl in 0..self.levels.len() {
            self.levels[lvl].sync_orbit();
        }
        let mut i = self.levels.len() - 1;
        loop {
            self.levels[i].sync_orbit();
            let orbit = self.levels[i].orbit.clone();
            let gens = self.levels[i].gens.clone();
            let mut failed: Option<usize> = None;
            'verify: for &y in &orbit {
                for (gi, g) in gens.iter().enumerate() {
                    if self.levels[i].verified.contains(&(y, gi)) {
                        continue;
                    }
                    let u = self.levels[i].transversal[y].as_ref().unwrap();
                    let z = g.apply(y);
                    let t_inv = self.levels[i].transversal_inv[z].as_ref().unwrap();
                    let schreier = t_inv.compose(&g.compose(u));
                    if schreier.is_identity() {
                        self.levels[i].verified.insert((y, gi));
                        continue;
                    }
                    match self.sift_from(i + 1, schreier) {
                        None => {
                            self.levels[i].verified.insert((y, gi));
                        }
                        Some((_, residue)) => {
                            let depth = self.insert_strong_generator(&residue);
                            for lvl in i + 1..=depth.min(self.levels.len() - 1) {
                                self.levels[lvl].sync_orbit();
                            }
                            failed = Some(depth);
                            break 'verify;
                        }
                    }
                }
            }
            match failed {
                Some(depth) => i = depth,
                None => {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                }
            }
        }
    }

    /// Sift `p` through levels `start..`; `None` means it lies in the group
    /// generated by those levels, otherwise the failing level and residue.
    fn sift_from(&self, start: usize, p: Perm) -> Option<(usize, Perm)> {
        let mut cur = p;
        for lvl in start..self.levels.len() {
            if cur.is_identity() {
                return None;
            }
            let level = &self.levels[lvl];
            let y = cur.apply(level.point);
            match &level.transversal_inv[y] {
                Some(t_inv) => cur = t_inv.compose(&cur),
                None => return Some((lvl, cur)),
            }
        }
        if cur.is_identity() {
            None
        } else {
            Some((self.levels.len(), cur))
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Strong generators of the whole chain (generate the group).
    pub fn strong_generators(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for level in &self.levels {
            for g in &level.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn order(&self) -> BigUint {
        let mut ord = BigUint::from(1u32);
        for level in &self.levels {
            ord *= BigUint::from(level.orbit.len());
        }
        ord
    }

    /// Order as `u64` when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(self.order()).ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    pub fn contains(&self, p: &Perm) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        self.sift_from(0, p.clone()).is_none()
    }

    /// Largest power of `p` dividing the group order, as exponent.
    pub fn p_valuation(&self, p: usize) -> u32 {
        let mut ord = self.order();
        let p = BigUint::from(p);
        let zero = BigUint::from(0u32);
        let mut v = 0;
        while &ord % &p == zero && ord > BigUint::from(1u32) {
            ord /= &p;
            v += 1;
        }
        v
    }

    pub fn has_p_power_order(&self, p: usize) -> bool {
        let mut ord = self.order();
        let p = BigUint::from(p);
        let one = BigUint::from(1u32);
        let zero = BigUint::from(0u32);
        while ord > one {
            if &ord % &p != zero {
                return false;
            }
            ord /= &p;
        }
        true
    }

    /// Smallest G-invariant set containing `x`.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[x] = true;
        let mut orbit = vec![x];
        let mut head = 0;
        while head < orbit.len() {
            let y = orbit[head];
            head += 1;
            for g in &self.generators {
                let z = g.apply(y);
                if !seen[z] {
                    seen[z] = true;
                    orbit.push(z);
                }
            }
        }
        orbit.sort_unstable();
        orbit
    }

    /// All orbits, each sorted, ordered by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree {
            if !seen[x] {
                let orb = self.orbit(x);
                for &y in &orb {
                    seen[y] = true;
                }
                out.push(orb);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// `{g in G : g(v) = v}`, satisfying |G| = |G_v| * |orbit(v)|.
    pub fn point_stabilizer(&self, v: usize) -> PermutationGroup {
        self.pointwise_stabilizer(&[v])
    }

    /// Subgroup fixing every listed point. The chain is rebased so the listed
    /// points come first; the verified tail of that chain is already a chain
    /// for the stabilizer and is reused as-is.
    pub fn pointwise_stabilizer(&self, pts: &[usize]) -> PermutationGroup {
        let rebased = PermutationGroup::with_base_hint(self.degree, self.generators.clone(), pts)
            .expect("same degree");
        let tail: Vec<Level> = rebased.levels[pts.len().min(rebased.levels.len())..].to_vec();
        let gens: Vec<Perm> = tail.first().map(|l| dedup(l.gens.clone())).unwrap_or_default();
        PermutationGroup { degree: self.degree, generators: gens, levels: tail }
    }

    /// Group generated by `{x^-1 g x : g in generators}`.
    pub fn conjugate_subgroup(&self, x: &Perm) -> PermutationGroup {
        let gens: Vec<Perm> = self.generators.iter().map(|g| g.conjugate_by(x)).collect();
        PermutationGroup::from_generators(self.degree, gens).expect("same degree")
    }

    /// Set equality as abstract groups of permutations.
    pub fn equals_group(&self, other: &PermutationGroup) -> bool {
        self.degree == other.degree
            && self.order() == other.order()
            && other.generators.iter().all(|g| self.contains(g))
    }

    pub fn is_subgroup_of(&self, other: &PermutationGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// Every element, via transversal products. Errors when the order
    /// exceeds `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Perm>> {
        let ord = self.order();
        if ord > BigUint::from(cap) {
            return Err(Error::BudgetExceeded(alloc::format!(
                "group of order {ord} exceeds enumeration cap {cap}"
            )));
        }
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &y in &level.orbit {
                let t = level.transversal[y].as_ref().unwrap();
                for e in &out {
                    next.push(t.compose(e));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Stream every element without materializing the list; the callback
    /// returns `false` to stop early. Returns whether the walk completed.
    pub fn for_each_element<F: FnMut(&Perm) -> bool>(&self, f: &mut F) -> bool {
        fn rec<F: FnMut(&Perm) -> bool>(levels: &[Level], acc: &Perm, f: &mut F) -> bool {
            match levels.split_first() {
                None => f(acc),
                Some((level, rest)) => {
                    for &y in &level.orbit {
                        let t = level.transversal[y].as_ref().unwrap();
                        if !rec(rest, &acc.compose(t), f) {
                            return false;
                        }
                    }
                    true
                }
            }
        }
        rec(&self.levels, &Perm::identity(self.degree), f)
    }

    /// Uniformly random element (product of uniform transversal picks).
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut acc = Perm::identity(self.degree);
        for level in &self.levels {
            let y = level.orbit[rng.gen_range(0..level.orbit.len())];
            acc = acc.compose(level.transversal[y].as_ref().unwrap());
        }
        acc
    }

    /// Check that every original generator sifts to the identity.
    pub fn verify_chain(&self) -> bool {
        self.generators.iter().all(|g| self.contains(g))
    }
}

fn dedup(gens: Vec<Perm>) -> Vec<Perm> {
    let mut out: Vec<Perm> = Vec::new();
    for g in gens {
        if !g.is_identity() && !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Subgroup of `g` stabilizing setwise each set of `action`, where `action`
/// maps a permutation and a set index to the image set index. This is the
/// Schreier-generator construction on the induced action, iterated over the
/// listed set indices.
pub(crate) fn iterated_setwise_stabilizer<F>(
    g: &PermutationGroup,
    num_sets: usize,
    action: F,
) -> PermutationGroup
where
    F: Fn(&Perm, usize) -> usize,
{
    let degree = g.degree();
    let mut current: Vec<Perm> = g.generators().to_vec();
    for target in 0..num_sets {
        // Orbit of `target` under the induced action, with point-level transversal.
        let mut transversal: Vec<Option<Perm>> = vec![None; num_sets];
        transversal[target] = Some(Perm::identity(degree));
        let mut orbit = vec![target];
        let mut head = 0;
        while head < orbit.len() {
            let b = orbit[head];
            head += 1;
            for gen in &current {
                let c = action(gen, b);
                if transversal[c].is_none() {
                    transversal[c] = Some(gen.compose(transversal[b].as_ref().unwrap()));
                    orbit.push(c);
                }
            }
        }
        // Schreier generators of the stabilizer of `target`, deduplicated
        // through a chain so the generator list stays small.
        let mut stab = PermutationGroup::trivial(degree);
        let mut kept: Vec<Perm> = Vec::new();
        for &b in &orbit {
            for gen in &current {
                let u = transversal[b].as_ref().unwrap();
                let c = action(gen, b);
                let s = transversal[c].as_ref().unwrap().inverse().compose(&gen.compose(u));
                if !s.is_identity() && !stab.contains(&s) {
                    kept.push(s.clone());
                    stab = PermutationGroup::from_generators(degree, kept.clone()).unwrap();
                }
            }
        }
        current = kept;
    }
    PermutationGroup::from_generators(degree, current).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    /// Independent oracle: closure of the generators under composition.
    pub(crate) fn naive_elements(degree: usize, gens: &[Perm]) -> BTreeSet<Perm> {
        let mut set: BTreeSet<Perm> = BTreeSet::new();
        set.insert(Perm::identity(degree));
        loop {
            let mut new = Vec::new();
            for e in &set {
                for g in gens {
                    let f = g.compose(e);
                    if !set.contains(&f) {
                        new.push(f);
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            set.extend(new);
        }
        set
    }

    fn sym_gens(n: usize) -> Vec<Perm> {
        vec![
            Perm::from_cycles(n, &[&[0, 1]]).unwrap(),
            Perm::from_images((1..n).chain(core::iter::once(0)).collect()).unwrap(),
        ]
    }

    #[test]
    fn empty_generator_list_is_trivial() {
        let g = PermutationGroup::from_generators(4, vec![]).unwrap();
        assert_eq!(g.order_u64(), Some(1));
        assert_eq!(g.orbit(2), vec![2]);
        assert!(g.contains(&Perm::identity(4)));
        assert!(!g.contains(&Perm::from_cycles(4, &[&[0, 1]]).unwrap()));
    }

    #[test]
    fn klein_group_order_and_membership() {
        let a = Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap();
        let b = Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap();
        let g = PermutationGroup::from_generators(4, vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(g.order_u64(), Some(4));
        assert!(g.contains(&a.compose(&b)));
        assert!(!g.contains(&Perm::from_cycles(4, &[&[0, 1]]).unwrap()));
        assert!(g.is_transitive());
        assert!(g.point_stabilizer(0).is_trivial());
    }

    #[test]
    fn symmetric_group_chain() {
        for n in 2..=6 {
            let g = PermutationGroup::from_generators(n, sym_gens(n)).unwrap();
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(g.order_u64(), Some(fact), "S_{n}");
            assert!(g.verify_chain());
        }
    }

    #[test]
    fn order_matches_naive_enumeration() {
        let cases: Vec<Vec<Perm>> = vec![
            sym_gens(5),
            vec![Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap()],
            vec![
                Perm::from_cycles(8, &[&[0, 1, 2, 3], &[4, 5, 6, 7]]).unwrap(),
                Perm::from_cycles(8, &[&[0, 4], &[1, 5], &[2, 6], &[3, 7]]).unwrap(),
            ],
            vec![
                Perm::from_cycles(7, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(7, &[&[2, 3, 4], &[5, 6]]).unwrap(),
            ],
        ];
        for gens in cases {
            let degree = gens[0].degree();
            let g = PermutationGroup::from_generators(degree, gens.clone()).unwrap();
            let naive = naive_elements(degree, &gens);
            assert_eq!(g.order_u64(), Some(naive.len() as u64));
            for e in &naive {
                assert!(g.contains(e));
            }
        }
    }

    #[test]
    fn point_stabilizer_orbit_stabilizer_identity() {
        let g = PermutationGroup::from_generators(4, sym_gens(4)).unwrap();
        let stab = g.point_stabilizer(0);
        assert_eq!(stab.order_u64(), Some(6)); // Sym(3) on the rest
        assert_eq!(
            g.order(),
            stab.order() * BigUint::from(g.orbit(0).len())
        );
    }

    #[test]
    fn dihedral_vertex_stabilizer() {
        // dihedral group of the 4-cycle 0-1-2-3
        let r = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let s = Perm::from_cycles(4, &[&[1, 3]]).unwrap();
        let g = PermutationGroup::from_generators(4, vec![r, s]).unwrap();
        assert_eq!(g.order_u64(), Some(8));
        // enumerating the 8 elements: exactly the identity and (1 3) fix 0
        assert_eq!(g.point_stabilizer(0).order_u64(), Some(2));
    }

    #[test]
    fn conjugate_preserves_order() {
        let g = PermutationGroup::from_generators(4, sym_gens(4)).unwrap();
        let x = Perm::from_cycles(4, &[&[0, 2, 1]]).unwrap();
        let h = g.conjugate_subgroup(&x);
        assert_eq!(g.order(), h.order());
        // conjugating by a member gives the same set
        assert!(g.conjugate_subgroup(&Perm::from_cycles(4, &[&[0, 1]]).unwrap()).equals_group(&g));
        // conjugating by the identity gives the same group
        assert!(g.conjugate_subgroup(&Perm::identity(4)).equals_group(&g));
    }

    #[test]
    fn elements_enumeration_and_random_sampling() {
        let gens = vec![Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap()];
        let g = PermutationGroup::from_generators(5, gens).unwrap();
        let elems = g.elements(100).unwrap();
        assert_eq!(elems.len(), 5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        use rand::SeedableRng;
        for _ in 0..20 {
            assert!(g.contains(&g.random_element(&mut rng)));
        }
    }

    #[test]
    fn mixed_domain_sizes_rejected() {
        let a = Perm::identity(4);
        let b = Perm::identity(5);
        assert!(PermutationGroup::from_generators(4, vec![a, b]).is_err());
    }
}
