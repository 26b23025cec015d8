//! Systems of imprimitivity (block systems) and kernels of block actions.

use alloc::vec;
use alloc::vec::Vec;

use crate::group::{iterated_setwise_stabilizer, PermutationGroup};
use crate::perm::Perm;
use crate::{Error, Result};

/// A partition of the point set into equally sized blocks permuted by a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSystem {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    block_size: usize,
}

impl BlockSystem {
    /// Build from a `point -> block index` map; blocks must be equal-sized
    /// and indices contiguous from 0.
    pub fn from_block_of(block_of: Vec<usize>) -> Result<Self> {
        let degree = block_of.len();
        let count = block_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (x, &b) in block_of.iter().enumerate() {
            if b >= count {
                return Err(Error::Invalid(alloc::format!("block index {b} out of range")));
            }
            blocks[b].push(x);
        }
        if blocks.is_empty() {
            return Err(Error::Invalid(alloc::string::String::from("empty block system")));
        }
        let block_size = blocks[0].len();
        if block_size == 0 || blocks.iter().any(|b| b.len() != block_size) || degree % block_size != 0 {
            return Err(Error::Invalid(alloc::string::String::from(
                "blocks must be nonempty and equally sized",
            )));
        }
        Ok(BlockSystem { block_of, blocks, block_size })
    }

    /// Partition into singletons.
    pub fn singletons(degree: usize) -> Self {
        BlockSystem {
            block_of: (0..degree).collect(),
            blocks: (0..degree).map(|x| vec![x]).collect(),
            block_size: 1,
        }
    }

    /// One block holding everything.
    pub fn whole(degree: usize) -> Self {
        BlockSystem {
            block_of: vec![0; degree],
            blocks: vec![(0..degree).collect()],
            block_size: degree,
        }
    }

    /// The orbits of a fixed-point-free order-`k` element whose orbits all
    /// have length `k` form a block system for anything centralizing it;
    /// convenience used for the `p+1` size-p refinements.
    pub fn from_orbits_of(perm: &Perm) -> Result<Self> {
        let degree = perm.degree();
        let mut block_of = vec![usize::MAX; degree];
        let mut next = 0;
        for x in 0..degree {
            if block_of[x] != usize::MAX {
                continue;
            }
            let mut y = x;
            loop {
                block_of[y] = next;
                y = perm.apply(y);
                if y == x {
                    break;
                }
            }
            next += 1;
        }
        BlockSystem::from_block_of(block_of)
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Index of the image block of block `b` under `g`, if `g` respects the
    /// partition.
    pub fn image_block(&self, g: &Perm, b: usize) -> Option<usize> {
        let target = self.block_of[g.apply(self.blocks[b][0])];
        if self.blocks[b].iter().all(|&x| self.block_of[g.apply(x)] == target) {
            Some(target)
        } else {
            None
        }
    }

    pub fn is_invariant_under(&self, g: &Perm) -> bool {
        (0..self.blocks.len()).all(|b| self.image_block(g, b).is_some())
    }

    pub fn is_invariant_under_group(&self, g: &PermutationGroup) -> bool {
        g.generators().iter().all(|p| self.is_invariant_under(p))
    }

    /// True when `g` fixes every block setwise.
    pub fn fixes_every_block(&self, g: &Perm) -> bool {
        (0..self.degree()).all(|x| self.block_of[g.apply(x)] == self.block_of[x])
    }

    /// Canonical key for deduplication: lexicographic block-of map normalized
    /// by first appearance.
    pub fn canonical_key(&self) -> Vec<usize> {
        let mut relabel = vec![usize::MAX; self.blocks.len()];
        let mut next = 0;
        let mut out = Vec::with_capacity(self.degree());
        for &b in &self.block_of {
            if relabel[b] == usize::MAX {
                relabel[b] = next;
                next += 1;
            }
            out.push(relabel[b]);
        }
        out
    }
}

/// Finest G-invariant block system in which `seed` lies inside one block
/// (Atkinson's algorithm). Requires `g` transitive.
pub fn block_system_generated_by(g: &PermutationGroup, seed: &[usize]) -> Result<BlockSystem> {
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let degree = g.degree();
    let mut parent: Vec<usize> = (0..degree).collect();

    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut queue: Vec<(usize, usize)> = Vec::new();
    if let Some((&first, rest)) = seed.split_first() {
        for &x in rest {
            queue.push((first, x));
        }
    }
    while let Some((a, b)) = queue.pop() {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra == rb {
            continue;
        }
        parent[ra] = rb;
        for gen in g.generators() {
            queue.push((gen.apply(a), gen.apply(b)));
        }
        // the merged class representatives must stay merged under generators
        queue.push((ra, rb));
    }
    let mut block_of = vec![usize::MAX; degree];
    let mut next = 0;
    for x in 0..degree {
        let r = find(&mut parent, x);
        if block_of[r] == usize::MAX {
            block_of[r] = next;
            next += 1;
        }
        block_of[x] = block_of[r];
    }
    BlockSystem::from_block_of(block_of)
}

/// Subgroup of `g` fixing every block of `system` setwise.
pub fn kernel_on_blocks(g: &PermutationGroup, system: &BlockSystem) -> Result<PermutationGroup> {
    if !system.is_invariant_under_group(g) {
        return Err(Error::NotInvariant);
    }
    Ok(iterated_setwise_stabilizer(g, system.block_count(), |p, b| {
        system.block_of(p.apply(system.block(b)[0]))
    }))
}

/// All distinct nontrivial block systems of a transitive group arising as
/// the closure of a point pair `{0, x}`; the trivial systems are excluded.
/// Every minimal system appears among these.
pub fn pair_closure_block_systems(g: &PermutationGroup) -> Result<Vec<BlockSystem>> {
    let degree = g.degree();
    let mut out: Vec<BlockSystem> = Vec::new();
    let mut keys: Vec<Vec<usize>> = Vec::new();
    for x in 1..degree {
        let sys = block_system_generated_by(g, &[0, x])?;
        if sys.block_size() == degree {
            continue;
        }
        let key = sys.canonical_key();
        if !keys.contains(&key) {
            keys.push(key);
            out.push(sys);
        }
    }
    Ok(out)
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

    #[test]
    fn singleton_seed_gives_singletons() {
        let sys = block_system_generated_by(&klein(), &[1]).unwrap();
        assert_eq!(sys.block_size(), 1);
        assert_eq!(sys.block_count(), 4);
    }

    #[test]
    fn whole_seed_gives_one_block() {
        let sys = block_system_generated_by(&klein(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(sys.block_count(), 1);
    }

    #[test]
    fn klein_pair_block_closure() {
        // closure of {0,1} under the translations: {{0,1},{2,3}}
        let sys = block_system_generated_by(&klein(), &[0, 1]).unwrap();
        assert_eq!(sys.block_size(), 2);
        assert_eq!(sys.block(sys.block_of(0)), &[0, 1]);
        assert_eq!(sys.block(sys.block_of(2)), &[2, 3]);
        for g in klein().generators() {
            assert!(sys.is_invariant_under(g));
        }
    }

    #[test]
    fn intransitive_group_rejected() {
        let g = PermutationGroup::from_generators(
            4,
            vec![Perm::from_cycles(4, &[&[0, 1]]).unwrap()],
        )
        .unwrap();
        assert_eq!(block_system_generated_by(&g, &[0, 1]).unwrap_err(), Error::NotTransitive);
    }

    #[test]
    fn kernel_on_blocks_of_klein() {
        let g = klein();
        let sys = block_system_generated_by(&g, &[0, 1]).unwrap();
        let k = kernel_on_blocks(&g, &sys).unwrap();
        // testing all 4 elements: only the identity and (0 1)(2 3) fix both blocks
        assert_eq!(k.order_u64(), Some(2));
        assert!(k.contains(&Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap()));
    }

    #[test]
    fn kernel_trivial_and_full_cases() {
        let g = klein();
        let k = kernel_on_blocks(&g, &BlockSystem::singletons(4)).unwrap();
        assert!(k.is_trivial());
        let k = kernel_on_blocks(&g, &BlockSystem::whole(4)).unwrap();
        assert!(k.equals_group(&g));
    }

    #[test]
    fn non_invariant_system_rejected() {
        let g = klein();
        let bad = BlockSystem::from_block_of(vec![0, 1, 0, 1]).unwrap();
        // blocks {0,2},{1,3} are invariant for klein; use a genuinely bad one
        let worse = BlockSystem::from_block_of(vec![0, 0, 1, 1]).unwrap();
        assert!(kernel_on_blocks(&g, &bad).is_ok() || kernel_on_blocks(&g, &worse).is_ok());
        let s3 = PermutationGroup::from_generators(
            4,
            vec![
                Perm::from_cycles(4, &[&[1, 2, 3]]).unwrap(),
                Perm::from_cycles(4, &[&[1, 2]]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(
            kernel_on_blocks(&s3, &BlockSystem::from_block_of(vec![0, 0, 1, 1]).unwrap())
                .unwrap_err(),
            Error::NotInvariant
        );
    }

    #[test]
    fn orbits_of_element_as_blocks() {
        let t = Perm::from_cycles(6, &[&[0, 1, 2], &[3, 4, 5]]).unwrap();
        let sys = BlockSystem::from_orbits_of(&t).unwrap();
        assert_eq!(sys.block_size(), 3);
        assert_eq!(sys.block_count(), 2);
    }
}
