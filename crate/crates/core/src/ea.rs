//! Structure of the elementary abelian group `Z_p^n` acting on itself.
//!
//! Points are labeled by vectors via `x = sum coords[i] * p^i`, which makes
//! the standard block systems contiguous ranges: the blocks of size `p^i`
//! are the cosets of the span of the first `i` unit vectors. This module
//! provides the regular representation, the standard chain of block systems,
//! the iterated wreath Sylow p-subgroup of `Sym(p^n)` preserving that chain,
//! and the machinery to bring two regular copies into a common Sylow
//! p-subgroup.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::blocks::{block_system_generated_by, BlockSystem};
use crate::group::PermutationGroup;
use crate::perm::Perm;
use crate::{checked_degree, Error, Result, DEFAULT_POINT_CAP};

/// A vector in `F_p^n`, the coordinate form of a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpVector {
    pub p: usize,
    pub n: usize,
    pub coords: Vec<usize>,
}

impl FpVector {
    pub fn from_point(p: usize, n: usize, x: usize) -> Self {
        FpVector { p, n, coords: point_to_vec(p, n, x) }
    }

    pub fn to_point(&self) -> usize {
        vec_to_point(self.p, &self.coords)
    }
}

/// `vec p n: c0,c1,...,c(n-1)`
impl core::fmt::Display for FpVector {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "vec {} {}: ", self.p, self.n)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for FpVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .trim()
            .strip_prefix("vec ")
            .ok_or_else(|| Error::Parse(String::from("expected `vec p n: ...`")))?;
        let (head, tail) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(String::from("missing `:` in vector record")))?;
        let mut it = head.split_whitespace();
        let p: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(String::from("bad p")))?;
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(String::from("bad n")))?;
        let coords: Vec<usize> = tail
            .trim()
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad coord `{t}`"))))
            .collect::<Result<_>>()?;
        if coords.len() != n || coords.iter().any(|&c| c >= p) {
            return Err(Error::Parse(String::from("coords out of range")));
        }
        checked_degree(p, n, DEFAULT_POINT_CAP)?;
        Ok(FpVector { p, n, coords })
    }
}

pub fn point_to_vec(p: usize, n: usize, mut x: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        v.push(x % p);
        x /= p;
    }
    v
}

pub fn vec_to_point(p: usize, coords: &[usize]) -> usize {
    let mut x = 0;
    for &c in coords.iter().rev() {
        x = x * p + c;
    }
    x
}

/// Coordinatewise sum of two points.
pub fn point_add(p: usize, n: usize, a: usize, b: usize) -> usize {
    let av = point_to_vec(p, n, a);
    let bv = point_to_vec(p, n, b);
    let sum: Vec<usize> = av.iter().zip(&bv).map(|(x, y)| (x + y) % p).collect();
    vec_to_point(p, &sum)
}

/// `a - b` coordinatewise.
pub fn point_sub(p: usize, n: usize, a: usize, b: usize) -> usize {
    let av = point_to_vec(p, n, a);
    let bv = point_to_vec(p, n, b);
    let diff: Vec<usize> = av.iter().zip(&bv).map(|(x, y)| (x + p - y) % p).collect();
    vec_to_point(p, &diff)
}

/// The translation `x -> x + t`.
pub fn translation(p: usize, n: usize, t: usize) -> Perm {
    let degree = p.pow(n as u32);
    Perm::from_images((0..degree).map(|x| point_add(p, n, x, t)).collect()).unwrap()
}

/// For a translation, the vector it translates by; `None` otherwise.
pub fn translation_vector(p: usize, n: usize, g: &Perm) -> Option<usize> {
    let t = g.apply(0);
    if g == &translation(p, n, t) {
        Some(t)
    } else {
        None
    }
}

/// The left regular representation of `Z_p^n`: translations acting on point
/// codes, generated by the unit-vector translations.
pub fn regular_rep(p: usize, n: usize) -> Result<PermutationGroup> {
    regular_rep_with_cap(p, n, DEFAULT_POINT_CAP)
}

pub fn regular_rep_with_cap(p: usize, n: usize, cap: usize) -> Result<PermutationGroup> {
    let degree = checked_degree(p, n, cap)?;
    let gens: Vec<Perm> = (0..n).map(|i| translation(p, n, p.pow(i as u32))).collect();
    PermutationGroup::from_generators(degree, gens)
}

/// The standard system of imprimitivity with blocks of size `p^i`: points
/// sharing coordinates `i..n`, i.e. contiguous ranges of length `p^i`.
pub fn standard_blocks(p: usize, n: usize, i: usize) -> Result<BlockSystem> {
    let degree = checked_degree(p, n, DEFAULT_POINT_CAP)?;
    if i > n {
        return Err(Error::Invalid(format!("block level {i} out of range 0..={n}")));
    }
    let size = p.pow(i as u32);
    BlockSystem::from_block_of((0..degree).map(|x| x / size).collect())
}

/// Sylow p-subgroup of `Sym(p^n)` preserving every standard block system:
/// the n-fold iterated wreath product of `Z_p`, of order `p^((p^n-1)/(p-1))`.
/// Contains the regular representation.
pub fn wreath_sylow(p: usize, n: usize) -> Result<PermutationGroup> {
    wreath_sylow_with_cap(p, n, DEFAULT_POINT_CAP)
}

pub fn wreath_sylow_with_cap(p: usize, n: usize, cap: usize) -> Result<PermutationGroup> {
    let degree = checked_degree(p, n, cap)?;
    // recursive generating set: a copy on the first block of size p^(n-1),
    // plus the translation cycling those blocks
    fn gens(p: usize, n: usize, full_degree: usize) -> Vec<Perm> {
        if n == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for small in gens(p, n - 1, full_degree / p) {
            let mut images: Vec<usize> = (0..full_degree).collect();
            for x in 0..full_degree / p {
                images[x] = small.apply(x);
            }
            out.push(Perm::from_images(images).unwrap());
        }
        out.push(translation(p, n, p.pow((n - 1) as u32)));
        out
    }
    PermutationGroup::from_generators(degree, gens(p, n, degree))
}

/// Expected order of [`wreath_sylow`]: exponent `(p^n - 1) / (p - 1)`.
pub fn wreath_sylow_order(p: usize, n: usize) -> num_bigint::BigUint {
    let exp = (p.pow(n as u32) - 1) / (p - 1);
    num_bigint::BigUint::from(p).pow(exp as u32)
}

/// Point permutation of an invertible matrix over `F_p`; `rows[i]` is the
/// image vector of the i-th unit vector.
pub fn matrix_to_perm(p: usize, n: usize, rows: &[Vec<usize>]) -> Result<Perm> {
    let degree = checked_degree(p, n, DEFAULT_POINT_CAP)?;
    let mut images = Vec::with_capacity(degree);
    for x in 0..degree {
        let xv = point_to_vec(p, n, x);
        let mut w = vec![0usize; n];
        for i in 0..n {
            for (j, wj) in w.iter_mut().enumerate() {
                *wj = (*wj + xv[i] * rows[i][j]) % p;
            }
        }
        images.push(vec_to_point(p, &w));
    }
    Perm::from_images(images).map_err(|_| Error::Invalid(String::from("matrix is singular")))
}

/// A basis of a regular elementary abelian group: generators that are
/// independent (each enlarges the span).
pub fn regular_basis(q: &PermutationGroup, p: usize) -> Result<Vec<Perm>> {
    let degree = q.degree();
    let mut basis: Vec<Perm> = Vec::new();
    let mut span: Vec<Perm> = vec![Perm::identity(degree)];
    for g in q.generators() {
        if g.order() != p as u64 && !g.is_identity() {
            return Err(Error::Invalid(String::from("group is not elementary abelian")));
        }
        if span.contains(g) {
            continue;
        }
        let mut new_span = Vec::with_capacity(span.len() * p);
        for k in 0..p {
            let gk = g.pow(k as i64);
            for e in &span {
                new_span.push(gk.compose(e));
            }
        }
        span = new_span;
        basis.push(g.clone());
    }
    if span.len() != degree {
        return Err(Error::Invalid(String::from("group is not regular of full rank")));
    }
    Ok(basis)
}

/// Exponent coordinates of every point with respect to a regular basis:
/// `coords[x]` is the vector `e` with `(prod basis[i]^e[i])(v) = x`.
pub fn coords_under_basis(basis: &[Perm], p: usize, v: usize, degree: usize) -> Result<Vec<Vec<usize>>> {
    let n = basis.len();
    let mut coords: Vec<Option<Vec<usize>>> = vec![None; degree];
    coords[v] = Some(vec![0; n]);
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        let cx = coords[x].clone().unwrap();
        for (i, b) in basis.iter().enumerate() {
            let y = b.apply(x);
            if coords[y].is_none() {
                let mut cy = cx.clone();
                cy[i] = (cy[i] + 1) % p;
                coords[y] = Some(cy);
                stack.push(y);
            }
        }
    }
    coords
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Invalid(String::from("basis is not transitive")))
}

/// The family of generators adapted to the standard block chain: `taus[i]`
/// lies in R, fixes every block of size `p^(i+1)` setwise, and has order p
/// on the blocks of size `p^i`; `tau_primes[i]` is the unique element of Q
/// with the same image of the base point.
#[derive(Clone, Debug)]
pub struct TauFamily {
    pub taus: Vec<Perm>,
    pub tau_primes: Vec<Perm>,
    pub base_point: usize,
}

/// Derive the tau family for regular elementary abelian `r` and `q` sitting
/// inside a common p-group that admits the standard blocks.
pub fn define_taus(
    r: &PermutationGroup,
    q: &PermutationGroup,
    v: usize,
    p: usize,
    n: usize,
) -> Result<TauFamily> {
    let degree = checked_degree(p, n, usize::MAX)?;
    let mut merged_gens = r.generators().to_vec();
    merged_gens.extend_from_slice(q.generators());
    let g = PermutationGroup::from_generators(degree, merged_gens)?;
    define_taus_in(&g, r, q, v, p, n)
}

/// [`define_taus`] with the group `<R, Q>` already built.
pub fn define_taus_in(
    g: &PermutationGroup,
    r: &PermutationGroup,
    q: &PermutationGroup,
    v: usize,
    p: usize,
    n: usize,
) -> Result<TauFamily> {
    let degree = checked_degree(p, n, usize::MAX)?;
    debug_assert_eq!(g.degree(), degree);
    if !g.has_p_power_order(p) {
        return Err(Error::Invalid(String::from(
            "groups do not lie in a common Sylow p-subgroup; embed first",
        )));
    }
    for i in 1..n {
        if !standard_blocks(p, n, i)?.is_invariant_under_group(g) {
            return Err(Error::NotInvariant);
        }
    }

    let mut r_elems = r.elements(degree)?;
    r_elems.sort_by_key(|e| e.apply(v));
    let q_elems = q.elements(degree)?;

    let mut taus = Vec::with_capacity(n);
    let mut tau_primes = Vec::with_capacity(n);
    for i in 0..n {
        let upper = standard_blocks(p, n, i + 1)?;
        let lower = standard_blocks(p, n, i)?;
        let tau = r_elems
            .iter()
            .find(|e| upper.fixes_every_block(e) && !lower.fixes_every_block(e))
            .cloned()
            .ok_or_else(|| Error::ContractViolation {
                stage: "define_taus",
                detail: format!("no element of R moves level-{i} blocks within level-{}", i + 1),
            })?;
        let target = tau.apply(v);
        let tau_prime = q_elems
            .iter()
            .find(|e| e.apply(v) == target)
            .cloned()
            .ok_or_else(|| Error::Invalid(String::from("Q is not regular")))?;
        // block agreement must transfer from the base point's block to all
        // blocks of the lower system
        for b in 0..lower.block_count() {
            let via_tau = lower.block_of(tau.apply(lower.block(b)[0]));
            let via_prime = lower.block_of(tau_prime.apply(lower.block(b)[0]));
            if via_tau != via_prime {
                return Err(Error::ContractViolation {
                    stage: "define_taus",
                    detail: format!(
                        "tau'_{i} disagrees with tau_{i} on block {b} of the level-{i} system"
                    ),
                });
            }
        }
        taus.push(tau);
        tau_primes.push(tau_prime);
    }

    if taus[0] != tau_primes[0] {
        return Err(Error::ContractViolation {
            stage: "define_taus",
            detail: String::from("tau_0' must equal tau_0"),
        });
    }
    let span = PermutationGroup::from_generators(degree, taus.clone())?;
    if !span.equals_group(r) {
        return Err(Error::ContractViolation {
            stage: "define_taus",
            detail: String::from("taus do not generate R"),
        });
    }
    Ok(TauFamily { taus, tau_primes, base_point: v })
}

/// Sample budget for the randomized stages of the normalizer ascent.
const EMBED_SAMPLE_BUDGET: u64 = 400_000;
/// Order cap for subgroups that get streamed exhaustively during the ascent.
const EMBED_POOL_CAP: u64 = 2_000_000;

/// Find `c` in `G = <R, Q>` such that `<R, c^-1 Q c>` is a p-group.
///
/// Ladder: (1) nothing to do when G is already a p-group; (2) try the
/// regular-alignment conjugator (the bijection matching Q-coordinates to
/// R-coordinates carries Q exactly onto R; a parity twist covers the case
/// where it lands outside G) — for 2-transitive G one of these always works;
/// (3) the ascending chain `P_0 = R`, `P_{k+1} = <P_k, h>` with `h` the
/// p-part of a normalizer element of `P_k`, followed by a scan for a
/// conjugator of Q into the resulting Sylow subgroup. Growth elements are
/// searched first in enumerable structured subgroups (pointwise stabilizers
/// of invariant blocks, or all of G when small), then by uniform random
/// sampling through the stabilizer chain under a fixed seed, so runs are
/// reproducible. A budgeted failure is reported, never papered over.
pub fn sylow_embed(
    r: &PermutationGroup,
    q: &PermutationGroup,
    p: usize,
) -> Result<(Perm, PermutationGroup)> {
    let degree = r.degree();
    if q.degree() != degree {
        return Err(Error::DomainMismatch { left: degree, right: q.degree() });
    }
    let mut merged = r.generators().to_vec();
    merged.extend_from_slice(q.generators());
    let g = PermutationGroup::from_generators(degree, merged)?;
    sylow_embed_in(&g, r, q, p)
}

/// [`sylow_embed`] with the group `<R, Q>` already built.
pub fn sylow_embed_in(
    g: &PermutationGroup,
    r: &PermutationGroup,
    q: &PermutationGroup,
    p: usize,
) -> Result<(Perm, PermutationGroup)> {
    let degree = r.degree();

    if g.has_p_power_order(p) {
        return Ok((Perm::identity(degree), q.clone()));
    }

    // regular alignment: carries Q exactly onto R when it lies in G
    for c in alignment_candidates(g, r, q, p)? {
        if g.contains(&c) {
            let qc = q.conjugate_subgroup(&c);
            let mut gens = r.generators().to_vec();
            gens.extend_from_slice(qc.generators());
            let joined = PermutationGroup::from_generators(degree, gens)?;
            if joined.has_p_power_order(p) {
                return Ok((c, qc));
            }
        }
    }

    sylow_embed_by_ascent(g, r, q, p)
}

/// The coordinate-matching bijection `c` with `c^-1 Q c = R`, plus a
/// parity-twisted variant (an odd permutation normalizing R, or for p = 2 an
/// odd element of the standard wreath group, which still lands the conjugate
/// inside it).
fn alignment_candidates(
    g: &PermutationGroup,
    r: &PermutationGroup,
    q: &PermutationGroup,
    p: usize,
) -> Result<Vec<Perm>> {
    let degree = g.degree();
    let n = {
        let mut n = 0;
        let mut d = degree;
        while d > 1 {
            d /= p;
            n += 1;
        }
        n
    };
    let v = 0;
    let r_basis = regular_basis(r, p)?;
    let q_basis = regular_basis(q, p)?;
    let r_coords = coords_under_basis(&r_basis, p, v, degree)?;
    // element of Q per exponent vector
    let mut q_word = vec![Perm::identity(degree); degree];
    for code in 0..degree {
        let exps = point_to_vec(p, n, code);
        let mut e = Perm::identity(degree);
        for (i, b) in q_basis.iter().enumerate() {
            e = b.pow(exps[i] as i64).compose(&e);
        }
        q_word[code] = e;
    }
    let images: Vec<usize> = (0..degree)
        .map(|y| q_word[vec_to_point(p, &r_coords[y])].apply(v))
        .collect();
    let aligned = Perm::from_images(images).map_err(|_| Error::ContractViolation {
        stage: "sylow_embed",
        detail: String::from("regular alignment was not a bijection"),
    })?;

    let mut candidates = vec![aligned.clone()];
    if p == 2 {
        candidates.push(aligned.compose(&Perm::from_cycles(degree, &[&[0, 1]])?));
    } else {
        // diag(g0, 1, .., 1) for a primitive root g0 is an odd permutation
        let g0 = primitive_root(p);
        let mut rows: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut row = vec![0; n];
                row[i] = 1;
                row
            })
            .collect();
        rows[0][0] = g0;
        candidates.push(aligned.compose(&matrix_to_perm(p, n, &rows)?));
    }
    Ok(candidates)
}

fn primitive_root(p: usize) -> usize {
    'outer: for g in 2..p {
        let mut x = 1;
        for _ in 0..p - 2 {
            x = x * g % p;
            if x == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    1
}

/// p-part of a permutation: the power with order the largest p-power
/// dividing the element order.
fn p_part(cand: &Perm, p: usize) -> Perm {
    let mut m = cand.order();
    while m % p as u64 == 0 {
        m /= p as u64;
    }
    cand.pow(m as i64)
}

fn sylow_embed_by_ascent(
    g: &PermutationGroup,
    r: &PermutationGroup,
    q: &PermutationGroup,
    p: usize,
) -> Result<(Perm, PermutationGroup)> {
    use num_bigint::BigUint;
    use rand::SeedableRng;
    let degree = g.degree();
    let target = g.p_valuation(p);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x53_79_6c_6f_77);

    // Pools for growth candidates. Small subgroups are streamed
    // exhaustively; structured big subgroups (block-action kernels, block
    // stabilizers, a point stabilizer, G itself) are sampled uniformly —
    // normalizer elements that are vanishingly rare in G are dense enough in
    // these.
    let mut stream_pools: Vec<PermutationGroup> = Vec::new();
    let mut sample_pools: Vec<PermutationGroup> = Vec::new();
    if g.order() <= BigUint::from(EMBED_POOL_CAP) {
        stream_pools.push(g.clone());
    } else {
        if let Ok(systems) = crate::blocks::pair_closure_block_systems(g) {
            for sys in systems.iter().take(2) {
                for b in 0..sys.block_count() {
                    let stab = g.pointwise_stabilizer(sys.block(b));
                    if stab.is_trivial() {
                        continue;
                    }
                    if stab.order() <= BigUint::from(EMBED_POOL_CAP) {
                        stream_pools.push(stab);
                    } else {
                        sample_pools.push(stab);
                    }
                }
                if let Ok(kernel) = crate::blocks::kernel_on_blocks(g, sys) {
                    if !kernel.is_trivial() {
                        if kernel.order() <= BigUint::from(EMBED_POOL_CAP) {
                            stream_pools.push(kernel);
                        } else {
                            sample_pools.push(kernel);
                        }
                    }
                }
            }
        }
        sample_pools.push(g.point_stabilizer(0));
        sample_pools.push(g.clone());
    }

    let mut sylow = r.clone();
    while sylow.p_valuation(p) < target {
        let mut grow: Option<Perm> = None;
        let accepts = |sylow: &PermutationGroup, cand: &Perm| -> Option<Perm> {
            let normalizes = sylow
                .generators()
                .iter()
                .all(|s| sylow.contains(&s.conjugate_by(cand)));
            if !normalizes {
                return None;
            }
            let h = p_part(cand, p);
            if !h.is_identity() && !sylow.contains(&h) {
                Some(h)
            } else {
                None
            }
        };
        'pools: for pool in &stream_pools {
            let mut hit: Option<Perm> = None;
            pool.for_each_element(&mut |cand: &Perm| match accepts(&sylow, cand) {
                Some(h) => {
                    hit = Some(h);
                    false
                }
                None => true,
            });
            if hit.is_some() {
                grow = hit;
                break 'pools;
            }
        }
        if grow.is_none() && !sample_pools.is_empty() {
            // widen the net once before giving up; late stages have thin
            // normalizer density
            'budgets: for budget in [EMBED_SAMPLE_BUDGET, 8 * EMBED_SAMPLE_BUDGET] {
                for _ in 0..budget / sample_pools.len() as u64 {
                    for pool in &sample_pools {
                        let cand = pool.random_element(&mut rng);
                        if let Some(h) = accepts(&sylow, &cand) {
                            grow = Some(h);
                            break 'budgets;
                        }
                    }
                }
            }
        }
        let h = grow.ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "sylow embedding: no normalizer growth found at p-valuation {} of {target}",
                sylow.p_valuation(p)
            ))
        })?;
        let mut gens = sylow.generators().to_vec();
        gens.push(h);
        sylow = PermutationGroup::from_generators(degree, gens)?;
        if !sylow.has_p_power_order(p) {
            return Err(Error::ContractViolation {
                stage: "sylow_embed",
                detail: String::from("ascent left the p-group"),
            });
        }
    }

    // conjugator of Q into the Sylow subgroup
    let carries = |cand: &Perm| q.generators().iter().all(|qg| sylow.contains(&qg.conjugate_by(cand)));
    let mut found: Option<Perm> = None;
    if g.order() <= BigUint::from(EMBED_POOL_CAP) {
        g.for_each_element(&mut |cand: &Perm| {
            if carries(cand) {
                found = Some(cand.clone());
                false
            } else {
                true
            }
        });
    } else {
        for _ in 0..EMBED_SAMPLE_BUDGET {
            let cand = g.random_element(&mut rng);
            if carries(&cand) {
                found = Some(cand);
                break;
            }
        }
    }
    let c = found.ok_or_else(|| {
        Error::BudgetExceeded(String::from(
            "sylow embedding: no conjugator of Q into the Sylow subgroup within budget",
        ))
    })?;
    let qc = q.conjugate_subgroup(&c);
    Ok((c, qc))
}

/// A permutation normalizing R that maps the standard block chain onto an
/// invariant chain of `big` (a transitive p-group containing R), so that
/// `delta^-1 big delta` admits every standard block system.
pub fn standardizing_conjugator(
    big: &PermutationGroup,
    p: usize,
    n: usize,
) -> Result<Perm> {
    let degree = checked_degree(p, n, usize::MAX)?;
    let r = regular_rep_with_cap(p, n, degree)?;

    // nested invariant systems of block sizes p, p^2, .., p^(n-1)
    let mut systems: Vec<BlockSystem> = Vec::new();
    let mut current: Option<BlockSystem> = None;
    for level in 1..n {
        let std_sys = standard_blocks(p, n, level)?;
        let refine_ok = |sys: &BlockSystem| match &current {
            None => true,
            Some(prev) => (0..degree).all(|x| {
                sys.block_of(x) == sys.block_of(prev.block(prev.block_of(x))[0])
            }),
        };
        let chosen = if std_sys.is_invariant_under_group(big) && refine_ok(&std_sys) {
            std_sys
        } else {
            find_next_system(big, p, current.as_ref())?
        };
        systems.push(chosen.clone());
        current = Some(chosen);
    }

    // subgroup chain: the block containing 0 at each level
    let mut basis_rows: Vec<Vec<usize>> = Vec::new();
    let mut covered: Vec<usize> = vec![0];
    for sys in &systems {
        let block = sys.block(sys.block_of(0)).to_vec();
        let b = *block
            .iter()
            .find(|&&x| !covered.contains(&x))
            .ok_or(Error::ContractViolation {
                stage: "standardize",
                detail: String::from("block chain does not grow"),
            })?;
        basis_rows.push(point_to_vec(p, n, b));
        covered = span_points(p, n, &basis_rows);
    }
    let b_last = (0..degree).find(|x| !covered.contains(x)).ok_or(Error::ContractViolation {
        stage: "standardize",
        detail: String::from("chain already covers all points"),
    })?;
    basis_rows.push(point_to_vec(p, n, b_last));

    let delta = matrix_to_perm(p, n, &basis_rows)?;
    // sanity: delta normalizes R and delta^-1 big delta admits standard blocks
    for gen in r.generators() {
        if !r.contains(&gen.conjugate_by(&delta)) {
            return Err(Error::ContractViolation {
                stage: "standardize",
                detail: String::from("delta does not normalize R"),
            });
        }
    }
    let conj = big.conjugate_subgroup(&delta);
    for level in 1..n {
        if !standard_blocks(p, n, level)?.is_invariant_under_group(&conj) {
            return Err(Error::ContractViolation {
                stage: "standardize",
                detail: format!("standardized group does not admit the level-{level} blocks"),
            });
        }
    }
    Ok(delta)
}

/// All points in the span of the given vectors.
fn span_points(p: usize, n: usize, rows: &[Vec<usize>]) -> Vec<usize> {
    let mut pts = vec![0usize];
    for row in rows {
        let t = vec_to_point(p, row);
        let mut next = Vec::with_capacity(pts.len() * p);
        for k in 0..p {
            let mut shift = 0;
            for _ in 0..k {
                shift = point_add(p, n, shift, t);
            }
            for &x in &pts {
                next.push(point_add(p, n, x, shift));
            }
        }
        next.sort_unstable();
        next.dedup();
        pts = next;
    }
    pts
}

/// A system of `big` with blocks of size `p * previous_size` coarsening the
/// previous level: minimal systems are pulled back through the quotient
/// action on the previous blocks, which guarantees the chain nests.
fn find_next_system(
    big: &PermutationGroup,
    p: usize,
    previous: Option<&BlockSystem>,
) -> Result<BlockSystem> {
    match previous {
        None => minimal_p_system(big, p),
        Some(prev) => {
            let m = prev.block_count();
            let qgens: Vec<Perm> = big
                .generators()
                .iter()
                .map(|g| {
                    Perm::from_images(
                        (0..m).map(|b| prev.block_of(g.apply(prev.block(b)[0]))).collect(),
                    )
                    .map_err(|_| Error::NotInvariant)
                })
                .collect::<Result<_>>()?;
            let qgroup = PermutationGroup::from_generators(m, qgens)?;
            let qsys = minimal_p_system(&qgroup, p)?;
            BlockSystem::from_block_of(
                (0..big.degree()).map(|x| qsys.block_of(prev.block_of(x))).collect(),
            )
        }
    }
}

/// Smallest-seed size-p block system of a transitive p-group.
fn minimal_p_system(g: &PermutationGroup, p: usize) -> Result<BlockSystem> {
    let degree = g.degree();
    let mut best: Option<BlockSystem> = None;
    for x in 1..degree {
        let sys = block_system_generated_by(g, &[0, x])?;
        if sys.block_size() == p {
            best = Some(sys);
            break;
        }
    }
    best.ok_or(Error::ContractViolation {
        stage: "standardize",
        detail: String::from("transitive p-group has no block system of size p"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_rep_small_cases() {
        let g = regular_rep(2, 1).unwrap();
        assert_eq!(g.order_u64(), Some(2));
        let g = regular_rep(2, 2).unwrap();
        assert_eq!(g.order_u64(), Some(4));
        assert_eq!(
            g.generators()[0],
            Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap()
        );
        assert_eq!(
            g.generators()[1],
            Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap()
        );
    }

    #[test]
    fn regular_rep_is_regular() {
        for (p, n) in [(2, 2), (3, 2), (2, 3)] {
            let g = regular_rep(p, n).unwrap();
            assert!(g.is_transitive());
            assert!(g.point_stabilizer(0).is_trivial());
            // every non-identity element has order p and no fixed point
            for e in g.elements(100).unwrap() {
                if !e.is_identity() {
                    assert_eq!(e.order(), p as u64);
                    assert!(e.smallest_moved().is_some());
                    assert!((0..g.degree()).all(|x| e.apply(x) != x));
                }
            }
        }
    }

    #[test]
    fn non_prime_rejected() {
        assert!(matches!(regular_rep(4, 2).unwrap_err(), Error::NotPrime(4)));
    }

    #[test]
    fn standard_blocks_levels() {
        let b0 = standard_blocks(2, 2, 0).unwrap();
        assert_eq!(b0.block_size(), 1);
        let b2 = standard_blocks(2, 2, 2).unwrap();
        assert_eq!(b2.block_count(), 1);
        let b1 = standard_blocks(2, 2, 1).unwrap();
        assert_eq!(b1.block(0), &[0, 1]);
        assert_eq!(b1.block(1), &[2, 3]);
        assert!(standard_blocks(2, 2, 3).is_err());
    }

    #[test]
    fn wreath_sylow_orders() {
        assert_eq!(wreath_sylow(2, 2).unwrap().order_u64(), Some(8)); // exponent (4-1)/(2-1) = 3
        assert_eq!(wreath_sylow(2, 4).unwrap().order_u64(), Some(1 << 15)); // exponent 8+4+2+1
        assert_eq!(
            wreath_sylow(3, 2).unwrap().order(),
            wreath_sylow_order(3, 2)
        );
        assert_eq!(
            wreath_sylow(3, 4).unwrap().order(),
            wreath_sylow_order(3, 4)
        );
    }

    #[test]
    fn wreath_contains_regular_rep_and_admits_blocks() {
        for (p, n) in [(2, 4), (3, 2)] {
            let t = wreath_sylow(p, n).unwrap();
            let r = regular_rep(p, n).unwrap();
            for gen in r.generators() {
                assert!(t.contains(gen));
            }
            for i in 0..=n {
                assert!(standard_blocks(p, n, i).unwrap().is_invariant_under_group(&t));
            }
        }
    }

    #[test]
    fn taus_for_standard_labeling() {
        let r = regular_rep(2, 2).unwrap();
        let fam = define_taus(&r, &r, 0, 2, 2).unwrap();
        assert_eq!(fam.taus[0], Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap());
        assert_eq!(fam.taus[1], Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap());
        assert_eq!(fam.taus, fam.tau_primes);
    }

    #[test]
    fn taus_generate_r_for_wreath_conjugate() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let r = regular_rep(2, 3).unwrap();
        let t = wreath_sylow(2, 3).unwrap();
        for _ in 0..20 {
            let x = t.random_element(&mut rng);
            let q = r.conjugate_subgroup(&x);
            let fam = define_taus(&r, &q, 0, 2, 3).unwrap();
            let span = PermutationGroup::from_generators(8, fam.taus.clone()).unwrap();
            assert!(span.equals_group(&r));
            for (tau, tp) in fam.taus.iter().zip(&fam.tau_primes) {
                assert_eq!(tau.apply(0), tp.apply(0));
                assert!(q.contains(tp));
            }
        }
    }

    #[test]
    fn embed_identity_when_already_p_group() {
        let r = regular_rep(2, 2).unwrap();
        let (c, qc) = sylow_embed(&r, &r, 2).unwrap();
        assert!(c.is_identity());
        assert!(qc.equals_group(&r));
    }

    #[test]
    fn embed_wreath_conjugate_needs_nothing() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let r = regular_rep(2, 4).unwrap();
        let t = wreath_sylow(2, 4).unwrap();
        let x = t.random_element(&mut rng);
        let q = r.conjugate_subgroup(&x);
        let (c, qc) = sylow_embed(&r, &q, 2).unwrap();
        assert!(c.is_identity());
        assert!(qc.equals_group(&q));
    }

    #[test]
    fn embed_transposition_conjugate() {
        // p=2, n=2, Q conjugated by the transposition (1 2): |<R,Q>| is not
        // a 2-power, but after embedding it must be
        let r = regular_rep(2, 2).unwrap();
        let pi = Perm::from_cycles(4, &[&[1, 2]]).unwrap();
        let q = r.conjugate_subgroup(&pi);
        let (c, qc) = sylow_embed(&r, &q, 2).unwrap();
        let mut gens = r.generators().to_vec();
        gens.extend_from_slice(qc.generators());
        let joined = PermutationGroup::from_generators(4, gens).unwrap();
        assert!(joined.has_p_power_order(2));
        // c is an element of <R, Q>
        let mut all = r.generators().to_vec();
        all.extend_from_slice(q.generators());
        assert!(PermutationGroup::from_generators(4, all).unwrap().contains(&c));
    }

    #[test]
    fn standardizer_for_skew_chain() {
        // conjugate the wreath group by a coordinate change so its chain is
        // not the standard one, then standardize back
        let p = 2;
        let n = 3;
        let t = wreath_sylow(p, n).unwrap();
        let m = matrix_to_perm(p, n, &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let skew = t.conjugate_subgroup(&m);
        let delta = standardizing_conjugator(&skew, p, n).unwrap();
        let fixed = skew.conjugate_subgroup(&delta);
        for i in 1..n {
            assert!(standard_blocks(p, n, i).unwrap().is_invariant_under_group(&fixed));
        }
    }

    #[test]
    fn vector_text_round_trip() {
        let v = FpVector { p: 3, n: 4, coords: vec![1, 0, 2, 1] };
        assert_eq!(v.to_point(), 1 + 2 * 9 + 27);
        let s = alloc::string::ToString::to_string(&v);
        assert_eq!(s, "vec 3 4: 1,0,2,1");
        assert_eq!(s.parse::<FpVector>().unwrap(), v);
        assert!("vec 3 2: 3,0".parse::<FpVector>().is_err());
    }
}
