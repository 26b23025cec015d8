//! Census harnesses checking the isomorphism-vs-automorphism signature of
//! Cayley digraphs, the per-graph regular-subgroup criterion, and the
//! conjugation campaigns.
//!
//! Two independent tests validate each other: counting isomorphism classes
//! of all Cayley digraphs against orbits of connection sets under the point
//! group of `GL(n, p)`, and the per-graph check that the automorphism group
//! has a single conjugacy class of regular elementary abelian subgroups.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cayley::{build_cayley, CayleyDigraph, ConnectionSet};
use crate::conjugator::{conjugate_full, Certificate, StepKind};
use crate::ea::{matrix_to_perm, regular_rep, wreath_sylow};
use crate::group::PermutationGroup;
use crate::perm::Perm;
use crate::two_closure::two_closure;
use crate::{checked_degree, Error, Result};

/// `|GL(n, p)| = prod_i (p^n - p^i)`.
pub fn gl_order(p: usize, n: usize) -> BigUint {
    let pn = BigUint::from(p).pow(n as u32);
    let mut ord = BigUint::from(1u32);
    for i in 0..n {
        ord *= &pn - BigUint::from(p).pow(i as u32);
    }
    ord
}

/// Enumerate all invertible matrices (rows are basis images). Errors when
/// the count exceeds `cap`.
pub fn gl_matrices(p: usize, n: usize, cap: u64) -> Result<Vec<Vec<Vec<usize>>>> {
    if gl_order(p, n) > BigUint::from(cap) {
        return Err(Error::BudgetExceeded(format!(
            "|GL({n},{p})| = {} exceeds cap {cap}",
            gl_order(p, n)
        )));
    }
    let degree = p.pow(n as u32);
    let all_vecs: Vec<Vec<usize>> = (0..degree).map(|x| crate::ea::point_to_vec(p, n, x)).collect();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    fn span_codes(p: usize, rows: &[Vec<usize>]) -> BTreeSet<usize> {
        let n = rows.first().map_or(0, Vec::len);
        let mut pts = BTreeSet::new();
        pts.insert(0usize);
        for row in rows {
            let mut next = pts.clone();
            for &x in &pts {
                let xv = crate::ea::point_to_vec(p, n, x);
                for k in 1..p {
                    let y: Vec<usize> =
                        xv.iter().zip(row).map(|(a, b)| (a + k * b) % p).collect();
                    next.insert(crate::ea::vec_to_point(p, &y));
                }
            }
            // close under repeated addition
            loop {
                let mut grew = false;
                let cur: Vec<usize> = next.iter().copied().collect();
                for &x in &cur {
                    let xv = crate::ea::point_to_vec(p, n, x);
                    for &y in &cur {
                        let yv = crate::ea::point_to_vec(p, n, y);
                        let s: Vec<usize> = xv.iter().zip(&yv).map(|(a, b)| (a + b) % p).collect();
                        if next.insert(crate::ea::vec_to_point(p, &s)) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            pts = next;
        }
        pts
    }
    fn rec(
        p: usize,
        n: usize,
        all_vecs: &[Vec<usize>],
        rows: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if rows.len() == n {
            out.push(rows.clone());
            return;
        }
        let sp = span_codes(p, rows);
        for (code, v) in all_vecs.iter().enumerate() {
            if !sp.contains(&code) {
                rows.push(v.clone());
                rec(p, n, all_vecs, rows, out);
                rows.pop();
            }
        }
    }
    rec(p, n, &all_vecs, &mut rows, &mut out);
    Ok(out)
}

/// All automorphisms of `Z_p^n` realized as point permutations; the count is
/// `|GL(n, p)|`.
pub fn aut_group_of_r(p: usize, n: usize, cap: u64) -> Result<Vec<Perm>> {
    let mats = gl_matrices(p, n, cap)?;
    mats.iter().map(|m| matrix_to_perm(p, n, m)).collect()
}

/// A small generating set of the point group of `GL(n, p)`, verified to
/// generate the full group by comparing stabilizer-chain order with the
/// closed-form order.
pub fn gl_generating_perms(p: usize, n: usize) -> Result<Vec<Perm>> {
    let degree = checked_degree(p, n, usize::MAX)?;
    let ident = |n: usize| -> Vec<Vec<usize>> {
        (0..n)
            .map(|i| {
                let mut row = vec![0; n];
                row[i] = 1;
                row
            })
            .collect()
    };
    let mut gens: Vec<Perm> = Vec::new();
    if n == 1 {
        if p > 2 {
            let mut m = ident(1);
            m[0][0] = primitive_root(p);
            gens.push(matrix_to_perm(p, n, &m)?);
        }
    } else {
        // transvection e0 -> e0 + e1
        let mut t = ident(n);
        t[0][1] = 1;
        gens.push(matrix_to_perm(p, n, &t)?);
        // basis cycle e_i -> e_{i+1}
        let mut c = vec![vec![0; n]; n];
        for i in 0..n {
            c[i][(i + 1) % n] = 1;
        }
        gens.push(matrix_to_perm(p, n, &c)?);
        if p > 2 {
            let mut d = ident(n);
            d[0][0] = primitive_root(p);
            gens.push(matrix_to_perm(p, n, &d)?);
        }
    }
    let g = PermutationGroup::from_generators(degree, gens.clone())?;
    if g.order() != gl_order(p, n) {
        return Err(Error::ContractViolation {
            stage: "gl_generators",
            detail: String::from("generator set does not generate the full linear group"),
        });
    }
    Ok(gens)
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

/// Orbit count of the linear group acting on all subsets, by the orbit
/// counting lemma: average of `2^(cycles on points)` over all matrices.
pub fn gl_orbit_count_burnside(p: usize, n: usize) -> Result<u128> {
    let perms = aut_group_of_r(p, n, 100_000)?;
    let mut total: BigUint = BigUint::from(0u32);
    for g in &perms {
        total += BigUint::from(2u32).pow(g.cycle_lengths().len() as u32);
    }
    let count = BigUint::from(perms.len());
    if &total % &count != BigUint::from(0u32) {
        return Err(Error::ContractViolation {
            stage: "burnside",
            detail: String::from("fixed-set total is not divisible by the group order"),
        });
    }
    u128::try_from(total / count).map_err(|_| Error::Invalid(String::from("orbit count overflow")))
}

/// Cache hook for canonical forms keyed by connection-set mask.
pub trait CanonCache {
    fn get(&mut self, mask: u128) -> Option<Vec<u8>>;
    fn put(&mut self, mask: u128, form: &[u8]);
}

/// Per-size census tallies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeLine {
    pub size: usize,
    pub orbits: usize,
    pub iso_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CensusMode {
    Exhaustive,
    Sampled { trials: usize },
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub p: usize,
    pub n: usize,
    pub mode: CensusMode,
    pub seed: u64,
    pub verified: bool,
    pub lines: Vec<SizeLine>,
    pub orbit_total: usize,
    pub iso_total: usize,
    /// closed-form orbit count, cross-checked in exhaustive mode
    pub burnside: Option<u128>,
    /// equality of iso classes and orbits (per size and total); in sampled
    /// mode, absence of counterexamples in the sample
    pub dci_holds: bool,
    pub failures: Vec<String>,
    /// per-graph regular-subgroup criterion tallies (pass, fail, inconclusive)
    pub babai: Option<(usize, usize, usize)>,
}

/// Exhaustive census over all `2^(p^n)` connection sets.
///
/// Orbits are computed by union-find over set masks under generators of the
/// linear group; isomorphism classes by canonical forms of one digraph per
/// orbit (applying an automorphism to the connection set never changes the
/// isomorphism type, so classes are unions of orbits). With `verify`, the
/// closed-form orbit count is checked, automorphism groups are checked to be
/// 2-closed, and on at most 8 points the per-graph criterion runs for every
/// set and the full iso/orbit partitions are compared element by element.
pub fn exhaustive_census(
    p: usize,
    n: usize,
    verify: bool,
    cache: Option<&mut dyn CanonCache>,
) -> Result<CensusReport> {
    let degree = checked_degree(p, n, crate::DEFAULT_POINT_CAP)?;
    if degree > 16 {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive census over 2^{degree} sets is out of budget; use sampling"
        )));
    }
    let total: usize = 1 << degree;
    let gl_gens = gl_generating_perms(p, n)?;

    // orbits of masks under the linear group
    let mut parent: Vec<u32> = (0..total as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for mask in 0..total {
        for g in &gl_gens {
            let image = apply_perm_to_mask(mask as u128, g) as usize;
            let (a, b) = (find(&mut parent, mask as u32), find(&mut parent, image as u32));
            if a != b {
                parent[a as usize] = b;
            }
        }
    }
    let mut rep_of: Vec<u32> = vec![u32::MAX; total];
    let mut reps: Vec<u32> = Vec::new();
    for mask in 0..total as u32 {
        let r = find(&mut parent, mask);
        if rep_of[r as usize] == u32::MAX {
            rep_of[r as usize] = mask; // first-seen mask is minimal
            reps.push(mask);
        }
    }

    let mut cache = cache;
    let mut failures: Vec<String> = Vec::new();
    let mut canon_of_rep: Vec<(u32, Vec<u8>)> = Vec::with_capacity(reps.len());
    for &rep in &reps {
        let set = ConnectionSet::from_mask(p, n, rep as u128)?;
        let form = match cache.as_mut().and_then(|c| c.get(rep as u128)) {
            Some(f) => f,
            None => {
                let d = build_cayley(set);
                let f = d.canonical_form();
                if verify {
                    verify_aut_invariants(&d, &mut failures);
                }
                if let Some(c) = cache.as_mut() {
                    c.put(rep as u128, &f);
                }
                f
            }
        };
        canon_of_rep.push((rep, form));
    }

    // per-size tallies
    let mut lines = Vec::new();
    let mut orbit_total = 0;
    let mut iso_total = 0;
    for size in 0..=degree {
        let mut orbit_count = 0;
        let mut forms: BTreeSet<&[u8]> = BTreeSet::new();
        for (rep, form) in &canon_of_rep {
            if (*rep as u128).count_ones() as usize == size {
                orbit_count += 1;
                forms.insert(form.as_slice());
            }
        }
        let iso = forms.len();
        orbit_total += orbit_count;
        iso_total += iso;
        lines.push(SizeLine { size, orbits: orbit_count, iso_classes: iso });
    }
    let mut dci_holds = lines.iter().all(|l| l.orbits == l.iso_classes);

    let burnside = if verify {
        let b = gl_orbit_count_burnside(p, n)?;
        if b != orbit_total as u128 {
            failures.push(format!(
                "orbit-count mismatch: closed form {b}, direct enumeration {orbit_total}"
            ));
            dci_holds = false;
        }
        Some(b)
    } else {
        None
    };

    // small degrees: per-set criterion and full partition agreement
    let babai = if verify && degree <= 8 {
        let mut pass = 0;
        let mut fail = 0;
        let mut inconclusive = 0;
        let mut canon_of_mask: Vec<Vec<u8>> = Vec::with_capacity(total);
        for mask in 0..total {
            let d = build_cayley(ConnectionSet::from_mask(p, n, mask as u128)?);
            canon_of_mask.push(d.canonical_form());
            match babai_check(&d, 60_000)? {
                BabaiOutcome::Pass { .. } => pass += 1,
                BabaiOutcome::Fail { detail } => {
                    fail += 1;
                    failures.push(format!("criterion failed for mask {mask}: {detail}"));
                }
                BabaiOutcome::Inconclusive { reason } => {
                    inconclusive += 1;
                    failures.push(format!("criterion inconclusive for mask {mask}: {reason}"));
                }
            }
        }
        // iso partition must equal the orbit partition, set by set
        for mask in 0..total as u32 {
            let rep = rep_of[find(&mut parent, mask) as usize];
            let rep_form = &canon_of_rep.iter().find(|(r, _)| *r == rep).unwrap().1;
            if &canon_of_mask[mask as usize] != rep_form {
                failures.push(format!("mask {mask} not isomorphic to its orbit representative"));
                dci_holds = false;
            }
            // two orbits sharing a canonical form would break the signature;
            // covered by the per-size counts above
        }
        if fail > 0 {
            dci_holds = false;
        }
        Some((pass, fail, inconclusive))
    } else {
        None
    };

    Ok(CensusReport {
        p,
        n,
        mode: CensusMode::Exhaustive,
        seed: 0,
        verified: verify,
        lines,
        orbit_total,
        iso_total,
        burnside,
        dci_holds: dci_holds && failures.is_empty(),
        failures,
        babai,
    })
}

fn verify_aut_invariants(d: &CayleyDigraph, failures: &mut Vec<String>) {
    let aut = d.automorphism_group();
    let r = regular_rep(d.p, d.n).expect("valid parameters");
    for t in r.generators() {
        if !aut.contains(t) {
            failures.push(format!(
                "translations missing from the automorphism group (set {:?})",
                d.connection_set().members()
            ));
            return;
        }
    }
    match two_closure(&aut) {
        Ok(closure) => {
            if !closure.equals_group(&aut) {
                failures.push(format!(
                    "automorphism group is not 2-closed (set {:?})",
                    d.connection_set().members()
                ));
            }
        }
        Err(e) => failures.push(format!("2-closure check failed: {e}")),
    }
}

fn apply_perm_to_mask(mask: u128, g: &Perm) -> u128 {
    let mut out = 0u128;
    for x in 0..g.degree() {
        if mask >> x & 1 == 1 {
            out |= 1 << g.apply(x);
        }
    }
    out
}

/// Sampled census: stratified uniform sets, canonical-form deduplication,
/// and within each isomorphism class a pairwise linear-equivalence check;
/// any isomorphic-but-inequivalent pair is a counterexample.
pub fn sampled_census(p: usize, n: usize, trials: usize, seed: u64) -> Result<CensusReport> {
    let degree = checked_degree(p, n, crate::DEFAULT_POINT_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();

    let mut samples: Vec<u128> = Vec::with_capacity(trials);
    for _ in 0..trials {
        let size = rng.gen_range(0..=degree);
        let mut pts: Vec<usize> = (0..degree).collect();
        pts.shuffle(&mut rng);
        let mut mask = 0u128;
        for &x in pts.iter().take(size) {
            mask |= 1 << x;
        }
        samples.push(mask);
    }
    samples.sort_unstable();
    samples.dedup();

    // isomorphism classes within the sample
    let mut classes: Vec<(Vec<u8>, Vec<u128>)> = Vec::new();
    let mut babai_tally = (0usize, 0usize, 0usize);
    for &mask in &samples {
        let d = build_cayley(ConnectionSet::from_mask(p, n, mask)?);
        let form = d.canonical_form();
        match babai_check(&d, 5_000)? {
            BabaiOutcome::Pass { .. } => babai_tally.0 += 1,
            BabaiOutcome::Fail { detail } => {
                babai_tally.1 += 1;
                failures.push(format!("criterion failed for sampled mask {mask:#x}: {detail}"));
            }
            BabaiOutcome::Inconclusive { .. } => babai_tally.2 += 1,
        }
        match classes.iter_mut().find(|(f, _)| f == &form) {
            Some((_, members)) => members.push(mask),
            None => classes.push((form, vec![mask])),
        }
    }

    // within an iso class every pair must be linearly equivalent
    let mut orbit_total = 0usize;
    let mut size_lines: Vec<SizeLine> = (0..=degree)
        .map(|s| SizeLine { size: s, orbits: 0, iso_classes: 0 })
        .collect();
    for (_, members) in &classes {
        let size = members[0].count_ones() as usize;
        size_lines[size].iso_classes += 1;
        let mut subclasses: Vec<u128> = Vec::new();
        for &m in members {
            let mut placed = false;
            for &srep in &subclasses {
                if sets_linearly_equivalent(p, n, srep, m)? {
                    placed = true;
                    break;
                }
            }
            if !placed {
                subclasses.push(m);
            }
        }
        if subclasses.len() > 1 {
            failures.push(format!(
                "isomorphic but linearly inequivalent sets found: {:#x} vs {:#x}",
                subclasses[0], subclasses[1]
            ));
        }
        size_lines[size].orbits += subclasses.len();
        orbit_total += subclasses.len();
    }
    let iso_total = classes.len();

    Ok(CensusReport {
        p,
        n,
        mode: CensusMode::Sampled { trials },
        seed,
        verified: true,
        lines: size_lines,
        orbit_total,
        iso_total,
        burnside: None,
        dci_holds: failures.is_empty(),
        failures,
        babai: Some(babai_tally),
    })
}

/// Is there an invertible linear map carrying set `s` onto set `t`?
/// Backtracking over basis images with span-consistency pruning.
pub fn sets_linearly_equivalent(p: usize, n: usize, s: u128, t: u128) -> Result<bool> {
    if s.count_ones() != t.count_ones() {
        return Ok(false);
    }
    let degree = checked_degree(p, n, crate::DEFAULT_POINT_CAP)?;
    // image_of[x] for x in the span of chosen basis vectors; usize::MAX = unset
    let mut image_of = vec![usize::MAX; degree];
    image_of[0] = 0;
    if (s & 1) != (t & 1) {
        return Ok(false);
    }

    fn rec(
        p: usize,
        n: usize,
        degree: usize,
        s: u128,
        t: u128,
        k: usize,
        span: &[usize],
        image_of: &mut [usize],
    ) -> bool {
        if k == n {
            return true;
        }
        let step = p.pow(k as u32); // e_k as a point code
        for cand in 0..degree {
            // image of e_k must be outside the image span
            if span.iter().any(|&x| image_of[x] == cand) {
                continue;
            }
            // tentatively extend the span
            let mut ok = true;
            let mut added: Vec<usize> = Vec::new();
            'ext: for j in 1..p {
                for &x in span {
                    let y = crate::ea::point_add(p, n, x, mul_point(p, n, step, j));
                    let img = crate::ea::point_add(p, n, image_of[x], mul_point_code(p, n, cand, j));
                    if (s >> y & 1) != (t >> img & 1) {
                        ok = false;
                        break 'ext;
                    }
                    image_of[y] = img;
                    added.push(y);
                }
            }
            if ok {
                let mut new_span = span.to_vec();
                new_span.extend_from_slice(&added);
                if rec(p, n, degree, s, t, k + 1, &new_span, image_of) {
                    return true;
                }
            }
            for &y in &added {
                image_of[y] = usize::MAX;
            }
        }
        false
    }

    fn mul_point(p: usize, n: usize, x: usize, j: usize) -> usize {
        let mut acc = 0;
        for _ in 0..j {
            acc = crate::ea::point_add(p, n, acc, x);
        }
        acc
    }
    fn mul_point_code(p: usize, n: usize, x: usize, j: usize) -> usize {
        mul_point(p, n, x, j)
    }

    Ok(rec(p, n, degree, s, t, 0, &[0], &mut image_of))
}

/// Outcome of the per-graph regular-subgroup criterion.
#[derive(Clone, Debug)]
pub enum BabaiOutcome {
    /// all regular elementary abelian subgroups of the automorphism group
    /// are conjugate (their count attached)
    Pass { regular_subgroups: usize },
    Fail { detail: String },
    /// enumeration budget exceeded; explicitly not a failure
    Inconclusive { reason: String },
}

/// Check that the automorphism group of `d` has a single conjugacy class of
/// regular elementary abelian subgroups, by enumeration within a budget on
/// the group order.
pub fn babai_check(d: &CayleyDigraph, element_budget: usize) -> Result<BabaiOutcome> {
    let degree = d.degree();
    let (p, n) = (d.p, d.n);
    let aut = d.automorphism_group();
    let elems = match aut.elements(element_budget) {
        Ok(e) => e,
        Err(_) => {
            return Ok(BabaiOutcome::Inconclusive {
                reason: format!("automorphism group order {} exceeds the budget", aut.order()),
            })
        }
    };
    // translations must be present
    let r = regular_rep(p, n)?;
    for t in r.generators() {
        if !aut.contains(t) {
            return Ok(BabaiOutcome::Fail {
                detail: String::from("translations are not automorphisms"),
            });
        }
    }

    // candidates: fixed-point-free elements of order p
    let fpf: Vec<Perm> = elems
        .iter()
        .filter(|e| e.order() == p as u64 && (0..degree).all(|x| e.apply(x) != x))
        .cloned()
        .collect();

    // enumerate regular elementary abelian subgroups
    let mut found: BTreeSet<Vec<Perm>> = BTreeSet::new();
    let mut stack_elems: Vec<Perm> = vec![Perm::identity(degree)];
    fn extend_all(
        p: usize,
        degree: usize,
        fpf: &[Perm],
        start: usize,
        gens: &mut Vec<Perm>,
        elements: &mut Vec<Perm>,
        found: &mut BTreeSet<Vec<Perm>>,
    ) {
        if elements.len() == degree {
            let mut key = elements.clone();
            key.sort();
            found.insert(key);
            return;
        }
        for idx in start..fpf.len() {
            let x = &fpf[idx];
            if elements.contains(x) {
                continue;
            }
            if !gens.iter().all(|g| g.commutes_with(x)) {
                continue;
            }
            // every product with the new generator must stay fixed-point-free
            let mut new_elems = Vec::with_capacity(elements.len() * (p - 1));
            let mut ok = true;
            'scan: for k in 1..p {
                let xk = x.pow(k as i64);
                for e in elements.iter() {
                    let prod = xk.compose(e);
                    if (0..degree).any(|pt| prod.apply(pt) == pt) {
                        ok = false;
                        break 'scan;
                    }
                    new_elems.push(prod);
                }
            }
            if !ok {
                continue;
            }
            gens.push(x.clone());
            let old_len = elements.len();
            elements.extend(new_elems);
            extend_all(p, degree, fpf, idx + 1, gens, elements, found);
            elements.truncate(old_len);
            gens.pop();
        }
    }
    let mut gens0 = Vec::new();
    extend_all(p, degree, &fpf, 0, &mut gens0, &mut stack_elems, &mut found);

    let subgroups: Vec<Vec<Perm>> = found.into_iter().collect();
    if subgroups.is_empty() {
        return Ok(BabaiOutcome::Fail {
            detail: String::from("no regular elementary abelian subgroup found"),
        });
    }
    // all must be conjugate to the first within the automorphism group
    let base = &subgroups[0];
    let base_gens: Vec<Perm> = minimal_generators(base, p, degree);
    for other in &subgroups[1..] {
        let other_set: BTreeSet<&Perm> = other.iter().collect();
        let mut witness = None;
        for a in &elems {
            if base_gens.iter().all(|g| other_set.contains(&g.conjugate_by(a))) {
                witness = Some(a);
                break;
            }
        }
        if witness.is_none() {
            return Ok(BabaiOutcome::Fail {
                detail: String::from("two regular subgroups are not conjugate"),
            });
        }
    }
    Ok(BabaiOutcome::Pass { regular_subgroups: subgroups.len() })
}

fn minimal_generators(elements: &[Perm], p: usize, degree: usize) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: BTreeSet<Perm> = BTreeSet::new();
    span.insert(Perm::identity(degree));
    for e in elements {
        if span.contains(e) {
            continue;
        }
        gens.push(e.clone());
        let current: Vec<Perm> = span.iter().cloned().collect();
        for k in 1..p {
            let ek = e.pow(k as i64);
            for c in &current {
                span.insert(ek.compose(c));
            }
        }
        if span.len() == elements.len() {
            break;
        }
    }
    gens
}

/// One campaign trial.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub index: usize,
    pub ok: bool,
    /// step tags with a flag for non-identity action
    pub steps: Vec<(&'static str, bool)>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CampaignReport {
    pub p: usize,
    pub n: usize,
    pub requested: usize,
    pub seed: u64,
    pub records: Vec<TrialRecord>,
    pub all_ok: bool,
}

impl CampaignReport {
    pub fn successes(&self) -> usize {
        self.records.iter().filter(|r| r.ok).count()
    }

    /// How many trials exercised a given step kind nontrivially.
    pub fn step_coverage(&self, kind: StepKind) -> usize {
        self.records
            .iter()
            .filter(|r| r.steps.iter().any(|&(tag, nontrivial)| tag == kind.tag() && nontrivial))
            .count()
    }
}

fn record_of(index: usize, result: &Result<Certificate>) -> TrialRecord {
    match result {
        Ok(cert) => TrialRecord {
            index,
            ok: true,
            steps: cert
                .steps
                .iter()
                .map(|s| (s.kind.tag(), !s.perm.is_identity()))
                .collect(),
            error: None,
        },
        Err(e) => TrialRecord { index, ok: false, steps: Vec::new(), error: Some(e.to_string()) },
    }
}

/// How campaign instances are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CampaignKind {
    /// conjugate R by a uniform permutation of the points
    RandomPi,
    /// conjugate R by a uniform element of the standard wreath Sylow
    /// subgroup; the generated group stays inside a common Sylow p-subgroup,
    /// exercising the reduction lemmas densely
    WreathConjugate,
}

/// Run a campaign, invoking `observer` after each trial (the CLI uses this
/// for per-trial timing). Failures are data, not panics.
pub fn run_campaign_with(
    p: usize,
    n: usize,
    trials: usize,
    seed: u64,
    kind: CampaignKind,
    observer: &mut dyn FnMut(usize, &TrialRecord),
) -> Result<CampaignReport> {
    let degree = checked_degree(p, n, crate::DEFAULT_POINT_CAP)?;
    let r = regular_rep(p, n)?;
    let wreath = match kind {
        CampaignKind::WreathConjugate => Some(wreath_sylow(p, n)?),
        CampaignKind::RandomPi => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(trials);
    for index in 0..trials {
        let conj = match &wreath {
            Some(t) => t.random_element(&mut rng),
            None => {
                let mut images: Vec<usize> = (0..degree).collect();
                images.shuffle(&mut rng);
                Perm::from_images(images).expect("shuffle is a bijection")
            }
        };
        let q = r.conjugate_subgroup(&conj);
        let result = conjugate_full(&r, &q, seed.wrapping_add(index as u64));
        let record = record_of(index, &result);
        observer(index, &record);
        records.push(record);
    }
    let all_ok = records.iter().all(|r| r.ok);
    Ok(CampaignReport { p, n, requested: trials, seed, records, all_ok })
}

/// For each trial, draw a uniform permutation of the points (seeded), run
/// the full conjugation pipeline against its conjugate of R, and record the
/// outcome.
pub fn random_pi_campaign(p: usize, n: usize, trials: usize, seed: u64) -> Result<CampaignReport> {
    run_campaign_with(p, n, trials, seed, CampaignKind::RandomPi, &mut |_, _| {})
}

/// See [`CampaignKind::WreathConjugate`].
pub fn wreath_conjugate_campaign(
    p: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<CampaignReport> {
    run_campaign_with(p, n, trials, seed, CampaignKind::WreathConjugate, &mut |_, _| {})
}
