//! End-to-end tests of the conjugation pipeline and its certificates.

use ciforge_core::conjugator::{conjugate_full, verify_certificate, StepKind};
use ciforge_core::dci::{random_pi_campaign, wreath_conjugate_campaign};
use ciforge_core::ea::{regular_rep, wreath_sylow};
use ciforge_core::group::PermutationGroup;
use ciforge_core::perm::Perm;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn identity_instance_gives_identity_certificate() {
    let r = regular_rep(2, 4).unwrap();
    let cert = conjugate_full(&r, &r, 0).unwrap();
    assert!(cert.composite.is_identity());
    assert!(cert.steps.iter().all(|s| s.perm.is_identity()));
    verify_certificate(&r, &r, &cert).unwrap();
}

#[test]
fn wreath_conjugates_p2() {
    let r = regular_rep(2, 4).unwrap();
    let t = wreath_sylow(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for trial in 0..25 {
        let x = t.random_element(&mut rng);
        let q = r.conjugate_subgroup(&x);
        let cert = conjugate_full(&r, &q, trial).expect("pipeline must succeed");
        // composite conjugates Q onto R exactly
        let moved = q.conjugate_subgroup(&cert.composite);
        assert!(moved.equals_group(&r), "trial {trial}");
    }
}

#[test]
fn random_pi_p2() {
    let r = regular_rep(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..10 {
        let mut images: Vec<usize> = (0..16).collect();
        images.shuffle(&mut rng);
        let pi = Perm::from_images(images).unwrap();
        let q = r.conjugate_subgroup(&pi);
        let cert = conjugate_full(&r, &q, trial).expect("pipeline must succeed");
        assert!(q.conjugate_subgroup(&cert.composite).equals_group(&r));
    }
}

#[test]
fn wreath_conjugates_p3() {
    let r = regular_rep(3, 4).unwrap();
    let t = wreath_sylow(3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..5 {
        let x = t.random_element(&mut rng);
        let q = r.conjugate_subgroup(&x);
        let cert = conjugate_full(&r, &q, trial).expect("pipeline must succeed");
        assert!(q.conjugate_subgroup(&cert.composite).equals_group(&r));
    }
}

#[test]
fn random_pi_p3() {
    let r = regular_rep(3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..3 {
        let mut images: Vec<usize> = (0..81).collect();
        images.shuffle(&mut rng);
        let pi = Perm::from_images(images).unwrap();
        let q = r.conjugate_subgroup(&pi);
        let cert = conjugate_full(&r, &q, trial).expect("pipeline must succeed");
        assert!(q.conjugate_subgroup(&cert.composite).equals_group(&r));
    }
}

#[test]
fn corrupted_certificate_rejected() {
    let r = regular_rep(2, 4).unwrap();
    let t = wreath_sylow(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let x = t.random_element(&mut rng);
    let q = r.conjugate_subgroup(&x);
    let mut cert = conjugate_full(&r, &q, 0).unwrap();
    // corrupt one image of one step (swap two points of the first
    // non-identity step, keeping it a permutation)
    let idx = cert.steps.iter().position(|s| !s.perm.is_identity()).unwrap_or(0);
    let mut images = cert.steps[idx].perm.images().to_vec();
    images.swap(0, 1);
    cert.steps[idx].perm = Perm::from_images(images).unwrap();
    assert!(verify_certificate(&r, &q, &cert).is_err());
}

#[test]
fn certificate_against_wrong_q_rejected() {
    let r = regular_rep(2, 4).unwrap();
    let t = wreath_sylow(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = t.random_element(&mut rng);
    let q = r.conjugate_subgroup(&x);
    let cert = conjugate_full(&r, &q, 0).unwrap();
    let y = t.random_element(&mut rng);
    let other = r.conjugate_subgroup(&y);
    if !other.equals_group(&q) {
        assert!(verify_certificate(&r, &other, &cert).is_err());
    }
}

#[test]
fn pipeline_branch_coverage_p2() {
    // across many wreath-conjugate seeds, the reductions after
    // centralization are all exercised somewhere
    let report = wreath_conjugate_campaign(2, 4, 60, 20240101).unwrap();
    assert!(report.all_ok, "failures: {:?}", report.records.iter().filter(|r| !r.ok).collect::<Vec<_>>());
    let covered: Vec<StepKind> = [
        StepKind::Centralize,
        StepKind::EasyReduce,
        StepKind::Final,
    ]
    .into_iter()
    .filter(|&k| report.step_coverage(k) > 0)
    .collect();
    assert!(covered.len() >= 2, "too little branch coverage: {covered:?}");
}

#[test]
fn small_random_campaign_p2() {
    let report = random_pi_campaign(2, 4, 5, 7).unwrap();
    assert!(report.all_ok);
    assert_eq!(report.successes(), 5);
}

#[test]
fn non_standard_r_rejected() {
    let t = wreath_sylow(2, 4).unwrap();
    let r = regular_rep(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = t.random_element(&mut rng);
    let moved = r.conjugate_subgroup(&x);
    if !moved.equals_group(&r) {
        assert!(conjugate_full(&moved, &r, 0).is_err());
    }
}

#[test]
fn rank_other_than_four_rejected() {
    let r = regular_rep(2, 3).unwrap();
    assert!(conjugate_full(&r, &r, 0).is_err());
}

#[test]
fn group_engine_vs_enumeration_wreath() {
    // stabilizer-chain order vs brute-force closure on a medium group
    let t = wreath_sylow(2, 3).unwrap();
    let mut all: Vec<Perm> = vec![Perm::identity(8)];
    loop {
        let mut new = Vec::new();
        for e in &all {
            for g in t.generators() {
                let f = g.compose(e);
                if !all.contains(&f) && !new.contains(&f) {
                    new.push(f);
                }
            }
        }
        if new.is_empty() {
            break;
        }
        all.extend(new);
    }
    assert_eq!(t.order_u64(), Some(all.len() as u64));
    assert_eq!(all.len(), 128);
}

/// A regular elementary abelian group sharing the first three adapted
/// generators with R but with the last one twisted by per-block shifts
/// summing to zero. For p = 2 the zero-sum condition forces alignment, so
/// genuinely misaligned closing instances exist only for odd p.
fn misaligned_last_generator_group(p: usize, shifts: &[usize]) -> PermutationGroup {
    use ciforge_core::ea::{point_add, point_to_vec};
    let n = 4;
    let degree = p.pow(n as u32);
    let block = degree / p;
    assert_eq!(shifts.len(), p);
    assert_eq!(shifts.iter().sum::<usize>() % p, 0);
    let r = regular_rep(p, n).unwrap();
    let images: Vec<usize> = (0..degree)
        .map(|x| {
            let j = x / block;
            let shifted = point_add(p, n, x, shifts[j]);
            let v = point_to_vec(p, n, shifted);
            let mut w = v.clone();
            w[n - 1] = (w[n - 1] + 1) % p;
            ciforge_core::ea::vec_to_point(p, &w)
        })
        .collect();
    let tau3_twisted = Perm::from_images(images).unwrap();
    let mut gens: Vec<Perm> = r.generators()[..n - 1].to_vec();
    gens.push(tau3_twisted);
    PermutationGroup::from_generators(degree, gens).unwrap()
}

#[test]
fn final_step_on_explicitly_misaligned_instance() {
    // shifts (0, 1, -1) by the first unit vector: elementary abelian, regular,
    // inside the standard wreath group, sharing tau_0..tau_2 with R
    let p = 3;
    let q = misaligned_last_generator_group(p, &[0, 1, 2]);
    let r = regular_rep(p, 4).unwrap();
    assert!(!q.equals_group(&r));
    assert_eq!(q.order_u64(), Some(81));
    for e in q.elements(100).unwrap() {
        if !e.is_identity() {
            assert_eq!(e.order(), 3);
        }
    }
    let cert = conjugate_full(&r, &q, 0).expect("closing search must succeed");
    assert!(q.conjugate_subgroup(&cert.composite).equals_group(&r));
    assert!(
        cert.steps
            .iter()
            .any(|s| s.kind == StepKind::Final && !s.perm.is_identity()),
        "the closing step must act nontrivially on this instance"
    );
}

#[test]
fn final_step_trivial_for_p2_shared_prefix() {
    // for p = 2, sharing tau_0..tau_2 forces Q = R: the only zero-sum shift
    // vector is trivial, so the closing step is the identity on every
    // wreath-conjugate instance
    let r = regular_rep(2, 4).unwrap();
    let t = wreath_sylow(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    for trial in 0..10 {
        let x = t.random_element(&mut rng);
        let q = r.conjugate_subgroup(&x);
        let cert = conjugate_full(&r, &q, trial).unwrap();
        for s in &cert.steps {
            if s.kind == StepKind::Final {
                assert!(s.perm.is_identity());
            }
        }
    }
}
