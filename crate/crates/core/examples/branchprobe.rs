// scratch probe: Q = <tau0, tau1, tau2', tau3'> with tau2' shifted per block
// in span(e0,e1) and tau3' shifted in span(e0,e1,e2); constraints solved by
// construction + rejection. Hunts for single-class (case 2) instances.
use ciforge_core::conjugator::conjugate_full;
use ciforge_core::ea::{point_add, point_to_vec, regular_rep, vec_to_point};
use ciforge_core::group::PermutationGroup;
use ciforge_core::perm::Perm;
use rand::{Rng, SeedableRng};

fn main() {
    let p = 3usize;
    let n = 4;
    let degree = 81;
    let r = regular_rep(p, n).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1106);
    let mut tags: std::collections::BTreeMap<(&str, bool), usize> = Default::default();
    let mut case2: Vec<String> = Vec::new();
    let mut built = 0;
    for _trial in 0..60000u64 {
        // s : F3^2 -> F3^2 with column sums 0, s(0,0) = 0
        let mut s = [[(0usize, 0usize); 3]; 3]; // s[i][j]
        for j in 0..3 {
            let free = if j == 0 { 1 } else { 0 };
            let mut sum = (0, 0);
            for i in free..2 + usize::from(j == 0) {
                if j == 0 && i == 0 { continue; }
                let v = (rng.gen_range(0..3), rng.gen_range(0..3));
                s[i][j] = v;
                sum = ((sum.0 + v.0) % 3, (sum.1 + v.1) % 3);
            }
            s[2][j] = ((3 - sum.0) % 3, (3 - sum.1) % 3);
            if j == 0 {
                // recompute: s[0][0] = 0, s[1][0] random, s[2][0] = -s[1][0]
                let v = (rng.gen_range(0..3), rng.gen_range(0..3));
                s[1][0] = v;
                s[2][0] = ((3 - v.0) % 3, (3 - v.1) % 3);
            }
        }
        // u2 : F3 -> F3 with u2(0) = 0, sum 0
        let a = rng.gen_range(0..3);
        let u2 = [0usize, a, (3 - a) % 3];
        // u01 via the commutation recurrence from free u01(0,j)
        let mut u01 = [[(0usize, 0usize); 3]; 3];
        u01[0][1] = (rng.gen_range(0..3), rng.gen_range(0..3));
        u01[0][2] = (rng.gen_range(0..3), rng.gen_range(0..3));
        for j in 0..3 {
            for i in 0..2 {
                let sa = s[(i + u2[j]) % 3][(j + 1) % 3];
                let sb = s[i][j];
                u01[i + 1][j] = (
                    (u01[i][j].0 + sa.0 + 3 - sb.0) % 3,
                    (u01[i][j].1 + sa.1 + 3 - sb.1) % 3,
                );
            }
        }
        // order-3 walk condition for tau3'
        let mut ok = true;
        'walk: for i in 0..3 {
            for j in 0..3 {
                let mut ci = i;
                let mut cj = j;
                let mut acc = (0, 0);
                for _ in 0..3 {
                    acc = ((acc.0 + u01[ci][cj].0) % 3, (acc.1 + u01[ci][cj].1) % 3);
                    ci = (ci + u2[cj]) % 3;
                    cj = (cj + 1) % 3;
                }
                if acc != (0, 0) {
                    ok = false;
                    break 'walk;
                }
            }
        }
        if !ok { continue; }
        built += 1;
        let tau2p = Perm::from_images((0..degree).map(|x| {
            let xv = point_to_vec(p, n, x);
            let (i, j) = (xv[2], xv[3]);
            let sh = vec_to_point(p, &[s[i][j].0, s[i][j].1, 1, 0]);
            point_add(p, n, x, sh)
        }).collect()).unwrap();
        let tau3p = Perm::from_images((0..degree).map(|x| {
            let xv = point_to_vec(p, n, x);
            let (i, j) = (xv[2], xv[3]);
            let sh = vec_to_point(p, &[u01[i][j].0, u01[i][j].1, u2[j], 1]);
            point_add(p, n, x, sh)
        }).collect()).unwrap();
        if !tau2p.commutes_with(&tau3p) || tau2p.order() != 3 || tau3p.order() != 3 {
            continue;
        }
        let gens = vec![r.generators()[0].clone(), r.generators()[1].clone(), tau2p, tau3p];
        let q = PermutationGroup::from_generators(degree, gens).unwrap();
        if q.order_u64() != Some(81) { continue; }
        match conjugate_full(&r, &q, 0) {
            Ok(cert) => {
                for st in &cert.steps {
                    *tags.entry((st.kind.tag(), !st.perm.is_identity())).or_default() += 1;
                    if st.kind.tag() == "L5_4_CASE2" && case2.len() < 5 {
                        case2.push(format!("s={s:?} u2={u2:?} u01={u01:?}"));
                    }
                }
            }
            Err(e) => println!("FAILED: {e}\n  s={s:?} u2={u2:?} u01={u01:?}"),
        }
    }
    println!("built {built} valid instances; tags {tags:?}");
    for c in &case2 { println!("case2: {c}"); }
}
