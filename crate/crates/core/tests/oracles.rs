mod common;

use proptest::prelude::*;
use rand::Rng;

use toric_fibers::fiber::{embed_fb, enumerate_fiber, fiber_configuration, project_fb, DEFAULT_CAP};
use toric_fibers::graphs::complete_graph_config;
use toric_fibers::graver::{graver_basis_of_matrix, GraverOptions};
use toric_fibers::lattice::{
    conformal_leq, flat_type, lawrence_matrix, Configuration, IntMatrix, LiftedMove, Move,
};
use toric_fibers::toric::toric_generators;
use toric_fibers::transport::{
    connect, resolve_collisions_by_row_paths, resolve_collisions_pair, TableClass, TableMultiset,
};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn graver_matches_boxed_search(second in prop::collection::vec(0i64..4, 3..=6)) {
        let a = graded_matrix(second);
        let g = graver_basis_of_matrix(&a, GraverOptions::default()).unwrap();
        let computed: Vec<Vec<i64>> = g.iter().map(|m| m.as_slice().to_vec()).collect();
        let brute = boxed_graver(&a, 4);
        for z in &brute {
            prop_assert!(computed.contains(z), "boxed primitive {:?} missing", z);
        }
        let fits = computed.iter().all(|z| z.iter().all(|x| x.abs() <= 4));
        if fits {
            let mut sorted = computed.clone();
            sorted.sort();
            prop_assert_eq!(sorted, brute);
        }
        for z in &computed {
            prop_assert!(a.annihilates(z));
        }
    }

    #[test]
    fn fibers_match_naive_filter(
        second in prop::collection::vec(0i64..4, 2..=5),
        seed in any::<u64>(),
        total in 0i64..=6,
    ) {
        let a = graded_matrix(second);
        let cfg = Configuration::validate(a.clone()).unwrap();
        let mut rng = rng(seed);
        let mut x = vec![0i64; a.cols()];
        for _ in 0..total {
            x[rng.gen_range(0..a.cols())] += 1;
        }
        let b = a.mul_vec(&x).unwrap();
        let f = enumerate_fiber(&cfg, &b, DEFAULT_CAP).unwrap();
        let mut got = f.elements.clone();
        got.sort();
        prop_assert_eq!(got, naive_fiber(&a, &b, total));
    }

    #[test]
    fn conformal_order_is_a_partial_order(
        u in prop::collection::vec(-3i64..=3, 5),
        v in prop::collection::vec(-3i64..=3, 5),
        w in prop::collection::vec(-3i64..=3, 5),
    ) {
        prop_assert!(conformal_leq(&u, &u));
        if conformal_leq(&u, &v) && conformal_leq(&v, &u) {
            prop_assert_eq!(&u, &v);
        }
        if conformal_leq(&u, &v) && conformal_leq(&v, &w) {
            prop_assert!(conformal_leq(&u, &w));
        }
        let zero = vec![0i64; 5];
        prop_assert!(conformal_leq(&zero, &u));
    }

    #[test]
    fn lift_kernel_matches_slicewise_condition(
        flat in prop::collection::vec(-2i64..=2, 12),
    ) {
        // all-ones row with three columns, four copies
        let a = IntMatrix::new(1, 3, vec![1, 1, 1]).unwrap();
        let l = lawrence_matrix(&a, 4);
        let m = LiftedMove::from_flat(3, &flat).unwrap();
        let slicewise = m.slices().iter().all(|s| a.annihilates(s))
            && m.slice_sum().iter().all(|&x| x == 0);
        prop_assert_eq!(l.annihilates(&flat), slicewise);
        prop_assert_eq!(m.check(&a).is_ok(), slicewise);
        prop_assert_eq!(flat_type(3, &flat), m.slices().iter().filter(|s| s.iter().any(|&x| x != 0)).count());
    }
}

#[test]
fn project_and_embed_round_trip_with_degree_inequality() {
    let k3 = complete_graph_config(3, true).cfg;
    let fc = fiber_configuration(&k3, &[2, 2, 2], DEFAULT_CAP).unwrap();
    let kernel = toric_generators(&fc.config, 1000).unwrap();
    let mut rng = rng(7);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let mut y = vec![0i64; fc.len()];
        for _ in 0..n {
            y[rng.gen_range(0..fc.len())] += 1;
        }
        let w = embed_fb(&y, &fc).unwrap();
        assert_eq!(project_fb(&w, &fc).unwrap(), y);
        let z = &kernel[rng.gen_range(0..kernel.len())];
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let y2: Vec<i64> = y.iter().zip(z.as_slice()).map(|(a, b)| a + sign * b).collect();
        if y2.iter().any(|&x| x < 0) {
            continue;
        }
        let w2 = embed_fb(&y2, &fc).unwrap();
        let diff: Vec<Vec<i64>> = w
            .slices
            .iter()
            .zip(&w2.slices)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        let ty = diff.iter().filter(|s| s.iter().any(|&x| x != 0)).count() as i64;
        let half: i64 = y.iter().zip(&y2).map(|(a, b)| (a - b).abs()).sum::<i64>() / 2;
        assert!(half <= ty, "{} > {}", half, ty);
    }
}

#[test]
fn exact_and_forcing_certificates_agree() {
    let decisive = check_certificates(2024, 100).unwrap();
    assert!(decisive > 0);
}

#[test]
fn graver_and_fiber_oracles_seeded() {
    check_graver_against_box(3, 20).unwrap();
    check_fibers_against_filter(4, 100).unwrap();
}

#[test]
fn moves_and_canonical_forms() {
    let z = Move::new(vec![0, -2, 1, 1]);
    assert_eq!(z.canonical(), Move::new(vec![0, 2, -1, -1]));
    assert_eq!(z.degree(), 2);
    assert_eq!(z.one_norm(), 4);
}

/// Pushes `swaps` random elementary swaps between two proper tables while
/// keeping every row within one of its margin.
fn collide(rng: &mut rand_chacha::ChaCha8Rng, m: &mut TableMultiset, swaps: usize) {
    let (rows, cols) = (m.rows, m.cols);
    let row = |g: &[i64], i: usize| g[i * cols..(i + 1) * cols].iter().sum::<i64>();
    for _ in 0..swaps {
        let j = rng.gen_range(0..cols);
        let i1 = rng.gen_range(0..rows);
        let i2 = rng.gen_range(0..rows);
        if i1 == i2 || m.members[0][i1 * cols + j] == 0 || m.members[1][i2 * cols + j] == 0 {
            continue;
        }
        let a = &m.members[0];
        if row(a, i1) - 1 < m.r[i1] - 1 || row(a, i2) + 1 > m.r[i2] + 1 {
            continue;
        }
        m.members[0][i1 * cols + j] -= 1;
        m.members[0][i2 * cols + j] += 1;
        m.members[1][i1 * cols + j] += 1;
        m.members[1][i2 * cols + j] -= 1;
    }
}

#[test]
fn collision_resolution_randomized() {
    let mut rng = rng(11);
    let mut collided = 0;
    for _ in 0..500 {
        let rows = rng.gen_range(2..=4);
        let cols = rng.gen_range(2..=4);
        let total = rng.gen_range(1..=6);
        let (r, c) = random_margins(&mut rng, rows, cols, total);
        let tables = vec![random_table(&mut rng, &r, &c), random_table(&mut rng, &r, &c)];
        let mut m = TableMultiset::new(rows, cols, r, c, tables).unwrap();
        collide(&mut rng, &mut m, 8);
        if matches!(m.classify_member(0), TableClass::Collision { .. }) {
            collided += 1;
        }
        let e = m.edge_sums();
        for route in [resolve_collisions_pair, resolve_collisions_by_row_paths] {
            let op = route(&m, 0, 1).unwrap();
            assert!(op.z1.iter().zip(&op.z2).all(|(a, b)| a + b == 0));
            let mut after = m.clone();
            after.apply(&op);
            assert!(after.is_proper());
            assert_eq!(after.edge_sums(), e);
        }
    }
    assert!(collided > 100, "only {} collisions", collided);
}

#[test]
fn two_by_two_collisions_need_one_swap() {
    // every 2x2 pair with row sums (r1+1, r2-1) and (r1-1, r2+1)
    let tables = |rows: [i64; 2], c: [i64; 2]| -> Vec<Vec<i64>> {
        (0..=c[0])
            .map(|a| vec![a, rows[0] - a, c[0] - a, c[1] - rows[0] + a])
            .filter(|g| g.iter().all(|&x| x >= 0))
            .collect()
    };
    let mut cases = 0;
    for r1 in 1..=3i64 {
        for r2 in 1..=3i64 {
            for c1 in 0..=(r1 + r2) {
                let c = [c1, r1 + r2 - c1];
                for g in tables([r1 + 1, r2 - 1], c) {
                    for h in tables([r1 - 1, r2 + 1], c) {
                        let mut m =
                            TableMultiset::new(2, 2, vec![r1, r2], c.to_vec(), vec![g.clone(), h])
                                .unwrap();
                        let op = resolve_collisions_pair(&m, 0, 1).unwrap();
                        assert_eq!(op.swaps.len(), 1);
                        m.apply(&op);
                        assert!(m.is_proper());
                        cases += 1;
                    }
                }
            }
        }
    }
    assert!(cases > 50);
}

#[test]
fn random_pairs_connect_quickly() {
    let mut rng = rng(5);
    for _ in 0..50 {
        let rows = rng.gen_range(2..=3);
        let cols = rng.gen_range(2..=3);
        let n = rng.gen_range(2..=4);
        let total = rng.gen_range(1..=4);
        let (p, q) = random_fiber_pair(&mut rng, rows, cols, n, total);
        let s = connect(&p, &q).unwrap();
        assert!(s.max_degree() <= 3);
    }
}
