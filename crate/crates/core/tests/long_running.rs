//! Expensive checks, skipped by default. Run with
//! `cargo test --release -p toric-fibers --test long_running -- --ignored`.

use toric_fibers::fiber::{fiber_configuration, DEFAULT_CAP};
use toric_fibers::graphs::complete_graph_config;
use toric_fibers::graver::graver_complexity;
use toric_fibers::markov::minimal_markov_basis;

#[test]
#[ignore]
fn graver_complexity_of_k5() {
    let gc = graver_complexity(&complete_graph_config(5, false).cfg).unwrap();
    assert_eq!(gc.value, 15);
}

fn quadratic_count(b: [i64; 5]) -> (usize, usize) {
    let k5 = complete_graph_config(5, false).cfg;
    let fc = fiber_configuration(&k5, &b, DEFAULT_CAP).unwrap();
    let h = minimal_markov_basis(&fc.config).unwrap().histogram;
    let two = h.get(&2).copied().unwrap_or(0);
    let rest = h.iter().filter(|(d, _)| **d != 2).map(|(_, n)| n).sum();
    (two, rest)
}

#[test]
#[ignore]
fn larger_k5_fiber_configurations() {
    for (b, moves) in [
        ([4, 4, 2, 2, 2], 216),
        ([3, 3, 3, 2, 1], 105),
        ([4, 2, 2, 2, 2], 105),
        ([4, 3, 2, 2, 1], 39),
        ([4, 3, 3, 3, 1], 225),
        ([3, 3, 3, 3, 2], 741),
        ([4, 3, 3, 2, 2], 413),
        ([4, 4, 3, 2, 1], 105),
        ([4, 4, 4, 3, 1], 420),
        ([4, 4, 4, 2, 2], 710),
        ([4, 4, 3, 3, 2], 1179),
    ] {
        assert_eq!(quadratic_count(b), (moves, 0), "b = {:?}", b);
    }
}

#[test]
#[ignore]
fn largest_k5_fiber_configurations() {
    for (b, moves) in [
        ([4, 3, 3, 3, 3], 1893),
        ([4, 4, 4, 4, 2], 2718),
        ([4, 4, 4, 3, 3], 4032),
        ([4, 4, 4, 4, 4], 10581),
    ] {
        assert_eq!(quadratic_count(b), (moves, 0), "b = {:?}", b);
    }
}
