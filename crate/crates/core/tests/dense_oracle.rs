//! Orbit-basis operations against explicit exponential-size matrices.

mod common;

use common::checks::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn bipartite_operations_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=3 {
        bipartite_operations(2, 2, n, &mut rng).unwrap();
    }
    bipartite_operations(2, 3, 2, &mut rng).unwrap();
    bipartite_operations(3, 2, 2, &mut rng).unwrap();
}

#[test]
fn link_products_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=3 {
        link_products(2, 2, n, 2, &mut rng).unwrap();
    }
    link_products(2, 3, 2, 3, &mut rng).unwrap();
    link_products(3, 2, 2, 1, &mut rng).unwrap();
}

#[test]
fn covariant_link_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=3 {
        covariant_link([2, 2, 2], n, false, &mut rng).unwrap();
    }
    covariant_link([2, 2, 2], 2, true, &mut rng).unwrap();
    covariant_link([2, 3, 1], 2, false, &mut rng).unwrap();
    covariant_link([1, 2, 3], 2, true, &mut rng).unwrap();
}
