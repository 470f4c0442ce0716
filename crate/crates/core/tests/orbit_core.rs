//! Orbit enumeration and exact coefficient operations on small systems,
//! checked against explicitly built orbit matrices.

mod common;

use std::sync::Arc;

use nalgebra::DMatrix;
use permsym::marginal::{partial_trace_coeffs, MarginalData};
use permsym::orbit::{
    count_of_pair, enumerate_orbits, hs_inner, partial_transpose_coeffs, representative, tensor_coefficients, trace_coeffs,
    transpose_coeffs, CountMatrix, OrbitBasis, OrbitCoefficients, Side, SystemSpec, C64,
};
use permsym::{ChoiMatrix, Exact};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn full(d: usize, n: usize) -> Arc<OrbitBasis> {
    Arc::new(OrbitBasis::full(SystemSpec::single(d, n).unwrap()).unwrap())
}

fn bip(d_a: usize, d_b: usize, n: usize) -> Arc<OrbitBasis> {
    Arc::new(OrbitBasis::full(SystemSpec::bipartite(d_a, d_b, n).unwrap()).unwrap())
}

fn all_words(d: usize, n: usize) -> Vec<Vec<usize>> {
    (0..d.pow(n as u32)).map(|i| digits(i, d, n)).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn enumeration_counts() {
    assert_eq!(enumerate_orbits(&SystemSpec::single(2, 2).unwrap()).unwrap().len(), 10);
    for n in 1..6 {
        assert_eq!(enumerate_orbits(&SystemSpec::single(1, n).unwrap()).unwrap().len(), 1);
    }
    assert_eq!(enumerate_orbits(&SystemSpec::single(4, 2).unwrap()).unwrap().len(), 136);
    assert_eq!(enumerate_orbits(&SystemSpec::bipartite(2, 2, 3).unwrap()).unwrap().len(), 816);
    assert_eq!(enumerate_orbits(&SystemSpec::bipartite(2, 2, 4).unwrap()).unwrap().len(), 3876);
}

#[test]
fn enumeration_is_stable_across_builds() {
    let a = full(3, 3);
    let b = full(3, 3);
    assert_eq!(a.orbits(), b.orbits());
    for (k, e) in a.orbits().iter().enumerate() {
        assert_eq!(b.index_of(e), Some(k));
    }
}

#[test]
fn counts_are_invariant_under_simultaneous_permutation() {
    let (d, n) = (2, 3);
    for i in all_words(d, n) {
        for j in all_words(d, n) {
            let e = count_of_pair(&i, &j, d).unwrap();
            for p in permutations(n) {
                let pi: Vec<usize> = p.iter().map(|&k| i[k]).collect();
                let pj: Vec<usize> = p.iter().map(|&k| j[k]).collect();
                assert_eq!(count_of_pair(&pi, &pj, d).unwrap(), e);
            }
        }
    }
}

#[test]
fn representatives_round_trip() {
    let e = CountMatrix::from_rows(&[&[2, 0], &[0, 0]]).unwrap();
    assert_eq!(representative(&e), (vec![0, 0], vec![0, 0]));
    let e = CountMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap();
    assert_eq!(representative(&e), (vec![0, 1], vec![1, 0]));
    for e in full(2, 3).orbits() {
        let (i, j) = representative(e);
        assert_eq!(&count_of_pair(&i, &j, 2).unwrap(), e);
    }
}

#[test]
fn orbit_sizes_and_traces_match_dense_orbit_matrices() {
    for (d, n) in [(2, 2), (2, 3), (3, 2)] {
        let basis = full(d, n);
        let labels = orbit_labels(&basis);
        for (r, e) in basis.orbits().iter().enumerate() {
            let dense = densify(&OrbitCoefficients::unit(basis.clone(), r), &labels);
            let ones = dense.iter().filter(|v| v.re == 1.0).count();
            assert_eq!(e.orbit_size(), Exact::Small(ones as u128));
            assert_eq!(e.orbit_size().to_f64(), basis.orbit_sizes()[r]);
            assert_eq!(e.trace_orbit().to_f64(), dense.trace().re);
        }
    }
    let n = 5;
    let e = CountMatrix::from_rows(&[&[n, 0], &[0, 0]]).unwrap();
    assert_eq!(e.trace_orbit(), Exact::one());
}

#[test]
fn tensor_coefficients_examples() {
    let x = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
    let coeffs = tensor_coefficients(&x, &SystemSpec::single(2, 2).unwrap()).unwrap();
    assert_eq!(coeffs.get(&CountMatrix::from_rows(&[&[1, 1], &[0, 0]]).unwrap()), c(2.0));
    let dense = tensor_power(&x, 2);
    let labels = orbit_labels(coeffs.basis());
    assert_eq!(densify(&coeffs, &labels), dense);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = ginibre(2, 2, &mut rng);
    let coeffs = tensor_coefficients(&x, &SystemSpec::single(2, 3).unwrap()).unwrap();
    let err = max_abs(&(densify(&coeffs, &orbit_labels(coeffs.basis())) - tensor_power(&x, 3)));
    assert!(err < 1e-12, "{err}");
    let tr = x.trace();
    assert!((trace_coeffs(&coeffs) - tr * tr * tr).norm() < 1e-12);
}

#[test]
fn tensor_coefficients_keep_only_the_support() {
    let adc = ChoiMatrix::adc(0.3).unwrap();
    let coeffs = tensor_coefficients(adc.gamma(), &SystemSpec::bipartite(2, 2, 3).unwrap()).unwrap();
    let support = coeffs.support().expect("ADC is sparse");
    assert_eq!(support.len(), 5);
    // Weak compositions of 3 into 5 cells.
    assert_eq!(coeffs.basis().len(), 35);
    let err = max_abs(&(densify(&coeffs, &orbit_labels(coeffs.basis())) - tensor_power(adc.gamma(), 3)));
    assert!(err < 1e-15);
}

#[test]
fn identity_coefficients_are_the_diagonal_orbits() {
    let basis = full(2, 2);
    let id = OrbitCoefficients::identity(basis.clone());
    for (e, v) in basis.orbits().iter().zip(id.values()) {
        assert_eq!(*v, c(if e.is_diagonal() { 1.0 } else { 0.0 }));
    }
    for (d, n) in [(2, 4), (3, 3)] {
        let id = OrbitCoefficients::identity(full(d, n));
        assert_eq!(trace_coeffs(&id), c((d as f64).powi(n as i32)));
        assert_eq!(hs_inner(&id, &id).unwrap(), c((d as f64).powi(n as i32)));
    }
}

#[test]
fn distinct_orbits_are_orthogonal() {
    let basis = full(2, 3);
    for r in 0..basis.len() {
        for s in 0..basis.len() {
            let v = hs_inner(&OrbitCoefficients::unit(basis.clone(), r), &OrbitCoefficients::unit(basis.clone(), s)).unwrap();
            let expect = if r == s { basis.orbit_sizes()[r] } else { 0.0 };
            assert_eq!(v, c(expect));
        }
    }
}

#[test]
fn transpose_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let basis = full(2, 3);
    let h = random_hermitian_coeffs(&basis, &mut rng);
    let t = transpose_coeffs(&h).unwrap();
    for (a, b) in t.values().iter().zip(h.values()) {
        assert_eq!(*a, b.conj());
    }
    let x = random_coeffs(&basis, &mut rng);
    let t = transpose_coeffs(&x).unwrap();
    for (e, v) in basis.orbits().iter().zip(x.values()) {
        if *e == e.transpose() {
            assert_eq!(t.get(e), *v);
        }
    }
    assert_eq!(transpose_coeffs(&t).unwrap().values(), x.values());
}

#[test]
fn partial_transposes_compose_to_the_full_transpose() {
    let basis = bip(2, 2, 2);
    for r in 0..basis.len() {
        let unit = OrbitCoefficients::unit(basis.clone(), r);
        let both = partial_transpose_coeffs(&partial_transpose_coeffs(&unit, Side::A).unwrap(), Side::B).unwrap();
        assert_eq!(both.values(), transpose_coeffs(&unit).unwrap().values());
        let twice = partial_transpose_coeffs(&partial_transpose_coeffs(&unit, Side::B).unwrap(), Side::B).unwrap();
        assert_eq!(twice.values(), unit.values());
    }
    // Orbits whose B-labels always agree within each pair are fixed points of T_B.
    for (r, e) in basis.orbits().iter().enumerate() {
        let b_diagonal = (0..4).all(|p| (0..4).all(|q| e.get(p, q) == 0 || p % 2 == q % 2));
        if b_diagonal {
            let unit = OrbitCoefficients::unit(basis.clone(), r);
            assert_eq!(partial_transpose_coeffs(&unit, Side::B).unwrap().values(), unit.values());
        }
    }
    assert!(partial_transpose_coeffs(&OrbitCoefficients::unit(full(4, 2), 0), Side::B).is_err());
}

#[test]
fn marginal_examples() {
    let md = MarginalData::for_spec(&SystemSpec::bipartite(2, 3, 1).unwrap()).unwrap();
    assert!(md.kappa_a().iter().chain(md.kappa_b()).all(|k| *k == Exact::one()));

    let md = MarginalData::for_spec(&SystemSpec::bipartite(2, 2, 2).unwrap()).unwrap();
    // Pairs ((0,0),(0,0)) and ((0,1),(0,1)) in joint labels 0 and 1.
    let mut e = CountMatrix::zeros(4);
    e.set(0, 0, 1);
    e.set(1, 1, 1);
    let s = md.joint().index_of(&e).unwrap();
    assert_eq!(md.a_basis().orbit(md.r()[s]), &CountMatrix::from_rows(&[&[2, 0], &[0, 0]]).unwrap());
    assert_eq!(md.kappa_a()[s], Exact::Small(2));
    for (s, tau) in md.tau().iter().enumerate() {
        assert_eq!(*tau, md.b_basis().orbit(md.t()[s]).is_diagonal());
    }
}

#[test]
fn partial_trace_of_a_channel_is_the_identity() {
    for ch in [ChoiMatrix::adc(0.2).unwrap(), ChoiMatrix::depolarizing(0.4).unwrap()] {
        for n in 1..=4 {
            let coeffs = tensor_coefficients(ch.gamma(), &SystemSpec::bipartite(2, 2, n).unwrap()).unwrap();
            let md = MarginalData::for_joint(coeffs.basis().clone()).unwrap();
            let out = partial_trace_coeffs(&coeffs, &md).unwrap();
            let id = OrbitCoefficients::identity(md.a_basis().clone());
            assert!(out.max_abs_diff(&id).unwrap() < 1e-12);
        }
    }
}

#[test]
fn single_copy_partial_trace_is_the_ordinary_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = ginibre(6, 6, &mut rng);
    let coeffs = tensor_coefficients(&x, &SystemSpec::bipartite(2, 3, 1).unwrap()).unwrap();
    let md = MarginalData::for_joint(coeffs.basis().clone()).unwrap();
    let out = partial_trace_coeffs(&coeffs, &md).unwrap();
    let dense = densify(&out, &orbit_labels(md.a_basis()));
    assert!(max_abs(&(dense - trace_second(&x, 2, 3))) < 1e-12);
}

#[test]
fn relabelling_symbols_permutes_orbits() {
    let basis = full(3, 3);
    let perm = [2usize, 0, 1];
    for e in basis.orbits() {
        let f = e.map_cells(|a, b| (perm[a], perm[b]));
        assert!(basis.index_of(&f).is_some());
        assert_eq!(f.orbit_size(), e.orbit_size());
        assert_eq!(f.trace_orbit(), e.trace_orbit());
    }
}

#[test]
fn capacity_errors_name_the_budget() {
    let err = OrbitBasis::build(SystemSpec::single(6, 40).unwrap(), None, 10_000).unwrap_err();
    assert!(err.to_string().contains("10000"), "{err}");
}

fn count_matrix_strategy(d: usize, n: usize) -> impl Strategy<Value = CountMatrix> {
    (proptest::collection::vec(0..d, n), proptest::collection::vec(0..d, n)).prop_map(move |(i, j)| count_of_pair(&i, &j, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representative_inverts_counting(e in (1usize..4, 1usize..7).prop_flat_map(|(d, n)| count_matrix_strategy(d, n))) {
        let (i, j) = representative(&e);
        prop_assert_eq!(count_of_pair(&i, &j, e.d()).unwrap(), e);
    }

    #[test]
    fn counting_ignores_copy_order(
        (d, i, j, shift) in (1usize..4, 1usize..6).prop_flat_map(|(d, n)| (
            Just(d),
            proptest::collection::vec(0..d, n),
            proptest::collection::vec(0..d, n),
            0..n,
        ))
    ) {
        let mut pi = i.clone();
        let mut pj = j.clone();
        pi.rotate_left(shift);
        pj.rotate_left(shift);
        prop_assert_eq!(count_of_pair(&i, &j, d).unwrap(), count_of_pair(&pi, &pj, d).unwrap());
    }

    #[test]
    fn transpose_is_an_involution_and_preserves_norms(seed in any::<u64>(), d in 1usize..4, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_coeffs(&full(d, n), &mut rng);
        let t = transpose_coeffs(&x).unwrap();
        let back = transpose_coeffs(&t).unwrap();
        prop_assert_eq!(back.values(), x.values());
        let a = hs_inner(&x, &x).unwrap();
        let b = hs_inner(&t, &t).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * a.norm());
        prop_assert!((trace_coeffs(&t) - trace_coeffs(&x)).norm() <= 1e-9 * (1.0 + trace_coeffs(&x).norm()));
    }

    #[test]
    fn tensor_power_traces_multiply(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ginibre(2, 2, &mut rng);
        let coeffs = tensor_coefficients(&x, &SystemSpec::single(2, n).unwrap()).unwrap();
        let want: C64 = x.trace().powu(n as u32);
        prop_assert!((trace_coeffs(&coeffs) - want).norm() <= 1e-9 * (1.0 + want.norm()));
        let hs = hs_inner(&coeffs, &coeffs).unwrap().re;
        let single: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((hs - single.powi(n as i32)).abs() <= 1e-9 * hs.max(1.0));
    }
}
