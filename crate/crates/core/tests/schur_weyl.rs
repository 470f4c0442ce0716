//! Schur–Weyl layer against hand enumerations and explicitly constructed
//! Young-symmetrized vectors.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use permsym::combinatorics::binomial;
use permsym::orbit::{count_of_pair, CountMatrix, OrbitBasis, SystemSpec};
use permsym::schur_weyl::{
    encoding_poly_m1, encoding_poly_m2, partitions, ssyt_count, ssyt_enumerate, syt_count, transition_action, ChangeOfBasis,
    EncodingPolynomial, MulSide, Partition, PolyMethod, Tableau,
};
use permsym::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{digits, undigits};

fn part(p: &[usize]) -> Partition {
    Partition::new(p.to_vec()).unwrap()
}

/// Distinct fillings obtained by permuting entries inside each row.
fn row_equivalents(t: &Tableau) -> Vec<Vec<Vec<u8>>> {
    let mut acc: Vec<Vec<Vec<u8>>> = vec![vec![]];
    for row in t.rows() {
        let mut perms = BTreeSet::new();
        permute(row.clone(), 0, &mut perms);
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut next = prefix.clone();
                    next.push(p.clone());
                    next
                })
            })
            .collect();
    }
    acc
}

fn permute(mut v: Vec<u8>, k: usize, out: &mut BTreeSet<Vec<u8>>) {
    if k == v.len() {
        out.insert(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v.clone(), k + 1, out);
        v.swap(k, i);
    }
}

/// Signed permutations of `0..len`.
fn signed_perms(len: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(v: &mut Vec<usize>, k: usize, sign: i32, out: &mut Vec<(Vec<usize>, i32)>) {
        if k == v.len() {
            out.push((v.clone(), sign));
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            rec(v, k + 1, if i == k { sign } else { -sign }, out);
            v.swap(k, i);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..len).collect(), 0, 1, &mut out);
    out
}

/// `|u_τ⟩ = Σ_{τ'∼τ} Σ_{c ∈ C_λ} sgn(c) ⊗_k |τ'(c(k))⟩` with boxes numbered
/// in row-reading order.
fn young_vector(t: &Tableau, d: usize) -> DVector<f64> {
    let shape = t.shape().clone();
    let n = shape.n();
    let boxes: Vec<(usize, usize)> = shape.parts().iter().enumerate().flat_map(|(i, &p)| (0..p).map(move |j| (i, j))).collect();
    let cols = shape.conjugate();
    // Every column permutation as a map on boxes, with its sign.
    let mut col_perms: Vec<(Vec<(usize, usize)>, i32)> = vec![(boxes.clone(), 1)];
    for (j, &h) in cols.iter().enumerate() {
        let mut next = Vec::new();
        for (map, s) in &col_perms {
            for (p, sp) in signed_perms(h) {
                let mut m = map.clone();
                for (k, b) in boxes.iter().enumerate() {
                    if b.1 == j {
                        m[k] = (p[b.0], j);
                    }
                }
                next.push((m, s * sp));
            }
        }
        col_perms = next;
    }
    let mut v = DVector::zeros(d.pow(n as u32));
    for filling in row_equivalents(t) {
        for (map, s) in &col_perms {
            let word: Vec<usize> = map.iter().map(|&(i, j)| filling[i][j] as usize).collect();
            v[undigits(&word, d)] += *s as f64;
        }
    }
    v
}

/// `⟨u|C_E|w⟩` for every orbit `E` of `(d, n)`.
fn dense_coefficients(u: &DVector<f64>, w: &DVector<f64>, d: usize, n: usize) -> Vec<(CountMatrix, f64)> {
    let dim = d.pow(n as u32);
    let basis = OrbitBasis::full(SystemSpec::single(d, n).unwrap()).unwrap();
    let mut acc = vec![0.0; basis.len()];
    for i in 0..dim {
        for j in 0..dim {
            let e = count_of_pair(&digits(i, d, n), &digits(j, d, n), d).unwrap();
            acc[basis.index_of(&e).unwrap()] += u[i] * w[j];
        }
    }
    basis.orbits().iter().cloned().zip(acc).collect()
}

fn as_f64(b: &BigInt) -> f64 {
    b.to_string().parse().unwrap()
}

#[test]
fn partition_listings() {
    let list = |d, n| partitions(d, n).iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>();
    assert_eq!(list(2, 3), vec![vec![3], vec![2, 1]]);
    assert_eq!(list(2, 4), vec![vec![4], vec![3, 1], vec![2, 2]]);
    for n in 1..6 {
        assert_eq!(list(1, n), vec![vec![n]]);
    }
    for d in 1..4 {
        for n in 1..9 {
            assert!(partitions(d, n).len() as u64 <= ((n + 1) as u64).pow(d as u32));
        }
    }
}

#[test]
fn hook_formulas_match_enumerations() {
    assert_eq!(syt_count(&part(&[2, 1])).as_u128(), Some(2));
    for n in 1..7 {
        assert_eq!(syt_count(&part(&[n])).as_u128(), Some(1));
        assert_eq!(ssyt_count(&part(&[n]), 2).as_u128(), Some(n as u128 + 1));
    }
    for d in 1..5 {
        assert_eq!(ssyt_count(&part(&vec![1; d]), d).as_u128(), Some(1));
    }
    for d in 1..4 {
        for n in 1..7 {
            for lambda in partitions(d, n) {
                let listed = ssyt_enumerate(&lambda, d);
                assert_eq!(ssyt_count(&lambda, d).as_u128(), Some(listed.len() as u128));
                assert!(listed.iter().all(Tableau::is_semistandard));
            }
        }
    }
}

#[test]
fn dimension_identities() {
    for d in [2usize, 3] {
        for n in 1..=8usize {
            let (mut squares, mut weighted) = (0u128, 0u128);
            for lambda in partitions(d, n) {
                let m = ssyt_count(&lambda, d).as_u128().unwrap();
                squares += m * m;
                weighted += m * syt_count(&lambda).as_u128().unwrap();
            }
            let orbits = binomial((n + d * d - 1) as u64, n as u64).as_u128().unwrap();
            assert_eq!(squares, orbits, "Σ m² at d={d}, n={n}");
            assert_eq!(weighted, (d as u128).pow(n as u32), "Σ m f at d={d}, n={n}");
        }
    }
    let mf: u128 = partitions(2, 4).iter().map(|l| ssyt_count(l, 2).as_u128().unwrap() * syt_count(l).as_u128().unwrap()).sum();
    assert_eq!(mf, 16);
    let m2: u128 = partitions(2, 3).iter().map(|l| ssyt_count(l, 2).as_u128().unwrap().pow(2)).sum();
    assert_eq!(m2, 20);
}

#[test]
fn hook_shape_polynomial_from_young_vectors() {
    let t = Tableau::constant(&part(&[2, 1]));
    let f = encoding_poly_m1(&t, &t, 2).unwrap();
    let expected = EncodingPolynomial::monomial(CountMatrix::from_rows(&[&[2, 0], &[0, 1]]).unwrap(), BigInt::from(2))
        .add(&EncodingPolynomial::monomial(CountMatrix::from_rows(&[&[1, 1], &[1, 0]]).unwrap(), BigInt::from(-2)))
        .unwrap();
    assert_eq!(f, expected);
    let u = young_vector(&t, 2);
    for (e, v) in dense_coefficients(&u, &u, 2, 3) {
        assert_eq!(as_f64(&f.coefficient(&e)), v, "{e:?}");
    }
}

#[test]
fn single_box_is_one_variable() {
    for d in 1..5 {
        for a in 0..d {
            for b in 0..d {
                let ta = Tableau::new(vec![vec![a as u8]]).unwrap();
                let tb = Tableau::new(vec![vec![b as u8]]).unwrap();
                let v = EncodingPolynomial::variable(d, a, b);
                assert_eq!(encoding_poly_m1(&ta, &tb, d).unwrap(), v);
                assert_eq!(encoding_poly_m2(&ta, &tb, d).unwrap(), v);
            }
        }
    }
}

#[test]
fn coefficients_are_young_vector_matrix_elements() {
    for n in 1..=3 {
        for lambda in partitions(2, n) {
            let tabs = ssyt_enumerate(&lambda, 2);
            let vecs: Vec<_> = tabs.iter().map(|t| young_vector(t, 2)).collect();
            for (ti, t) in tabs.iter().enumerate() {
                for (gi, g) in tabs.iter().enumerate() {
                    let f = encoding_poly_m2(t, g, 2).unwrap();
                    for (e, v) in dense_coefficients(&vecs[ti], &vecs[gi], 2, n) {
                        assert_eq!(as_f64(&f.coefficient(&e)), v, "λ={:?} τ={:?} γ={:?} E={e:?}", lambda, t, g);
                    }
                }
            }
        }
    }
}

#[test]
fn gram_matrices_from_young_vectors() {
    let cob = ChangeOfBasis::build(2, 3).unwrap();
    let hook = cob.lambdas().iter().find(|l| l.partition.parts() == [2, 1]).unwrap();
    assert_eq!(hook.gram, DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0])));
    for (d, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let cob = ChangeOfBasis::build(d, n).unwrap();
        for l in cob.lambdas() {
            let vecs: Vec<_> = l.tableaux.iter().map(|t| young_vector(t, d)).collect();
            let m = vecs.len();
            let g = DMatrix::from_fn(m, m, |i, j| vecs[i].dot(&vecs[j]));
            assert_eq!(l.gram, g, "d={d} n={n} λ={:?}", l.partition);
            let prod = &l.factor * l.factor.transpose() * &l.gram;
            assert!((prod - DMatrix::identity(m, m)).abs().max() < 1e-10);
        }
    }
}

#[test]
fn qubit_gram_matrices_are_diagonal() {
    for n in 1..=6 {
        let cob = ChangeOfBasis::build(2, n).unwrap();
        for l in cob.lambdas() {
            let g = &l.gram;
            assert!(g.is_square());
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    assert!(i == j || g[(i, j)] == 0.0, "n={n} λ={:?}", l.partition);
                }
            }
        }
    }
}

#[test]
fn gram_is_the_raw_image_of_the_identity() {
    for (d, n) in [(2, 4), (3, 3)] {
        let cob = ChangeOfBasis::build(d, n).unwrap();
        let id = permsym::OrbitCoefficients::identity(cob.basis().clone());
        let raw = cob.psi(&id).unwrap();
        for (l, b) in cob.lambdas().iter().zip(raw.blocks()) {
            assert!((b.map(|z| z.re) - &l.gram).abs().max() < 1e-12);
            assert!(b.map(|z| z.im.abs()).max() == 0.0);
        }
    }
}

#[test]
fn weight_mismatch_gives_zero_polynomial() {
    let d = 3;
    for n in 2..=4 {
        for lambda in partitions(d, n) {
            let tabs = ssyt_enumerate(&lambda, d);
            for t in &tabs {
                for g in &tabs {
                    let f = encoding_poly_m2(t, g, d).unwrap();
                    if t.weight(d) != g.weight(d) {
                        assert_eq!(f.eval_identity(), BigInt::from(0));
                    }
                    assert!(f.terms().all(|(e, _)| e.n() == n));
                }
            }
        }
    }
}

fn methods_agree(d: usize, n: usize, spot: Option<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64((d * 100 + n) as u64);
    for lambda in partitions(d, n) {
        let tabs = ssyt_enumerate(&lambda, d);
        let pairs: Vec<(usize, usize)> = match spot {
            None => (0..tabs.len()).flat_map(|i| (0..tabs.len()).map(move |j| (i, j))).collect(),
            Some(k) => (0..k).map(|_| (rng.random_range(0..tabs.len()), rng.random_range(0..tabs.len()))).collect(),
        };
        for (i, j) in pairs {
            let m1 = encoding_poly_m1(&tabs[i], &tabs[j], d).unwrap();
            let m2 = encoding_poly_m2(&tabs[i], &tabs[j], d).unwrap();
            assert_eq!(m1, m2, "d={d} n={n} τ={:?} γ={:?}", tabs[i], tabs[j]);
        }
    }
}

#[test]
fn methods_agree_for_qubits() {
    for n in 1..=6 {
        methods_agree(2, n, None);
    }
}

#[test]
fn methods_agree_on_qutrit_spot_checks() {
    for n in 1..=4 {
        methods_agree(3, n, Some(12));
    }
}

#[test]
fn whole_tables_agree_between_methods() {
    for (d, n) in [(2, 4), (3, 3)] {
        let a = ChangeOfBasis::build_with(d, n, PolyMethod::CountFunctions).unwrap();
        let b = ChangeOfBasis::build_with(d, n, PolyMethod::DifferentialOperators).unwrap();
        for (la, lb) in a.lambdas().iter().zip(b.lambdas()) {
            assert_eq!(la.raw, lb.raw);
            assert_eq!(la.gram, lb.gram);
        }
    }
}

#[test]
fn transition_right_multiplication_matches_dense_product() {
    // n = 1: C_E = |a⟩⟨b| and T_{a→b} = |a⟩⟨b|.
    let d = 2;
    let e = CountMatrix::elementary(d, 0, 0, 1);
    let out = transition_action(&e, 0, 1, MulSide::Right).unwrap();
    assert_eq!(out, vec![(1, CountMatrix::elementary(d, 0, 1, 1))]);
    assert!(transition_action(&CountMatrix::elementary(d, 1, 1, 1), 0, 1, MulSide::Right).unwrap().is_empty());
}

fn dense_orbit(e: &CountMatrix) -> DMatrix<f64> {
    let (d, n) = (e.d(), e.n());
    let dim = d.pow(n as u32);
    DMatrix::from_fn(dim, dim, |i, j| {
        let f = count_of_pair(&digits(i, d, n), &digits(j, d, n), d).unwrap();
        if &f == e {
            1.0
        } else {
            0.0
        }
    })
}

fn dense_transition(d: usize, n: usize, a: usize, b: usize) -> DMatrix<f64> {
    let dim = d.pow(n as u32);
    let mut t = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let ds = digits(j, d, n);
        for k in 0..n {
            if ds[k] == b {
                let mut is = ds.clone();
                is[k] = a;
                t[(undigits(&is, d), j)] += 1.0;
            }
        }
    }
    t
}

#[test]
fn transition_actions_match_dense_products() {
    let (d, n) = (2, 3);
    let basis = OrbitBasis::full(SystemSpec::single(d, n).unwrap()).unwrap();
    for e in basis.orbits() {
        for (a, b) in [(0, 1), (1, 0)] {
            let t = dense_transition(d, n, a, b);
            for (side, dense) in [(MulSide::Right, dense_orbit(e) * &t), (MulSide::Left, &t * dense_orbit(e))] {
                let mut expect = DMatrix::zeros(dense.nrows(), dense.ncols());
                for (w, f) in transition_action(e, a, b, side).unwrap() {
                    expect += dense_orbit(&f) * w as f64;
                }
                assert_eq!(expect, dense, "E={e:?} {a}→{b} {side:?}");
            }
        }
    }
}

/// `f_A(X) = Σ_E Tr[A·C_E] x_E`, computed densely.
fn dense_polynomial(a: &DMatrix<f64>, basis: &OrbitBasis) -> EncodingPolynomial {
    let mut p = EncodingPolynomial::zero(basis.d(), basis.n());
    for e in basis.orbits() {
        let v = (a * dense_orbit(e)).trace();
        if v != 0.0 {
            p = p.add(&EncodingPolynomial::monomial(e.clone(), BigInt::from(v as i64))).unwrap();
        }
    }
    p
}

#[test]
fn transition_operators_are_dual_to_differential_operators() {
    let (d, n) = (2, 3);
    let basis = OrbitBasis::full(SystemSpec::single(d, n).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let e = basis.orbit(rng.random_range(0..basis.len())).clone();
        let base = dense_polynomial(&dense_orbit(&e), &basis);
        for (a, b) in [(0, 1), (1, 0)] {
            let t = dense_transition(d, n, a, b);
            let right = dense_polynomial(&(dense_orbit(&e) * &t), &basis);
            assert_eq!(right, base.d_star_op(b, a), "right E={e:?} {a}→{b}");
            let left = dense_polynomial(&(&t * dense_orbit(&e)), &basis);
            assert_eq!(left, base.d_op(a, b), "left E={e:?} {a}→{b}");
        }
    }
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let (cob, hit) = ChangeOfBasis::load_or_build(2, 4, Some(dir.path())).unwrap();
    assert!(!hit);
    let (again, hit) = ChangeOfBasis::load_or_build(2, 4, Some(dir.path())).unwrap();
    assert!(hit);
    assert_eq!(cob.to_bytes(), again.to_bytes());
    for (a, b) in cob.lambdas().iter().zip(again.lambdas()) {
        assert_eq!(a.raw, b.raw);
        assert_eq!(a.factor, b.factor);
    }

    let mut bytes = cob.to_bytes();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    assert!(matches!(ChangeOfBasis::from_bytes(&bytes), Err(Error::CacheFormat(_))));
    assert!(matches!(ChangeOfBasis::from_bytes(&bytes[..10]), Err(Error::CacheFormat(_))));

    // A file stored under the wrong name is rejected rather than trusted.
    let other = ChangeOfBasis::build(2, 3).unwrap();
    std::fs::write(dir.path().join(ChangeOfBasis::cache_file_name(2, 5)), other.to_bytes()).unwrap();
    assert!(ChangeOfBasis::load(dir.path(), 2, 5).is_err());
}

#[test]
fn orbit_basis_is_shared_by_equal_specs() {
    let cob = ChangeOfBasis::build(3, 2).unwrap();
    let fresh = Arc::new(OrbitBasis::full(SystemSpec::single(3, 2).unwrap()).unwrap());
    assert!(cob.basis().same_as(&fresh));
    assert!(cob.dimension_check());
}
