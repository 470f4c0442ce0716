//! Dense reference implementations used as test oracles. Everything here
//! works on explicit `d^n × d^n` matrices and shares no code with the
//! orbit-basis algorithms beyond the coefficient containers.
#![allow(dead_code)]

pub mod checks;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use permsym::orbit::{CountMatrix, OrbitBasis, OrbitCoefficients, C64};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Digits of `i` in base `d`, most significant (first copy) first.
pub fn digits(mut i: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = i % d;
        i /= d;
    }
    out
}

pub fn undigits(ds: &[usize], d: usize) -> usize {
    ds.iter().fold(0, |acc, &x| acc * d + x)
}

fn pair_count(i: &[usize], j: &[usize], d: usize) -> CountMatrix {
    let mut e = CountMatrix::zeros(d);
    for (&a, &b) in i.iter().zip(j) {
        e.set(a, b, e.get(a, b) + 1);
    }
    e
}

/// `label[i][j]`: orbit index of the pair `(i, j)`, or `None` outside the basis.
pub struct OrbitLabels {
    pub dim: usize,
    pub labels: Vec<Option<usize>>,
}

pub fn orbit_labels(basis: &OrbitBasis) -> OrbitLabels {
    let (d, n) = (basis.d(), basis.n());
    let dim = d.pow(n as u32);
    let mut labels = Vec::with_capacity(dim * dim);
    let index: HashMap<Vec<u32>, usize> = basis.orbits().iter().enumerate().map(|(k, e)| (e.entries().to_vec(), k)).collect();
    for i in 0..dim {
        let di = digits(i, d, n);
        for j in 0..dim {
            let dj = digits(j, d, n);
            labels.push(index.get(pair_count(&di, &dj, d).entries()).copied());
        }
    }
    OrbitLabels { dim, labels }
}

/// `Σ_r c_r C_r` as a dense matrix.
pub fn densify(x: &OrbitCoefficients, labels: &OrbitLabels) -> DMatrix<C64> {
    DMatrix::from_fn(labels.dim, labels.dim, |i, j| labels.labels[i * labels.dim + j].map_or(c(0.0), |r| x.values()[r]))
}

/// Read orbit coefficients off a permutation-invariant dense matrix by
/// averaging over every orbit member.
pub fn sparsify(m: &DMatrix<C64>, basis: &Arc<OrbitBasis>, labels: &OrbitLabels) -> OrbitCoefficients {
    let mut sums = vec![c(0.0); basis.len()];
    let mut counts = vec![0usize; basis.len()];
    for i in 0..labels.dim {
        for j in 0..labels.dim {
            if let Some(r) = labels.labels[i * labels.dim + j] {
                sums[r] += m[(i, j)];
                counts[r] += 1;
            }
        }
    }
    let values = sums.iter().zip(&counts).map(|(s, &k)| if k == 0 { c(0.0) } else { s / k as f64 }).collect();
    OrbitCoefficients::from_values(basis.clone(), values).unwrap()
}

/// `X^{⊗n}` by repeated Kronecker products.
pub fn tensor_power(x: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, c(1.0));
    for _ in 0..n {
        out = out.kronecker(x);
    }
    out
}

pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Random permutation-invariant coefficients (complex, not Hermitian).
pub fn random_coeffs<R: Rng>(basis: &Arc<OrbitBasis>, rng: &mut R) -> OrbitCoefficients {
    let values = (0..basis.len()).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    OrbitCoefficients::from_values(basis.clone(), values).unwrap()
}

/// Random Hermitian permutation-invariant coefficients: `c_{E^T} = conj(c_E)`.
pub fn random_hermitian_coeffs<R: Rng>(basis: &Arc<OrbitBasis>, rng: &mut R) -> OrbitCoefficients {
    let mut values = vec![c(0.0); basis.len()];
    for (i, e) in basis.orbits().iter().enumerate() {
        let j = basis.index_of(&e.transpose()).unwrap();
        if j < i {
            continue;
        }
        let v = if i == j { c(rng.sample(StandardNormal)) } else { C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) };
        values[i] = v;
        values[j] = v.conj();
    }
    OrbitCoefficients::from_values(basis.clone(), values).unwrap()
}

/// Permutation sending the copy-interleaved order `(a_1 b_1 … a_n b_n)` to
/// the grouped order `(a_1 … a_n b_1 … b_n)`.
pub fn grouped_index(i: usize, d_a: usize, d_b: usize, n: usize) -> usize {
    let ds = digits(i, d_a * d_b, n);
    let a: Vec<usize> = ds.iter().map(|&x| x / d_b).collect();
    let b: Vec<usize> = ds.iter().map(|&x| x % d_b).collect();
    undigits(&a, d_a) * d_b.pow(n as u32) + undigits(&b, d_b)
}

/// Reorder an interleaved bipartite operator to `A^n ⊗ B^n`.
pub fn to_grouped(x: &DMatrix<C64>, d_a: usize, d_b: usize, n: usize) -> DMatrix<C64> {
    let dim = x.nrows();
    let perm: Vec<usize> = (0..dim).map(|i| grouped_index(i, d_a, d_b, n)).collect();
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(perm[i], perm[j])] = x[(i, j)];
        }
    }
    out
}

/// Partial trace of `X` on `C^{p} ⊗ C^{q}` over the second factor.
pub fn trace_second(x: &DMatrix<C64>, p: usize, q: usize) -> DMatrix<C64> {
    DMatrix::from_fn(p, p, |i, j| (0..q).map(|k| x[(i * q + k, j * q + k)]).sum())
}

/// Partial trace over the first factor.
pub fn trace_first(x: &DMatrix<C64>, p: usize, q: usize) -> DMatrix<C64> {
    DMatrix::from_fn(q, q, |i, j| (0..p).map(|k| x[(k * q + i, k * q + j)]).sum())
}

/// Partial transpose of the second factor.
pub fn transpose_second(x: &DMatrix<C64>, p: usize, q: usize) -> DMatrix<C64> {
    DMatrix::from_fn(p * q, p * q, |r, s| {
        let (i, k) = (r / q, r % q);
        let (j, l) = (s / q, s % q);
        x[(i * q + l, j * q + k)]
    })
}

/// Link product `Γ^{N∘M}` for `M: X → Y`, `N: Y → Z` with Choi matrices
/// ordered (input, output): `Tr_Y[(Γ^M ⊗ 1_Z)^{T_Y} (1_X ⊗ Γ^N)]`.
pub fn link(gm: &DMatrix<C64>, gn: &DMatrix<C64>, dx: usize, dy: usize, dz: usize) -> DMatrix<C64> {
    let gmt = transpose_second(gm, dx, dy);
    let left = gmt.kronecker(&DMatrix::<C64>::identity(dz, dz));
    let right = DMatrix::<C64>::identity(dx, dx).kronecker(gn);
    let prod = left * right;
    // trace out the middle factor of X ⊗ Y ⊗ Z
    DMatrix::from_fn(dx * dz, dx * dz, |r, s| {
        let (i, k) = (r / dz, r % dz);
        let (j, l) = (s / dz, s % dz);
        (0..dy).map(|y| prod[((i * dy + y) * dz + k, (j * dy + y) * dz + l)]).sum()
    })
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eig(x: &DMatrix<C64>) -> f64 {
    let h = (x + x.adjoint()).scale(0.5);
    nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_abs(x: &DMatrix<C64>) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
