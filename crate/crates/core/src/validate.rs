//! Self-checks against explicitly constructed dense matrices and between the
//! two polynomial methods, runnable from the command line.
//!
//! Every check uses small Gaussian-integer coefficients from a fixed seed, so
//! orbit results and their dense counterparts agree exactly.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::block::{block_hs, block_trace};
use crate::combinatorics::{binomial, Exact};
use crate::link::{compose_after_encoder, compose_before_decoder, RefCoefficients};
use crate::marginal::{partial_trace_side, MarginalData};
use crate::orbit::{
    count_of_pair, hs_inner, partial_transpose_coeffs, trace_coeffs, transpose_coeffs, OrbitBasis, OrbitCoefficients, Side, SystemSpec, C64,
};
use crate::schur_weyl::{encoding_poly_m1, encoding_poly_m2, partitions, ssyt_count, ssyt_enumerate, syt_count, ChangeOfBasis};

/// How much of the suite to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Dense checks up to two copies.
    Quick,
    /// Dense checks up to three copies and the full method comparison.
    Full,
}

impl Level {
    fn max_copies(self) -> usize {
        match self {
            Level::Quick => 2,
            Level::Full => 3,
        }
    }
}

/// Result of one named invariant.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub level: Level,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn first_failure(&self) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| !o.passed)
    }
}

type Check = std::result::Result<String, String>;

/// Runs every invariant at the given level.
pub fn run(level: Level) -> Report {
    let n_max = level.max_copies();
    let mut outcomes = Vec::new();
    let mut record = |name: &str, check: Check| {
        let (passed, detail) = match check {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        outcomes.push(Outcome { name: name.to_string(), passed, detail });
    };
    // Quick stays at n ≤ 2 throughout; full reaches the larger anchors.
    let full = level == Level::Full;
    record("orbit-counts", orbit_counts(if full { 4 } else { n_max }));
    record("bipartite-operations", bipartite_suite(n_max));
    record("partial-trace", partial_trace_suite(n_max, None));
    record("link-products", link_suite(n_max));
    record("star-isomorphism", isomorphism_suite(if full { 4 } else { n_max }));
    record("dimension-identities", dimension_identities(if full { 8 } else { n_max }));
    let (qubits, qutrits) = if full { (6, 4) } else { (n_max, n_max) };
    record("polynomial-methods", polynomial_methods(qubits, qutrits));
    record("kappa-fault-injection", fault_injection());
    Report { level, outcomes }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int_coeffs(basis: &Arc<OrbitBasis>, rng: &mut ChaCha8Rng) -> OrbitCoefficients {
    let values = (0..basis.len()).map(|_| C64::new(rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64)).collect();
    OrbitCoefficients::from_values(basis.clone(), values).expect("length matches the basis")
}

fn int_ref(d_ref: usize, basis: &Arc<OrbitBasis>, rng: &mut ChaCha8Rng) -> RefCoefficients {
    let parts = (0..d_ref * d_ref).map(|_| int_coeffs(basis, rng).values().to_vec()).collect();
    RefCoefficients::from_parts(d_ref, basis.clone(), parts).expect("parts match the basis")
}

fn digits(mut i: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = i % d;
        i /= d;
    }
    out
}

/// Dense operator on `(C^{d_a})^{⊗n} ⊗ (C^{d_b})^{⊗n}` from bipartite orbit
/// coefficients. A single system is the case `d_b = 1`.
fn dense(x: &OrbitCoefficients, d_a: usize, d_b: usize) -> DMatrix<C64> {
    let basis = x.basis();
    let n = basis.spec().copies();
    let (pa, pb) = (d_a.pow(n as u32), d_b.pow(n as u32));
    let symbols = |row: usize| -> Vec<usize> {
        let (ia, ib) = (digits(row / pb, d_a, n), digits(row % pb, d_b, n));
        ia.iter().zip(&ib).map(|(a, b)| a * d_b + b).collect()
    };
    let rows: Vec<Vec<usize>> = (0..pa * pb).map(symbols).collect();
    DMatrix::from_fn(pa * pb, pa * pb, |r, c| {
        let e = count_of_pair(&rows[r], &rows[c], d_a * d_b).expect("symbols in range");
        basis.index_of(&e).map_or(C64::new(0.0, 0.0), |s| x.values()[s])
    })
}

fn dense_ref_first(x: &RefCoefficients, d_a: usize, d_b: usize) -> DMatrix<C64> {
    let d = x.d_ref();
    let blocks: Vec<DMatrix<C64>> = (0..d * d).map(|i| dense(&x.block(i / d, i % d), d_a, d_b)).collect();
    let m = blocks[0].nrows();
    DMatrix::from_fn(d * m, d * m, |r, c| blocks[(r / m) * d + c / m][(r % m, c % m)])
}

fn dense_ref_last(x: &RefCoefficients, d_a: usize, d_b: usize) -> DMatrix<C64> {
    let d = x.d_ref();
    let blocks: Vec<DMatrix<C64>> = (0..d * d).map(|i| dense(&x.block(i / d, i % d), d_a, d_b)).collect();
    let m = blocks[0].nrows();
    DMatrix::from_fn(d * m, d * m, |r, c| blocks[(r % d) * d + c % d][(r / d, c / d)])
}

fn trace_second(x: &DMatrix<C64>, p: usize, q: usize) -> DMatrix<C64> {
    DMatrix::from_fn(p, p, |i, j| (0..q).map(|k| x[(i * q + k, j * q + k)]).sum())
}

fn trace_first(x: &DMatrix<C64>, p: usize, q: usize) -> DMatrix<C64> {
    DMatrix::from_fn(q, q, |i, j| (0..p).map(|k| x[(k * q + i, k * q + j)]).sum())
}

fn transpose_second(x: &DMatrix<C64>, p: usize, q: usize) -> DMatrix<C64> {
    DMatrix::from_fn(p * q, p * q, |r, s| x[((r / q) * q + s % q, (s / q) * q + r % q)])
}

/// `Γ^{N∘M}` for `M: X → Y`, `N: Y → Z`, Choi matrices ordered (input, output).
fn link(gm: &DMatrix<C64>, gn: &DMatrix<C64>, dx: usize, dy: usize, dz: usize) -> DMatrix<C64> {
    let left = transpose_second(gm, dx, dy).kronecker(&DMatrix::<C64>::identity(dz, dz));
    let prod = left * DMatrix::<C64>::identity(dx, dx).kronecker(gn);
    DMatrix::from_fn(dx * dz, dx * dz, |r, s| {
        let (i, k, j, l) = (r / dz, r % dz, s / dz, s % dz);
        (0..dy).map(|y| prod[((i * dy + y) * dz + k, (j * dy + y) * dz + l)]).sum()
    })
}

fn max_abs(x: &DMatrix<C64>) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn exact(what: &str, err: f64) -> std::result::Result<(), String> {
    ensure(err == 0.0, || format!("{what}: deviation {err:e}"))
}

fn orbit_counts(n_max: usize) -> Check {
    for n in 1..=n_max {
        let got = OrbitBasis::full(SystemSpec::bipartite(2, 2, n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.len();
        let want = binomial(n as u64 + 15, 15).as_u128().unwrap_or(0) as usize;
        ensure(got == want, || format!("n={n}: {got} orbits, expected {want}"))?;
    }
    Ok(format!("qubit pairs up to n={n_max}"))
}

fn bipartite_suite(n_max: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (d_a, d_b) in [(2, 2), (2, 3)] {
        for n in 1..=n_max.min(if d_b == 3 { 2 } else { n_max }) {
            let basis = Arc::new(OrbitBasis::full(SystemSpec::bipartite(d_a, d_b, n).unwrap()).map_err(|e| e.to_string())?);
            let (pa, pb) = (d_a.pow(n as u32), d_b.pow(n as u32));
            let (x, y) = (int_coeffs(&basis, &mut rng), int_coeffs(&basis, &mut rng));
            let (dx, dy) = (dense(&x, d_a, d_b), dense(&y, d_a, d_b));
            exact("trace", (trace_coeffs(&x) - dx.trace()).norm())?;
            let hs: C64 = dx.iter().zip(dy.iter()).map(|(a, b)| a.conj() * b).sum();
            exact("HS inner product", (hs_inner(&x, &y).map_err(|e| e.to_string())? - hs).norm())?;
            let t = transpose_coeffs(&x).map_err(|e| e.to_string())?;
            exact("transpose", max_abs(&(dense(&t, d_a, d_b) - dx.transpose())))?;
            let tb = partial_transpose_coeffs(&x, Side::B).map_err(|e| e.to_string())?;
            exact("partial transpose B", max_abs(&(dense(&tb, d_a, d_b) - transpose_second(&dx, pa, pb))))?;
            let ta = partial_transpose_coeffs(&x, Side::A).map_err(|e| e.to_string())?;
            let want = transpose_second(&dx.transpose(), pa, pb);
            exact("partial transpose A", max_abs(&(dense(&ta, d_a, d_b) - want)))?;
        }
    }
    Ok(format!("trace, HS, transposes up to n={n_max}"))
}

fn partial_trace_check(md: &MarginalData, d_a: usize, d_b: usize, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let n = md.joint().spec().copies();
    let (pa, pb) = (d_a.pow(n as u32), d_b.pow(n as u32));
    let x = int_coeffs(md.joint(), rng);
    let dx = dense(&x, d_a, d_b);
    let trb = partial_trace_side(&x, md, Side::B).map_err(|e| e.to_string())?;
    exact(&format!("partial trace over B at n={n}"), max_abs(&(dense(&trb, d_a, 1) - trace_second(&dx, pa, pb))))?;
    let tra = partial_trace_side(&x, md, Side::A).map_err(|e| e.to_string())?;
    exact(&format!("partial trace over A at n={n}"), max_abs(&(dense(&tra, d_b, 1) - trace_first(&dx, pa, pb))))
}

/// Partial traces against the dense ones. `corrupt` perturbs one
/// A-multiplicity before checking.
fn partial_trace_suite(n_max: usize, corrupt: Option<usize>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=n_max {
        let mut md = MarginalData::for_spec(&SystemSpec::bipartite(2, 2, n).unwrap()).map_err(|e| e.to_string())?;
        if let Some(s) = corrupt {
            let mut kappa = md.kappa_a().to_vec();
            let s = s % kappa.len();
            kappa[s] = Exact::Small(kappa[s].as_u128().unwrap_or(1) + 1);
            md = md.with_kappa_a(kappa).map_err(|e| e.to_string())?;
        }
        partial_trace_check(&md, 2, 2, &mut rng)?;
    }
    Ok(format!("both sides up to n={n_max}"))
}

fn link_suite(n_max: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (d_a, d_b, d_ref) = (2, 2, 2);
    for n in 1..=n_max {
        let md = MarginalData::for_spec(&SystemSpec::bipartite(d_a, d_b, n).unwrap()).map_err(|e| e.to_string())?;
        let (pa, pb) = (d_a.pow(n as u32), d_b.pow(n as u32));
        let ch = int_coeffs(md.joint(), &mut rng);
        let gn = dense(&ch, d_a, d_b);
        let enc = int_ref(d_ref, md.a_basis(), &mut rng);
        let m = compose_after_encoder(&ch, &enc, &md).map_err(|e| e.to_string())?;
        let want = link(&dense_ref_first(&enc, d_a, 1), &gn, d_ref, pa, pb);
        exact(&format!("encoder link at n={n}"), max_abs(&(dense_ref_first(&m, d_b, 1) - want)))?;
        let dec = int_ref(d_ref, md.b_basis(), &mut rng);
        let mp = compose_before_decoder(&ch, &dec, &md).map_err(|e| e.to_string())?;
        let want = link(&gn, &dense_ref_last(&dec, d_b, 1), pa, pb, d_ref);
        exact(&format!("decoder link at n={n}"), max_abs(&(dense_ref_last(&mp, d_a, 1) - want)))?;
    }
    Ok(format!("encoder and decoder sides up to n={n_max}"))
}

fn isomorphism_suite(n_max: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=n_max {
        let cob = ChangeOfBasis::build(2, n).map_err(|e| e.to_string())?;
        let basis = cob.basis().clone();
        let (x, y) = (int_coeffs(&basis, &mut rng), int_coeffs(&basis, &mut rng));
        let (bx, by) = (cob.psi_tilde(&x).map_err(|e| e.to_string())?, cob.psi_tilde(&y).map_err(|e| e.to_string())?);
        // Orbit coefficients of the dense product, read off representatives.
        let prod = dense(&x, 2, 1) * dense(&y, 2, 1);
        let xy_values = basis
            .orbits()
            .iter()
            .map(|e| {
                let (i, j) = crate::orbit::representative(e);
                let idx = |t: &[usize]| t.iter().fold(0, |acc, &s| acc * 2 + s);
                prod[(idx(&i), idx(&j))]
            })
            .collect();
        let xy = OrbitCoefficients::from_values(basis.clone(), xy_values).map_err(|e| e.to_string())?;
        let bz = cob.psi_tilde(&xy).map_err(|e| e.to_string())?;
        let scale = 1.0 + bz.blocks().iter().map(max_abs).fold(0.0, f64::max);
        for ((p, q), z) in bx.blocks().iter().zip(by.blocks()).zip(bz.blocks()) {
            ensure(max_abs(&(p * q - z)) < 1e-9 * scale, || format!("multiplicativity fails at n={n}"))?;
        }
        let tr = trace_coeffs(&x);
        let bt = block_trace(&bx).map_err(|e| e.to_string())?;
        ensure((bt - tr).norm() < 1e-9 * (1.0 + tr.norm()), || format!("trace identity fails at n={n}"))?;
        let hs = hs_inner(&x, &y).map_err(|e| e.to_string())?;
        let bh = block_hs(&bx, &by).map_err(|e| e.to_string())?;
        ensure((bh - hs).norm() < 1e-9 * (1.0 + hs.norm()), || format!("HS identity fails at n={n}"))?;
    }
    Ok(format!("qubits up to n={n_max}"))
}

fn dimension_identities(n_max: usize) -> Check {
    for d in [2usize, 3] {
        for n in 1..=n_max {
            let (mut squares, mut weighted) = (0u128, 0u128);
            for lambda in partitions(d, n) {
                let m = ssyt_count(&lambda, d).as_u128().unwrap_or(0);
                squares += m * m;
                weighted += m * syt_count(&lambda).as_u128().unwrap_or(0);
            }
            let orbits = binomial((n + d * d - 1) as u64, n as u64).as_u128().unwrap_or(0);
            ensure(squares == orbits, || format!("Σ m² = {squares} ≠ {orbits} at d={d}, n={n}"))?;
            ensure(weighted == (d as u128).pow(n as u32), || format!("Σ m f = {weighted} ≠ d^n at d={d}, n={n}"))?;
        }
    }
    Ok(format!("d ∈ {{2,3}}, n ≤ {n_max}"))
}

fn polynomial_methods(qubits: usize, qutrits: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs_checked = 0usize;
    for (d, n_max, spot) in [(2, qubits, None), (3, qutrits, Some(12))] {
        for n in 1..=n_max {
            for lambda in partitions(d, n) {
                let tabs = ssyt_enumerate(&lambda, d);
                let pairs: Vec<(usize, usize)> = match spot {
                    None => (0..tabs.len()).flat_map(|i| (0..tabs.len()).map(move |j| (i, j))).collect(),
                    Some(k) => (0..k).map(|_| (rng.random_range(0..tabs.len()), rng.random_range(0..tabs.len()))).collect(),
                };
                for (i, j) in pairs {
                    let m1 = encoding_poly_m1(&tabs[i], &tabs[j], d).map_err(|e| e.to_string())?;
                    let m2 = encoding_poly_m2(&tabs[i], &tabs[j], d).map_err(|e| e.to_string())?;
                    ensure(m1 == m2, || format!("methods disagree at d={d}, n={n}, shape {:?}", lambda.parts()))?;
                    pairs_checked += 1;
                }
            }
        }
    }
    Ok(format!("{pairs_checked} tableau pairs, qubits n ≤ {qubits}, qutrit spot checks n ≤ {qutrits}"))
}

/// A corrupted A-multiplicity must be caught by the partial-trace oracle.
fn fault_injection() -> Check {
    match partial_trace_suite(2, Some(7)) {
        Ok(_) => Err("a corrupted multiplicity table passed the partial-trace oracle".into()),
        Err(why) => Ok(format!("corruption detected: {why}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let report = run(Level::Quick);
        assert!(report.passed(), "{:?}", report.first_failure());
    }
}
