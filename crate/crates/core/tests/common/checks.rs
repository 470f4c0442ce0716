//! Dense-oracle comparisons for bipartite orbit operations. Coefficients
//! are small Gaussian integers so every float result is exact.

use std::sync::Arc;

use nalgebra::DMatrix;
use permsym::link::{build_tripartite, compose_after_encoder, compose_before_decoder, compose_covariant, RefCoefficients};
use permsym::marginal::{partial_trace_side, MarginalData};
use permsym::orbit::{
    hs_inner, partial_transpose_coeffs, trace_coeffs, transpose_coeffs, OrbitBasis, OrbitCoefficients, Side, SystemSpec, C64,
    DEFAULT_ORBIT_BUDGET,
};
use rand::Rng;

use super::*;

pub type Check = std::result::Result<(), String>;

fn int_coeffs<R: Rng>(basis: &Arc<OrbitBasis>, rng: &mut R) -> OrbitCoefficients {
    let values = (0..basis.len()).map(|_| C64::new(rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64)).collect();
    OrbitCoefficients::from_values(basis.clone(), values).unwrap()
}

fn int_ref<R: Rng>(d_ref: usize, basis: &Arc<OrbitBasis>, rng: &mut R) -> RefCoefficients {
    let parts = (0..d_ref * d_ref).map(|_| int_coeffs(basis, rng).values().to_vec()).collect();
    RefCoefficients::from_parts(d_ref, basis.clone(), parts).unwrap()
}

fn expect_zero(what: &str, err: f64) -> Check {
    if err == 0.0 {
        Ok(())
    } else {
        Err(format!("{what}: deviation {err:e}"))
    }
}

/// Dense operator `Σ_{k,l} |k⟩⟨l| ⊗ X_{kl}` (reference first).
pub fn dense_ref_first(x: &RefCoefficients, labels: &OrbitLabels) -> DMatrix<C64> {
    let d = x.d_ref();
    let mut out = DMatrix::zeros(d * labels.dim, d * labels.dim);
    for k in 0..d {
        for l in 0..d {
            let blk = densify(&x.block(k, l), labels);
            out.view_mut((k * labels.dim, l * labels.dim), (labels.dim, labels.dim)).copy_from(&blk);
        }
    }
    out
}

/// Dense operator `Σ_{k,l} X_{kl} ⊗ |k⟩⟨l|` (reference last).
pub fn dense_ref_last(x: &RefCoefficients, labels: &OrbitLabels) -> DMatrix<C64> {
    let d = x.d_ref();
    let mut out = DMatrix::zeros(d * labels.dim, d * labels.dim);
    for k in 0..d {
        for l in 0..d {
            let blk = densify(&x.block(k, l), labels);
            for i in 0..labels.dim {
                for j in 0..labels.dim {
                    out[(i * d + k, j * d + l)] = blk[(i, j)];
                }
            }
        }
    }
    out
}

/// Trace, HS inner product, transpose, both partial transposes and both
/// partial traces on `[d_a, d_b]`, `n` copies.
pub fn bipartite_operations<R: Rng>(d_a: usize, d_b: usize, n: usize, rng: &mut R) -> Check {
    let spec = SystemSpec::bipartite(d_a, d_b, n).unwrap();
    let md = MarginalData::for_spec(&spec).unwrap();
    let joint = md.joint().clone();
    let labels = orbit_labels(&joint);
    let (la, lb) = (orbit_labels(md.a_basis()), orbit_labels(md.b_basis()));
    let (pa, pb) = (d_a.pow(n as u32), d_b.pow(n as u32));
    let x = int_coeffs(&joint, rng);
    let y = int_coeffs(&joint, rng);
    let (dx, dy) = (densify(&x, &labels), densify(&y, &labels));

    expect_zero("trace", (trace_coeffs(&x) - dx.trace()).norm())?;
    let hs: C64 = dx.iter().zip(dy.iter()).map(|(a, b)| a.conj() * b).sum();
    expect_zero("HS inner product", (hs_inner(&x, &y).unwrap() - hs).norm())?;
    let t = transpose_coeffs(&x).unwrap();
    expect_zero("transpose", max_abs(&(densify(&t, &orbit_labels(t.basis())) - dx.transpose())))?;

    let grouped = to_grouped(&dx, d_a, d_b, n);
    let tb = partial_transpose_coeffs(&x, Side::B).unwrap();
    let want_b = transpose_second(&grouped, pa, pb);
    expect_zero("partial transpose B", max_abs(&(to_grouped(&densify(&tb, &orbit_labels(tb.basis())), d_a, d_b, n) - want_b)))?;
    let ta = partial_transpose_coeffs(&x, Side::A).unwrap();
    let want_a = grouped.transpose();
    let want_a = transpose_second(&want_a, pa, pb);
    expect_zero("partial transpose A", max_abs(&(to_grouped(&densify(&ta, &orbit_labels(ta.basis())), d_a, d_b, n) - want_a)))?;

    let trb = partial_trace_side(&x, &md, Side::B).unwrap();
    expect_zero("partial trace over B", max_abs(&(densify(&trb, &la) - trace_second(&grouped, pa, pb))))?;
    let tra = partial_trace_side(&x, &md, Side::A).unwrap();
    expect_zero("partial trace over A", max_abs(&(densify(&tra, &lb) - trace_first(&grouped, pa, pb))))?;
    Ok(())
}

/// Encoder and decoder link products against the dense link formula.
pub fn link_products<R: Rng>(d_a: usize, d_b: usize, n: usize, d_ref: usize, rng: &mut R) -> Check {
    let spec = SystemSpec::bipartite(d_a, d_b, n).unwrap();
    let md = MarginalData::for_spec(&spec).unwrap();
    let labels = orbit_labels(md.joint());
    let (la, lb) = (orbit_labels(md.a_basis()), orbit_labels(md.b_basis()));
    let (pa, pb) = (d_a.pow(n as u32), d_b.pow(n as u32));
    let ch = int_coeffs(md.joint(), rng);
    let gn = to_grouped(&densify(&ch, &labels), d_a, d_b, n);

    let enc = int_ref(d_ref, md.a_basis(), rng);
    let m = compose_after_encoder(&ch, &enc, &md).unwrap();
    let want = link(&dense_ref_first(&enc, &la), &gn, d_ref, pa, pb);
    expect_zero("encoder link product", max_abs(&(dense_ref_first(&m, &lb) - want)))?;

    let dec = int_ref(d_ref, md.b_basis(), rng);
    let mp = compose_before_decoder(&ch, &dec, &md).unwrap();
    let want = link(&gn, &dense_ref_last(&dec, &lb), pa, pb, d_ref);
    expect_zero("decoder link product", max_abs(&(dense_ref_last(&mp, &la) - want)))?;
    Ok(())
}

/// Covariant composition of two symmetric channels through the
/// tripartite table, with full or restricted supports.
pub fn covariant_link<R: Rng>(dims: [usize; 3], n: usize, sparse: bool, rng: &mut R) -> Check {
    let [d_a, d_b, d_c] = dims;
    let first_spec = SystemSpec::bipartite(d_a, d_b, n).unwrap();
    let second_spec = SystemSpec::bipartite(d_b, d_c, n).unwrap();
    let (s1, s2) = if sparse {
        let s1 = permsym::orbit::Support::from_cells(
            d_a * d_b,
            (0..d_a * d_b).flat_map(|r| (0..d_a * d_b).map(move |c| (r, c))).filter(|&(r, c)| (r + 2 * c) % 3 != 1),
        );
        let s2 = permsym::orbit::Support::from_cells(
            d_b * d_c,
            (0..d_b * d_c).flat_map(|r| (0..d_b * d_c).map(move |c| (r, c))).filter(|&(r, c)| (2 * r + c) % 3 != 2),
        );
        (Some(s1), Some(s2))
    } else {
        (None, None)
    };
    let b1 = Arc::new(OrbitBasis::build(first_spec, s1.clone(), DEFAULT_ORBIT_BUDGET).unwrap());
    let b2 = Arc::new(OrbitBasis::build(second_spec, s2.clone(), DEFAULT_ORBIT_BUDGET).unwrap());
    let table = build_tripartite(dims, n, s1, s2, DEFAULT_ORBIT_BUDGET).unwrap();
    let x = int_coeffs(&b1, rng);
    let y = int_coeffs(&b2, rng);
    let p = compose_covariant(&x, &y, &table).unwrap();
    let (pa, pb, pc) = (d_a.pow(n as u32), d_b.pow(n as u32), d_c.pow(n as u32));
    let gx = to_grouped(&densify(&x, &orbit_labels(&b1)), d_a, d_b, n);
    let gy = to_grouped(&densify(&y, &orbit_labels(&b2)), d_b, d_c, n);
    let want = link(&gx, &gy, pa, pb, pc);
    let got = to_grouped(&densify(&p, &orbit_labels(p.basis())), d_a, d_c, n);
    expect_zero("covariant link product", max_abs(&(got - want)))
}
