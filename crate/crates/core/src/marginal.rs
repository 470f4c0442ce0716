//! Marginal orbits of a bipartite basis and the partial-trace multiplicities.
//!
//! For a joint orbit `s` on `[d_A, d_B]`, `r(s)` and `t(s)` are the count
//! matrices obtained by summing out the B and A labels. Tracing out `B^n`
//! maps `C_s` to `κ^A_s · C_{r(s)}` when `t(s)` is diagonal and to zero
//! otherwise; `κ^A_s` is a product of multinomials, one per A-pair.

use std::sync::Arc;

use crate::combinatorics::{multinomial, Exact};
use crate::error::{arg, Error, Result};
use crate::orbit::{same_basis, CountMatrix, OrbitBasis, OrbitCoefficients, Side, SystemSpec, C64};

/// Per-joint-orbit marginals and multiplicities.
#[derive(Debug, Clone)]
pub struct MarginalData {
    joint: Arc<OrbitBasis>,
    a_basis: Arc<OrbitBasis>,
    b_basis: Arc<OrbitBasis>,
    r: Vec<usize>,
    t: Vec<usize>,
    kappa_a: Vec<Exact>,
    kappa_b: Vec<Exact>,
    tau: Vec<bool>,
    r_diag: Vec<bool>,
    kappa_a_f: Vec<f64>,
    kappa_b_f: Vec<f64>,
}

/// Split a joint count matrix into its A- and B-marginals and the two
/// multiplicities.
pub fn split_marginals(e: &CountMatrix, d_a: usize, d_b: usize) -> (CountMatrix, CountMatrix, Exact, Exact) {
    let mut ra = CountMatrix::zeros(d_a);
    let mut tb = CountMatrix::zeros(d_b);
    // groups[(a_A, b_A)] holds the counts over (a_B, b_B), and vice versa.
    let mut groups_a: Vec<Vec<u64>> = vec![Vec::new(); d_a * d_a];
    let mut groups_b: Vec<Vec<u64>> = vec![Vec::new(); d_b * d_b];
    let d = d_a * d_b;
    for row in 0..d {
        for col in 0..d {
            let v = e.get(row, col);
            if v == 0 {
                continue;
            }
            let (aa, ab) = (row / d_b, row % d_b);
            let (ba, bb) = (col / d_b, col % d_b);
            ra.set(aa, ba, ra.get(aa, ba) + v);
            tb.set(ab, bb, tb.get(ab, bb) + v);
            groups_a[aa * d_a + ba].push(v as u64);
            groups_b[ab * d_b + bb].push(v as u64);
        }
    }
    let ka = groups_a.into_iter().fold(Exact::one(), |acc, g| acc.mul(&multinomial(g)));
    let kb = groups_b.into_iter().fold(Exact::one(), |acc, g| acc.mul(&multinomial(g)));
    (ra, tb, ka, kb)
}

impl MarginalData {
    /// Marginals for the full bipartite basis of `spec`.
    pub fn for_spec(spec: &SystemSpec) -> Result<Self> {
        Self::for_joint(Arc::new(OrbitBasis::full(spec.clone())?))
    }

    /// Marginals for a (possibly restricted) joint basis, targeting full
    /// single-factor bases on A and B.
    pub fn for_joint(joint: Arc<OrbitBasis>) -> Result<Self> {
        let spec = joint.spec();
        let (d_a, d_b) = match spec.local_dims() {
            [a, b] => (*a, *b),
            dims => return arg(format!("marginal data needs a bipartite spec, got {dims:?}")),
        };
        let n = spec.copies();
        let a = Arc::new(OrbitBasis::full(SystemSpec::single(d_a, n)?)?);
        let b = Arc::new(OrbitBasis::full(SystemSpec::single(d_b, n)?)?);
        Self::new(joint, a, b)
    }

    /// Marginals into caller-provided A and B bases (e.g. algebra bases).
    pub fn new(joint: Arc<OrbitBasis>, a_basis: Arc<OrbitBasis>, b_basis: Arc<OrbitBasis>) -> Result<Self> {
        let (d_a, d_b) = match joint.spec().local_dims() {
            [a, b] => (*a, *b),
            dims => return arg(format!("marginal data needs a bipartite spec, got {dims:?}")),
        };
        if a_basis.d() != d_a || b_basis.d() != d_b || a_basis.n() != joint.n() || b_basis.n() != joint.n() {
            return arg("marginal bases do not match the joint spec");
        }
        let len = joint.len();
        let mut md = MarginalData {
            joint: joint.clone(),
            a_basis: a_basis.clone(),
            b_basis: b_basis.clone(),
            r: Vec::with_capacity(len),
            t: Vec::with_capacity(len),
            kappa_a: Vec::with_capacity(len),
            kappa_b: Vec::with_capacity(len),
            tau: Vec::with_capacity(len),
            r_diag: Vec::with_capacity(len),
            kappa_a_f: Vec::new(),
            kappa_b_f: Vec::new(),
        };
        for e in joint.orbits() {
            let (ra, tb, ka, kb) = split_marginals(e, d_a, d_b);
            let ri = a_basis.index_of(&ra).ok_or_else(|| Error::Argument(format!("A-marginal {:?} missing from A basis", ra.entries())))?;
            let ti = b_basis.index_of(&tb).ok_or_else(|| Error::Argument(format!("B-marginal {:?} missing from B basis", tb.entries())))?;
            md.tau.push(tb.is_diagonal());
            md.r_diag.push(ra.is_diagonal());
            md.r.push(ri);
            md.t.push(ti);
            md.kappa_a.push(ka);
            md.kappa_b.push(kb);
        }
        md.refresh_floats();
        Ok(md)
    }

    fn refresh_floats(&mut self) {
        self.kappa_a_f = self.kappa_a.iter().map(Exact::to_f64).collect();
        self.kappa_b_f = self.kappa_b.iter().map(Exact::to_f64).collect();
    }

    /// Replace the A-multiplicities. Used by validation checks to confirm
    /// that a corrupted table is detected.
    pub fn with_kappa_a(mut self, kappa_a: Vec<Exact>) -> Result<Self> {
        if kappa_a.len() != self.kappa_a.len() {
            return arg("kappa table length mismatch");
        }
        self.kappa_a = kappa_a;
        self.refresh_floats();
        Ok(self)
    }

    pub fn joint(&self) -> &Arc<OrbitBasis> {
        &self.joint
    }

    pub fn a_basis(&self) -> &Arc<OrbitBasis> {
        &self.a_basis
    }

    pub fn b_basis(&self) -> &Arc<OrbitBasis> {
        &self.b_basis
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    pub fn kappa_a(&self) -> &[Exact] {
        &self.kappa_a
    }

    pub fn kappa_b(&self) -> &[Exact] {
        &self.kappa_b
    }

    pub fn tau(&self) -> &[bool] {
        &self.tau
    }

    pub(crate) fn kappa_a_f64(&self) -> &[f64] {
        &self.kappa_a_f
    }

    pub(crate) fn kappa_b_f64(&self) -> &[f64] {
        &self.kappa_b_f
    }
}

/// Convenience constructor matching the spec-level operation.
pub fn marginal_data(spec: &SystemSpec) -> Result<MarginalData> {
    MarginalData::for_spec(spec)
}

/// `Tr_{B^n} X` on the A basis: `Σ_{s: r(s)=r} x_s κ^A_s τ_s`.
pub fn partial_trace_coeffs(x: &OrbitCoefficients, md: &MarginalData) -> Result<OrbitCoefficients> {
    partial_trace_side(x, md, Side::B)
}

/// Trace out either factor. Tracing `A` lands on the B basis.
pub fn partial_trace_side(x: &OrbitCoefficients, md: &MarginalData, traced: Side) -> Result<OrbitCoefficients> {
    same_basis(x.basis(), &md.joint)?;
    let (target, idx, kappa, keep) = match traced {
        Side::B => (&md.a_basis, &md.r, &md.kappa_a_f, &md.tau),
        Side::A => (&md.b_basis, &md.t, &md.kappa_b_f, &md.r_diag),
    };
    let mut out = vec![C64::new(0.0, 0.0); target.len()];
    for (s, &v) in x.values().iter().enumerate() {
        if keep[s] && v != C64::new(0.0, 0.0) {
            out[idx[s]] += v * kappa[s];
        }
    }
    OrbitCoefficients::from_values(target.clone(), out)
}
