//! Channel concatenation in the orbit basis.
//!
//! Encoders and decoders carry a small reference system `R` of dimension
//! `d_R`. Their Choi operators are stored as a `d_R × d_R` grid of orbit
//! coefficient vectors:
//!
//! * encoder `R → A^n`: `Γ^E = Σ_{k,l} |k⟩⟨l| ⊗ E_{kl}` (reference first),
//! * decoder `B^n → R`: `Γ^D = Σ_{k,l} D_{kl} ⊗ |k⟩⟨l|` (reference last).
//!
//! Both layouts share [`RefCoefficients`]; the composition functions fix
//! which reading applies. Covariant compositions of two symmetric channels
//! go through a [`TripartiteTable`] of exact multiplicities.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::combinatorics::{multinomial, Exact};
use crate::error::{arg, Error, Result};
use crate::marginal::MarginalData;
use crate::orbit::{
    orbit_count, same_basis, trace_coeffs, transpose_coeffs, CountMatrix, OrbitBasis, OrbitCoefficients, Support, SystemSpec, C64,
    DEFAULT_ORBIT_BUDGET,
};

/// Largest reference dimension accepted by the reference-system types.
pub const MAX_REFERENCE_DIM: usize = 64;

/// `Σ_{k,l,r} c_{k,l,r} |k⟩⟨l| ⊗ C_r` with a shared orbit basis.
#[derive(Clone, Debug)]
pub struct RefCoefficients {
    d_ref: usize,
    basis: Arc<OrbitBasis>,
    values: Vec<Vec<C64>>,
}

impl RefCoefficients {
    pub fn zeros(d_ref: usize, basis: Arc<OrbitBasis>) -> Result<Self> {
        if d_ref == 0 || d_ref > MAX_REFERENCE_DIM {
            return arg(format!(
                "reference dimension {d_ref} is outside 1..={MAX_REFERENCE_DIM}; \
                 maps whose reference is itself an n-fold system cannot be represented"
            ));
        }
        let values = vec![vec![C64::new(0.0, 0.0); basis.len()]; d_ref * d_ref];
        Ok(RefCoefficients { d_ref, basis, values })
    }

    /// Build from per-`(k, l)` coefficient vectors (row-major over `k, l`).
    pub fn from_parts(d_ref: usize, basis: Arc<OrbitBasis>, values: Vec<Vec<C64>>) -> Result<Self> {
        let mut out = Self::zeros(d_ref, basis)?;
        if values.len() != d_ref * d_ref || values.iter().any(|v| v.len() != out.basis.len()) {
            return arg("reference coefficient grid has the wrong shape");
        }
        out.values = values;
        Ok(out)
    }

    /// Single-copy Choi matrix (`n = 1`) with the reference as the first factor.
    pub fn from_single_copy(gamma: &DMatrix<C64>, d_ref: usize, basis: Arc<OrbitBasis>) -> Result<Self> {
        let d = basis.d();
        if basis.n() != 1 || gamma.nrows() != d_ref * d || gamma.ncols() != d_ref * d {
            return arg("single-copy conversion needs n = 1 and a (d_R·d)-square matrix");
        }
        let mut out = Self::zeros(d_ref, basis)?;
        for k in 0..d_ref {
            for l in 0..d_ref {
                for a in 0..d {
                    for b in 0..d {
                        if let Some(i) = out.basis.index_of(&CountMatrix::elementary(d, a, b, 1)) {
                            out.values[k * d_ref + l][i] = gamma[(k * d + a, l * d + b)];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn d_ref(&self) -> usize {
        self.d_ref
    }

    pub fn basis(&self) -> &Arc<OrbitBasis> {
        &self.basis
    }

    pub fn get(&self, k: usize, l: usize) -> &[C64] {
        &self.values[k * self.d_ref + l]
    }

    pub fn get_mut(&mut self, k: usize, l: usize) -> &mut [C64] {
        &mut self.values[k * self.d_ref + l]
    }

    /// The `(k, l)` entry as a standalone coefficient vector.
    pub fn block(&self, k: usize, l: usize) -> OrbitCoefficients {
        OrbitCoefficients::from_values(self.basis.clone(), self.get(k, l).to_vec()).expect("shape is fixed")
    }

    /// Adjoint-map reshuffle `c'_{k,l,r} = c_{l,k,r^T}`.
    ///
    /// Turns the Choi coefficients of a decoder `B^n → R` (reference last)
    /// into those of its adjoint `R → B^n` (reference first), and back.
    pub fn adjoint_swap(&self) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        let mut basis = self.basis.clone();
        for k in 0..self.d_ref {
            for l in 0..self.d_ref {
                let t = transpose_coeffs(&self.block(l, k))?;
                basis = t.basis().clone();
                values.push(t.values().to_vec());
            }
        }
        Ok(RefCoefficients { d_ref: self.d_ref, basis, values })
    }

    /// `Tr` over the symmetric factor: the `d_R × d_R` matrix `[Tr E_{kl}]`.
    pub fn trace_symmetric(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.d_ref, self.d_ref, |k, l| trace_coeffs(&self.block(k, l)))
    }

    /// `Tr_R`: `Σ_k E_{kk}`.
    pub fn trace_reference(&self) -> OrbitCoefficients {
        let mut out = OrbitCoefficients::zeros(self.basis.clone());
        for k in 0..self.d_ref {
            out.values_mut().iter_mut().zip(self.get(k, k)).for_each(|(o, v)| *o += v);
        }
        out
    }

    /// Largest violation of `c_{l,k,r^T} = conj(c_{k,l,r})`.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        let adj = self.adjoint_swap()?;
        let mut worst: f64 = 0.0;
        for (a, b) in self.values.iter().zip(&adj.values) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y.conj()).norm());
            }
        }
        Ok(worst)
    }

    pub fn max_abs_diff(&self, other: &RefCoefficients) -> Result<f64> {
        same_basis(&self.basis, &other.basis)?;
        if self.d_ref != other.d_ref {
            return arg("reference dimensions differ");
        }
        Ok(self.values.iter().zip(&other.values).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm())).fold(0.0, f64::max))
    }
}

fn check_channel(channel: &OrbitCoefficients, md: &MarginalData) -> Result<()> {
    if !channel.basis().same_as(md.joint()) {
        return arg("channel coefficients are not on the marginal table's joint basis");
    }
    Ok(())
}

/// `M = N ∘ E`: coefficients `c^M_{k,l,t} = Σ_{s: t(s)=t} κ^B_s c^E_{k,l,r(s)} c^N_s`.
pub fn compose_after_encoder(channel: &OrbitCoefficients, encoder: &RefCoefficients, md: &MarginalData) -> Result<RefCoefficients> {
    check_channel(channel, md)?;
    if !encoder.basis.same_as(md.a_basis()) {
        return arg("encoder coefficients are not on the A basis of the marginal table");
    }
    let (r, t, kb) = (md.r(), md.t(), md.kappa_b_f64());
    let weights: Vec<(usize, usize, C64)> =
        channel.values().iter().enumerate().filter(|(_, v)| **v != C64::new(0.0, 0.0)).map(|(s, v)| (r[s], t[s], v * kb[s])).collect();
    let out_len = md.b_basis().len();
    let values = encoder
        .values
        .par_iter()
        .map(|enc| {
            let mut out = vec![C64::new(0.0, 0.0); out_len];
            for &(rs, ts, w) in &weights {
                out[ts] += w * enc[rs];
            }
            out
        })
        .collect();
    Ok(RefCoefficients { d_ref: encoder.d_ref, basis: md.b_basis().clone(), values })
}

/// `M' = D ∘ N`: coefficients `c^{M'}_{r,k,l} = Σ_{s: r(s)=r} κ^A_s c^D_{t(s),k,l} c^N_s`.
///
/// Output uses the decoder layout (reference last) on the A basis.
pub fn compose_before_decoder(channel: &OrbitCoefficients, decoder: &RefCoefficients, md: &MarginalData) -> Result<RefCoefficients> {
    check_channel(channel, md)?;
    if !decoder.basis.same_as(md.b_basis()) {
        return arg("decoder coefficients are not on the B basis of the marginal table");
    }
    let (r, t, ka) = (md.r(), md.t(), md.kappa_a_f64());
    let weights: Vec<(usize, usize, C64)> =
        channel.values().iter().enumerate().filter(|(_, v)| **v != C64::new(0.0, 0.0)).map(|(s, v)| (r[s], t[s], v * ka[s])).collect();
    let out_len = md.a_basis().len();
    let values = decoder
        .values
        .par_iter()
        .map(|dec| {
            let mut out = vec![C64::new(0.0, 0.0); out_len];
            for &(rs, ts, w) in &weights {
                out[rs] += w * dec[ts];
            }
            out
        })
        .collect();
    Ok(RefCoefficients { d_ref: decoder.d_ref, basis: md.a_basis().clone(), values })
}

/// Apply `N^{⊗n}` to an `R`-correlated state `ρ_{R A^n}` stored with the
/// reference first. A plain state on `A^n` is the case `d_R = 1`.
pub fn apply_channel_to_state(state: &RefCoefficients, channel: &OrbitCoefficients, md: &MarginalData) -> Result<RefCoefficients> {
    compose_after_encoder(channel, state, md)
}

/// Exact multiplicities `𝒦^w_{s,u}` for `P = O ∘ N` with `N: A → B`,
/// `O: B → C`, all three systems symmetric.
#[derive(Debug)]
pub struct TripartiteTable {
    dims: [usize; 3],
    n: usize,
    n_basis: Arc<OrbitBasis>,
    o_basis: Arc<OrbitBasis>,
    out_basis: Arc<OrbitBasis>,
    entries: Vec<(usize, usize, usize, Exact)>,
    weights: Vec<f64>,
    digest: String,
}

impl TripartiteTable {
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn copies(&self) -> usize {
        self.n
    }

    /// Basis of the first channel, on `[d_A, d_B]`.
    pub fn first_basis(&self) -> &Arc<OrbitBasis> {
        &self.n_basis
    }

    /// Basis of the second channel, on `[d_B, d_C]`.
    pub fn second_basis(&self) -> &Arc<OrbitBasis> {
        &self.o_basis
    }

    /// Basis of the composition, on `[d_A, d_C]`.
    pub fn output_basis(&self) -> &Arc<OrbitBasis> {
        &self.out_basis
    }

    /// Sparse entries `(s, u, w, 𝒦^w_{s,u})`.
    pub fn entries(&self) -> &[(usize, usize, usize, Exact)] {
        &self.entries
    }

    /// Content hash of the dimensions, copy number and supports.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Look up one multiplicity (zero when absent).
    pub fn get(&self, s: usize, u: usize, w: usize) -> Exact {
        self.entries.iter().find(|e| e.0 == s && e.1 == u && e.2 == w).map_or(Exact::zero(), |e| e.3.clone())
    }
}

fn support_bytes(s: Option<&Support>) -> Vec<u8> {
    match s {
        None => vec![0xff],
        Some(s) => {
            let mut v = vec![0x01];
            v.extend(s.cells().flat_map(|(a, b)| [(a as u32).to_le_bytes(), (b as u32).to_le_bytes()]).flatten());
            v
        }
    }
}

/// Content hash used to key cached tripartite tables.
pub fn tripartite_digest(dims: [usize; 3], n: usize, first: Option<&Support>, second: Option<&Support>) -> String {
    let mut h = Sha256::new();
    for d in dims {
        h.update((d as u64).to_le_bytes());
    }
    h.update((n as u64).to_le_bytes());
    h.update(support_bytes(first));
    h.update(support_bytes(second));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Enumerate tripartite count matrices allowed by both supports and
/// accumulate `𝒦^w_{s,u}`.
///
/// A tripartite pair is read as rows `(i_A, k_B, i_C)` and columns
/// `(j_A, i_B, j_C)`, where `k_B` / `i_B` are the summed intermediate
/// indices. With that labelling the first channel sees `s(z)` and the
/// second `u(z)` without any transposition; the weight counts the ways to
/// place the intermediate labels at fixed outer labels.
pub fn build_tripartite(
    dims: [usize; 3],
    n: usize,
    first_support: Option<Support>,
    second_support: Option<Support>,
    budget: u128,
) -> Result<TripartiteTable> {
    let [d_a, d_b, d_c] = dims;
    if dims.iter().any(|&d| d == 0) || n == 0 {
        return arg("tripartite dimensions and copy number must be positive");
    }
    let first_support = first_support.filter(|s| !s.is_full());
    let second_support = second_support.filter(|s| !s.is_full());
    let digest = tripartite_digest(dims, n, first_support.as_ref(), second_support.as_ref());
    let ab = d_a * d_b;
    let bc = d_b * d_c;
    let ac = d_a * d_c;
    let in_first = |r: usize, c: usize| first_support.as_ref().map_or(true, |s| s.contains(r, c));
    let in_second = |r: usize, c: usize| second_support.as_ref().map_or(true, |s| s.contains(r, c));

    // Allowed tripartite cells with the positions they feed in s, u and w.
    struct Cell {
        s: usize,
        u: usize,
        w: usize,
    }
    let mut cells = Vec::new();
    let mut w_cells = Vec::new();
    for a_a in 0..d_a {
        for a_b in 0..d_b {
            for a_c in 0..d_c {
                for b_a in 0..d_a {
                    for b_b in 0..d_b {
                        for b_c in 0..d_c {
                            let (sr, sc) = (a_a * d_b + a_b, b_a * d_b + b_b);
                            let (ur, uc) = (a_b * d_c + a_c, b_b * d_c + b_c);
                            if !in_first(sr, sc) || !in_second(ur, uc) {
                                continue;
                            }
                            let (wr, wc) = (a_a * d_c + a_c, b_a * d_c + b_c);
                            cells.push(Cell { s: sr * ab + sc, u: ur * bc + uc, w: wr * ac + wc });
                            w_cells.push((wr, wc));
                        }
                    }
                }
            }
        }
    }
    let needed = orbit_count(cells.len(), n);
    if needed.as_u128().map_or(true, |c| c > budget) {
        return Err(Error::Capacity {
            what: format!("tripartite enumeration (dims {dims:?}, n={n}, {} cells)", cells.len()),
            needed: needed.to_string(),
            budget,
        });
    }
    let n_basis = Arc::new(OrbitBasis::build(SystemSpec::bipartite(d_a, d_b, n)?, first_support.clone(), budget)?);
    let o_basis = Arc::new(OrbitBasis::build(SystemSpec::bipartite(d_b, d_c, n)?, second_support.clone(), budget)?);
    let out_support = if first_support.is_none() && second_support.is_none() { None } else { Some(Support::from_cells(ac, w_cells)) };
    let out_basis = Arc::new(OrbitBasis::build(SystemSpec::bipartite(d_a, d_c, n)?, out_support, budget)?);

    // Cells sharing a w position form one multinomial group.
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        groups.entry(c.w).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();

    let k = cells.len();
    let process = |z: &[u32], acc: &mut HashMap<(usize, usize, usize), Exact>| -> Result<()> {
        let mut s = CountMatrix::zeros(ab);
        let mut u = CountMatrix::zeros(bc);
        let mut w = CountMatrix::zeros(ac);
        for (c, &v) in cells.iter().zip(z) {
            if v > 0 {
                s.entries_mut()[c.s] += v;
                u.entries_mut()[c.u] += v;
                w.entries_mut()[c.w] += v;
            }
        }
        let (Some(si), Some(ui), Some(wi)) = (n_basis.index_of(&s), o_basis.index_of(&u), out_basis.index_of(&w)) else {
            return arg("tripartite marginal escaped its basis");
        };
        let weight = groups.iter().fold(Exact::one(), |acc, g| acc.mul(&multinomial(g.iter().map(|&i| z[i] as u64))));
        let slot = acc.entry((si, ui, wi)).or_insert_with(Exact::zero);
        *slot = slot.add(&weight);
        Ok(())
    };

    let partials: Vec<Result<HashMap<(usize, usize, usize), Exact>>> = if k == 0 {
        Vec::new()
    } else if k == 1 {
        let mut acc = HashMap::new();
        vec![process(&[n as u32], &mut acc).map(|_| acc)]
    } else {
        (0..=n as u32)
            .into_par_iter()
            .map(|first| {
                let mut acc = HashMap::new();
                let mut z = vec![0u32; k];
                z[0] = first;
                let mut status = Ok(());
                for_each_composition(&mut z, 1, n as u32 - first, &mut |z| {
                    if status.is_ok() {
                        status = process(z, &mut acc);
                    }
                });
                status.map(|_| acc)
            })
            .collect()
    };
    let mut merged: HashMap<(usize, usize, usize), Exact> = HashMap::new();
    for part in partials {
        for (key, v) in part? {
            let slot = merged.entry(key).or_insert_with(Exact::zero);
            *slot = slot.add(&v);
        }
    }
    let mut entries: Vec<(usize, usize, usize, Exact)> = merged.into_iter().map(|((s, u, w), v)| (s, u, w, v)).collect();
    entries.sort_by_key(|e| (e.2, e.0, e.1));
    let weights = entries.iter().map(|e| e.3.to_f64()).collect();
    Ok(TripartiteTable { dims, n, n_basis, o_basis, out_basis, entries, weights, digest })
}

fn for_each_composition(z: &mut [u32], pos: usize, left: u32, emit: &mut impl FnMut(&[u32])) {
    if pos + 1 == z.len() {
        z[pos] = left;
        emit(z);
        z[pos] = 0;
        return;
    }
    for v in 0..=left {
        z[pos] = v;
        for_each_composition(z, pos + 1, left - v, emit);
    }
    z[pos] = 0;
}

/// Process-wide cache of tripartite tables keyed by their content hash.
#[derive(Default)]
pub struct TableCache {
    tables: Mutex<HashMap<String, Arc<TripartiteTable>>>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(
        &self,
        dims: [usize; 3],
        n: usize,
        first_support: Option<Support>,
        second_support: Option<Support>,
    ) -> Result<Arc<TripartiteTable>> {
        let f = first_support.filter(|s| !s.is_full());
        let s = second_support.filter(|s| !s.is_full());
        let key = tripartite_digest(dims, n, f.as_ref(), s.as_ref());
        if let Some(t) = self.tables.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let table = Arc::new(build_tripartite(dims, n, f, s, DEFAULT_ORBIT_BUDGET)?);
        self.tables.lock().expect("cache lock").insert(key, table.clone());
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.tables.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `P = O ∘ N` for covariant channels: `c^P_w = Σ_{s,u} 𝒦^w_{s,u} c^N_s c^O_u`.
pub fn compose_covariant(first: &OrbitCoefficients, second: &OrbitCoefficients, table: &TripartiteTable) -> Result<OrbitCoefficients> {
    let first = first.reindex(&table.n_basis)?;
    let second = second.reindex(&table.o_basis)?;
    let mut out = OrbitCoefficients::zeros(table.out_basis.clone());
    let (cf, cs) = (first.values(), second.values());
    let values = out.values_mut();
    for (e, &k) in table.entries.iter().zip(&table.weights) {
        values[e.2] += cf[e.0] * cs[e.1] * k;
    }
    Ok(out)
}

/// Apply `N^{⊗n}` to a symmetric joint state `ρ_{R^n A^n}`, read as the
/// Choi operator of a preparation `R → A`. The table must be built for
/// `[d_R, d_A, d_B]`.
pub fn apply_channel_to_joint_state(
    state: &OrbitCoefficients,
    channel: &OrbitCoefficients,
    table: &TripartiteTable,
) -> Result<OrbitCoefficients> {
    compose_covariant(state, channel, table)
}
