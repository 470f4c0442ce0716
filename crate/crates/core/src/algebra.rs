//! Block-diagonal *-algebras `𝒜 = ⊕_j L(C^{d_j})` and their symmetric
//! tensor powers.
//!
//! An element of `𝒜^{⊗n}` that commutes with permutations is spanned by
//! orbit matrices whose count matrix is block diagonal. Such a count matrix
//! splits into one count matrix per block; the split records how many
//! copies `μ_j` sit in block `j`. The irreducible blocks are labelled by
//! [`FlagProfile`]s `(μ, λ_1, …, λ_ℓ)` and are Kronecker products of the
//! single-block images. Each profile block appears `C(n; μ)·∏ f_{λ_j}`
//! times.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::block::{BlockLabel, BlockLayout, BlockMap, BlockRep, Gauge};
use crate::combinatorics::{multinomial, Exact};
use crate::error::{arg, Error, Result};
use crate::link::{compose_after_encoder, compose_before_decoder, RefCoefficients};
use crate::marginal::{split_marginals, MarginalData};
use crate::orbit::{CountMatrix, OrbitBasis, OrbitCoefficients, Support, SystemSpec, DEFAULT_ORBIT_BUDGET};
use crate::schur_weyl::{partitions, ssyt_count, syt_count, ChangeOfBasis, Partition};

/// Block dimensions `d_1, …, d_ℓ` and the number of copies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    blocks: Vec<usize>,
    copies: usize,
}

impl AlgebraSpec {
    pub fn new(blocks: Vec<usize>, copies: usize) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) || copies == 0 {
            return arg("an algebra needs at least one positive block and n ≥ 1");
        }
        Ok(AlgebraSpec { blocks, copies })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Dimension of the embedding space, `Σ d_j`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect()
    }

    /// Block index and local symbol of a global symbol.
    pub fn locate(&self, symbol: usize) -> (usize, usize) {
        let mut s = symbol;
        for (j, &d) in self.blocks.iter().enumerate() {
            if s < d {
                return (j, s);
            }
            s -= d;
        }
        panic!("symbol {symbol} outside the algebra");
    }

    /// Single-copy positions allowed by the block structure.
    pub fn support(&self) -> Support {
        let offsets = self.offsets();
        Support::from_cells(
            self.dim(),
            self.blocks.iter().zip(&offsets).flat_map(|(&d, &o)| (0..d).flat_map(move |a| (0..d).map(move |b| (o + a, o + b)))),
        )
    }
}

/// Orbit basis restricted to block-diagonal count matrices.
pub fn algebra_orbits(spec: &AlgebraSpec) -> Result<OrbitBasis> {
    let system = SystemSpec::single(spec.dim(), spec.copies)?;
    let support = if spec.blocks.len() == 1 { None } else { Some(spec.support()) };
    OrbitBasis::build(system, support, DEFAULT_ORBIT_BUDGET)
}

/// Split a block-diagonal count matrix into `μ` and the per-block matrices.
pub fn split_orbit(e: &CountMatrix, spec: &AlgebraSpec) -> Result<(Vec<usize>, Vec<CountMatrix>)> {
    if e.d() != spec.dim() {
        return arg("count matrix dimension does not match the algebra");
    }
    if !e.within(&spec.support()) {
        return arg(format!("count matrix {:?} is not block diagonal", e.entries()));
    }
    let offsets = spec.offsets();
    let mut mu = Vec::with_capacity(spec.blocks.len());
    let mut parts = Vec::with_capacity(spec.blocks.len());
    for (&d, &o) in spec.blocks.iter().zip(&offsets) {
        let mut p = CountMatrix::zeros(d);
        for a in 0..d {
            for b in 0..d {
                p.set(a, b, e.get(o + a, o + b));
            }
        }
        mu.push(p.n());
        parts.push(p);
    }
    Ok((mu, parts))
}

/// Inverse of [`split_orbit`].
pub fn glue_orbit(spec: &AlgebraSpec, parts: &[CountMatrix]) -> Result<CountMatrix> {
    if parts.len() != spec.blocks.len() || parts.iter().zip(&spec.blocks).any(|(p, &d)| p.d() != d) {
        return arg("block count matrices do not match the algebra");
    }
    let mut e = CountMatrix::zeros(spec.dim());
    for (p, &o) in parts.iter().zip(&spec.offsets()) {
        for a in 0..p.d() {
            for b in 0..p.d() {
                e.set(o + a, o + b, p.get(a, b));
            }
        }
    }
    Ok(e)
}

/// Label of one irreducible block of the symmetric algebra power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagProfile {
    pub mu: Vec<usize>,
    pub lambdas: Vec<Partition>,
    /// `∏ f_{λ_j}`
    pub specht: Exact,
    /// `∏ m_{λ_j}`
    pub size: usize,
}

impl FlagProfile {
    /// `C(n; μ)`, the number of identical copies from placing blocks.
    pub fn placement(&self) -> Exact {
        multinomial(self.mu.iter().map(|&m| m as u64))
    }
}

fn compositions_desc(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in (0..=n).rev() {
        for mut rest in compositions_desc(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn partitions_with_empty(d: usize, n: usize) -> Vec<Partition> {
    if n == 0 {
        vec![Partition::empty()]
    } else {
        partitions(d, n)
    }
}

/// All profiles, ordered by `μ` (descending lexicographic) and then by the
/// per-block partition order.
pub fn flag_profiles(spec: &AlgebraSpec) -> Vec<FlagProfile> {
    let mut out = Vec::new();
    for mu in compositions_desc(spec.copies, spec.blocks.len()) {
        let choices: Vec<Vec<Partition>> = spec.blocks.iter().zip(&mu).map(|(&d, &m)| partitions_with_empty(d, m)).collect();
        let mut combos: Vec<Vec<Partition>> = vec![Vec::new()];
        for c in &choices {
            combos = combos
                .into_iter()
                .flat_map(|pre| {
                    c.iter().map(move |l| {
                        let mut v = pre.clone();
                        v.push(l.clone());
                        v
                    })
                })
                .collect();
        }
        for lambdas in combos {
            let specht = lambdas.iter().fold(Exact::one(), |acc, l| acc.mul(&syt_count(l)));
            let size =
                lambdas.iter().zip(&spec.blocks).map(|(l, &d)| ssyt_count(l, d).as_u128().expect("block size fits") as usize).product();
            out.push(FlagProfile { mu: mu.clone(), lambdas, specht, size });
        }
    }
    out
}

/// Orbit basis, per-block change of basis and the assembled block map.
#[derive(Debug)]
pub struct AlgebraTables {
    spec: AlgebraSpec,
    basis: Arc<OrbitBasis>,
    profiles: Vec<FlagProfile>,
    map: Arc<BlockMap>,
}

impl AlgebraTables {
    pub fn build(spec: &AlgebraSpec, cache_dir: Option<&Path>) -> Result<Self> {
        let basis = Arc::new(algebra_orbits(spec)?);
        let profiles = flag_profiles(spec);

        // One change of basis per (block dimension, copies) pair that occurs.
        let mut keys: Vec<(usize, usize)> = spec.blocks.iter().flat_map(|&d| (1..=spec.copies).map(move |m| (d, m))).collect();
        keys.sort_unstable();
        keys.dedup();
        let cobs: HashMap<(usize, usize), Arc<ChangeOfBasis>> = keys
            .par_iter()
            .map(|&(d, m)| ChangeOfBasis::load_or_build(d, m, cache_dir).map(|(c, _)| ((d, m), Arc::new(c))))
            .collect::<Result<_>>()?;

        // Position of each profile inside the layout, keyed by (μ, per-block λ indices).
        let lambda_index = |d: usize, m: usize, l: &Partition| -> usize {
            if m == 0 {
                0
            } else {
                cobs[&(d, m)].lambdas().iter().position(|x| &x.partition == l).expect("partition present")
            }
        };
        let mut by_mu: HashMap<Vec<usize>, Vec<(usize, Vec<usize>)>> = HashMap::new();
        for (p, prof) in profiles.iter().enumerate() {
            let idx = prof.lambdas.iter().zip(spec.blocks.iter().zip(&prof.mu)).map(|(l, (&d, &m))| lambda_index(d, m, l)).collect();
            by_mu.entry(prof.mu.clone()).or_default().push((p, idx));
        }

        let layout = Arc::new(BlockLayout::new(
            profiles.iter().map(|p| BlockLabel::Flag(p.clone())).collect(),
            profiles.iter().map(|p| p.size).collect(),
            profiles.iter().map(|p| p.placement().mul(&p.specht)).collect(),
        )?);

        let images: Vec<Vec<(usize, usize, usize, f64)>> = basis
            .orbits()
            .par_iter()
            .map(|e| -> Result<Vec<(usize, usize, usize, f64)>> {
                let (mu, parts) = split_orbit(e, spec)?;
                // Per block: images grouped by partition index.
                let per_block: Vec<HashMap<usize, Vec<(usize, usize, f64)>>> = parts
                    .iter()
                    .zip(spec.blocks.iter().zip(&mu))
                    .map(|(p, (&d, &m))| {
                        let mut grouped: HashMap<usize, Vec<(usize, usize, f64)>> = HashMap::new();
                        if m == 0 {
                            grouped.insert(0, vec![(0, 0, 1.0)]);
                        } else {
                            let cob = &cobs[&(d, m)];
                            let map = cob.ortho_map();
                            let r = cob.basis().index_of(p).expect("block orbit present");
                            for (b, i, j, v) in map.image(r) {
                                grouped.entry(b).or_default().push((i, j, v));
                            }
                        }
                        grouped
                    })
                    .collect();
                let mut out = Vec::new();
                for (profile, lam_idx) in by_mu.get(&mu).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut acc: Vec<(usize, usize, f64)> = vec![(0, 0, 1.0)];
                    for (j, &li) in lam_idx.iter().enumerate() {
                        let dim_j = if mu[j] == 0 { 1 } else { cobs[&(spec.blocks[j], mu[j])].layout().dims()[li] };
                        let Some(entries) = per_block[j].get(&li) else {
                            acc.clear();
                            break;
                        };
                        let mut next = Vec::with_capacity(acc.len() * entries.len());
                        for &(r0, c0, v0) in &acc {
                            for &(r1, c1, v1) in entries {
                                next.push((r0 * dim_j + r1, c0 * dim_j + c1, v0 * v1));
                            }
                        }
                        acc = next;
                    }
                    out.extend(acc.into_iter().map(|(r, c, v)| (*profile, r, c, v)));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let map = Arc::new(BlockMap::new(layout, basis.clone(), Gauge::Ortho, images)?);
        Ok(AlgebraTables { spec: spec.clone(), basis, profiles, map })
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn basis(&self) -> &Arc<OrbitBasis> {
        &self.basis
    }

    pub fn profiles(&self) -> &[FlagProfile] {
        &self.profiles
    }

    pub fn block_map(&self) -> &Arc<BlockMap> {
        &self.map
    }
}

/// Blocks of an algebra element, one per flag profile.
pub fn algebra_block_diag(x: &OrbitCoefficients, tables: &AlgebraTables) -> Result<BlockRep> {
    tables.map.forward(x)
}

/// `κ^A_s` assembled from the per-block pieces of a joint orbit on
/// `A ⊗ 𝒜_B`: `C(n; μ)·|O_r|^{-1}·∏_j |O_{r_j}|·∏_j κ^A_{s_j}`.
pub fn kappa_a_decomposed(s: &CountMatrix, d_a: usize, b_spec: &AlgebraSpec) -> Result<Exact> {
    let d_b = b_spec.dim();
    if s.d() != d_a * d_b {
        return arg("joint count matrix does not match [d_A, dim 𝒜_B]");
    }
    let offsets = b_spec.offsets();
    let (r, _, _, _) = split_marginals(s, d_a, d_b);
    let mut mu = Vec::new();
    let mut num = Exact::one();
    for (&dj, &o) in b_spec.blocks.iter().zip(&offsets) {
        let mut sj = CountMatrix::zeros(d_a * dj);
        for aa in 0..d_a {
            for ba in 0..d_a {
                for ab in 0..dj {
                    for bb in 0..dj {
                        sj.set(aa * dj + ab, ba * dj + bb, s.get(aa * d_b + o + ab, ba * d_b + o + bb));
                    }
                }
            }
        }
        mu.push(sj.n() as u64);
        let (rj, _, kj, _) = split_marginals(&sj, d_a, dj);
        num = num.mul(&rj.orbit_size()).mul(&kj);
    }
    let total = multinomial(mu).mul(&num);
    total.div_exact(&r.orbit_size()).ok_or_else(|| Error::Numerical("per-block κ decomposition is not integral".into()))
}

/// Which side of a channel the algebra link product composes with.
pub enum LinkOperand<'a> {
    Encoder(&'a RefCoefficients),
    Decoder(&'a RefCoefficients),
}

/// Link product with an algebra-valued output system. The marginal table
/// must target the algebra basis on B; the multiplicities are the direct
/// ones, which [`kappa_a_decomposed`] reproduces.
pub fn algebra_link(channel: &OrbitCoefficients, operand: LinkOperand<'_>, md: &MarginalData) -> Result<RefCoefficients> {
    match operand {
        LinkOperand::Encoder(e) => compose_after_encoder(channel, e, md),
        LinkOperand::Decoder(d) => compose_before_decoder(channel, d, md),
    }
}
