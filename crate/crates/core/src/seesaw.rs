//! The symmetric seesaw: alternate between the best decoder for the
//! current encoder and the best encoder for the current decoder, each found
//! by a blockwise channel power iteration.
//!
//! Encoders live on the A-side blocks with the CPTP constraint coupling all
//! blocks; decoder adjoints live on the B-side blocks with one unitality
//! constraint per block. Both carry a reference of dimension `d`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{AlgebraSpec, AlgebraTables};
use crate::block::{check_cptp, check_cpu, enforce_cptp, enforce_cpu, BlockLabel, BlockLayout, BlockMap, BlockRep, Gauge};
use crate::channels::ChoiMatrix;
use crate::combinatorics::{multinomial, Exact};
use crate::error::{arg, Result};
use crate::linalg::{hermitian_part, min_eigenvalue};
use crate::link::{compose_after_encoder, compose_before_decoder, RefCoefficients};
use crate::marginal::MarginalData;
use crate::orbit::{tensor_coefficients, OrbitCoefficients, SystemSpec, C64};
use crate::schur_weyl::{ChangeOfBasis, Partition};

/// Numerical slack for monotonicity and bound checks.
pub const FIDELITY_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub n: usize,
    /// Reference (message) dimension.
    pub d: usize,
    pub delta: f64,
    pub delta_power: f64,
    pub max_outer: usize,
    pub max_power: usize,
    pub seeds: usize,
    pub rng_seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig { n: 1, d: 2, delta: 1e-7, delta_power: 1e-9, max_outer: 1000, max_power: 5000, seeds: 4, rng_seed: 0 }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.seeds == 0 || self.max_outer == 0 || self.max_power == 0 {
            return arg("n, d, seeds and iteration caps must be positive");
        }
        if !(self.delta > 0.0 && self.delta_power > 0.0) {
            return arg("convergence thresholds must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Fd,
    Fe,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub phase: Phase,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedKind {
    Encoder,
    Decoder,
}

/// `(1/d²) Σ_b mult_b Re Tr[X_b M_b]`.
pub fn block_fidelity(m: &BlockRep, x: &BlockRep, d: usize) -> f64 {
    let total: f64 = m
        .blocks()
        .iter()
        .zip(x.blocks())
        .zip(m.layout().mult())
        .map(|((mb, xb), &f)| f * xb.iter().zip(mb.transpose().iter()).map(|(p, q)| (p * q).re).sum::<f64>())
        .sum();
    total / (d * d) as f64
}

/// Ginibre seed: `GG†` per block, block weights from a flat Dirichlet
/// divided by the multiplicity, then the constraint of `kind` enforced.
pub fn random_symmetric_seed<R: Rng + ?Sized>(layout: &Arc<BlockLayout>, d_ref: usize, kind: SeedKind, rng: &mut R) -> BlockRep {
    let raw: Vec<f64> = (0..layout.len()).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let blocks = layout
        .dims()
        .iter()
        .zip(layout.mult())
        .zip(&raw)
        .map(|((&m, &f), &w)| {
            let s = d_ref * m;
            let g = DMatrix::from_fn(s, s, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
            let x = &g * g.adjoint();
            let tr = x.trace().re;
            hermitian_part(&x.scale(w / (total * f * tr)))
        })
        .collect();
    let mut rep = BlockRep::from_blocks(layout.clone(), d_ref, Gauge::Ortho, blocks).expect("shapes follow the layout");
    match kind {
        SeedKind::Encoder => enforce_cptp(&mut rep),
        SeedKind::Decoder => enforce_cpu(&mut rep),
    }
    rep
}

/// Encoder `|k⟩ ↦ V|k⟩` for a random isometry `V` into the symmetric
/// subspace, written in Dicke states and mapped to blocks.
pub fn isometric_seed<R: Rng + ?Sized>(map: &BlockMap, d_ref: usize, rng: &mut R) -> Result<BlockRep> {
    let basis = map.basis();
    let mut weights: Vec<Vec<u32>> = basis.orbits().iter().filter(|e| e.is_diagonal()).map(|e| e.row_sums()).collect();
    weights.sort();
    weights.dedup();
    if d_ref > weights.len() {
        return arg(format!("no isometry from dimension {d_ref} into a symmetric subspace of dimension {}", weights.len()));
    }
    let index: HashMap<Vec<u32>, usize> = weights.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let norm: Vec<f64> = weights.iter().map(|w| multinomial(w.iter().map(|&x| x as u64)).to_f64().sqrt()).collect();
    let g = DMatrix::from_fn(weights.len(), d_ref, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let q = g.qr().q();
    let mut coeffs = RefCoefficients::zeros(d_ref, basis.clone())?;
    for (i, e) in basis.orbits().iter().enumerate() {
        let (w, wp) = (index.get(&e.row_sums()), index.get(&e.col_sums()));
        let (Some(&w), Some(&wp)) = (w, wp) else { continue };
        for k in 0..d_ref {
            for l in 0..d_ref {
                coeffs.get_mut(k, l)[i] = q[(w, k)] * q[(wp, l)].conj() / (norm[w] * norm[wp]);
            }
        }
    }
    let mut rep = map.forward_ref(&coeffs)?;
    rep.hermitize();
    enforce_cptp(&mut rep);
    Ok(rep)
}

/// Outcome of one power iteration.
#[derive(Clone, Debug)]
pub struct PowerOutcome {
    pub fidelity: f64,
    pub state: BlockRep,
    /// Fidelity of the seed and of every accepted iterate.
    pub steps: Vec<f64>,
    /// A final candidate that lowered the fidelity was discarded.
    pub rejected: bool,
    pub truncated: bool,
}

fn power_iterate(m: &BlockRep, seed: BlockRep, d: usize, delta_p: f64, max_power: usize, kind: SeedKind) -> Result<PowerOutcome> {
    if m.compatible(&seed).is_err() || m.d_ref() != seed.d_ref() {
        return arg("channel and seed blocks do not match");
    }
    let mut x = seed;
    let mut f = block_fidelity(m, &x, d);
    let mut steps = vec![f];
    let mut truncated = true;
    let mut rejected = false;
    for _ in 0..max_power {
        let blocks: Vec<DMatrix<C64>> =
            m.blocks().par_iter().zip(x.blocks().par_iter()).map(|(mb, xb)| hermitian_part(&(mb * xb * mb))).collect();
        let mut y = BlockRep::from_blocks(x.layout().clone(), x.d_ref(), Gauge::Ortho, blocks)?;
        match kind {
            SeedKind::Encoder => enforce_cptp(&mut y),
            SeedKind::Decoder => enforce_cpu(&mut y),
        }
        let fy = block_fidelity(m, &y, d);
        let gain = fy - f;
        if fy >= f {
            x = y;
            f = fy;
            steps.push(fy);
        } else {
            rejected = true;
        }
        if gain < delta_p {
            truncated = false;
            break;
        }
    }
    Ok(PowerOutcome { fidelity: f, state: x, steps, rejected, truncated })
}

/// Best decoder adjoint for the channel blocks `m` (reference first),
/// normalized blockwise to `Σ_k X_b^{(k,k)} = 1`.
pub fn power_fd(m: &BlockRep, seed: BlockRep, d: usize, delta_p: f64, max_power: usize) -> Result<PowerOutcome> {
    power_iterate(m, seed, d, delta_p, max_power, SeedKind::Decoder)
}

/// Best encoder for the adjoint-channel blocks `m`, normalized globally to
/// `Σ_b mult_b Tr_V X_b = 1_R`.
pub fn power_fe(m: &BlockRep, seed: BlockRep, d: usize, delta_p: f64, max_power: usize) -> Result<PowerOutcome> {
    power_iterate(m, seed, d, delta_p, max_power, SeedKind::Encoder)
}

/// Memoized change-of-basis and algebra tables, optionally backed by an
/// on-disk cache.
#[derive(Debug, Default)]
pub struct TableProvider {
    cache_dir: Option<PathBuf>,
    cobs: Mutex<HashMap<(usize, usize), Arc<ChangeOfBasis>>>,
    algebras: Mutex<HashMap<AlgebraSpec, Arc<AlgebraTables>>>,
}

impl TableProvider {
    pub fn new(cache_dir: Option<&Path>) -> Self {
        TableProvider { cache_dir: cache_dir.map(Path::to_path_buf), ..Default::default() }
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    pub fn change_of_basis(&self, d: usize, n: usize) -> Result<Arc<ChangeOfBasis>> {
        if let Some(c) = self.cobs.lock().expect("table lock").get(&(d, n)) {
            return Ok(c.clone());
        }
        let (cob, _) = ChangeOfBasis::load_or_build(d, n, self.cache_dir.as_deref())?;
        let cob = Arc::new(cob);
        Ok(self.cobs.lock().expect("table lock").entry((d, n)).or_insert(cob).clone())
    }

    pub fn algebra(&self, spec: &AlgebraSpec) -> Result<Arc<AlgebraTables>> {
        if let Some(t) = self.algebras.lock().expect("table lock").get(spec) {
            return Ok(t.clone());
        }
        let tables = Arc::new(AlgebraTables::build(spec, self.cache_dir.as_deref())?);
        Ok(self.algebras.lock().expect("table lock").entry(spec.clone()).or_insert(tables).clone())
    }
}

/// Everything fixed during one seesaw: `Γ^{N^{⊗n}}`, its marginal table and
/// the block maps on both sides.
#[derive(Debug)]
pub struct SeesawProblem {
    channel: OrbitCoefficients,
    md: MarginalData,
    enc_map: Arc<BlockMap>,
    dec_map: Arc<BlockMap>,
    d: usize,
    n: usize,
}

fn check_message_dim(d: usize, n: usize, d_a: usize, d_b: usize) -> Result<()> {
    let cap = (d_a.min(d_b) as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if d as u128 > cap {
        return arg(format!("message dimension {d} exceeds min(d_A, d_B)^n = {cap}"));
    }
    Ok(())
}

impl SeesawProblem {
    /// Plain channel, B-side blocks indexed by partitions.
    pub fn plain(channel: &ChoiMatrix, n: usize, d: usize, tables: &TableProvider) -> Result<Self> {
        let (d_a, d_b) = (channel.d_in(), channel.d_out());
        check_message_dim(d, n, d_a, d_b)?;
        let cob_a = tables.change_of_basis(d_a, n)?;
        let cob_b = tables.change_of_basis(d_b, n)?;
        let coeffs = tensor_coefficients(channel.gamma(), &SystemSpec::bipartite(d_a, d_b, n)?)?;
        let md = MarginalData::new(coeffs.basis().clone(), cob_a.basis().clone(), cob_b.basis().clone())?;
        Ok(SeesawProblem { channel: coeffs, md, enc_map: cob_a.ortho_map(), dec_map: cob_b.ortho_map(), d, n })
    }

    /// Flagged channel, B-side blocks indexed by flag profiles.
    pub fn flagged(channel: &ChoiMatrix, n: usize, d: usize, tables: &TableProvider) -> Result<Self> {
        let (d_a, d_b) = (channel.d_in(), channel.d_out());
        check_message_dim(d, n, d_a, *channel.output_blocks().iter().max().expect("at least one block"))?;
        let cob_a = tables.change_of_basis(d_a, n)?;
        let alg = tables.algebra(&AlgebraSpec::new(channel.output_blocks(), n)?)?;
        let coeffs = tensor_coefficients(channel.gamma(), &SystemSpec::bipartite(d_a, d_b, n)?)?;
        let md = MarginalData::new(coeffs.basis().clone(), cob_a.basis().clone(), alg.basis().clone())?;
        Ok(SeesawProblem { channel: coeffs, md, enc_map: cob_a.ortho_map(), dec_map: alg.block_map().clone(), d, n })
    }

    pub fn channel(&self) -> &OrbitCoefficients {
        &self.channel
    }

    pub fn marginals(&self) -> &MarginalData {
        &self.md
    }

    pub fn encoder_map(&self) -> &Arc<BlockMap> {
        &self.enc_map
    }

    pub fn decoder_map(&self) -> &Arc<BlockMap> {
        &self.dec_map
    }

    /// Blocks of `Γ^{N^{⊗n} ∘ E}` on the B side.
    pub fn channel_after_encoder(&self, encoder: &BlockRep) -> Result<BlockRep> {
        let enc = self.enc_map.inverse_ref(encoder)?;
        let m = compose_after_encoder(&self.channel, &enc, &self.md)?;
        let mut b = self.dec_map.forward_ref(&m)?;
        b.hermitize();
        Ok(b)
    }

    /// Blocks of `Γ^{(D ∘ N^{⊗n})^*}` on the A side, from decoder-adjoint blocks.
    pub fn adjoint_before_decoder(&self, decoder_adj: &BlockRep) -> Result<BlockRep> {
        let dec = self.dec_map.inverse_ref(decoder_adj)?.adjoint_swap()?;
        let mp = compose_before_decoder(&self.channel, &dec, &self.md)?;
        let mut a = self.enc_map.forward_ref(&mp.adjoint_swap()?)?;
        a.hermitize();
        Ok(a)
    }

    /// Entanglement fidelity of `D ∘ N^{⊗n} ∘ E`.
    pub fn fidelity(&self, encoder: &BlockRep, decoder_adj: &BlockRep) -> Result<f64> {
        Ok(block_fidelity(&self.channel_after_encoder(encoder)?, decoder_adj, self.d))
    }

    /// One seesaw run from the seeds of RNG stream `run`.
    pub fn run(&self, config: &SeesawConfig, run: u64) -> Result<RunRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        rng.set_stream(run);
        let isometric = run == 0 && config.d <= self.enc_map.basis().orbits().iter().filter(|e| e.is_diagonal()).count();
        let mut encoder = if isometric {
            isometric_seed(&self.enc_map, self.d, &mut rng)?
        } else {
            random_symmetric_seed(self.enc_map.layout(), self.d, SeedKind::Encoder, &mut rng)
        };
        let mut decoder = random_symmetric_seed(self.dec_map.layout(), self.d, SeedKind::Decoder, &mut rng);
        let mut trajectory = Vec::new();
        let mut power_steps = Vec::new();
        let mut truncated = false;
        let mut converged = false;
        let mut outer = 0;
        let mut fidelity = f64::NEG_INFINITY;
        while outer < config.max_outer {
            outer += 1;
            let m = self.channel_after_encoder(&encoder)?;
            let pd = power_fd(&m, decoder, self.d, config.delta_power, config.max_power)?;
            trajectory.push(Step { phase: Phase::Fd, value: pd.fidelity });
            truncated |= pd.truncated;
            decoder = pd.state;
            power_steps.push(pd.steps);

            let mp = self.adjoint_before_decoder(&decoder)?;
            let pe = power_fe(&mp, encoder, self.d, config.delta_power, config.max_power)?;
            trajectory.push(Step { phase: Phase::Fe, value: pe.fidelity });
            truncated |= pe.truncated;
            encoder = pe.state;
            power_steps.push(pe.steps);
            fidelity = pe.fidelity;
            if pe.fidelity - pd.fidelity < config.delta {
                converged = true;
                break;
            }
        }
        truncated |= !converged;
        let residuals = Residuals {
            encoder_cptp: check_cptp(&encoder),
            decoder_cpu: check_cpu(&decoder).into_iter().fold(0.0, f64::max),
            encoder_min_eig: encoder.blocks().iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min),
            decoder_min_eig: decoder.blocks().iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min),
        };
        Ok(RunRecord { run, n: self.n, fidelity, trajectory, power_steps, outer_iterations: outer, truncated, encoder, decoder, residuals })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub encoder_cptp: f64,
    pub decoder_cpu: f64,
    pub encoder_min_eig: f64,
    pub decoder_min_eig: f64,
}

/// One seesaw run and its final encoder and decoder adjoint.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub run: u64,
    pub n: usize,
    pub fidelity: f64,
    pub trajectory: Vec<Step>,
    pub power_steps: Vec<Vec<f64>>,
    pub outer_iterations: usize,
    pub truncated: bool,
    pub encoder: BlockRep,
    pub decoder: BlockRep,
    pub residuals: Residuals,
}

/// Best of several restarts.
#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub config: SeesawConfig,
    pub best_fidelity: f64,
    pub best_n: usize,
    pub best: RunRecord,
    pub runs: Vec<RunRecord>,
    pub truncated: bool,
    pub wall_ms: u128,
}

impl SeesawResult {
    /// Result document; `wall_ms` is left out when `timing` is false so
    /// identical inputs give identical bytes.
    pub fn to_json(&self, timing: bool) -> serde_json::Value {
        let mut doc = json!({
            "config": self.config,
            "per_iteration": self.best.trajectory,
            "final": {"fidelity": self.best_fidelity, "n": self.best_n, "seed": self.best.run},
            "residuals": self.best.residuals,
            "runs": self.runs.iter().map(|r| json!({
                "seed": r.run,
                "fidelity": r.fidelity,
                "outer_iterations": r.outer_iterations,
                "truncated": r.truncated,
            })).collect::<Vec<_>>(),
            "truncated": self.truncated,
        });
        if timing {
            doc["wall_ms"] = json!(self.wall_ms as u64);
        }
        doc
    }
}

fn best_of(config: &SeesawConfig, runs: Vec<RunRecord>, start: Instant) -> SeesawResult {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.fidelity > runs[best].fidelity {
            best = i;
        }
    }
    SeesawResult {
        config: config.clone(),
        best_fidelity: runs[best].fidelity,
        best_n: runs[best].n,
        best: runs[best].clone(),
        truncated: runs.iter().any(|r| r.truncated),
        runs,
        wall_ms: start.elapsed().as_millis(),
    }
}

/// Run `config.seeds` restarts on a prepared problem.
pub fn seesaw_problem(problem: &SeesawProblem, config: &SeesawConfig) -> Result<SeesawResult> {
    config.validate()?;
    let start = Instant::now();
    let runs = (0..config.seeds as u64).into_par_iter().map(|s| problem.run(config, s)).collect::<Result<Vec<_>>>()?;
    Ok(best_of(config, runs, start))
}

pub fn seesaw_run(channel: &ChoiMatrix, config: &SeesawConfig, tables: &TableProvider) -> Result<SeesawResult> {
    config.validate()?;
    let problem = SeesawProblem::plain(channel, config.n, config.d, tables)?;
    seesaw_problem(&problem, config)
}

/// Seesaw with decoder blocks indexed by flag profiles. A channel without
/// flags is treated as a single flag.
pub fn seesaw_flagged(channel: &ChoiMatrix, config: &SeesawConfig, tables: &TableProvider) -> Result<SeesawResult> {
    config.validate()?;
    let problem = SeesawProblem::flagged(channel, config.n, config.d, tables)?;
    seesaw_problem(&problem, config)
}

/// One row of a parameter sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub n: usize,
    pub fidelity: f64,
    /// This `n` attains the best fidelity for the parameter.
    pub best_flag: bool,
    pub truncated: bool,
}

/// Seesaw for every `(param, n)` pair. Ties in the best-over-`n` choice go
/// to the smaller `n`.
pub fn sweep<F>(family: F, grid: &[f64], ns: &[usize], config: &SeesawConfig, tables: &TableProvider) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<ChoiMatrix> + Sync,
{
    config.validate()?;
    let jobs: Vec<(f64, usize)> = grid.iter().flat_map(|&p| ns.iter().map(move |&n| (p, n))).collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(p, n)| {
            let ch = family(p)?;
            let cfg = SeesawConfig { n, ..config.clone() };
            let res = if ch.flags().is_some() { seesaw_flagged(&ch, &cfg, tables)? } else { seesaw_run(&ch, &cfg, tables)? };
            Ok(SweepRow { param: p, n, fidelity: res.best_fidelity, best_flag: false, truncated: res.truncated })
        })
        .collect::<Result<Vec<_>>>()?;
    for chunk in rows.chunks_mut(ns.len().max(1)) {
        let mut best = 0;
        for (i, r) in chunk.iter().enumerate() {
            if r.fidelity > chunk[best].fidelity || (r.fidelity == chunk[best].fidelity && r.n < chunk[best].n) {
                best = i;
            }
        }
        if let Some(r) = chunk.get_mut(best) {
            r.best_flag = true;
        }
    }
    Ok(rows)
}

/// A single block of size `m` with multiplicity one: the layout of a
/// single-copy problem.
pub fn single_block_layout(m: usize) -> Arc<BlockLayout> {
    Arc::new(
        BlockLayout::new(vec![BlockLabel::Partition(Partition::new(vec![1]).expect("valid"))], vec![m], vec![Exact::one()])
            .expect("consistent layout"),
    )
}

fn dense_rep(layout: &Arc<BlockLayout>, d_ref: usize, x: DMatrix<C64>) -> Result<BlockRep> {
    BlockRep::from_blocks(layout.clone(), d_ref, Gauge::Ortho, vec![x])
}

/// `F_D` of a single-copy channel `W: A → B` with the input as reference,
/// by power iteration from the maximally mixed decoder and `restarts`
/// random ones. Returns the best value.
pub fn dense_fd(w: &ChoiMatrix, delta_p: f64, max_power: usize, restarts: usize, rng_seed: u64) -> Result<f64> {
    let (d_a, d_b) = (w.d_in(), w.d_out());
    let layout = single_block_layout(d_b);
    let m = dense_rep(&layout, d_a, w.gamma().clone())?;
    let seed0 = dense_rep(&layout, d_a, DMatrix::identity(d_a * d_b, d_a * d_b).scale(1.0 / d_a as f64))?;
    let mut best = power_fd(&m, seed0, d_a, delta_p, max_power)?.fidelity;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..restarts {
        let seed = random_symmetric_seed(&layout, d_a, SeedKind::Decoder, &mut rng);
        best = best.max(power_fd(&m, seed, d_a, delta_p, max_power)?.fidelity);
    }
    Ok(best)
}

/// Choi matrix of the adjoint map, `Γ^{W*}_{(b,a),(b',a')} = Γ^W_{(a',b'),(a,b)}`.
pub fn adjoint_choi(gamma: &DMatrix<C64>, d_in: usize, d_out: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d_in * d_out, d_in * d_out, |r, c| {
        let (b, a) = (r / d_in, r % d_in);
        let (bp, ap) = (c / d_in, c % d_in);
        gamma[(ap * d_out + bp, a * d_out + b)]
    })
}

/// `F_E` of a single-copy channel `W: A → B`: the best encoder `B → A`
/// in front of it, with `B` as reference.
pub fn dense_fe(w: &ChoiMatrix, delta_p: f64, max_power: usize, restarts: usize, rng_seed: u64) -> Result<f64> {
    let (d_a, d_b) = (w.d_in(), w.d_out());
    let layout = single_block_layout(d_a);
    let m = dense_rep(&layout, d_b, adjoint_choi(w.gamma(), d_a, d_b))?;
    let seed0 = dense_rep(&layout, d_b, DMatrix::identity(d_a * d_b, d_a * d_b).scale(1.0 / d_a as f64))?;
    let mut best = power_fe(&m, seed0, d_b, delta_p, max_power)?.fidelity;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..restarts {
        let seed = random_symmetric_seed(&layout, d_b, SeedKind::Encoder, &mut rng);
        best = best.max(power_fe(&m, seed, d_b, delta_p, max_power)?.fidelity);
    }
    Ok(best)
}

/// `F_D` of a flagged single-copy channel computed on flag-profile blocks.
pub fn flagged_fd(w: &ChoiMatrix, tables: &TableProvider, delta_p: f64, max_power: usize) -> Result<f64> {
    let alg = tables.algebra(&AlgebraSpec::new(w.output_blocks(), 1)?)?;
    let d = w.d_in();
    let coeffs = RefCoefficients::from_single_copy(w.gamma(), d, alg.basis().clone())?;
    let mut m = alg.block_map().forward_ref(&coeffs)?;
    m.hermitize();
    let seed = BlockRep::from_blocks(
        m.layout().clone(),
        d,
        Gauge::Ortho,
        m.layout().dims().iter().map(|&k| DMatrix::identity(d * k, d * k).scale(1.0 / d as f64)).collect(),
    )?;
    Ok(power_fd(&m, seed, d, delta_p, max_power)?.fidelity)
}
