//! Per-partition images of every orbit matrix, the Gram matrices and their
//! inverse square roots, plus a binary cache of all of it.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::block::{BlockLabel, BlockLayout, BlockMap, BlockRep, Gauge};
use crate::combinatorics::Exact;
use crate::error::{arg, Error, Result};
use crate::linalg::symmetric_eigen_real;
use crate::link::RefCoefficients;
use crate::orbit::{OrbitBasis, OrbitCoefficients, SystemSpec};

use super::count_functions::encoding_poly_m1;
use super::differential::{column_shifted, constant_polynomial, row_shifted};
use super::partition::{partitions, ssyt_count, syt_count, Partition};
use super::poly::EncodingPolynomial;
use super::tableau::{ssyt_enumerate, Tableau};

pub const CACHE_MAGIC: &[u8; 8] = b"PSYMCOB\0";
pub const CACHE_VERSION: u32 = 1;

/// Which construction produces the encoding polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyMethod {
    CountFunctions,
    DifferentialOperators,
}

/// Everything attached to one partition.
#[derive(Clone, Debug)]
pub struct LambdaData {
    pub partition: Partition,
    pub tableaux: Vec<Tableau>,
    /// `f_λ`
    pub multiplicity: Exact,
    /// `(orbit, row, col, value)` of `[ψ(C_r)]_λ`.
    pub raw: Vec<(usize, usize, usize, f64)>,
    pub gram: DMatrix<f64>,
    /// Satisfies `R Rᵀ = G^{-1}`.
    pub factor: DMatrix<f64>,
}

/// Precomputed data for the maps `ψ` and `ψ̃` at fixed `(d, n)`.
#[derive(Debug)]
pub struct ChangeOfBasis {
    d: usize,
    n: usize,
    basis: Arc<OrbitBasis>,
    lambdas: Vec<LambdaData>,
    layout: Arc<BlockLayout>,
    raw_map: OnceLock<Arc<BlockMap>>,
    ortho_map: OnceLock<Arc<BlockMap>>,
}

/// Gram matrix at the identity grid and its factor, computed per weight
/// block. Eigenvalues below `1e-12 · λ_max` are reported as an error.
pub fn gram(tableaux: &[Tableau], d: usize, gram_values: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = tableaux.len();
    let weights: Vec<Vec<u32>> = tableaux.iter().map(|t| t.weight(d)).collect();
    for i in 0..m {
        for j in 0..m {
            if weights[i] != weights[j] && gram_values[(i, j)] != 0.0 {
                return Err(Error::Numerical(format!("Gram entry ({i},{j}) couples different weights")));
            }
        }
    }
    let mut groups: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        match groups.iter_mut().find(|(gw, _)| gw == w) {
            Some((_, idx)) => idx.push(i),
            None => groups.push((w.clone(), vec![i])),
        }
    }
    let mut factor = DMatrix::zeros(m, m);
    for (_, idx) in &groups {
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |a, b| gram_values[(idx[a], idx[b])]);
        let (vals, vecs) = symmetric_eigen_real(&sub);
        let max = vals.iter().copied().fold(0.0, f64::max);
        if vals.iter().any(|&v| v <= 1e-12 * max) || max <= 0.0 {
            return Err(Error::Numerical(format!("Gram block is numerically singular (eigenvalues {vals:?})")));
        }
        // Symmetric choice R = G^{-1/2}.
        let inv_sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(k, vals.iter().map(|v| 1.0 / v.sqrt())));
        let sub_r = &vecs * inv_sqrt * vecs.transpose();
        for a in 0..k {
            for b in 0..k {
                factor[(idx[a], idx[b])] = sub_r[(a, b)];
            }
        }
    }
    Ok((gram_values.clone(), factor))
}

fn polynomials_for(lambda: &Partition, tableaux: &[Tableau], d: usize, method: PolyMethod) -> Result<Vec<Vec<EncodingPolynomial>>> {
    match method {
        PolyMethod::DifferentialOperators => {
            let p = constant_polynomial(lambda, d);
            tableaux
                .par_iter()
                .map(|tau| {
                    let rows = row_shifted(&p, tau, d)?;
                    tableaux.iter().map(|gamma| column_shifted(&rows, gamma, d)).collect()
                })
                .collect()
        }
        PolyMethod::CountFunctions => {
            tableaux.par_iter().map(|tau| tableaux.iter().map(|gamma| encoding_poly_m1(tau, gamma, d)).collect()).collect()
        }
    }
}

impl ChangeOfBasis {
    /// Build with the differential-operator construction.
    pub fn build(d: usize, n: usize) -> Result<Self> {
        Self::build_with(d, n, PolyMethod::DifferentialOperators)
    }

    pub fn build_with(d: usize, n: usize, method: PolyMethod) -> Result<Self> {
        let basis = Arc::new(OrbitBasis::full(SystemSpec::single(d, n)?)?);
        let lambdas = partitions(d, n)
            .into_par_iter()
            .map(|lambda| -> Result<LambdaData> {
                let tableaux = ssyt_enumerate(&lambda, d);
                let m = tableaux.len();
                let polys = polynomials_for(&lambda, &tableaux, d, method)?;
                let mut raw = Vec::new();
                let mut g = DMatrix::zeros(m, m);
                for (i, row) in polys.iter().enumerate() {
                    for (j, f) in row.iter().enumerate() {
                        g[(i, j)] = f.eval_identity().to_f64().unwrap_or(f64::INFINITY);
                        for (e, c) in f.terms() {
                            let orbit = basis.index_of(e).ok_or_else(|| Error::Numerical("monomial outside the orbit basis".into()))?;
                            raw.push((orbit, i, j, c.to_f64().unwrap_or(f64::INFINITY)));
                        }
                    }
                }
                raw.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
                let (gram, factor) = gram(&tableaux, d, &g)?;
                let multiplicity = syt_count(&lambda);
                Ok(LambdaData { partition: lambda, tableaux, multiplicity, raw, gram, factor })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(d, n, basis, lambdas)
    }

    fn assemble(d: usize, n: usize, basis: Arc<OrbitBasis>, lambdas: Vec<LambdaData>) -> Result<Self> {
        let layout = Arc::new(BlockLayout::new(
            lambdas.iter().map(|l| BlockLabel::Partition(l.partition.clone())).collect(),
            lambdas.iter().map(|l| l.tableaux.len()).collect(),
            lambdas.iter().map(|l| l.multiplicity.clone()).collect(),
        )?);
        Ok(ChangeOfBasis { d, n, basis, lambdas, layout, raw_map: OnceLock::new(), ortho_map: OnceLock::new() })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &Arc<OrbitBasis> {
        &self.basis
    }

    pub fn lambdas(&self) -> &[LambdaData] {
        &self.lambdas
    }

    pub fn layout(&self) -> &Arc<BlockLayout> {
        &self.layout
    }

    /// The map `ψ`, images of orbit matrices in the raw Young basis.
    pub fn raw_map(&self) -> Arc<BlockMap> {
        self.raw_map
            .get_or_init(|| {
                let mut images = vec![Vec::new(); self.basis.len()];
                for (b, l) in self.lambdas.iter().enumerate() {
                    for &(r, i, j, v) in &l.raw {
                        images[r].push((b, i, j, v));
                    }
                }
                Arc::new(BlockMap::new(self.layout.clone(), self.basis.clone(), Gauge::Raw, images).expect("shapes are consistent"))
            })
            .clone()
    }

    /// The *-isomorphism `ψ̃ = Rᵀ ψ R`.
    pub fn ortho_map(&self) -> Arc<BlockMap> {
        self.ortho_map
            .get_or_init(|| {
                let per_lambda: Vec<Vec<(usize, usize, usize, usize, f64)>> = self
                    .lambdas
                    .par_iter()
                    .enumerate()
                    .map(|(b, l)| {
                        let m = l.tableaux.len();
                        let mut by_orbit: HashMap<usize, DMatrix<f64>> = HashMap::new();
                        for &(r, i, j, v) in &l.raw {
                            by_orbit.entry(r).or_insert_with(|| DMatrix::zeros(m, m))[(i, j)] += v;
                        }
                        let rt = l.factor.transpose();
                        let mut out = Vec::new();
                        let mut keys: Vec<usize> = by_orbit.keys().copied().collect();
                        keys.sort_unstable();
                        for r in keys {
                            let img = &rt * &by_orbit[&r] * &l.factor;
                            for i in 0..m {
                                for j in 0..m {
                                    if img[(i, j)] != 0.0 {
                                        out.push((r, b, i, j, img[(i, j)]));
                                    }
                                }
                            }
                        }
                        out
                    })
                    .collect();
                let mut images = vec![Vec::new(); self.basis.len()];
                for list in per_lambda {
                    for (r, b, i, j, v) in list {
                        images[r].push((b, i, j, v));
                    }
                }
                Arc::new(BlockMap::new(self.layout.clone(), self.basis.clone(), Gauge::Ortho, images).expect("shapes are consistent"))
            })
            .clone()
    }

    /// `ψ̃` read on the bipartite spec `[d_A, d_B]` with `d_A·d_B = d`. The
    /// orbits coincide; only the factor structure is attached, which the
    /// block partial transpose needs.
    pub fn bipartite_ortho_map(&self, d_a: usize, d_b: usize) -> Result<BlockMap> {
        if d_a * d_b != self.d {
            return arg(format!("{d_a}·{d_b} does not factor d = {}", self.d));
        }
        let basis = Arc::new(OrbitBasis::full(SystemSpec::bipartite(d_a, d_b, self.n)?)?);
        let map = self.ortho_map();
        let images = (0..basis.len()).map(|r| map.image(r).collect()).collect();
        BlockMap::new(self.layout.clone(), basis, Gauge::Ortho, images)
    }

    pub fn psi(&self, x: &OrbitCoefficients) -> Result<BlockRep> {
        self.raw_map().forward(x)
    }

    pub fn psi_ref(&self, x: &RefCoefficients) -> Result<BlockRep> {
        self.raw_map().forward_ref(x)
    }

    pub fn psi_tilde(&self, x: &OrbitCoefficients) -> Result<BlockRep> {
        self.ortho_map().forward(x)
    }

    pub fn psi_tilde_ref(&self, x: &RefCoefficients) -> Result<BlockRep> {
        self.ortho_map().forward_ref(x)
    }

    pub fn psi_tilde_inv(&self, b: &BlockRep) -> Result<OrbitCoefficients> {
        if b.gauge() != Gauge::Ortho {
            return arg("inverse map expects blocks in the orthonormal gauge");
        }
        self.ortho_map().inverse(b)
    }

    pub fn psi_tilde_inv_ref(&self, b: &BlockRep) -> Result<RefCoefficients> {
        if b.gauge() != Gauge::Ortho {
            return arg("inverse map expects blocks in the orthonormal gauge");
        }
        self.ortho_map().inverse_ref(b)
    }

    /// Sanity check of the hook formulas against the enumerated data.
    pub fn dimension_check(&self) -> bool {
        self.lambdas.iter().all(|l| ssyt_count(&l.partition, self.d).as_u128() == Some(l.tableaux.len() as u128))
    }

    /// Cache file name for `(d, n)`.
    pub fn cache_file_name(d: usize, n: usize) -> String {
        format!("cob-d{d}-n{n}.bin")
    }

    /// Serialize to bytes (format documented in `docs/cache-format.md`).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.d as u32).to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.basis.len() as u64).to_le_bytes());
        out.extend_from_slice(&(self.lambdas.len() as u32).to_le_bytes());
        for l in &self.lambdas {
            out.extend_from_slice(&(l.partition.height() as u32).to_le_bytes());
            for &p in l.partition.parts() {
                out.extend_from_slice(&(p as u32).to_le_bytes());
            }
            let m = l.tableaux.len();
            out.extend_from_slice(&(m as u32).to_le_bytes());
            out.extend_from_slice(&(l.raw.len() as u64).to_le_bytes());
            for &(r, i, j, v) in &l.raw {
                out.extend_from_slice(&(r as u64).to_le_bytes());
                out.extend_from_slice(&(i as u32).to_le_bytes());
                out.extend_from_slice(&(j as u32).to_le_bytes());
                out.extend_from_slice(&v.to_le_bytes());
            }
            for mat in [&l.gram, &l.factor] {
                for i in 0..m {
                    for j in 0..m {
                        out.extend_from_slice(&mat[(i, j)].to_le_bytes());
                    }
                }
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(digest.as_slice());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::CacheFormat(msg.to_string());
        if bytes.len() < CACHE_MAGIC.len() + 32 {
            return Err(bad("file too short"));
        }
        let (payload, digest) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(payload).as_slice() != digest {
            return Err(bad("checksum mismatch"));
        }
        let mut rd = Reader { buf: payload, pos: 0 };
        if rd.take(8)? != CACHE_MAGIC {
            return Err(bad("bad magic"));
        }
        let version = rd.u32()?;
        if version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported version {version}")));
        }
        let d = rd.u32()? as usize;
        let n = rd.u32()? as usize;
        let basis = Arc::new(OrbitBasis::full(SystemSpec::single(d, n)?)?);
        if rd.u64()? as usize != basis.len() {
            return Err(bad("orbit count does not match (d, n)"));
        }
        let expected = partitions(d, n);
        let count = rd.u32()? as usize;
        if count != expected.len() {
            return Err(bad("partition count does not match (d, n)"));
        }
        let mut lambdas = Vec::with_capacity(count);
        for lambda in expected {
            let h = rd.u32()? as usize;
            let parts = (0..h).map(|_| rd.u32().map(|p| p as usize)).collect::<Result<Vec<_>>>()?;
            if parts != lambda.parts() {
                return Err(bad("partition list out of order"));
            }
            let tableaux = ssyt_enumerate(&lambda, d);
            let m = rd.u32()? as usize;
            if m != tableaux.len() {
                return Err(bad("block size does not match the tableau count"));
            }
            let nnz = rd.u64()? as usize;
            let mut raw = Vec::with_capacity(nnz);
            for _ in 0..nnz {
                let r = rd.u64()? as usize;
                let i = rd.u32()? as usize;
                let j = rd.u32()? as usize;
                let v = rd.f64()?;
                if r >= basis.len() || i >= m || j >= m {
                    return Err(bad("triplet index out of range"));
                }
                raw.push((r, i, j, v));
            }
            let mut mats = Vec::with_capacity(2);
            for _ in 0..2 {
                let mut mat = DMatrix::zeros(m, m);
                for i in 0..m {
                    for j in 0..m {
                        mat[(i, j)] = rd.f64()?;
                    }
                }
                mats.push(mat);
            }
            let factor = mats.pop().expect("two matrices");
            let gram = mats.pop().expect("two matrices");
            let multiplicity = syt_count(&lambda);
            lambdas.push(LambdaData { partition: lambda, tableaux, multiplicity, raw, gram, factor });
        }
        if rd.pos != payload.len() {
            return Err(bad("trailing bytes"));
        }
        Self::assemble(d, n, basis, lambdas)
    }

    /// Write atomically into `dir` via a temporary file and rename.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::cache_file_name(self.d, self.n));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&self.to_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(path)
    }

    /// Load from `dir` when a cache file exists.
    pub fn load(dir: &Path, d: usize, n: usize) -> Result<Option<Self>> {
        let path = dir.join(Self::cache_file_name(d, n));
        if !path.exists() {
            return Ok(None);
        }
        let cob = Self::from_bytes(&fs::read(&path)?)?;
        if cob.d != d || cob.n != n {
            return Err(Error::CacheFormat(format!("{} holds (d={}, n={})", path.display(), cob.d, cob.n)));
        }
        Ok(Some(cob))
    }

    /// Load from the cache or build and store. The flag reports a cache hit.
    pub fn load_or_build(d: usize, n: usize, cache_dir: Option<&Path>) -> Result<(Self, bool)> {
        if let Some(dir) = cache_dir {
            if let Some(cob) = Self::load(dir, d, n)? {
                return Ok((cob, true));
            }
        }
        let cob = Self::build(d, n)?;
        if let Some(dir) = cache_dir {
            cob.save(dir)?;
        }
        Ok((cob, false))
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.pos + k > self.buf.len() {
            return Err(Error::CacheFormat("unexpected end of file".into()));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
