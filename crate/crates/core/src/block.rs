//! Block-diagonal images of permutation-invariant operators and the
//! linear algebra performed on them.
//!
//! A [`BlockRep`] holds one dense matrix per irreducible block together with
//! the block's multiplicity. When a reference system of dimension `d_R` is
//! attached, block entries are indexed `(k, i)` with the reference index
//! `k` outermost, so a block is a `d_R × d_R` array of `m × m` sub-blocks.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::algebra::FlagProfile;
use crate::combinatorics::Exact;
use crate::error::{arg, Result};
use crate::linalg::{kron, max_abs, psd_inv_sqrt, psd_repair, PSEUDO_INVERSE_TOL};
use crate::link::RefCoefficients;
use crate::orbit::{partial_transpose_coeffs, OrbitBasis, OrbitCoefficients, Side, C64};
use crate::schur_weyl::Partition;

/// Which map produced the blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// Image under the PSD-preserving map `ψ`.
    Raw,
    /// Image under the *-isomorphism `ψ̃`.
    Ortho,
}

/// Label of one irreducible block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockLabel {
    Partition(Partition),
    Flag(FlagProfile),
}

/// Block sizes and multiplicities shared by every [`BlockRep`] of one map.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    labels: Vec<BlockLabel>,
    dims: Vec<usize>,
    mult: Vec<f64>,
    exact_mult: Vec<Exact>,
}

impl BlockLayout {
    pub fn new(labels: Vec<BlockLabel>, dims: Vec<usize>, exact_mult: Vec<Exact>) -> Result<Self> {
        if labels.len() != dims.len() || dims.len() != exact_mult.len() {
            return arg("block layout arrays differ in length");
        }
        let mult = exact_mult.iter().map(Exact::to_f64).collect();
        Ok(BlockLayout { labels, dims, mult, exact_mult })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn labels(&self) -> &[BlockLabel] {
        &self.labels
    }

    /// Block sizes without the reference factor.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Multiplicities as floats.
    pub fn mult(&self) -> &[f64] {
        &self.mult
    }

    pub fn exact_mult(&self) -> &[Exact] {
        &self.exact_mult
    }

    /// `Σ m_b mult_b`, the dimension of the represented space.
    pub fn represented_dim(&self) -> Exact {
        self.dims.iter().zip(&self.exact_mult).fold(Exact::zero(), |acc, (&m, f)| acc.add(&f.mul(&Exact::from(m as u64))))
    }
}

/// Direct sum of dense blocks.
#[derive(Clone, Debug)]
pub struct BlockRep {
    layout: Arc<BlockLayout>,
    d_ref: usize,
    gauge: Gauge,
    blocks: Vec<DMatrix<C64>>,
}

impl BlockRep {
    pub fn zeros(layout: Arc<BlockLayout>, d_ref: usize, gauge: Gauge) -> Self {
        let blocks = layout.dims.iter().map(|&m| DMatrix::zeros(d_ref * m, d_ref * m)).collect();
        BlockRep { layout, d_ref, gauge, blocks }
    }

    pub fn identity(layout: Arc<BlockLayout>, d_ref: usize) -> Self {
        let blocks = layout.dims.iter().map(|&m| DMatrix::identity(d_ref * m, d_ref * m)).collect();
        BlockRep { layout, d_ref, gauge: Gauge::Ortho, blocks }
    }

    pub fn from_blocks(layout: Arc<BlockLayout>, d_ref: usize, gauge: Gauge, blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if blocks.len() != layout.len() || blocks.iter().zip(&layout.dims).any(|(b, &m)| b.nrows() != d_ref * m || b.ncols() != d_ref * m) {
            return arg("block shapes do not match the layout");
        }
        Ok(BlockRep { layout, d_ref, gauge, blocks })
    }

    pub fn layout(&self) -> &Arc<BlockLayout> {
        &self.layout
    }

    pub fn d_ref(&self) -> usize {
        self.d_ref
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [DMatrix<C64>] {
        &mut self.blocks
    }

    /// Replace each block by its Hermitian part.
    pub fn hermitize(&mut self) {
        for b in &mut self.blocks {
            *b = crate::linalg::hermitian_part(b);
        }
    }

    pub fn max_abs_diff(&self, other: &BlockRep) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max)
    }

    pub fn compatible(&self, other: &BlockRep) -> Result<()> {
        if !Arc::ptr_eq(&self.layout, &other.layout) && self.layout.dims != other.layout.dims {
            return arg("block representations have different layouts");
        }
        if self.d_ref != other.d_ref {
            return arg("block representations have different reference dimensions");
        }
        if self.gauge != other.gauge {
            return arg("block representations are in different gauges");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct ImageEntry {
    block: u32,
    row: u32,
    col: u32,
    val: f64,
}

/// Linear map from orbit coefficients to blocks, stored as the sparse
/// image of every orbit matrix.
#[derive(Debug)]
pub struct BlockMap {
    layout: Arc<BlockLayout>,
    basis: Arc<OrbitBasis>,
    gauge: Gauge,
    images: Vec<Vec<ImageEntry>>,
}

impl BlockMap {
    /// `images[r]` lists `(block, row, col, value)` of the image of `C_r`.
    pub fn new(
        layout: Arc<BlockLayout>,
        basis: Arc<OrbitBasis>,
        gauge: Gauge,
        images: Vec<Vec<(usize, usize, usize, f64)>>,
    ) -> Result<Self> {
        if images.len() != basis.len() {
            return arg("one image per orbit is required");
        }
        let images = images
            .into_iter()
            .map(|img| img.into_iter().map(|(b, r, c, v)| ImageEntry { block: b as u32, row: r as u32, col: c as u32, val: v }).collect())
            .collect();
        Ok(BlockMap { layout, basis, gauge, images })
    }

    pub fn layout(&self) -> &Arc<BlockLayout> {
        &self.layout
    }

    pub fn basis(&self) -> &Arc<OrbitBasis> {
        &self.basis
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    /// Image of `C_r` as `(block, row, col, value)` entries.
    pub fn image(&self, r: usize) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.images[r].iter().map(|e| (e.block as usize, e.row as usize, e.col as usize, e.val))
    }

    fn orbit_lookup(&self, basis: &Arc<OrbitBasis>) -> Result<Option<Vec<usize>>> {
        if basis.same_as(&self.basis) {
            return Ok(None);
        }
        if basis.d() != self.basis.d() || basis.n() != self.basis.n() {
            return arg("coefficients and block map belong to different systems");
        }
        basis
            .orbits()
            .iter()
            .map(|e| {
                self.basis
                    .index_of(e)
                    .ok_or_else(|| crate::error::Error::Argument(format!("orbit {:?} is outside the block map's basis", e.entries())))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Blocks of a plain operator.
    pub fn forward(&self, x: &OrbitCoefficients) -> Result<BlockRep> {
        let grid = RefCoefficients::from_parts(1, x.basis().clone(), vec![x.values().to_vec()])?;
        self.forward_ref(&grid)
    }

    /// Blocks of `Σ_{k,l} |k⟩⟨l| ⊗ X_{kl}`.
    pub fn forward_ref(&self, x: &RefCoefficients) -> Result<BlockRep> {
        let lookup = self.orbit_lookup(x.basis())?;
        let d_ref = x.d_ref();
        let mut out = BlockRep::zeros(self.layout.clone(), d_ref, self.gauge);
        let dims = &self.layout.dims;
        for k in 0..d_ref {
            for l in 0..d_ref {
                for (i, &v) in x.get(k, l).iter().enumerate() {
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let r = lookup.as_ref().map_or(i, |map| map[i]);
                    for e in &self.images[r] {
                        let m = dims[e.block as usize];
                        out.blocks[e.block as usize][(k * m + e.row as usize, l * m + e.col as usize)] += v * e.val;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`forward`](Self::forward) for the orthonormal gauge.
    pub fn inverse(&self, b: &BlockRep) -> Result<OrbitCoefficients> {
        if b.d_ref != 1 {
            return arg("plain inverse needs blocks without a reference factor");
        }
        let grid = self.inverse_ref(b)?;
        Ok(grid.block(0, 0))
    }

    /// `x_{kl,r} = |O_r|^{-1} Σ_b mult_b Tr[ψ̃(|k⟩⟨l|⊗C_r)_b^† X_b]`.
    pub fn inverse_ref(&self, b: &BlockRep) -> Result<RefCoefficients> {
        if self.gauge != Gauge::Ortho || b.gauge != Gauge::Ortho {
            return arg("the inverse map needs the orthonormal gauge");
        }
        if b.layout.dims != self.layout.dims {
            return arg("block representation does not match this map");
        }
        let d_ref = b.d_ref;
        let dims = &self.layout.dims;
        let mult = &self.layout.mult;
        let sizes = self.basis.orbit_sizes();
        let values: Vec<Vec<C64>> = (0..d_ref * d_ref)
            .into_par_iter()
            .map(|kl| {
                let (k, l) = (kl / d_ref, kl % d_ref);
                self.images
                    .iter()
                    .zip(sizes)
                    .map(|(img, &size)| {
                        let mut acc = C64::new(0.0, 0.0);
                        for e in img {
                            let m = dims[e.block as usize];
                            acc += b.blocks[e.block as usize][(k * m + e.row as usize, l * m + e.col as usize)]
                                * (e.val * mult[e.block as usize]);
                        }
                        acc / size
                    })
                    .collect()
            })
            .collect();
        RefCoefficients::from_parts(d_ref, self.basis.clone(), values)
    }
}

fn require_ortho(b: &BlockRep) -> Result<()> {
    if b.gauge != Gauge::Ortho {
        return arg("operation needs the orthonormal gauge");
    }
    Ok(())
}

/// `Tr X = Σ_b mult_b Tr X_b`.
pub fn block_trace(b: &BlockRep) -> Result<C64> {
    require_ortho(b)?;
    Ok(b.blocks.iter().zip(&b.layout.mult).map(|(x, &f)| x.trace() * f).sum())
}

/// `Tr[A† B] = Σ_b mult_b Tr[A_b† B_b]`.
pub fn block_hs(a: &BlockRep, b: &BlockRep) -> Result<C64> {
    require_ortho(a)?;
    a.compatible(b)?;
    Ok(a.blocks
        .iter()
        .zip(&b.blocks)
        .zip(&a.layout.mult)
        .map(|((x, y), &f)| x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum::<C64>() * f)
        .sum())
}

/// `Σ_k X^{(k,k)}`: trace over the reference inside one block.
pub fn reference_trace(x: &DMatrix<C64>, d_ref: usize, m: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(m, m);
    for k in 0..d_ref {
        out += x.view((k * m, k * m), (m, m));
    }
    out
}

/// `[Tr_V X]_{kl} = Σ_i X_{(k,i),(l,i)}`: trace over the block space.
pub fn block_space_trace(x: &DMatrix<C64>, d_ref: usize, m: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d_ref, d_ref, |k, l| (0..m).map(|i| x[(k * m + i, l * m + i)]).sum())
}

/// Per-block residual `‖Σ_k X_b^{(k,k)} − 1‖_∞` of the unitality constraint.
pub fn check_cpu(b: &BlockRep) -> Vec<f64> {
    b.blocks.iter().zip(&b.layout.dims).map(|(x, &m)| max_abs(&(reference_trace(x, b.d_ref, m) - DMatrix::identity(m, m)))).collect()
}

/// Sandwich every block by `1 ⊗ M_b^{-1/2}` with `M_b = Σ_k X_b^{(k,k)}`.
///
/// Directions in the kernel of `M_b` are completed by `1/d_R · 1_R ⊗ P_ker`
/// so the constraint holds exactly; that addition is PSD. Nearly singular
/// `M_b` amplify rounding: negative eigenvalues are clipped and the
/// sandwich is repeated until the residual vanishes.
pub fn enforce_cpu(b: &mut BlockRep) {
    enforce_cpu_once(b);
    repair_blocks(b);
    for _ in 0..REFINE_PASSES {
        if check_cpu(b).iter().all(|&r| r < REFINE_TOL) {
            break;
        }
        enforce_cpu_once(b);
    }
}

fn repair_blocks(b: &mut BlockRep) {
    b.blocks.par_iter_mut().for_each(|x| {
        psd_repair(x);
    });
}

const REFINE_PASSES: usize = 3;
const REFINE_TOL: f64 = 1e-13;

fn enforce_cpu_once(b: &mut BlockRep) {
    let d_ref = b.d_ref;
    let dims = b.layout.dims.clone();
    b.blocks.par_iter_mut().zip(dims.par_iter()).for_each(|(x, &m)| {
        let (s, ker) = psd_inv_sqrt(&reference_trace(x, d_ref, m), PSEUDO_INVERSE_TOL);
        let lift = kron(&DMatrix::identity(d_ref, d_ref), &s);
        let mut y = &lift * &*x * &lift;
        y += kron(&DMatrix::identity(d_ref, d_ref), &ker).scale(1.0 / d_ref as f64);
        *x = crate::linalg::hermitian_part(&y);
    });
}

/// `T = Σ_b mult_b Tr_V X_b`, the reduced operator on the reference.
pub fn reference_marginal(b: &BlockRep) -> DMatrix<C64> {
    let parts: Vec<DMatrix<C64>> =
        b.blocks.iter().zip(&b.layout.dims).zip(&b.layout.mult).map(|((x, &m), &f)| block_space_trace(x, b.d_ref, m).scale(f)).collect();
    parts.into_iter().fold(DMatrix::zeros(b.d_ref, b.d_ref), |acc, p| acc + p)
}

/// `‖T − 1_R‖_∞` for the trace-preservation constraint.
pub fn check_cptp(b: &BlockRep) -> f64 {
    max_abs(&(reference_marginal(b) - DMatrix::identity(b.d_ref, b.d_ref)))
}

/// Sandwich every block by `T^{-1/2} ⊗ 1`. A kernel of `T` is completed
/// inside the first block. Rounding is repaired as in [`enforce_cpu`].
pub fn enforce_cptp(b: &mut BlockRep) {
    enforce_cptp_once(b);
    repair_blocks(b);
    for _ in 0..REFINE_PASSES {
        if check_cptp(b) < REFINE_TOL {
            break;
        }
        enforce_cptp_once(b);
    }
}

fn enforce_cptp_once(b: &mut BlockRep) {
    let (s, ker) = psd_inv_sqrt(&reference_marginal(b), PSEUDO_INVERSE_TOL);
    let dims = b.layout.dims.clone();
    b.blocks.par_iter_mut().zip(dims.par_iter()).for_each(|(x, &m)| {
        let lift = kron(&s, &DMatrix::identity(m, m));
        *x = crate::linalg::hermitian_part(&(&lift * &*x * &lift));
    });
    if max_abs(&ker) > 0.0 {
        let m = dims[0];
        let f = b.layout.mult[0];
        b.blocks[0] += kron(&ker, &DMatrix::identity(m, m)).scale(1.0 / (f * m as f64));
    }
}

/// Partial transpose on the B factor expressed directly on blocks.
#[derive(Debug)]
pub struct BlockPartialTranspose {
    layout: Arc<BlockLayout>,
    // (out block, out row, out col, in block, in row, in col, weight)
    entries: Vec<(u32, u32, u32, u32, u32, u32, f64)>,
}

impl BlockPartialTranspose {
    /// Precompute `ψ̃ ∘ T_B ∘ ψ̃^{-1}` for a bipartite orthonormal map.
    pub fn new(map: &BlockMap) -> Result<Self> {
        if map.gauge != Gauge::Ortho {
            return arg("partial transpose needs the orthonormal gauge");
        }
        if !map.basis.spec().is_bipartite() {
            return arg("partial transpose needs a bipartite spec");
        }
        let basis = map.basis.clone();
        let mult = &map.layout.mult;
        let sizes = basis.orbit_sizes();
        let mut acc: HashMap<(u32, u32, u32, u32, u32, u32), f64> = HashMap::new();
        for r in 0..basis.len() {
            let unit = OrbitCoefficients::unit(basis.clone(), r);
            let moved = partial_transpose_coeffs(&unit, Side::B)?;
            let target = moved.values().iter().position(|v| v.re != 0.0).expect("unit stays a unit");
            let target = map.basis.index_of(moved.basis().orbit(target)).expect("full basis is closed under T_B");
            for e_in in &map.images[r] {
                let w_in = e_in.val * mult[e_in.block as usize] / sizes[r];
                for e_out in &map.images[target] {
                    *acc.entry((e_out.block, e_out.row, e_out.col, e_in.block, e_in.row, e_in.col)).or_insert(0.0) += w_in * e_out.val;
                }
            }
        }
        let mut entries: Vec<_> = acc.into_iter().filter(|(_, w)| *w != 0.0).map(|(k, w)| (k.0, k.1, k.2, k.3, k.4, k.5, w)).collect();
        entries.sort_by(|a, b| (a.0, a.1, a.2, a.3, a.4, a.5).cmp(&(b.0, b.1, b.2, b.3, b.4, b.5)));
        Ok(BlockPartialTranspose { layout: map.layout.clone(), entries })
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, b: &BlockRep) -> Result<BlockRep> {
        require_ortho(b)?;
        if b.d_ref != 1 || b.layout.dims != self.layout.dims {
            return arg("block representation does not match the partial-transpose map");
        }
        let mut out = BlockRep::zeros(self.layout.clone(), 1, Gauge::Ortho);
        for &(ob, or, oc, ib, ir, ic, w) in &self.entries {
            let v = b.blocks[ib as usize][(ir as usize, ic as usize)];
            out.blocks[ob as usize][(or as usize, oc as usize)] += v * w;
        }
        Ok(out)
    }
}

/// Convenience wrapper: build the map and apply it once.
pub fn block_partial_transpose(b: &BlockRep, map: &BlockMap) -> Result<BlockRep> {
    BlockPartialTranspose::new(map)?.apply(b)
}
