//! Orbit basis of `End^{S_n}(H^{⊗n})`.
//!
//! An orbit of the diagonal `S_n` action on pairs of multi-indices is labelled
//! by its count matrix: entry `(a, b)` counts the positions `k` with
//! `i_k = a` and `j_k = b`. The 0/1 incidence matrices `C_E` of the orbits
//! form an orthogonal basis of the permutation-invariant operators.
//!
//! Symbols are 0-based. Orbits are ordered lexicographically by the
//! row-major entry vector of their count matrix.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, factorial, multinomial, Exact};
use crate::error::{arg, Error, Result};

pub type C64 = Complex64;

/// Default cap on the number of orbits any single enumeration may produce.
pub const DEFAULT_ORBIT_BUDGET: u128 = 50_000_000;

/// Local dimensions of one copy plus the number of copies.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemSpec {
    local_dims: Vec<usize>,
    copies: usize,
}

impl SystemSpec {
    pub fn new(local_dims: Vec<usize>, copies: usize) -> Result<Self> {
        if copies == 0 {
            return arg("copies must be at least 1");
        }
        if local_dims.is_empty() || local_dims.iter().any(|&d| d == 0) {
            return arg("local dimensions must be nonempty and positive");
        }
        Ok(SystemSpec { local_dims, copies })
    }

    pub fn single(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d], n)
    }

    pub fn bipartite(d_a: usize, d_b: usize, n: usize) -> Result<Self> {
        Self::new(vec![d_a, d_b], n)
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Single-copy dimension: product of the local dimensions.
    pub fn dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    pub fn is_bipartite(&self) -> bool {
        self.local_dims.len() == 2
    }

    fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.local_dims[..] {
            [a, b] => Ok((a, b)),
            _ => arg(format!("expected a bipartite spec, got local dims {:?}", self.local_dims)),
        }
    }
}

/// `d × d` grid of nonnegative counts; the label of one orbit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountMatrix {
    d: usize,
    entries: Vec<u32>,
}

impl CountMatrix {
    pub fn new(d: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != d * d {
            return arg(format!("count matrix needs {} entries, got {}", d * d, entries.len()));
        }
        Ok(CountMatrix { d, entries })
    }

    pub fn zeros(d: usize) -> Self {
        CountMatrix { d, entries: vec![0; d * d] }
    }

    /// Single nonzero entry `count` at `(a, b)`.
    pub fn elementary(d: usize, a: usize, b: usize, count: u32) -> Self {
        let mut e = Self::zeros(d);
        e.entries[a * d + b] = count;
        e
    }

    pub fn from_rows(rows: &[&[u32]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return arg("count matrix rows must form a square grid");
        }
        Ok(CountMatrix { d, entries: rows.iter().flat_map(|r| r.iter().copied()).collect() })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Total count, i.e. the number of copies.
    pub fn n(&self) -> usize {
        self.entries.iter().map(|&e| e as usize).sum()
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.entries[a * self.d + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: u32) {
        self.entries[a * self.d + b] = v;
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u32] {
        &mut self.entries
    }

    pub fn transpose(&self) -> Self {
        let d = self.d;
        let mut t = Self::zeros(d);
        for a in 0..d {
            for b in 0..d {
                t.entries[b * d + a] = self.entries[a * d + b];
            }
        }
        t
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.d;
        (0..d).all(|a| (0..d).all(|b| a == b || self.entries[a * d + b] == 0))
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.chunks(self.d).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        let d = self.d;
        (0..d).map(|b| (0..d).map(|a| self.entries[a * d + b]).sum()).collect()
    }

    /// `true` when every nonzero entry lies inside `support`.
    pub fn within(&self, support: &Support) -> bool {
        self.entries.iter().zip(&support.cells).all(|(&e, &ok)| e == 0 || ok)
    }

    /// Relabel cells: entry at `(a, b)` moves to `f(a, b)`.
    pub fn map_cells(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let d = self.d;
        let mut out = Self::zeros(d);
        for a in 0..d {
            for b in 0..d {
                let (x, y) = f(a, b);
                out.entries[x * d + y] += self.entries[a * d + b];
            }
        }
        out
    }

    /// `‖C_E‖²_HS`, the number of index pairs in the orbit.
    pub fn orbit_size(&self) -> Exact {
        multinomial(self.entries.iter().map(|&e| e as u64))
    }

    /// `Tr C_E`: `n!/∏ m_a!` for diagonal `E`, else zero.
    pub fn trace_orbit(&self) -> Exact {
        if self.is_diagonal() {
            self.orbit_size()
        } else {
            Exact::zero()
        }
    }
}

/// Count matrix of the pair of multi-indices `(i, j)` over symbols `0..d`.
pub fn count_of_pair(i: &[usize], j: &[usize], d: usize) -> Result<CountMatrix> {
    if i.len() != j.len() {
        return arg(format!("multi-index lengths differ: {} vs {}", i.len(), j.len()));
    }
    let mut e = CountMatrix::zeros(d);
    for (&a, &b) in i.iter().zip(j) {
        if a >= d || b >= d {
            return arg(format!("symbol out of range 0..{d}"));
        }
        e.entries[a * d + b] += 1;
    }
    Ok(e)
}

/// Canonical representative pair of an orbit, filling `(a, b)` row-major.
pub fn representative(e: &CountMatrix) -> (Vec<usize>, Vec<usize>) {
    let d = e.d;
    let mut i = Vec::with_capacity(e.n());
    let mut j = Vec::with_capacity(e.n());
    for a in 0..d {
        for b in 0..d {
            for _ in 0..e.get(a, b) {
                i.push(a);
                j.push(b);
            }
        }
    }
    (i, j)
}

/// Set of single-copy matrix positions allowed to carry a nonzero count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Support {
    d: usize,
    cells: Vec<bool>,
}

impl Support {
    pub fn full(d: usize) -> Self {
        Support { d, cells: vec![true; d * d] }
    }

    pub fn from_cells(d: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut mask = vec![false; d * d];
        for (a, b) in cells {
            mask[a * d + b] = true;
        }
        Support { d, cells: mask }
    }

    /// Positions of the nonzero entries of `x`.
    pub fn nonzero(x: &DMatrix<C64>) -> Self {
        let d = x.nrows();
        Support::from_cells(d, (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).filter(|&(a, b)| x[(a, b)] != C64::new(0.0, 0.0)))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.cells[a * self.d + b]
    }

    pub fn len(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|&c| c)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.d;
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(move |(p, _)| (p / d, p % d))
    }

    pub fn map_cells(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        Support::from_cells(self.d, self.cells().map(|(a, b)| f(a, b)))
    }

    pub fn transpose(&self) -> Self {
        self.map_cells(|a, b| (b, a))
    }
}

/// Canonically ordered list of orbits, optionally restricted to a support.
#[derive(Debug)]
pub struct OrbitBasis {
    spec: SystemSpec,
    support: Option<Support>,
    orbits: Vec<CountMatrix>,
    index: HashMap<CountMatrix, usize>,
    sizes: Vec<f64>,
}

/// Number of weak compositions of `n` into `cells` parts.
pub fn orbit_count(cells: usize, n: usize) -> Exact {
    if cells == 0 {
        return if n == 0 { Exact::one() } else { Exact::zero() };
    }
    binomial((n + cells - 1) as u64, (cells - 1) as u64)
}

/// Enumerate the full orbit basis of `spec` with the default budget.
pub fn enumerate_orbits(spec: &SystemSpec) -> Result<OrbitBasis> {
    OrbitBasis::build(spec.clone(), None, DEFAULT_ORBIT_BUDGET)
}

impl OrbitBasis {
    pub fn full(spec: SystemSpec) -> Result<Self> {
        Self::build(spec, None, DEFAULT_ORBIT_BUDGET)
    }

    /// Orbits whose count matrices vanish outside `support`.
    pub fn restricted(spec: SystemSpec, support: Support) -> Result<Self> {
        Self::build(spec, Some(support), DEFAULT_ORBIT_BUDGET)
    }

    pub fn build(spec: SystemSpec, support: Option<Support>, budget: u128) -> Result<Self> {
        let d = spec.dim();
        let n = spec.copies();
        let support = support.filter(|s| !s.is_full());
        if let Some(s) = &support {
            if s.d != d {
                return arg(format!("support dimension {} does not match spec dimension {d}", s.d));
            }
        }
        let cells: Vec<usize> = match &support {
            Some(s) => (0..d * d).filter(|&p| s.cells[p]).collect(),
            None => (0..d * d).collect(),
        };
        let needed = orbit_count(cells.len(), n);
        let fits = needed.as_u128().map_or(false, |c| c <= budget && c <= usize::MAX as u128);
        if !fits {
            return Err(Error::Capacity {
                what: format!("orbit basis (d={d}, n={n}, {} cells)", cells.len()),
                needed: needed.to_string(),
                budget,
            });
        }
        let count = needed.as_u128().unwrap_or(0) as usize;
        let mut orbits = Vec::with_capacity(count);
        let mut cur = vec![0u32; d * d];
        if !cells.is_empty() {
            fill_compositions(&cells, 0, n as u32, &mut cur, &mut |e| orbits.push(CountMatrix { d, entries: e.to_vec() }));
        }
        let index = orbits.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let sizes = orbits.iter().map(|e| e.orbit_size().to_f64()).collect();
        Ok(OrbitBasis { spec, support, orbits, index, sizes })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn d(&self) -> usize {
        self.spec.dim()
    }

    pub fn n(&self) -> usize {
        self.spec.copies()
    }

    /// `None` when the basis is unrestricted.
    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbits(&self) -> &[CountMatrix] {
        &self.orbits
    }

    pub fn orbit(&self, idx: usize) -> &CountMatrix {
        &self.orbits[idx]
    }

    pub fn index_of(&self, e: &CountMatrix) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Orbit sizes `|O_r|` as floats, in basis order.
    pub fn orbit_sizes(&self) -> &[f64] {
        &self.sizes
    }

    /// Two bases list the same orbits in the same order.
    pub fn same_as(&self, other: &OrbitBasis) -> bool {
        std::ptr::eq(self, other) || (self.spec == other.spec && self.support == other.support)
    }

    /// Same spec, support relabelled by `f` (or the full basis again).
    fn with_mapped_support(self: &Arc<Self>, f: impl Fn(usize, usize) -> (usize, usize)) -> Result<Arc<Self>> {
        match &self.support {
            None => Ok(self.clone()),
            Some(s) => {
                let mapped = s.map_cells(f);
                if &mapped == s {
                    Ok(self.clone())
                } else {
                    Ok(Arc::new(Self::build(self.spec.clone(), Some(mapped), DEFAULT_ORBIT_BUDGET)?))
                }
            }
        }
    }
}

fn fill_compositions(cells: &[usize], pos: usize, left: u32, cur: &mut [u32], emit: &mut impl FnMut(&[u32])) {
    let cell = cells[pos];
    if pos + 1 == cells.len() {
        cur[cell] = left;
        emit(cur);
        cur[cell] = 0;
        return;
    }
    for v in 0..=left {
        cur[cell] = v;
        fill_compositions(cells, pos + 1, left - v, cur, emit);
    }
    cur[cell] = 0;
}

/// Coefficients of a permutation-invariant operator in an orbit basis.
///
/// Values are stored densely over the (possibly support-restricted) basis,
/// so the support of the basis doubles as the declared support.
#[derive(Clone, Debug)]
pub struct OrbitCoefficients {
    basis: Arc<OrbitBasis>,
    values: Vec<C64>,
}

impl OrbitCoefficients {
    pub fn zeros(basis: Arc<OrbitBasis>) -> Self {
        let values = vec![C64::new(0.0, 0.0); basis.len()];
        OrbitCoefficients { basis, values }
    }

    pub fn from_values(basis: Arc<OrbitBasis>, values: Vec<C64>) -> Result<Self> {
        if values.len() != basis.len() {
            return arg(format!("{} values for a basis of {} orbits", values.len(), basis.len()));
        }
        Ok(OrbitCoefficients { basis, values })
    }

    /// The basis element `C_E` for orbit index `idx`.
    pub fn unit(basis: Arc<OrbitBasis>, idx: usize) -> Self {
        let mut x = Self::zeros(basis);
        x.values[idx] = C64::new(1.0, 0.0);
        x
    }

    /// The identity operator: coefficient one on every diagonal orbit.
    pub fn identity(basis: Arc<OrbitBasis>) -> Self {
        let values = basis.orbits().iter().map(|e| if e.is_diagonal() { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
        OrbitCoefficients { basis, values }
    }

    pub fn basis(&self) -> &Arc<OrbitBasis> {
        &self.basis
    }

    pub fn support(&self) -> Option<&Support> {
        self.basis.support()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Coefficient of orbit `e`; zero for orbits outside the basis.
    pub fn get(&self, e: &CountMatrix) -> C64 {
        self.basis.index_of(e).map_or(C64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn scale(&mut self, s: C64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    pub fn add_assign(&mut self, other: &OrbitCoefficients) -> Result<()> {
        same_basis(&self.basis, &other.basis)?;
        self.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += b);
        Ok(())
    }

    /// Express the same operator in `target`; fails if a nonzero
    /// coefficient has no counterpart there.
    pub fn reindex(&self, target: &Arc<OrbitBasis>) -> Result<OrbitCoefficients> {
        if self.basis.same_as(target) {
            return Ok(OrbitCoefficients { basis: target.clone(), values: self.values.clone() });
        }
        let mut out = OrbitCoefficients::zeros(target.clone());
        for (e, &v) in self.basis.orbits().iter().zip(&self.values) {
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            match target.index_of(e) {
                Some(i) => out.values[i] = v,
                None => return arg(format!("orbit {:?} has a nonzero coefficient but is missing from the target basis", e.entries())),
            }
        }
        Ok(out)
    }

    /// Largest absolute coefficient difference to another vector on the same basis.
    pub fn max_abs_diff(&self, other: &OrbitCoefficients) -> Result<f64> {
        same_basis(&self.basis, &other.basis)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

pub(crate) fn same_basis(a: &OrbitBasis, b: &OrbitBasis) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        arg("coefficient vectors live on different orbit bases")
    }
}

/// Orbit coefficients of `X^{⊗n}`, stored on the basis restricted to `nz(X)`.
pub fn tensor_coefficients(x: &DMatrix<C64>, spec: &SystemSpec) -> Result<OrbitCoefficients> {
    if x.nrows() != x.ncols() || x.nrows() != spec.dim() {
        return arg(format!("matrix is {}×{}, spec dimension is {}", x.nrows(), x.ncols(), spec.dim()));
    }
    let basis = Arc::new(OrbitBasis::restricted(spec.clone(), Support::nonzero(x))?);
    tensor_coefficients_on(x, basis)
}

/// Orbit coefficients of `X^{⊗n}` on a caller-provided basis.
pub fn tensor_coefficients_on(x: &DMatrix<C64>, basis: Arc<OrbitBasis>) -> Result<OrbitCoefficients> {
    let d = basis.d();
    if x.nrows() != d || x.ncols() != d {
        return arg(format!("matrix is {}×{}, basis dimension is {d}", x.nrows(), x.ncols()));
    }
    if let Some(s) = basis.support() {
        let outside = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).any(|(a, b)| !s.contains(a, b) && x[(a, b)].norm() != 0.0);
        if outside {
            return arg("matrix has nonzero entries outside the basis support");
        }
    }
    let values = basis
        .orbits()
        .iter()
        .map(|e| {
            let mut c = C64::new(1.0, 0.0);
            for a in 0..d {
                for b in 0..d {
                    let k = e.get(a, b);
                    if k > 0 {
                        c *= x[(a, b)].powu(k);
                    }
                }
            }
            c
        })
        .collect();
    OrbitCoefficients::from_values(basis, values)
}

fn permute_coeffs(x: &OrbitCoefficients, f: impl Fn(usize, usize) -> (usize, usize) + Copy) -> Result<OrbitCoefficients> {
    let target = x.basis.with_mapped_support(f)?;
    let mut out = OrbitCoefficients::zeros(target.clone());
    for (e, &v) in x.basis.orbits().iter().zip(&x.values) {
        let idx = target.index_of(&e.map_cells(f)).ok_or_else(|| Error::Argument("relabelled orbit missing from target basis".into()))?;
        out.values[idx] = v;
    }
    Ok(out)
}

/// Coefficients of `X^T`: the value at `E` moves to `E^T`.
pub fn transpose_coeffs(x: &OrbitCoefficients) -> Result<OrbitCoefficients> {
    permute_coeffs(x, |a, b| (b, a))
}

/// Which tensor factor of a bipartite spec a partial operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Partial transpose on one factor of a bipartite `[d_A, d_B]` spec.
pub fn partial_transpose_coeffs(x: &OrbitCoefficients, side: Side) -> Result<OrbitCoefficients> {
    let (_, d_b) = x.basis.spec().bipartite_dims()?;
    let split = move |p: usize| (p / d_b, p % d_b);
    let join = move |a: usize, b: usize| a * d_b + b;
    match side {
        Side::B => permute_coeffs(x, move |r, c| {
            let ((ra, rb), (ca, cb)) = (split(r), split(c));
            (join(ra, cb), join(ca, rb))
        }),
        Side::A => permute_coeffs(x, move |r, c| {
            let ((ra, rb), (ca, cb)) = (split(r), split(c));
            (join(ca, rb), join(ra, cb))
        }),
    }
}

/// Hilbert–Schmidt inner product `Tr[X† Y]`.
pub fn hs_inner(x: &OrbitCoefficients, y: &OrbitCoefficients) -> Result<C64> {
    same_basis(&x.basis, &y.basis)?;
    Ok(x.values.iter().zip(&y.values).zip(x.basis.orbit_sizes()).map(|((a, b), &s)| a.conj() * b * s).sum())
}

/// `Tr X`.
pub fn trace_coeffs(x: &OrbitCoefficients) -> C64 {
    x.values.iter().zip(x.basis.orbits()).zip(x.basis.orbit_sizes()).filter(|((_, e), _)| e.is_diagonal()).map(|((v, _), &s)| v * s).sum()
}

/// `n!` as a float, convenience for normalisations.
pub fn factorial_f64(n: usize) -> f64 {
    factorial(n as u64).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_weak_compositions() {
        assert_eq!(enumerate_orbits(&SystemSpec::single(2, 2).unwrap()).unwrap().len(), 10);
        assert_eq!(enumerate_orbits(&SystemSpec::single(1, 7).unwrap()).unwrap().len(), 1);
        assert_eq!(enumerate_orbits(&SystemSpec::single(4, 2).unwrap()).unwrap().len(), 136);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let b = enumerate_orbits(&SystemSpec::single(2, 3).unwrap()).unwrap();
        for w in b.orbits().windows(2) {
            assert!(w[0].entries() < w[1].entries());
        }
        assert_eq!(b.orbit(0).entries(), &[0, 0, 0, 3]);
    }

    #[test]
    fn count_and_representative_examples() {
        let e = count_of_pair(&[0, 0], &[0, 1], 2).unwrap();
        assert_eq!(e.entries(), &[1, 1, 0, 0]);
        let e = count_of_pair(&[0, 1], &[1, 0], 2).unwrap();
        assert_eq!(e.entries(), &[0, 1, 1, 0]);
        assert_eq!(representative(&e), (vec![0, 1], vec![1, 0]));
        assert!(count_of_pair(&[0], &[0, 1], 2).is_err());
    }

    #[test]
    fn orbit_size_and_trace() {
        let e = CountMatrix::from_rows(&[&[2, 0], &[0, 0]]).unwrap();
        assert_eq!(e.orbit_size(), Exact::one());
        assert_eq!(e.trace_orbit(), Exact::one());
        let e = CountMatrix::from_rows(&[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(e.orbit_size(), Exact::Small(2));
        assert_eq!(e.trace_orbit(), Exact::Small(2));
        let e = CountMatrix::from_rows(&[&[0, 2], &[0, 0]]).unwrap();
        assert_eq!(e.trace_orbit(), Exact::zero());
        let e = CountMatrix::from_rows(&[&[1, 1], &[1, 0]]).unwrap();
        assert_eq!(e.orbit_size(), Exact::Small(6));
    }

    #[test]
    fn capacity_error_is_reported() {
        let spec = SystemSpec::single(4, 30).unwrap();
        match OrbitBasis::build(spec, None, 1000) {
            Err(Error::Capacity { budget, .. }) => assert_eq!(budget, 1000),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn identity_tensor_coefficients() {
        let spec = SystemSpec::single(2, 2).unwrap();
        let x = tensor_coefficients(&DMatrix::identity(2, 2), &spec).unwrap();
        assert_eq!(x.basis().len(), 3);
        assert!(x.values().iter().all(|v| *v == C64::new(1.0, 0.0)));
        assert_eq!(hs_inner(&x, &x).unwrap(), C64::new(4.0, 0.0));
    }
}
