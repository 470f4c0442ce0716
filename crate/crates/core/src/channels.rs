//! Single-copy channels in Choi form, entanglement fidelity and the closed
//! form reference curves used as baselines.
//!
//! Choi matrices are stored unnormalized (`Γ`, trace `d_in`) with the input
//! factor first: row index `a·d_out + b`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, max_abs, min_eigenvalue, psd_inv_sqrt, PSEUDO_INVERSE_TOL};
use crate::orbit::C64;

/// Tolerance of the PSD and trace checks.
pub const CHOI_TOL: f64 = 1e-10;

/// One flag outcome of a flagged channel: its probability and output size.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagBlock {
    pub prob: f64,
    pub d_out: usize,
}

/// Normalization convention at API boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Trace `d_in`.
    Gamma,
    /// Trace 1.
    Phi,
}

#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    matrix: DMatrix<C64>,
    flags: Option<Vec<FlagBlock>>,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::Argument(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

impl ChoiMatrix {
    /// Wrap an unnormalized Choi matrix after validating it.
    pub fn new(d_in: usize, d_out: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let ch = ChoiMatrix { d_in, d_out, matrix, flags: None };
        ch.validate()?;
        Ok(ch)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `Γ`, trace `d_in`.
    pub fn gamma(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `Φ = Γ / d_in`, trace 1.
    pub fn phi(&self) -> DMatrix<C64> {
        self.matrix.scale(1.0 / self.d_in as f64)
    }

    pub fn flags(&self) -> Option<&[FlagBlock]> {
        self.flags.as_deref()
    }

    /// Output block sizes; a single block when the channel is not flagged.
    pub fn output_blocks(&self) -> Vec<usize> {
        match &self.flags {
            Some(f) => f.iter().map(|b| b.d_out).collect(),
            None => vec![self.d_out],
        }
    }

    /// `Tr_out Γ`.
    pub fn input_marginal(&self) -> DMatrix<C64> {
        let (di, dout) = (self.d_in, self.d_out);
        DMatrix::from_fn(di, di, |a, b| (0..dout).map(|o| self.matrix[(a * dout + o, b * dout + o)]).sum())
    }

    /// Largest violation among Hermiticity, positivity and `Tr_out Γ = 1`.
    pub fn constraint_residual(&self) -> f64 {
        let herm = max_abs(&(&self.matrix - self.matrix.adjoint()));
        let psd = (-min_eigenvalue(&self.matrix)).max(0.0);
        let tp = max_abs(&(self.input_marginal() - DMatrix::identity(self.d_in, self.d_in)));
        herm.max(psd).max(tp)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.d_in * self.d_out;
        if self.d_in == 0 || self.d_out == 0 || self.matrix.nrows() != n || self.matrix.ncols() != n {
            return Err(Error::ChannelSpec(format!("Choi matrix must be {n}×{n} for d_in = {}, d_out = {}", self.d_in, self.d_out)));
        }
        let res = self.constraint_residual();
        if res > CHOI_TOL {
            return Err(Error::ChannelSpec(format!("Choi matrix violates the CPTP constraints by {res:.3e}")));
        }
        Ok(())
    }

    /// Identity channel on `C^d`.
    pub fn identity(d: usize) -> Self {
        let mut m = DMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for l in 0..d {
                m[(k * d + k, l * d + l)] = c(1.0);
            }
        }
        ChoiMatrix { d_in: d, d_out: d, matrix: m, flags: None }
    }

    /// Qubit amplitude damping with decay probability `γ`.
    pub fn adc(gamma: f64) -> Result<Self> {
        check_unit("γ", gamma)?;
        let s = (1.0 - gamma).sqrt();
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0);
        m[(0, 3)] = c(s);
        m[(3, 0)] = c(s);
        m[(2, 2)] = c(gamma);
        m[(3, 3)] = c(1.0 - gamma);
        Ok(ChoiMatrix { d_in: 2, d_out: 2, matrix: m, flags: None })
    }

    /// Qubit depolarizing channel `ρ ↦ (1−p)ρ + p·1/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_unit("p", p)?;
        let id = Self::identity(2).matrix;
        let m = id.scale(1.0 - p) + DMatrix::identity(4, 4).scale(p / 2.0);
        Ok(ChoiMatrix { d_in: 2, d_out: 2, matrix: m, flags: None })
    }

    /// Replacement channel `ρ ↦ Tr(ρ)·σ`.
    pub fn replacement(d_in: usize, sigma: &DMatrix<C64>) -> Result<Self> {
        let m = DMatrix::<C64>::identity(d_in, d_in).kronecker(sigma);
        Self::new(d_in, sigma.nrows(), m)
    }

    /// Replacement by the maximally mixed state of dimension `d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let sigma = DMatrix::<C64>::identity(d, d).scale(1.0 / d as f64);
        ChoiMatrix { d_in: d, d_out: d, matrix: DMatrix::<C64>::identity(d, d).kronecker(&sigma), flags: None }
    }

    /// Random channel: a complex Ginibre `W = GG†` sandwiched so that
    /// `Tr_out Γ = 1`.
    pub fn random<R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> Self {
        let n = d_in * d_out;
        let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let w = &g * g.adjoint();
        let tmp = ChoiMatrix { d_in, d_out, matrix: w, flags: None };
        let (s, _) = psd_inv_sqrt(&tmp.input_marginal(), PSEUDO_INVERSE_TOL);
        let lift = s.kronecker(&DMatrix::<C64>::identity(d_out, d_out));
        ChoiMatrix { d_in, d_out, matrix: hermitian_part(&(&lift * tmp.matrix * &lift)), flags: None }
    }

    /// `Σ_i p_i |i⟩⟨i| ⊗ N_i(ρ)`, stored with block-diagonal output.
    pub fn flagged(channels: &[ChoiMatrix], probs: &[f64]) -> Result<Self> {
        if channels.is_empty() || channels.len() != probs.len() {
            return Err(Error::Argument("flagged channel needs one probability per channel".into()));
        }
        let d_in = channels[0].d_in;
        if channels.iter().any(|ch| ch.d_in != d_in || ch.flags.is_some()) {
            return Err(Error::Argument("flagged components must be plain channels with equal input dimension".into()));
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Argument("flag probabilities must lie in [0, 1]".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!("flag probabilities sum to {total}, not 1")));
        }
        let d_out: usize = channels.iter().map(|ch| ch.d_out).sum();
        let mut m = DMatrix::zeros(d_in * d_out, d_in * d_out);
        let mut offset = 0;
        for (ch, &p) in channels.iter().zip(probs) {
            for a in 0..d_in {
                for b in 0..d_in {
                    for i in 0..ch.d_out {
                        for j in 0..ch.d_out {
                            m[(a * d_out + offset + i, b * d_out + offset + j)] = ch.matrix[(a * ch.d_out + i, b * ch.d_out + j)] * p;
                        }
                    }
                }
            }
            offset += ch.d_out;
        }
        let flags = channels.iter().zip(probs).map(|(ch, &p)| FlagBlock { prob: p, d_out: ch.d_out }).collect();
        Ok(ChoiMatrix { d_in, d_out, matrix: m, flags: Some(flags) })
    }

    /// Parse the JSON channel format. Errors name the first bad entry.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: JsonChannel =
            serde_json::from_str(text).map_err(|e| Error::ChannelSpec(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let scale = match spec.normalization.unwrap_or(Normalization::Gamma) {
            Normalization::Gamma => 1.0,
            Normalization::Phi => spec.d_in as f64,
        };
        if spec.d_in == 0 || spec.d_out == 0 {
            return Err(Error::ChannelSpec("d_in and d_out must be positive".into()));
        }
        let fill = |entries: &[JsonEntry], d_out: usize, path: &str| -> Result<DMatrix<C64>> {
            let n = spec.d_in * d_out;
            let mut m = DMatrix::zeros(n, n);
            for (i, e) in entries.iter().enumerate() {
                if e.row >= n || e.col >= n {
                    return Err(Error::ChannelSpec(format!("{path}[{i}]: index ({}, {}) outside {n}×{n}", e.row, e.col)));
                }
                if !e.re.is_finite() || !e.im.is_finite() {
                    return Err(Error::ChannelSpec(format!("{path}[{i}]: non-finite value")));
                }
                m[(e.row, e.col)] += C64::new(e.re, e.im) * scale;
            }
            Ok(m)
        };
        match spec.flags {
            None => {
                let m = fill(&spec.entries, spec.d_out, "entries")?;
                Self::new(spec.d_in, spec.d_out, m)
            }
            Some(flags) => {
                if flags.is_empty() {
                    return Err(Error::ChannelSpec("flags: empty list".into()));
                }
                let mut parts = Vec::with_capacity(flags.len());
                let mut probs = Vec::with_capacity(flags.len());
                for (i, f) in flags.iter().enumerate() {
                    let d_out = f.d_out.unwrap_or(spec.d_out);
                    let m = fill(&f.entries, d_out, &format!("flags[{i}].entries"))?;
                    let ch = Self::new(spec.d_in, d_out, m).map_err(|e| Error::ChannelSpec(format!("flags[{i}]: {e}")))?;
                    parts.push(ch);
                    probs.push(f.prob);
                }
                Self::flagged(&parts, &probs).map_err(|e| Error::ChannelSpec(format!("flags: {e}")))
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEntry {
    row: usize,
    col: usize,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonFlag {
    prob: f64,
    #[serde(default)]
    d_out: Option<usize>,
    entries: Vec<JsonEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonChannel {
    d_in: usize,
    d_out: usize,
    #[serde(default)]
    entries: Vec<JsonEntry>,
    normalization: Option<Normalization>,
    flags: Option<Vec<JsonFlag>>,
}

/// `⟨Φ^d|Φ^M|Φ^d⟩ = d^{-2} Σ_{k,l} Γ_{(k,k),(l,l)}` for a square channel.
pub fn entanglement_fidelity(gamma: &DMatrix<C64>, d: usize) -> Result<f64> {
    if gamma.nrows() != d * d || gamma.ncols() != d * d {
        return Err(Error::Argument(format!("entanglement fidelity needs a {0}×{0} Choi matrix", d * d)));
    }
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..d {
        for l in 0..d {
            acc += gamma[(k * d + k, l * d + l)];
        }
    }
    Ok(acc.re / (d * d) as f64)
}

/// Closed-form baselines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceCurve {
    /// Four-qubit amplitude-damping code, parameter `γ`.
    Leung4,
    /// Five-qubit code on the depolarizing channel, parameter `p`.
    FiveQubit,
    /// No coding, amplitude damping: `((1+√(1−γ))/2)²`.
    UncodedAdc,
    /// No coding, depolarizing: `1 − 3p/4`.
    UncodedDepolarizing,
}

pub fn reference_curve(kind: ReferenceCurve, x: f64) -> f64 {
    match kind {
        ReferenceCurve::Leung4 => {
            let s = (1.0 + (x - 1.0).powi(4)).sqrt();
            let r2 = std::f64::consts::SQRT_2;
            0.5 + s / (2.0 * r2) + x - s * x / (2.0 * r2) - 3.75 * x * x + 3.5 * x.powi(3) - x.powi(4)
        }
        ReferenceCurve::FiveQubit => 1.0 - 45.0 / 8.0 * x.powi(2) + 75.0 / 8.0 * x.powi(3) - 45.0 / 8.0 * x.powi(4) + 9.0 / 8.0 * x.powi(5),
        ReferenceCurve::UncodedAdc => ((1.0 + (1.0 - x).sqrt()) / 2.0).powi(2),
        ReferenceCurve::UncodedDepolarizing => 1.0 - 0.75 * x,
    }
}
