//! Integer partitions and the two dimension formulas attached to them.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, Exact};
use crate::error::{arg, Result};

/// Non-increasing sequence of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Trailing zeros are dropped; the remaining parts must not increase.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return arg(format!("{parts:?} is not a partition"));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Row length `λ_i` (0-based), zero past the last row.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn height(&self) -> usize {
        self.parts.len()
    }

    /// Column lengths.
    pub fn conjugate(&self) -> Vec<usize> {
        let width = self.part(0);
        (0..width).map(|j| self.parts.iter().filter(|&&p| p > j).count()).collect()
    }

    /// Hook length of box `(i, j)`.
    pub fn hook(&self, i: usize, j: usize) -> usize {
        let conj = self.conjugate();
        self.parts[i] - j + conj[j] - i - 1
    }

    fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts.iter().enumerate().flat_map(|(i, &p)| (0..p).map(move |j| (i, j)))
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Partitions of `n` with at most `d` parts, in reverse-lexicographic order.
pub fn partitions(d: usize, n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    gen_partitions(n, n, d, &mut cur, &mut out);
    out
}

fn gen_partitions(left: usize, max: usize, rows: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if left == 0 {
        out.push(Partition { parts: cur.clone() });
        return;
    }
    if rows == 0 {
        return;
    }
    for p in (1..=max.min(left)).rev() {
        cur.push(p);
        gen_partitions(left - p, p, rows - 1, cur, out);
        cur.pop();
    }
}

/// `f_λ`: number of standard tableaux, by the hook-length formula.
pub fn syt_count(lambda: &Partition) -> Exact {
    let hooks = lambda.boxes().fold(Exact::one(), |acc, (i, j)| acc.mul(&Exact::from(lambda.hook(i, j) as u64)));
    factorial(lambda.n() as u64).div_exact(&hooks).expect("hook-length quotient is integral")
}

/// `m_λ`: number of semistandard tableaux with entries in `0..d`, by the
/// hook-content formula.
pub fn ssyt_count(lambda: &Partition, d: usize) -> Exact {
    if lambda.height() > d {
        return Exact::zero();
    }
    let mut num = Exact::one();
    let mut den = Exact::one();
    for (i, j) in lambda.boxes() {
        num = num.mul(&Exact::from((d + j - i) as u64));
        den = den.mul(&Exact::from(lambda.hook(i, j) as u64));
    }
    num.div_exact(&den).expect("hook-content quotient is integral")
}
