//! Encoding polynomials from count functions over column-vector pairs.
//!
//! A Young symmetrizer decomposes the diagram into columns. Each column of
//! height `t` contributes a minor `det(x_{v_i, w_j})` whose row labels `v`
//! come from `τ` and column labels `w` from `γ`. Summing over all ways of
//! distributing the row contents of the two tableaux across the columns,
//! weighted by multinomials, gives `f_{τ,γ}`. This path is slower than the
//! differential-operator construction and serves as its independent check.

use num_bigint::BigInt;
use num_traits::One;

use crate::combinatorics::factorial;
use crate::error::{arg, Result};

use super::poly::{minor, EncodingPolynomial};
use super::tableau::Tableau;

fn big_factorial(n: usize) -> BigInt {
    BigInt::from(factorial(n as u64).to_big())
}

/// Injective sequences of length `t` over `0..d`.
fn injective_sequences(d: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    let mut used = vec![false; d];
    fn rec(d: usize, t: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for s in 0..d {
            if !used[s] {
                used[s] = true;
                cur.push(s);
                rec(d, t, cur, used, out);
                cur.pop();
                used[s] = false;
            }
        }
    }
    rec(d, t, &mut cur, &mut used, &mut out);
    out
}

struct Search<'a> {
    heights: Vec<(usize, usize)>,
    candidates: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
    rem_tau: Vec<Vec<i32>>,
    rem_gamma: Vec<Vec<i32>>,
    chosen: Vec<(usize, usize, usize)>,
    found: &'a mut Vec<Vec<(usize, usize, usize)>>,
}

impl Search<'_> {
    fn apply(&mut self, level: usize, cand: usize, sign: i32) -> bool {
        let (v, w) = &self.candidates[level][cand];
        let mut ok = true;
        for (i, (&a, &b)) in v.iter().zip(w).enumerate() {
            self.rem_tau[i][a] -= sign;
            self.rem_gamma[i][b] -= sign;
            ok &= self.rem_tau[i][a] >= 0 && self.rem_gamma[i][b] >= 0;
        }
        ok
    }

    fn run(&mut self, level: usize, start: usize, left: usize) {
        if level == self.heights.len() {
            self.found.push(self.chosen.clone());
            return;
        }
        if left == 0 {
            let next_left = self.heights.get(level + 1).map_or(0, |h| h.1);
            self.run(level + 1, 0, next_left);
            return;
        }
        for cand in start..self.candidates[level].len() {
            let feasible = self.apply(level, cand, 1);
            if feasible {
                self.chosen.push((level, cand, 1));
                self.run(level, cand, left - 1);
                self.chosen.pop();
            }
            self.apply(level, cand, -1);
        }
    }
}

/// `f_{τ,γ}` by summing over valid count functions.
pub fn encoding_poly_m1(tau: &Tableau, gamma: &Tableau, d: usize) -> Result<EncodingPolynomial> {
    if tau.shape() != gamma.shape() {
        return arg("tableaux have different shapes");
    }
    if tau.max_symbol() > d || gamma.max_symbol() > d {
        return arg(format!("tableau symbols exceed 0..{d}"));
    }
    let lambda = tau.shape();
    let h = lambda.height();
    let n = lambda.n();
    let column_weight: BigInt = lambda.conjugate().iter().map(|&c| big_factorial(c)).product();

    let row_counts = |t: &Tableau| -> Vec<Vec<i32>> {
        t.rows()
            .iter()
            .map(|row| {
                let mut c = vec![0i32; d];
                for &s in row {
                    c[s as usize] += 1;
                }
                c
            })
            .collect()
    };

    // Column heights from tallest to shortest with their multiplicities.
    let heights: Vec<(usize, usize)> = (1..=h).rev().map(|t| (t, lambda.part(t - 1) - lambda.part(t))).filter(|&(_, c)| c > 0).collect();
    let candidates: Vec<Vec<(Vec<usize>, Vec<usize>)>> = heights
        .iter()
        .map(|&(t, _)| {
            let seqs = injective_sequences(d, t);
            seqs.iter().flat_map(|v| seqs.iter().map(move |w| (v.clone(), w.clone()))).collect()
        })
        .collect();

    let mut found = Vec::new();
    if n == 0 {
        return Ok(EncodingPolynomial::one(d));
    }
    let mut search = Search {
        heights: heights.clone(),
        candidates,
        rem_tau: row_counts(tau),
        rem_gamma: row_counts(gamma),
        chosen: Vec::new(),
        found: &mut found,
    };
    let first_left = heights[0].1;
    search.run(0, 0, first_left);
    let candidates = std::mem::take(&mut search.candidates);

    let height_weight: BigInt = heights.iter().map(|&(_, c)| big_factorial(c)).product();
    let mut out = EncodingPolynomial::zero(d, n);
    for assignment in found {
        // Collapse repeated picks into multiplicities κ.
        let mut grouped: Vec<((usize, usize), usize)> = Vec::new();
        for (level, cand, _) in assignment {
            match grouped.last_mut() {
                Some((key, k)) if *key == (level, cand) => *k += 1,
                _ => grouped.push(((level, cand), 1)),
            }
        }
        let mut denom = BigInt::one();
        let mut term = EncodingPolynomial::one(d);
        for ((level, cand), k) in grouped {
            denom *= big_factorial(k);
            let (v, w) = &candidates[level][cand];
            term = term.mul(&minor(d, v, w).pow(k));
        }
        let weight = &column_weight * &height_weight / denom;
        out = out.add(&term.scale(&weight))?;
    }
    Ok(out)
}
