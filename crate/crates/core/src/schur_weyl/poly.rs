//! Homogeneous polynomials in the `d × d` variables `x_{ab}`.
//!
//! Monomials are keyed by their exponent pattern, which is itself a count
//! matrix; coefficients are exact integers.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{arg, Result};
use crate::orbit::CountMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingPolynomial {
    d: usize,
    degree: usize,
    terms: BTreeMap<CountMatrix, BigInt>,
}

impl EncodingPolynomial {
    pub fn zero(d: usize, degree: usize) -> Self {
        EncodingPolynomial { d, degree, terms: BTreeMap::new() }
    }

    /// The constant polynomial `1` (degree zero).
    pub fn one(d: usize) -> Self {
        Self::monomial(CountMatrix::zeros(d), BigInt::one())
    }

    pub fn monomial(exponents: CountMatrix, coeff: BigInt) -> Self {
        let d = exponents.d();
        let degree = exponents.n();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponents, coeff);
        }
        EncodingPolynomial { d, degree, terms }
    }

    /// The variable `x_{ab}`.
    pub fn variable(d: usize, a: usize, b: usize) -> Self {
        Self::monomial(CountMatrix::elementary(d, a, b, 1), BigInt::one())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CountMatrix, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of `x^E`.
    pub fn coefficient(&self, e: &CountMatrix) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, e: CountMatrix, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.d != other.d || (self.degree != other.degree && !self.is_zero() && !other.is_zero()) {
            return arg("adding polynomials of different shape");
        }
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        if !self.is_zero() {
            for (e, c) in &other.terms {
                out.add_term(e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        let mut out = Self::zero(self.d, self.degree);
        if !s.is_zero() {
            out.terms = self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.d, self.degree + other.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = ea.clone();
                for (x, y) in e.entries_mut().iter_mut().zip(eb.entries()) {
                    *x += y;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one(self.d);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact division of every coefficient; fails if any remainder is nonzero.
    pub fn div_exact(&self, s: &BigInt) -> Result<Self> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            if !(&*c % s).is_zero() {
                return arg(format!("coefficient {c} is not divisible by {s}"));
            }
            *c /= s;
        }
        Ok(out)
    }

    /// Value at the identity grid: sum of coefficients over diagonal patterns.
    pub fn eval_identity(&self) -> BigInt {
        self.terms.iter().filter(|(e, _)| e.is_diagonal()).map(|(_, c)| c.clone()).sum()
    }

    /// `d_{a→b} = Σ_c x_{c,a} ∂/∂x_{c,b}` (column shift `b → a`).
    pub fn d_op(&self, a: usize, b: usize) -> Self {
        let mut out = Self::zero(self.d, self.degree);
        for (e, coeff) in &self.terms {
            for c in 0..self.d {
                let k = e.get(c, b);
                if k == 0 {
                    continue;
                }
                let mut f = e.clone();
                f.set(c, b, k - 1);
                f.set(c, a, f.get(c, a) + 1);
                out.add_term(f, coeff * BigInt::from(k));
            }
        }
        out
    }

    /// `d*_{a→b} = Σ_c x_{a,c} ∂/∂x_{b,c}` (row shift `b → a`).
    pub fn d_star_op(&self, a: usize, b: usize) -> Self {
        let mut out = Self::zero(self.d, self.degree);
        for (e, coeff) in &self.terms {
            for c in 0..self.d {
                let k = e.get(b, c);
                if k == 0 {
                    continue;
                }
                let mut f = e.clone();
                f.set(b, c, k - 1);
                f.set(a, c, f.get(a, c) + 1);
                out.add_term(f, coeff * BigInt::from(k));
            }
        }
        out
    }

    /// Largest absolute coefficient, handy for overflow diagnostics.
    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

/// `det(x_{v_i, w_j})` for index vectors of equal length.
pub fn minor(d: usize, v: &[usize], w: &[usize]) -> EncodingPolynomial {
    let t = v.len();
    let mut out = EncodingPolynomial::zero(d, t);
    let mut perm: Vec<usize> = (0..t).collect();
    loop {
        let mut e = CountMatrix::zeros(d);
        for i in 0..t {
            e.set(v[i], w[perm[i]], e.get(v[i], w[perm[i]]) + 1);
        }
        let sign = if inversions(&perm) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        out.add_term(e, sign);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn inversions(p: &[usize]) -> usize {
    (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
