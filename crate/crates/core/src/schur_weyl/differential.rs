//! Encoding polynomials by differential operators acting on the
//! constant-tableau polynomial.
//!
//! For the constant tableau the polynomial is a product of leading
//! principal minors, `P_λ = ∏_k Q_k^{λ_k − λ_{k+1}}` with
//! `Q_k = k!·det(x_{ab})_{a,b<k}`. Any other pair of tableaux is reached by
//! applying row-shift operators for `τ` and column-shift operators for `γ`,
//! one per box that sits below its constant-tableau symbol.

use num_bigint::BigInt;

use crate::combinatorics::factorial;
use crate::error::{arg, Result};
use crate::orbit::CountMatrix;

use super::partition::Partition;
use super::poly::{minor, EncodingPolynomial};
use super::tableau::Tableau;

fn big_factorial(n: usize) -> BigInt {
    BigInt::from(factorial(n as u64).to_big())
}

/// `Q_k = k!·det(x_{ab})_{a,b<k}`.
pub fn leading_minor(d: usize, k: usize) -> EncodingPolynomial {
    let idx: Vec<usize> = (0..k).collect();
    minor(d, &idx, &idx).scale(&big_factorial(k))
}

/// `P_λ`, the polynomial of the constant tableau pair.
pub fn constant_polynomial(lambda: &Partition, d: usize) -> EncodingPolynomial {
    let mut p = EncodingPolynomial::one(d);
    for k in 1..=lambda.height() {
        let e = lambda.part(k - 1) - lambda.part(k);
        if e > 0 {
            p = p.mul(&leading_minor(d, k).pow(e));
        }
    }
    p
}

/// Operator order: larger target row first, then larger source symbol.
fn shift_sequence(content: &CountMatrix, d: usize) -> Vec<(usize, usize, u32)> {
    let mut seq = Vec::new();
    for b in (0..d).rev() {
        for a in (b + 1..d).rev() {
            let k = content.get(a, b);
            if k > 0 {
                seq.push((a, b, k));
            }
        }
    }
    seq
}

fn shift_factorials(content: &CountMatrix, d: usize) -> BigInt {
    shift_sequence(content, d).iter().map(|&(_, _, k)| big_factorial(k as usize)).product()
}

/// Apply the row shifts of `τ` to `P_λ`, including their factorial
/// normalisation. The result is shared by every `γ` of the same shape.
pub fn row_shifted(p_lambda: &EncodingPolynomial, tau: &Tableau, d: usize) -> Result<EncodingPolynomial> {
    let content = tau.row_content(d);
    let mut p = p_lambda.clone();
    for (a, b, k) in shift_sequence(&content, d) {
        for _ in 0..k {
            p = p.d_star_op(a, b);
        }
    }
    p.div_exact(&shift_factorials(&content, d))
}

/// Apply the column shifts of `γ` to a row-shifted polynomial.
pub fn column_shifted(row_shifted: &EncodingPolynomial, gamma: &Tableau, d: usize) -> Result<EncodingPolynomial> {
    let content = gamma.row_content(d);
    let mut p = row_shifted.clone();
    for (a, b, k) in shift_sequence(&content, d) {
        for _ in 0..k {
            p = p.d_op(a, b);
        }
    }
    p.div_exact(&shift_factorials(&content, d))
}

/// `f_{τ,γ}` by differential operators.
pub fn encoding_poly_m2(tau: &Tableau, gamma: &Tableau, d: usize) -> Result<EncodingPolynomial> {
    if tau.shape() != gamma.shape() {
        return arg("tableaux have different shapes");
    }
    if tau.max_symbol() > d || gamma.max_symbol() > d {
        return arg(format!("tableau symbols exceed 0..{d}"));
    }
    let p = constant_polynomial(tau.shape(), d);
    column_shifted(&row_shifted(&p, tau, d)?, gamma, d)
}
