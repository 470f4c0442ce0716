//! Exact integer combinatorics: binomials, multinomials and factorials.
//!
//! Values are kept in `u128` while they fit and promoted to [`BigUint`]
//! on overflow, so callers never see a wrapped result.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// A nonnegative integer stored inline when small and on the heap when not.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exact {
    Small(u128),
    Big(BigUint),
}

impl Exact {
    pub fn zero() -> Self {
        Exact::Small(0)
    }

    pub fn one() -> Self {
        Exact::Small(1)
    }

    fn normalize(big: BigUint) -> Self {
        match big.to_u128() {
            Some(v) => Exact::Small(v),
            None => Exact::Big(big),
        }
    }

    pub fn to_big(&self) -> BigUint {
        match self {
            Exact::Small(v) => BigUint::from(*v),
            Exact::Big(b) => b.clone(),
        }
    }

    pub fn as_u128(&self) -> Option<u128> {
        match self {
            Exact::Small(v) => Some(*v),
            Exact::Big(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exact::Small(v) => *v as f64,
            Exact::Big(b) => b.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Exact::Small(0))
    }

    pub fn mul(&self, other: &Exact) -> Exact {
        if let (Exact::Small(a), Exact::Small(b)) = (self, other) {
            if let Some(p) = a.checked_mul(*b) {
                return Exact::Small(p);
            }
        }
        Exact::normalize(self.to_big() * other.to_big())
    }

    pub fn add(&self, other: &Exact) -> Exact {
        if let (Exact::Small(a), Exact::Small(b)) = (self, other) {
            if let Some(s) = a.checked_add(*b) {
                return Exact::Small(s);
            }
        }
        Exact::normalize(self.to_big() + other.to_big())
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Exact) -> Option<Exact> {
        if other.is_zero() {
            return None;
        }
        let (a, b) = (self.to_big(), other.to_big());
        if (&a % &b).is_zero() {
            Some(Exact::normalize(a / b))
        } else {
            None
        }
    }
}

impl From<u128> for Exact {
    fn from(v: u128) -> Self {
        Exact::Small(v)
    }
}

impl From<u64> for Exact {
    fn from(v: u64) -> Self {
        Exact::Small(v as u128)
    }
}

impl From<BigUint> for Exact {
    fn from(v: BigUint) -> Self {
        Exact::normalize(v)
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Exact::Small(a), Exact::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exact::Small(v) => write!(f, "{v}"),
            Exact::Big(b) => write!(f, "{b}"),
        }
    }
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Exact {
    if k > n {
        return Exact::zero();
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        match acc.checked_mul((n - i) as u128) {
            Some(p) => acc = p / (i as u128 + 1),
            None => return binomial_big(n, k),
        }
    }
    Exact::Small(acc)
}

fn binomial_big(n: u64, k: u64) -> Exact {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    Exact::normalize(acc)
}

/// `n!`.
pub fn factorial(n: u64) -> Exact {
    let mut acc: u128 = 1;
    for i in 2..=n {
        match acc.checked_mul(i as u128) {
            Some(p) => acc = p,
            None => {
                let mut big = BigUint::from(acc);
                for j in i..=n {
                    big *= BigUint::from(j);
                }
                return Exact::normalize(big);
            }
        }
    }
    Exact::Small(acc)
}

/// Multinomial `(Σ parts)! / ∏ parts!`, built as a product of binomials.
pub fn multinomial<I>(parts: I) -> Exact
where
    I: IntoIterator,
    I::Item: Into<u64>,
{
    let mut total: u64 = 0;
    let mut acc = Exact::one();
    for p in parts {
        let p = p.into();
        if p == 0 {
            continue;
        }
        total += p;
        acc = acc.mul(&binomial(total, p));
    }
    acc
}

/// Floating-point `ln n!`, used only for size estimates.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}
