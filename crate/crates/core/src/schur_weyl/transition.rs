//! Action of the transition operators `T_{a→b} = Σ_k 1⊗…⊗|a⟩⟨b|_k⊗…⊗1`
//! on orbit matrices.

use crate::error::{arg, Result};
use crate::orbit::CountMatrix;

/// Multiplication side of the transition operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MulSide {
    /// `T_{a→b} · C_E`
    Left,
    /// `C_E · T_{a→b}`
    Right,
}

/// Expansion of the product as `(weight, orbit)` pairs.
pub fn transition_action(e: &CountMatrix, a: usize, b: usize, side: MulSide) -> Result<Vec<(u64, CountMatrix)>> {
    let d = e.d();
    if a == b || a >= d || b >= d {
        return arg(format!("transition {a}→{b} is invalid for d={d}"));
    }
    let mut out = Vec::new();
    for c in 0..d {
        match side {
            MulSide::Right => {
                let k = e.get(c, a);
                if k == 0 {
                    continue;
                }
                let mut f = e.clone();
                f.set(c, a, k - 1);
                f.set(c, b, f.get(c, b) + 1);
                out.push((e.get(c, b) as u64 + 1, f));
            }
            MulSide::Left => {
                let k = e.get(b, c);
                if k == 0 {
                    continue;
                }
                let mut f = e.clone();
                f.set(b, c, k - 1);
                f.set(a, c, f.get(a, c) + 1);
                out.push((e.get(a, c) as u64 + 1, f));
            }
        }
    }
    Ok(out)
}
