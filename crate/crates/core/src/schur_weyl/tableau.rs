//! Semistandard Young tableaux.

use crate::error::{arg, Result};
use crate::orbit::CountMatrix;

use super::partition::Partition;

/// A filling of a Young diagram with 0-based symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tableau {
    shape: Partition,
    rows: Vec<Vec<u8>>,
}

impl Tableau {
    /// Build from rows; the filling must be semistandard.
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let shape = Partition::new(rows.iter().map(Vec::len).collect())?;
        let t = Tableau { shape, rows };
        if !t.is_semistandard() {
            return arg(format!("{:?} is not semistandard", t.rows));
        }
        Ok(t)
    }

    /// Row `i` filled with symbol `i`: the unique tableau of weight `λ`.
    pub fn constant(shape: &Partition) -> Self {
        let rows = shape.parts().iter().enumerate().map(|(i, &p)| vec![i as u8; p]).collect();
        Tableau { shape: shape.clone(), rows }
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn is_semistandard(&self) -> bool {
        let rows_ok = self.rows.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1]));
        let cols_ok = self.rows.windows(2).all(|w| w[1].iter().zip(&w[0]).all(|(below, above)| below > above));
        rows_ok && cols_ok
    }

    /// Largest symbol plus one (zero for the empty tableau).
    pub fn max_symbol(&self) -> usize {
        self.rows.iter().flatten().map(|&s| s as usize + 1).max().unwrap_or(0)
    }

    /// Number of boxes holding each symbol.
    pub fn weight(&self, d: usize) -> Vec<u32> {
        let mut w = vec![0; d];
        for &s in self.rows.iter().flatten() {
            w[s as usize] += 1;
        }
        w
    }

    /// `(a, b)` entry counts the boxes of row `b` holding symbol `a`.
    pub fn row_content(&self, d: usize) -> CountMatrix {
        let mut e = CountMatrix::zeros(d);
        for (b, row) in self.rows.iter().enumerate() {
            for &a in row {
                e.set(a as usize, b, e.get(a as usize, b) + 1);
            }
        }
        e
    }
}

/// All semistandard tableaux of shape `λ` with entries in `0..d`, ordered
/// lexicographically by their row-reading word.
pub fn ssyt_enumerate(shape: &Partition, d: usize) -> Vec<Tableau> {
    if shape.height() > d {
        return Vec::new();
    }
    let boxes: Vec<(usize, usize)> = shape.parts().iter().enumerate().flat_map(|(i, &p)| (0..p).map(move |j| (i, j))).collect();
    let mut rows: Vec<Vec<u8>> = shape.parts().iter().map(|&p| vec![0; p]).collect();
    let mut out = Vec::new();
    fill(shape, d, &boxes, 0, &mut rows, &mut out);
    out
}

fn fill(shape: &Partition, d: usize, boxes: &[(usize, usize)], k: usize, rows: &mut Vec<Vec<u8>>, out: &mut Vec<Tableau>) {
    if k == boxes.len() {
        out.push(Tableau { shape: shape.clone(), rows: rows.clone() });
        return;
    }
    let (i, j) = boxes[k];
    let mut lo = 0u8;
    if j > 0 {
        lo = lo.max(rows[i][j - 1]);
    }
    if i > 0 {
        lo = lo.max(rows[i - 1][j] + 1);
    }
    // Leave room for the strictly increasing column below this box.
    let below = shape.parts()[i + 1..].iter().filter(|&&p| p > j).count();
    let hi = d.saturating_sub(below + 1);
    for v in lo as usize..=hi {
        rows[i][j] = v as u8;
        fill(shape, d, boxes, k + 1, rows, out);
    }
}
