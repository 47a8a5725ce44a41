use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric M×M matrix with a per-cell validity mask.
///
/// The diagonal is never valid: self-agreement carries no information and is
/// excluded from every norm. Invalid cells hold `0.0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRows", into = "MatrixRows")]
pub struct MaskedMatrix {
    size: usize,
    entries: Vec<f64>,
    valid: Vec<bool>,
}

/// Serialized form: row-major nested arrays.
#[derive(Serialize, Deserialize)]
struct MatrixRows {
    values: Vec<Vec<f64>>,
    valid: Vec<Vec<bool>>,
}

impl MaskedMatrix {
    /// An all-invalid matrix.
    pub fn new(size: usize) -> Self {
        Self { size, entries: vec![0.0; size * size], valid: vec![false; size * size] }
    }

    /// Builds a matrix where every off-diagonal entry is valid.
    ///
    /// `f(i, j)` is called for `i < j` only.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::new(size);
        for i in 0..size {
            for j in (i + 1)..size {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.size + j
    }

    /// Stores `value` at (i, j) and (j, i) and marks both valid.
    ///
    /// # Panics
    ///
    /// On a diagonal cell or a non-finite value.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "diagonal cells are never valid");
        assert!(value.is_finite(), "masked matrix entries must be finite");
        let (a, b) = (self.idx(i, j), self.idx(j, i));
        self.entries[a] = value;
        self.entries[b] = value;
        self.valid[a] = true;
        self.valid[b] = true;
    }

    pub fn invalidate(&mut self, i: usize, j: usize) {
        let (a, b) = (self.idx(i, j), self.idx(j, i));
        self.entries[a] = 0.0;
        self.entries[b] = 0.0;
        self.valid[a] = false;
        self.valid[b] = false;
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[self.idx(i, j)]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.idx(i, j);
        self.valid[k].then(|| self.entries[k])
    }

    /// Raw entry, `0.0` for invalid cells.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.entries[self.idx(i, j)]
    }

    /// Valid upper-triangle cells in row-major order.
    pub fn valid_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size).flat_map(move |i| ((i + 1)..self.size).filter_map(move |j| self.get(i, j).map(|v| (i, j, v))))
    }

    pub fn valid_pair_count(&self) -> usize {
        self.valid_pairs().count()
    }

    /// Keeps only cells valid in both `self` and `other`.
    pub fn intersect_mask(&self, other: &MaskedMatrix) -> Result<MaskedMatrix> {
        if self.size != other.size {
            return Err(Error::SizeMismatch { left: self.size, right: other.size });
        }
        let mut out = self.clone();
        for i in 0..self.size {
            for j in (i + 1)..self.size {
                if !other.is_valid(i, j) {
                    out.invalidate(i, j);
                }
            }
        }
        Ok(out)
    }

    /// Same matrix with rows and columns reordered: entry (i, j) of the
    /// result is entry (perm[i], perm[j]) of `self`.
    pub fn permuted(&self, perm: &[usize]) -> MaskedMatrix {
        assert_eq!(perm.len(), self.size);
        let mut out = MaskedMatrix::new(self.size);
        for i in 0..self.size {
            for j in (i + 1)..self.size {
                if let Some(v) = self.get(perm[i], perm[j]) {
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl From<MaskedMatrix> for MatrixRows {
    fn from(m: MaskedMatrix) -> Self {
        let n = m.size;
        MatrixRows {
            values: m.entries.chunks(n.max(1)).take(n).map(<[f64]>::to_vec).collect(),
            valid: m.valid.chunks(n.max(1)).take(n).map(<[bool]>::to_vec).collect(),
        }
    }
}

impl TryFrom<MatrixRows> for MaskedMatrix {
    type Error = Error;

    fn try_from(rows: MatrixRows) -> Result<Self> {
        let n = rows.values.len();
        if rows.valid.len() != n {
            return Err(Error::SizeMismatch { left: n, right: rows.valid.len() });
        }
        let mut m = MaskedMatrix::new(n);
        for i in 0..n {
            if rows.values[i].len() != n || rows.valid[i].len() != n {
                return Err(Error::SizeMismatch { left: n, right: rows.values[i].len().min(rows.valid[i].len()) });
            }
        }
        for i in 0..n {
            if rows.valid[i][i] {
                return Err(Error::InvalidConfig("diagonal cell marked valid".into()));
            }
            for j in (i + 1)..n {
                let (vij, vji) = (rows.valid[i][j], rows.valid[j][i]);
                let (xij, xji) = (rows.values[i][j], rows.values[j][i]);
                if vij != vji || (vij && xij != xji) {
                    return Err(Error::InvalidConfig("matrix is not symmetric".into()));
                }
                if vij {
                    if !xij.is_finite() {
                        return Err(Error::InvalidConfig("non-finite matrix entry".into()));
                    }
                    m.set(i, j, xij);
                }
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_is_symmetric_and_diagonal_invalid() {
        let mut m = MaskedMatrix::new(3);
        m.set(0, 2, 0.5);
        assert_eq!(m.get(2, 0), Some(0.5));
        assert_eq!(m.get(0, 1), None);
        assert!(!m.is_valid(1, 1));
        assert_eq!(m.valid_pair_count(), 1);
        m.invalidate(2, 0);
        assert_eq!(m.valid_pair_count(), 0);
    }

    #[test]
    #[should_panic]
    fn diagonal_set_panics() {
        MaskedMatrix::new(2).set(1, 1, 1.0);
    }

    #[test]
    fn permutation_moves_entries() {
        let m = MaskedMatrix::from_fn(3, |i, j| (i * 10 + j) as f64);
        let p = m.permuted(&[2, 0, 1]);
        assert_eq!(p.get(0, 1), m.get(2, 0));
        assert_eq!(p.get(1, 2), m.get(0, 1));
    }
}
