//! Scalar statistics shared by every pipeline.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::MaskedMatrix;
use crate::sum::{sum, CompensatedSum};

/// Categorical label. Small non-negative integers.
pub type Label = u32;

/// Below this distance from one, the chance-agreement term is treated as
/// exactly one (both raters constant).
const DEGENERATE_PE: f64 = 1e-12;

/// Explicit, sorted set of permitted labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Label>", into = "Vec<Label>")]
pub struct LabelDomain(Vec<Label>);

impl LabelDomain {
    /// Sorts and deduplicates `labels`.
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Result<Self> {
        let mut v: Vec<Label> = labels.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(Self(v))
    }

    /// `{0, 1, …, count-1}`.
    pub fn range(count: u32) -> Result<Self> {
        Self::new(0..count)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.0.binary_search(&label).is_ok()
    }

    /// Position of `label` in the sorted domain.
    pub fn index_of(&self, label: Label) -> Result<usize> {
        self.0.binary_search(&label).map_err(|_| Error::LabelOutOfDomain(label))
    }
}

impl TryFrom<Vec<Label>> for LabelDomain {
    type Error = Error;
    fn try_from(v: Vec<Label>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LabelDomain> for Vec<Label> {
    fn from(d: LabelDomain) -> Self {
        d.0
    }
}

/// Cohen's kappa with a flag for the degenerate case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: f64,
    /// Both raters were constant, so chance agreement was one and the value
    /// came from the fallback rule rather than the ratio.
    pub degenerate: bool,
}

/// Unweighted Cohen's kappa between two aligned label sequences.
///
/// When both sequences are constant the ratio is 0/0; the result is then
/// `1.0` if the constants agree and `0.0` otherwise.
pub fn cohen_kappa(a: &[Label], b: &[Label], domain: &LabelDomain) -> Result<f64> {
    cohen_kappa_detailed(a, b, domain).map(|k| k.value)
}

pub fn cohen_kappa_detailed(a: &[Label], b: &[Label], domain: &LabelDomain) -> Result<Kappa> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::Empty("label sequence"));
    }
    let c = domain.len();
    let mut row = vec![0u64; c];
    let mut col = vec![0u64; c];
    let mut agree = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        let (i, j) = (domain.index_of(x)?, domain.index_of(y)?);
        row[i] += 1;
        col[j] += 1;
        if i == j {
            agree += 1;
        }
    }
    let n = a.len() as u64;
    // Marginal products are exact in u64 for any realistic n.
    let chance: u64 = row.iter().zip(&col).map(|(r, c)| r * c).sum();
    let nf = n as f64;
    let p_o = agree as f64 / nf;
    let p_e = chance as f64 / (nf * nf);
    if p_e >= 1.0 - DEGENERATE_PE {
        let value = if agree == n { 1.0 } else { 0.0 };
        return Ok(Kappa { value, degenerate: true });
    }
    Ok(Kappa { value: (p_o - p_e) / (1.0 - p_e), degenerate: false })
}

/// Fleiss' kappa generalized to a varying number of raters per item.
///
/// `counts[i][j]` is the number of raters who put item `i` in category `j`.
/// Every item needs at least two raters. Returns `1.0` when every item is
/// unanimous.
pub fn fleiss_kappa(counts: &[Vec<u64>]) -> Result<f64> {
    let Some(first) = counts.first() else {
        return Err(Error::Empty("fleiss count table"));
    };
    let categories = first.len();
    if categories == 0 {
        return Err(Error::Empty("fleiss categories"));
    }
    let mut per_item = CompensatedSum::new();
    let mut category_totals = vec![0u64; categories];
    let mut total = 0u64;
    let mut unanimous = true;
    for (item, row) in counts.iter().enumerate() {
        if row.len() != categories {
            return Err(Error::RaggedCounts { item, expected: categories, found: row.len() });
        }
        let n: u64 = row.iter().sum();
        if n < 2 {
            return Err(Error::TooFewRaters { item, raters: n });
        }
        let pairs: u64 = row.iter().map(|&x| x * x.saturating_sub(1)).sum();
        let denom = n * (n - 1);
        unanimous &= pairs == denom;
        per_item.add(pairs as f64 / denom as f64);
        for (t, &x) in category_totals.iter_mut().zip(row) {
            *t += x;
        }
        total += n;
    }
    if unanimous {
        return Ok(1.0);
    }
    let p_bar = per_item.value() / counts.len() as f64;
    let p_e = sum(category_totals.iter().map(|&t| {
        let p = t as f64 / total as f64;
        p * p
    }));
    if p_e >= 1.0 - DEGENERATE_PE {
        // a single category overall implies unanimity, handled above
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::Empty("pearson needs at least two observations"));
    }
    let n = x.len() as f64;
    let mx = sum(x.iter().copied()) / n;
    let my = sum(y.iter().copied()) / n;
    let sxy = sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Fraction of positions where `pred` equals `gold`.
pub fn accuracy(pred: &[Label], gold: &[Label]) -> Result<f64> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: gold.len() });
    }
    if pred.is_empty() {
        return Err(Error::Empty("label sequence"));
    }
    let hits = pred.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(hits as f64 / pred.len() as f64)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    libm::sqrt(sum(v.iter().map(|x| x * x)))
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm { annotator: None });
    }
    let dot = sum(u.iter().zip(v).map(|(a, b)| a * b));
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Frobenius norm of `a - b` (or of `a` alone) over the off-diagonal cells
/// valid in both matrices. Both triangles are counted.
pub fn masked_frobenius(a: &MaskedMatrix, b: Option<&MaskedMatrix>) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    let mut cells = 0usize;
    match b {
        Some(b) => {
            if a.size() != b.size() {
                return Err(Error::SizeMismatch { left: a.size(), right: b.size() });
            }
            for (i, j, x) in a.valid_pairs() {
                if let Some(y) = b.get(i, j) {
                    let d = x - y;
                    acc.add(2.0 * d * d);
                    cells += 1;
                }
            }
        }
        None => {
            for (_, _, x) in a.valid_pairs() {
                acc.add(2.0 * x * x);
                cells += 1;
            }
        }
    }
    if cells == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(libm::sqrt(acc.value()))
}
