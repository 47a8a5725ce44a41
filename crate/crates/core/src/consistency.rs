//! Inter-annotator consistency matrices and the DIC score.
//!
//! Entry (k, l) of a consistency matrix is Cohen's kappa between annotators
//! k and l on the samples they both labeled, valid only when that overlap
//! reaches the minimum threshold. DIC is the Frobenius distance between the
//! ground-truth and predicted matrices, normalized by the ground truth, over
//! off-diagonal pairs valid in both.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::{overlap_index, AnnotationSet};
use crate::error::{Error, Result};
use crate::matrix::MaskedMatrix;
use crate::stats::{cohen_kappa_detailed, masked_frobenius, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyMatrix {
    pub annotators: Vec<String>,
    pub tau: usize,
    pub matrix: MaskedMatrix,
    /// |S_kl| for every pair; the diagonal holds |S_k|.
    pub overlaps: Vec<Vec<usize>>,
    /// Pairs whose kappa came from the constant-raters fallback.
    pub degenerate_pairs: Vec<(String, String)>,
}

/// Pairwise kappa matrix over shared samples with |S_kl| ≥ `tau`.
pub fn consistency_matrix(ann: &AnnotationSet, tau: usize) -> Result<ConsistencyMatrix> {
    if tau < 2 {
        return Err(Error::InvalidThreshold(tau));
    }
    let m = ann.annotators().len();
    let index = overlap_index(ann);
    let mut matrix = MaskedMatrix::new(m);
    let mut degenerate_pairs = Vec::new();
    let mut a: Vec<Label> = Vec::new();
    let mut b: Vec<Label> = Vec::new();
    for k in 0..m {
        for l in (k + 1)..m {
            if index.count(k, l) < tau {
                continue;
            }
            a.clear();
            b.clear();
            for &s in index.shared(k, l) {
                a.push(ann.label(k, s).expect("shared sample labeled by k"));
                b.push(ann.label(l, s).expect("shared sample labeled by l"));
            }
            let kappa = cohen_kappa_detailed(&a, &b, ann.domain())?;
            if kappa.degenerate {
                degenerate_pairs.push((ann.annotators()[k].clone(), ann.annotators()[l].clone()));
            }
            matrix.set(k, l, kappa.value);
        }
    }
    if matrix.valid_pair_count() == 0 {
        return Err(Error::NoValidPair { tau });
    }
    let overlaps = (0..m).map(|k| (0..m).map(|l| index.count(k, l)).collect()).collect();
    Ok(ConsistencyMatrix { annotators: ann.annotators().to_vec(), tau, matrix, overlaps, degenerate_pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    InvalidInReference,
    InvalidInCompared,
    InvalidInBoth,
}

/// An off-diagonal pair left out of a structural comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedPair {
    pub first: String,
    pub second: String,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DicResult {
    pub score: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub pairs_used: usize,
    pub excluded_pairs: Vec<ExcludedPair>,
}

/// Normalized distance between two matrices over their joint mask.
pub(crate) struct StructuralDistance {
    pub numerator: f64,
    pub denominator: f64,
    pub pairs_used: usize,
    pub excluded_pairs: Vec<ExcludedPair>,
}

pub(crate) fn structural_distance(
    annotators: &[String],
    reference: &MaskedMatrix,
    compared: &MaskedMatrix,
) -> Result<StructuralDistance> {
    if reference.size() != compared.size() {
        return Err(Error::SizeMismatch { left: reference.size(), right: compared.size() });
    }
    let n = reference.size();
    let mut excluded_pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let reason = match (reference.is_valid(i, j), compared.is_valid(i, j)) {
                (true, true) => continue,
                (false, true) => ExclusionReason::InvalidInReference,
                (true, false) => ExclusionReason::InvalidInCompared,
                (false, false) => ExclusionReason::InvalidInBoth,
            };
            excluded_pairs.push(ExcludedPair { first: annotators[i].clone(), second: annotators[j].clone(), reason });
        }
    }
    let joint = reference.intersect_mask(compared)?;
    let pairs_used = joint.valid_pair_count();
    if pairs_used == 0 {
        return Err(Error::EmptyMask);
    }
    let numerator = masked_frobenius(&joint, Some(compared))?;
    let denominator = masked_frobenius(&joint, None)?;
    if denominator <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(StructuralDistance { numerator, denominator, pairs_used, excluded_pairs })
}

/// Difference of inter-annotator consistency. Lower is better; zero means
/// the predicted agreement structure reproduces the annotated one.
pub fn dic(m_true: &ConsistencyMatrix, m_pred: &ConsistencyMatrix) -> Result<DicResult> {
    if m_true.annotators != m_pred.annotators {
        return Err(Error::AnnotatorMismatch);
    }
    if m_true.tau != m_pred.tau {
        return Err(Error::TauMismatch { left: m_true.tau, right: m_pred.tau });
    }
    let d = structural_distance(&m_true.annotators, &m_true.matrix, &m_pred.matrix)?;
    Ok(DicResult {
        score: d.numerator / d.denominator,
        numerator: d.numerator,
        denominator: d.denominator,
        pairs_used: d.pairs_used,
        excluded_pairs: d.excluded_pairs,
    })
}
