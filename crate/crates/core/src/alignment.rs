//! Behavioral similarity matrices, BAE and the alternative explainability
//! scores.
//!
//! Ground-truth similarity is the kappa consistency matrix. Model similarity
//! is the cosine between each annotator's averaged representation (feature
//! level) or averaged attention over regions (region level). BAE is one
//! minus their normalized Frobenius distance.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::consistency::{consistency_matrix, structural_distance, ConsistencyMatrix, ExcludedPair};
use crate::data::{AnnotationSet, VectorKind, VectorTable};
use crate::error::{Error, Result};
use crate::matrix::MaskedMatrix;
use crate::stats::{accuracy, cosine, pearson, Label};
use crate::sum::{sum, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    GroundTruthKappa,
    FeatureCosine,
    RegionCosine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub kind: SimilarityKind,
    pub annotators: Vec<String>,
    pub matrix: MaskedMatrix,
}

impl From<ConsistencyMatrix> for SimilarityMatrix {
    fn from(m: ConsistencyMatrix) -> Self {
        SimilarityMatrix { kind: SimilarityKind::GroundTruthKappa, annotators: m.annotators, matrix: m.matrix }
    }
}

/// Ground-truth behavioral similarity: the annotation consistency matrix.
pub fn ground_truth_similarity(ann: &AnnotationSet, tau: usize) -> Result<SimilarityMatrix> {
    consistency_matrix(ann, tau).map(SimilarityMatrix::from)
}

/// Componentwise mean of one annotator's vectors.
pub fn mean_representation(table: &VectorTable, annotator: &str) -> Result<Vec<f64>> {
    let k = table.annotator_index(annotator).ok_or_else(|| Error::MissingAnnotator(annotator.into()))?;
    Ok(mean_of_row(table, k))
}

fn mean_of_row(table: &VectorTable, k: usize) -> Vec<f64> {
    let entries = table.entries_of(k);
    let mut acc = vec![CompensatedSum::new(); table.dimension()];
    for (_, v) in entries {
        for (a, &x) in acc.iter_mut().zip(v) {
            a.add(x);
        }
    }
    let n = entries.len() as f64;
    acc.iter().map(|a| a.value() / n).collect()
}

/// Cosine similarity between every pair of averaged representations.
pub fn model_similarity(table: &VectorTable) -> Result<SimilarityMatrix> {
    let m = table.annotators().len();
    if m < 2 {
        return Err(Error::TooFewPoints { found: m, required: 2 });
    }
    let means: Vec<Vec<f64>> = (0..m).map(|k| mean_of_row(table, k)).collect();
    for (k, v) in means.iter().enumerate() {
        if v.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroNorm { annotator: Some(table.annotators()[k].clone()) });
        }
    }
    let mut matrix = MaskedMatrix::new(m);
    for i in 0..m {
        for j in (i + 1)..m {
            let c = cosine(&means[i], &means[j]).map_err(|e| match e {
                Error::ZeroNorm { .. } => Error::ZeroNorm { annotator: Some(table.annotators()[i].clone()) },
                other => other,
            })?;
            matrix.set(i, j, c);
        }
    }
    let kind = match table.kind() {
        VectorKind::Feature => SimilarityKind::FeatureCosine,
        VectorKind::Attention => SimilarityKind::RegionCosine,
    };
    Ok(SimilarityMatrix { kind, annotators: table.annotators().to_vec(), matrix })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaeLevel {
    Feature,
    Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaeResult {
    pub score: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// `None` when the compared matrix is not explanation-derived.
    pub level: Option<BaeLevel>,
    pub pairs_used: usize,
    /// Both matrices were min-max rescaled over the joint mask first.
    pub normalized: bool,
    pub excluded_pairs: Vec<ExcludedPair>,
}

/// Behavior alignment explainability, comparing raw values.
///
/// Not clamped: strongly divergent similarity structures give negative
/// scores.
pub fn bae(s_model: &SimilarityMatrix, s_true: &SimilarityMatrix) -> Result<BaeResult> {
    bae_with(s_model, s_true, false)
}

/// [`bae`] with optional min-max rescaling of both matrices to `[0, 1]`
/// over the jointly valid pairs. A matrix with no spread maps to all ones.
pub fn bae_with(s_model: &SimilarityMatrix, s_true: &SimilarityMatrix, normalize: bool) -> Result<BaeResult> {
    if s_model.annotators != s_true.annotators {
        return Err(Error::AnnotatorMismatch);
    }
    let (model, truth) = if normalize {
        let joint = s_true.matrix.intersect_mask(&s_model.matrix)?;
        (min_max(&s_model.matrix, &joint), min_max(&s_true.matrix, &joint))
    } else {
        (s_model.matrix.clone(), s_true.matrix.clone())
    };
    let d = structural_distance(&s_true.annotators, &truth, &model)?;
    let level = match s_model.kind {
        SimilarityKind::FeatureCosine => Some(BaeLevel::Feature),
        SimilarityKind::RegionCosine => Some(BaeLevel::Region),
        SimilarityKind::GroundTruthKappa => None,
    };
    Ok(BaeResult {
        score: 1.0 - d.numerator / d.denominator,
        numerator: d.numerator,
        denominator: d.denominator,
        level,
        pairs_used: d.pairs_used,
        normalized: normalize,
        excluded_pairs: d.excluded_pairs,
    })
}

fn min_max(m: &MaskedMatrix, joint: &MaskedMatrix) -> MaskedMatrix {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, j, _) in joint.valid_pairs() {
        let v = m.value(i, j);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let mut out = MaskedMatrix::new(m.size());
    for (i, j, v) in m.valid_pairs() {
        let scaled = if hi > lo { (v - lo) / (hi - lo) } else { 1.0 };
        out.set(i, j, scaled);
    }
    out
}

/// Mean, over shared (annotator, sample) keys, of the Pearson correlation
/// between paired importance vectors.
pub fn importance_correlation(a: &VectorTable, b: &VectorTable) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch { expected: a.dimension(), found: b.dimension() });
    }
    let (ra, rb) = (a.records(), b.records());
    let mut acc = CompensatedSum::new();
    for (x, y) in ra.iter().zip(&rb) {
        if x.annotator_id != y.annotator_id || x.sample_id != y.sample_id {
            return Err(Error::KeyMismatch { annotator: x.annotator_id.clone(), sample: x.sample_id.clone() });
        }
        acc.add(pearson(&x.values, &y.values)?);
    }
    if ra.len() != rb.len() {
        let extra = if ra.len() > rb.len() { &ra[rb.len()] } else { &rb[ra.len()] };
        return Err(Error::KeyMismatch { annotator: extra.annotator_id.clone(), sample: extra.sample_id.clone() });
    }
    Ok(acc.value() / ra.len() as f64)
}

/// Off-diagonal mean of [`model_similarity`].
pub fn mean_pairwise_cosine(table: &VectorTable) -> Result<f64> {
    let s = model_similarity(table)?;
    let n = s.matrix.valid_pair_count() as f64;
    Ok(sum(s.matrix.valid_pairs().map(|(_, _, v)| v)) / n)
}

/// Accuracy before and after masking the highest-attention regions, with a
/// random-mask control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompResult {
    pub acc_original: f64,
    pub acc_masked_topk: f64,
    pub acc_masked_random: f64,
    /// `acc_original - acc_masked_topk`
    pub comp: f64,
    /// `acc_masked_random - acc_masked_topk`
    pub delta_vs_random: f64,
}

impl CompResult {
    pub fn from_accuracies(acc_original: f64, acc_masked_topk: f64, acc_masked_random: f64) -> Self {
        CompResult {
            acc_original,
            acc_masked_topk,
            acc_masked_random,
            comp: acc_original - acc_masked_topk,
            delta_vs_random: acc_masked_random - acc_masked_topk,
        }
    }
}

/// Per-annotator accuracy against `gold`, averaged uniformly over
/// annotators.
pub fn mean_annotator_accuracy(gold: &AnnotationSet, pred: &AnnotationSet) -> Result<f64> {
    gold.check_same_keys(pred)?;
    let per = per_annotator_accuracy(gold, pred)?;
    Ok(sum(per.iter().copied()) / per.len() as f64)
}

pub(crate) fn per_annotator_accuracy(gold: &AnnotationSet, pred: &AnnotationSet) -> Result<Vec<f64>> {
    let labels = |set: &AnnotationSet, k: usize| -> Vec<Label> { set.labels_of(k).iter().map(|&(_, l)| l).collect() };
    (0..gold.annotators().len()).map(|k| accuracy(&labels(pred, k), &labels(gold, k))).collect()
}

pub fn comprehensiveness(
    gold: &AnnotationSet,
    pred_orig: &AnnotationSet,
    pred_masked_topk: &AnnotationSet,
    pred_masked_random: &AnnotationSet,
) -> Result<CompResult> {
    Ok(CompResult::from_accuracies(
        mean_annotator_accuracy(gold, pred_orig)?,
        mean_annotator_accuracy(gold, pred_masked_topk)?,
        mean_annotator_accuracy(gold, pred_masked_random)?,
    ))
}
