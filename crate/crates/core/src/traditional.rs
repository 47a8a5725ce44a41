//! ACC, Fleiss' kappa and PCC: the per-annotator and consensus-style scores
//! that structural metrics are compared against.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::alignment::per_annotator_accuracy;
use crate::data::AnnotationSet;
use crate::error::{Error, Result};
use crate::stats::{fleiss_kappa, pearson};
use crate::sum::sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorScores {
    pub annotator: String,
    pub accuracy: f64,
    /// `None` when either label sequence is constant.
    pub pearson: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraditionalMetrics {
    /// Mean per-annotator accuracy.
    pub accuracy: f64,
    /// Fleiss' kappa of the predictions, over samples with at least two
    /// predicted labels.
    pub fleiss_kappa: f64,
    pub fleiss_items: usize,
    /// Mean per-annotator Pearson correlation between predicted and true
    /// labels read as ordinal reals; `None` if undefined for everyone.
    pub pearson: Option<f64>,
    pub pearson_skipped: Vec<String>,
    pub per_annotator: Vec<AnnotatorScores>,
}

pub fn traditional(annotations: &AnnotationSet, predictions: &AnnotationSet) -> Result<TraditionalMetrics> {
    annotations.check_same_keys(predictions)?;
    let accuracies = per_annotator_accuracy(annotations, predictions)?;

    let mut per_annotator = Vec::with_capacity(accuracies.len());
    let mut pearson_skipped = Vec::new();
    for (k, &acc) in accuracies.iter().enumerate() {
        let truth: Vec<f64> = annotations.labels_of(k).iter().map(|&(_, l)| f64::from(l)).collect();
        let pred: Vec<f64> = predictions.labels_of(k).iter().map(|&(_, l)| f64::from(l)).collect();
        let r = match pearson(&pred, &truth) {
            Ok(r) => Some(r),
            Err(Error::ZeroVariance) | Err(Error::Empty(_)) => {
                pearson_skipped.push(annotations.annotators()[k].clone());
                None
            }
            Err(e) => return Err(e),
        };
        per_annotator.push(AnnotatorScores {
            annotator: annotations.annotators()[k].clone(),
            accuracy: acc,
            pearson: r,
        });
    }
    let defined: Vec<f64> = per_annotator.iter().filter_map(|a| a.pearson).collect();
    let pearson_mean = (!defined.is_empty()).then(|| sum(defined.iter().copied()) / defined.len() as f64);

    let domain = predictions.domain();
    let table: Vec<Vec<u64>> = predictions
        .by_sample()
        .into_iter()
        .filter(|votes| votes.len() >= 2)
        .map(|votes| {
            let mut row = vec![0u64; domain.len()];
            for (_, l) in votes {
                row[domain.index_of(l).expect("label in domain")] += 1;
            }
            row
        })
        .collect();
    if table.is_empty() {
        return Err(Error::TooFewRaters { item: 0, raters: 1 });
    }

    Ok(TraditionalMetrics {
        accuracy: sum(accuracies.iter().copied()) / accuracies.len() as f64,
        fleiss_kappa: fleiss_kappa(&table)?,
        fleiss_items: table.len(),
        pearson: pearson_mean,
        pearson_skipped,
        per_annotator,
    })
}
