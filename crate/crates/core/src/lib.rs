//! Metrics for judging whether multi-annotator models keep each annotator's
//! labeling tendency.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over in-memory tables; file formats, reports and rendering live
//! in the `tendeval` crate.
//!
//! - [`stats`]: Cohen's and Fleiss' kappa, Pearson, accuracy, cosine, and
//!   the masked Frobenius norm every structural score is built on.
//! - [`data`]: annotation and vector tables keyed by (annotator, sample),
//!   plus the pairwise overlap index.
//! - [`consistency`]: kappa consistency matrices and the DIC score.
//! - [`alignment`]: behavioral similarity matrices, BAE, and the
//!   alternative explainability scores (cosine, importance correlation,
//!   comprehensiveness).
//! - [`mds`], [`eigen`], [`procrustes`]: 2D behavioral projections.
//! - [`sim`]: seeded synthetic corpora and ablation baselines.
//! - [`traditional`]: ACC / Fleiss' kappa / PCC summary.

#![no_std]

extern crate alloc;

pub mod alignment;
pub mod consistency;
pub mod data;
pub mod eigen;
mod error;
pub mod matrix;
pub mod mds;
pub mod procrustes;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod sum;
pub mod traditional;

pub use alignment::{
    bae, comprehensiveness, ground_truth_similarity, importance_correlation, mean_pairwise_cosine, mean_representation,
    model_similarity, BaeLevel, BaeResult, CompResult, SimilarityKind, SimilarityMatrix,
};
pub use consistency::{consistency_matrix, dic, ConsistencyMatrix, DicResult, ExcludedPair};
pub use data::{overlap_index, AnnotationSet, LabelRecord, OverlapIndex, VectorKind, VectorRecord, VectorTable};
pub use error::{Error, Result};
pub use matrix::MaskedMatrix;
pub use mds::{
    agreement_clusters, classical_mds, to_dissimilarity, AgreementClusters, DissimilarityMatrix, Embedding2D,
};
pub use procrustes::{procrustes_align, ProcrustesFit};
pub use stats::{accuracy, cohen_kappa, cosine, fleiss_kappa, masked_frobenius, pearson, Label, LabelDomain};

/// Default minimum number of shared samples before a pairwise kappa counts.
pub const DEFAULT_MIN_OVERLAP: usize = 10;

/// Default kappa threshold for agreement clusters in 2D projections.
pub const DEFAULT_CLUSTER_THRESHOLD: f64 = 0.6;
