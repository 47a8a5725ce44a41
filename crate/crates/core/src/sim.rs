//! Seeded synthetic corpora with planted tendency clusters, and the
//! ablation baselines.
//!
//! Generative story for one corpus:
//!
//! 1. Every sample gets a shared reference label, uniform over `C` labels.
//! 2. Every cluster's latent label equals the reference with probability
//!    `shared_truth`, otherwise an independent uniform draw.
//! 3. Annotators are assigned to clusters round-robin, label a random
//!    `coverage` fraction of samples, and copy their cluster's latent label,
//!    switching to a uniformly chosen different label with probability
//!    `annotator_noise`.
//! 4. Model predictions start from each annotator's own label and switch it
//!    with probability `model_noise`. The switch decisions for a given seed
//!    are nested across noise levels, so a noisier model corrupts a superset
//!    of labels.
//! 5. Feature means are laid out so their cosine matrix equals the expected
//!    kappa matrix; each record adds isotropic Gaussian noise.
//! 6. Attention over regions peaks on a cluster-specific subset of regions,
//!    with the same noise, clipped at zero and renormalized.
//!
//! Under uniform marginals the switching channel scales kappa by
//! `α² = (1 − ρC/(C−1))²`, so the expected within-cluster kappa is `α²` and
//! the expected cross-cluster kappa is `α²λ²`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::{AnnotationSet, LabelRecord, VectorRecord, VectorTable};
use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::stats::{Label, LabelDomain};

/// Norm of every annotator's noise-free mean feature vector.
pub const FEATURE_SCALE: f64 = 0.5;

/// Sample id used by the feature baselines, which carry one vector per
/// annotator.
pub const BASELINE_SAMPLE_ID: &str = "baseline";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub annotators: usize,
    pub samples: usize,
    pub clusters: usize,
    pub labels: u32,
    pub annotator_noise: f64,
    pub model_noise: f64,
    /// Probability that a cluster's latent label is the shared reference.
    pub shared_truth: f64,
    pub feature_dim: usize,
    pub feature_noise: f64,
    pub regions: usize,
    pub coverage: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    /// The standard corpus used by the ordering checks.
    fn default() -> Self {
        SynthConfig {
            annotators: 12,
            samples: 500,
            clusters: 3,
            labels: 5,
            annotator_noise: 0.15,
            model_noise: 0.1,
            shared_truth: 0.9,
            feature_dim: 64,
            feature_noise: 0.3,
            regions: 16,
            coverage: 0.8,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.annotators < 2 {
            return bad(format!("need at least 2 annotators, got {}", self.annotators));
        }
        if self.clusters == 0 || self.clusters > self.annotators {
            return bad(format!("clusters must be in 1..={}, got {}", self.annotators, self.clusters));
        }
        if self.samples == 0 {
            return bad("samples must be positive".into());
        }
        if self.labels < 2 {
            return bad(format!("need at least 2 labels, got {}", self.labels));
        }
        for (name, v) in [
            ("annotator_noise", self.annotator_noise),
            ("model_noise", self.model_noise),
            ("shared_truth", self.shared_truth),
        ] {
            if !unit(v) {
                return bad(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return bad(format!("coverage must be in (0, 1], got {}", self.coverage));
        }
        if !(self.feature_noise >= 0.0 && self.feature_noise.is_finite()) {
            return bad(format!("feature_noise must be finite and >= 0, got {}", self.feature_noise));
        }
        let needed = 1 + self.clusters + self.annotators;
        if self.feature_dim < needed {
            return bad(format!(
                "feature_dim must be at least 1 + clusters + annotators = {needed}, got {}",
                self.feature_dim
            ));
        }
        if self.regions < self.clusters {
            return bad(format!("regions must be at least clusters = {}, got {}", self.clusters, self.regions));
        }
        Ok(())
    }

    /// Labels per annotator.
    pub fn labels_per_annotator(&self) -> usize {
        (libm::round(self.coverage * self.samples as f64) as usize).clamp(1, self.samples)
    }
}

/// Kappa scale factor of the symmetric label-switching channel.
pub fn channel_factor(noise: f64, labels: u32) -> f64 {
    let c = f64::from(labels);
    1.0 - noise * c / (c - 1.0)
}

/// Expected (within-cluster, cross-cluster) kappa between two annotators.
pub fn expected_kappa(cfg: &SynthConfig) -> (f64, f64) {
    let alpha = channel_factor(cfg.annotator_noise, cfg.labels);
    let a2 = alpha * alpha;
    (a2, a2 * cfg.shared_truth * cfg.shared_truth)
}

/// Planted structure behind a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub cluster_of: Vec<usize>,
    pub reference_labels: Vec<Label>,
    pub cluster_labels: Vec<Vec<Label>>,
    pub expected_within_kappa: f64,
    pub expected_cross_kappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub annotations: AnnotationSet,
    pub predictions: AnnotationSet,
    pub features: VectorTable,
    pub attentions: VectorTable,
    pub truth: SynthTruth,
}

fn padded_ids(prefix: char, n: usize) -> Vec<String> {
    let width = format!("{}", n.saturating_sub(1)).len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

fn switch_label(label: Label, labels: u32, rng: &mut CounterRng, rate: f64) -> Label {
    let u = rng.next_f64();
    let offset = 1 + rng.below(u64::from(labels - 1)) as Label;
    if u < rate {
        (label + offset) % labels
    } else {
        label
    }
}

pub fn gen_corpus(cfg: &SynthConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let (m, n, k, c) = (cfg.annotators, cfg.samples, cfg.clusters, cfg.labels);
    let annotator_ids = padded_ids('a', m);
    let sample_ids = padded_ids('s', n);
    let domain = LabelDomain::range(c)?;

    let mut rng = CounterRng::new(cfg.seed, "reference");
    let reference_labels: Vec<Label> = (0..n).map(|_| rng.below(u64::from(c)) as Label).collect();
    let cluster_labels: Vec<Vec<Label>> = (0..k)
        .map(|cl| {
            let mut rng = CounterRng::new(cfg.seed, &format!("cluster/{cl}"));
            reference_labels
                .iter()
                .map(|&r| {
                    let u = rng.next_f64();
                    let own = rng.below(u64::from(c)) as Label;
                    if u < cfg.shared_truth {
                        r
                    } else {
                        own
                    }
                })
                .collect()
        })
        .collect();
    let cluster_of: Vec<usize> = (0..m).map(|a| a % k).collect();

    let per = cfg.labels_per_annotator();
    let mut annotations = Vec::with_capacity(m * per);
    let mut predictions = Vec::with_capacity(m * per);
    let mut features = Vec::with_capacity(m * per);
    let mut attentions = Vec::with_capacity(m * per);
    let (expected_within_kappa, expected_cross_kappa) = expected_kappa(cfg);
    let alpha = channel_factor(cfg.annotator_noise, c);
    let lambda = cfg.shared_truth;

    for a in 0..m {
        let cl = cluster_of[a];
        let mut cover_rng = CounterRng::new(cfg.seed, &format!("coverage/{a}"));
        let mut order: Vec<usize> = (0..n).collect();
        for i in 0..per {
            let j = i + cover_rng.below((n - i) as u64) as usize;
            order.swap(i, j);
        }
        let mut covered = order[..per].to_vec();
        covered.sort_unstable();

        // noise-free mean: shared axis 0, cluster axes 1..=k, own axes after
        let mut mean = vec![0.0; cfg.feature_dim];
        mean[0] = FEATURE_SCALE * alpha * lambda;
        mean[1 + cl] = FEATURE_SCALE * alpha * libm::sqrt(1.0 - lambda * lambda);
        mean[1 + k + a] = FEATURE_SCALE * libm::sqrt((1.0 - alpha * alpha).max(0.0));
        let profile: Vec<f64> = (0..cfg.regions).map(|r| if r % k == cl { 4.0 } else { 1.0 }).collect();

        let mut label_rng = CounterRng::new(cfg.seed, &format!("annotator/{a}"));
        let mut model_rng = CounterRng::new(cfg.seed, &format!("model/{a}"));
        let mut feature_rng = CounterRng::new(cfg.seed, &format!("features/{a}"));
        let mut attention_rng = CounterRng::new(cfg.seed, &format!("attentions/{a}"));
        for &s in &covered {
            let observed = switch_label(cluster_labels[cl][s], c, &mut label_rng, cfg.annotator_noise);
            let predicted = switch_label(observed, c, &mut model_rng, cfg.model_noise);
            let feature: Vec<f64> = mean.iter().map(|&mu| mu + cfg.feature_noise * feature_rng.normal()).collect();
            let mut weights: Vec<f64> =
                profile.iter().map(|&p| (p + cfg.feature_noise * attention_rng.normal()).max(0.0)).collect();
            if weights.iter().all(|&w| w == 0.0) {
                weights.iter_mut().for_each(|w| *w = 1.0);
            }
            let key =
                |label| LabelRecord { sample_id: sample_ids[s].clone(), annotator_id: annotator_ids[a].clone(), label };
            annotations.push(key(observed));
            predictions.push(key(predicted));
            features.push(VectorRecord {
                sample_id: sample_ids[s].clone(),
                annotator_id: annotator_ids[a].clone(),
                values: feature,
            });
            attentions.push(VectorRecord {
                sample_id: sample_ids[s].clone(),
                annotator_id: annotator_ids[a].clone(),
                values: weights,
            });
        }
    }

    Ok(SynthCorpus {
        annotations: AnnotationSet::from_records(annotations, domain.clone())?,
        predictions: AnnotationSet::from_records(predictions, domain)?,
        features: VectorTable::features(features)?,
        attentions: VectorTable::attentions(attentions)?,
        truth: SynthTruth { cluster_of, reference_labels, cluster_labels, expected_within_kappa, expected_cross_kappa },
    })
}

/// Switches each label to a uniformly chosen different label with
/// probability `rate`. For a fixed seed the switched sets are nested in
/// `rate`.
pub fn perturb_labels(ann: &AnnotationSet, rate: f64, seed: u64) -> Result<AnnotationSet> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidConfig(format!("switch rate must be in [0, 1], got {rate}")));
    }
    let labels = ann.domain().labels().to_vec();
    let c = labels.len() as u32;
    if c < 2 {
        return Ok(ann.clone());
    }
    let mut rng = CounterRng::new(seed, "perturb");
    Ok(ann.map_labels(|_, _, l| {
        let idx = ann.domain().index_of(l).expect("label in domain") as Label;
        labels[switch_label(idx, c, &mut rng, rate) as usize]
    }))
}

/// Labels drawn uniformly from the domain, same keys as `ann`.
pub fn baseline_random_labels(ann: &AnnotationSet, seed: u64) -> AnnotationSet {
    let labels = ann.domain().labels().to_vec();
    let mut rng = CounterRng::new(seed, "baseline/random-labels");
    ann.map_labels(|_, _, _| labels[rng.below(labels.len() as u64) as usize])
}

/// Every annotator of a sample receives that sample's majority label; ties
/// go to the smallest label.
pub fn baseline_consensus_labels(ann: &AnnotationSet) -> AnnotationSet {
    let c = ann.domain().len();
    let majority: Vec<Label> = ann
        .by_sample()
        .iter()
        .map(|votes| {
            let mut counts = vec![0usize; c];
            for &(_, l) in votes {
                counts[ann.domain().index_of(l).expect("label in domain")] += 1;
            }
            // max_by_key keeps the last maximum, so scan in reverse
            let best = (0..c).rev().max_by_key(|&i| counts[i]).unwrap_or(0);
            ann.domain().labels()[best]
        })
        .collect();
    ann.map_labels(|_, s, _| majority[s])
}

fn one_per_annotator(annotators: &[String], mut vector: impl FnMut() -> Vec<f64>) -> Result<VectorTable> {
    VectorTable::features(annotators.iter().map(|a| VectorRecord {
        sample_id: BASELINE_SAMPLE_ID.into(),
        annotator_id: a.clone(),
        values: vector(),
    }))
}

/// One identical unit vector for every annotator.
pub fn baseline_uniform_features(annotators: &[String], dimension: usize) -> Result<VectorTable> {
    if dimension == 0 {
        return Err(Error::InvalidConfig("feature dimension must be positive".into()));
    }
    let x = 1.0 / libm::sqrt(dimension as f64);
    one_per_annotator(annotators, || vec![x; dimension])
}

/// One i.i.d. standard normal vector per annotator.
pub fn baseline_random_features(annotators: &[String], dimension: usize, seed: u64) -> Result<VectorTable> {
    if dimension == 0 {
        return Err(Error::InvalidConfig("feature dimension must be positive".into()));
    }
    let mut rng = CounterRng::new(seed, "baseline/random-features");
    one_per_annotator(annotators, || (0..dimension).map(|_| rng.normal()).collect())
}
