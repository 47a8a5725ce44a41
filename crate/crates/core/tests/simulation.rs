//! Generator and baseline behavior checked against the planted parameters.

use tendeval_core::alignment::mean_annotator_accuracy;
use tendeval_core::sim::{
    baseline_consensus_labels, baseline_random_labels, baseline_uniform_features, channel_factor, gen_corpus,
    perturb_labels, SynthConfig,
};
use tendeval_core::{
    bae, comprehensiveness, consistency_matrix, ground_truth_similarity, model_similarity, MaskedMatrix,
};

const SEEDS: std::ops::Range<u64> = 0..10;

fn pairs_by_cluster(cluster_of: &[usize], m: &MaskedMatrix) -> (Vec<f64>, Vec<f64>) {
    let (mut within, mut cross) = (Vec::new(), Vec::new());
    for (i, j, v) in m.valid_pairs() {
        if cluster_of[i] == cluster_of[j] {
            within.push(v);
        } else {
            cross.push(v);
        }
    }
    (within, cross)
}

#[test]
fn independent_clusters_have_near_zero_cross_kappa() {
    for seed in SEEDS {
        let cfg = SynthConfig {
            annotators: 4,
            clusters: 2,
            labels: 2,
            annotator_noise: 0.0,
            shared_truth: 0.0,
            coverage: 1.0,
            seed,
            ..SynthConfig::default()
        };
        let corpus = gen_corpus(&cfg).unwrap();
        let m = consistency_matrix(&corpus.annotations, 10).unwrap();
        let (within, cross) = pairs_by_cluster(&corpus.truth.cluster_of, &m.matrix);
        assert!(within.iter().all(|&v| v == 1.0));
        assert!(cross.iter().all(|v| v.abs() < 0.15), "seed {seed}: {cross:?}");
    }
}

/// Large-sample standard error of kappa.
fn kappa_sigma(kappa: f64, chance: f64, n: f64) -> f64 {
    let p_o = chance + kappa * (1.0 - chance);
    (p_o * (1.0 - p_o) / n).sqrt() / (1.0 - chance)
}

#[test]
fn empirical_kappa_matches_closed_form() {
    for seed in 0..3 {
        let cfg = SynthConfig { samples: 1000, coverage: 1.0, seed, ..SynthConfig::default() };
        let corpus = gen_corpus(&cfg).unwrap();
        let alpha = channel_factor(cfg.annotator_noise, cfg.labels);
        assert!((corpus.truth.expected_within_kappa - alpha * alpha).abs() < 1e-15);
        let m = consistency_matrix(&corpus.annotations, 10).unwrap();
        let (within, cross) = pairs_by_cluster(&corpus.truth.cluster_of, &m.matrix);
        let chance = 1.0 / f64::from(cfg.labels);
        for (values, expected) in
            [(within, corpus.truth.expected_within_kappa), (cross, corpus.truth.expected_cross_kappa)]
        {
            let sigma = kappa_sigma(expected, chance, 1000.0);
            for v in values {
                assert!((v - expected).abs() < 3.0 * sigma, "seed {seed}: {v} vs {expected} ± 3·{sigma}");
            }
        }
    }
}

#[test]
fn same_seed_same_corpus() {
    let a = gen_corpus(&SynthConfig::default()).unwrap();
    let b = gen_corpus(&SynthConfig::default()).unwrap();
    assert_eq!(a, b);
    let c = gen_corpus(&SynthConfig { seed: 8, ..SynthConfig::default() }).unwrap();
    assert_ne!(a.annotations, c.annotations);
}

#[test]
fn clustered_truth_separates_clusters() {
    for seed in SEEDS {
        let cfg = SynthConfig { shared_truth: 0.0, seed, ..SynthConfig::default() };
        let corpus = gen_corpus(&cfg).unwrap();
        let s = ground_truth_similarity(&corpus.annotations, 10).unwrap();
        let (within, cross) = pairs_by_cluster(&corpus.truth.cluster_of, &s.matrix);
        let lo = within.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cross.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo > hi, "seed {seed}: within min {lo} <= cross max {hi}");
    }
}

#[test]
fn clustered_features_separate_clusters() {
    for seed in SEEDS {
        let cfg = SynthConfig { shared_truth: 0.5, seed, ..SynthConfig::default() };
        let corpus = gen_corpus(&cfg).unwrap();
        let s = model_similarity(&corpus.features).unwrap();
        let (within, cross) = pairs_by_cluster(&corpus.truth.cluster_of, &s.matrix);
        let lo = within.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cross.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo > hi, "seed {seed}: within min {lo} <= cross max {hi}");

        let r = model_similarity(&corpus.attentions).unwrap();
        let (within, cross) = pairs_by_cluster(&corpus.truth.cluster_of, &r.matrix);
        let lo = within.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cross.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo > hi, "seed {seed}: region within min {lo} <= cross max {hi}");
    }
}

#[test]
fn random_labels_keep_keys_and_are_uniform() {
    let cfg = SynthConfig { annotators: 20, samples: 500, coverage: 1.0, ..SynthConfig::default() };
    let ann = gen_corpus(&cfg).unwrap().annotations;
    assert_eq!(ann.len(), 10_000);
    let random = baseline_random_labels(&ann, 3);
    ann.check_same_keys(&random).unwrap();
    let mut counts = [0usize; 5];
    for r in random.records() {
        counts[r.label as usize] += 1;
    }
    let (n, p) = (10_000.0, 0.2);
    let sigma = (n * p * (1.0f64 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - n * p).abs() < 3.0 * sigma, "{counts:?}");
    }
    assert_eq!(random, baseline_random_labels(&ann, 3));
}

#[test]
fn consensus_gives_all_ones_consistency() {
    let corpus = gen_corpus(&SynthConfig::default()).unwrap();
    let cons = baseline_consensus_labels(&corpus.annotations);
    let m = consistency_matrix(&cons, 10).unwrap();
    assert_eq!(m.matrix.valid_pair_count(), 66);
    assert!(m.matrix.valid_pairs().all(|(_, _, v)| v == 1.0));
}

#[test]
fn uniform_feature_bae_matches_oracle() {
    let corpus = gen_corpus(&SynthConfig::default()).unwrap();
    let truth = ground_truth_similarity(&corpus.annotations, 10).unwrap();
    let uniform = baseline_uniform_features(corpus.annotations.annotators(), 512).unwrap();
    let got = bae(&model_similarity(&uniform).unwrap(), &truth).unwrap().score;

    let (mut diff, mut base) = (0.0, 0.0);
    for (_, _, v) in truth.matrix.valid_pairs() {
        diff += 2.0 * (1.0 - v) * (1.0 - v);
        base += 2.0 * v * v;
    }
    let oracle = 1.0 - (diff / base).sqrt();
    assert!((got - oracle).abs() < 1e-12);
}

#[test]
fn comprehensiveness_tracks_switch_rate() {
    for seed in SEEDS {
        let cfg = SynthConfig { seed, ..SynthConfig::default() };
        let corpus = gen_corpus(&cfg).unwrap();
        let gold = &corpus.annotations;
        let orig = &corpus.predictions;
        let topk = perturb_labels(orig, 0.2, seed + 100).unwrap();
        let random = perturb_labels(orig, 0.05, seed + 200).unwrap();
        let r = comprehensiveness(gold, orig, &topk, &random).unwrap();

        // a correct label survives with 1 − q; a wrong one becomes right
        // with q/(C − 1)
        let expected_after = |acc: f64, q: f64| acc * (1.0 - q) + (1.0 - acc) * q / 4.0;
        let acc = mean_annotator_accuracy(gold, orig).unwrap();
        assert_eq!(acc, r.acc_original);
        let comp_oracle = acc - expected_after(acc, 0.2);
        let delta_oracle = expected_after(acc, 0.05) - expected_after(acc, 0.2);
        assert!((r.comp - comp_oracle).abs() < 0.02, "seed {seed}: {} vs {comp_oracle}", r.comp);
        assert!((r.delta_vs_random - delta_oracle).abs() < 0.02);
    }
}
