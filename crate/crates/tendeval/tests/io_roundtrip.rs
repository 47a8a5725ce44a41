//! load → save → load is the identity for every artifact kind.

use proptest::prelude::*;
use tendeval::io;
use tendeval_core::sim::{gen_corpus, SynthConfig};
use tendeval_core::{AnnotationSet, LabelDomain, LabelRecord, VectorRecord, VectorTable};

fn label_records() -> impl Strategy<Value = Vec<LabelRecord>> {
    prop::collection::btree_map((0u8..6, 0u8..20), 0u32..4, 1..60).prop_map(|m| {
        m.into_iter()
            .map(|((a, s), label)| LabelRecord { sample_id: format!("s{s}"), annotator_id: format!("a{a}"), label })
            .collect()
    })
}

fn vector_records(positive: bool) -> impl Strategy<Value = Vec<VectorRecord>> {
    let value = if positive { (0.01f64..10.0).boxed() } else { (-1e6f64..1e6).boxed() };
    prop::collection::btree_map((0u8..4, 0u8..6), prop::collection::vec(value, 3), 1..20).prop_map(|m| {
        m.into_iter()
            .map(|((a, s), values)| VectorRecord { sample_id: format!("s{s}"), annotator_id: format!("a{a}"), values })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_round_trip(records in label_records()) {
        let dir = tempfile::tempdir().unwrap();
        let ann = AnnotationSet::from_records(records, LabelDomain::range(4).unwrap()).unwrap();
        let p = dir.path().join("a.jsonl");
        io::save_annotations(&p, &ann).unwrap();
        let back = io::load_annotations(&p, Some(&LabelDomain::range(4).unwrap())).unwrap();
        prop_assert_eq!(&back, &ann);
        let q = dir.path().join("b.jsonl");
        io::save_annotations(&q, &back).unwrap();
        prop_assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());
    }

    #[test]
    fn features_round_trip(records in vector_records(false)) {
        let dir = tempfile::tempdir().unwrap();
        let table = VectorTable::features(records).unwrap();
        let p = dir.path().join("f.jsonl");
        io::save_vectors(&p, &table).unwrap();
        prop_assert_eq!(io::load_features(&p).unwrap(), table);
    }

    #[test]
    fn attentions_round_trip(records in vector_records(true)) {
        let dir = tempfile::tempdir().unwrap();
        let table = VectorTable::attentions(records).unwrap();
        let p = dir.path().join("t.jsonl");
        io::save_vectors(&p, &table).unwrap();
        let back = io::load_attentions(&p).unwrap();
        // renormalizing an already unit-sum vector may move the last bit
        for (x, y) in back.records().iter().zip(table.records()) {
            prop_assert_eq!(&x.sample_id, &y.sample_id);
            for (u, v) in x.values.iter().zip(&y.values) {
                prop_assert!((u - v).abs() <= 4.0 * f64::EPSILON);
            }
        }
        let q = dir.path().join("u.jsonl");
        io::save_vectors(&q, &back).unwrap();
        prop_assert_eq!(io::load_attentions(&q).unwrap().records().len(), table.len());
    }
}

#[test]
fn corpus_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus(&SynthConfig { annotators: 5, samples: 60, ..SynthConfig::default() }).unwrap();
    let domain = corpus.annotations.domain().clone();
    let p = dir.path().join("a.jsonl");
    io::save_annotations(&p, &corpus.annotations).unwrap();
    assert_eq!(io::load_annotations(&p, Some(&domain)).unwrap(), corpus.annotations);
    io::save_annotations(&p, &corpus.predictions).unwrap();
    assert_eq!(io::load_annotations(&p, Some(&domain)).unwrap(), corpus.predictions);
    io::save_vectors(&p, &corpus.features).unwrap();
    assert_eq!(io::load_features(&p).unwrap(), corpus.features);
}

#[test]
fn line_order_does_not_change_indices() {
    let dir = tempfile::tempdir().unwrap();
    let lines = [
        r#"{"sample_id":"s2","annotator_id":"b","label":1}"#,
        r#"{"sample_id":"s1","annotator_id":"a","label":0}"#,
        r#"{"sample_id":"s1","annotator_id":"b","label":1}"#,
        r#"{"sample_id":"s2","annotator_id":"a","label":0}"#,
    ];
    let p = dir.path().join("x.jsonl");
    let q = dir.path().join("y.jsonl");
    std::fs::write(&p, lines.join("\n")).unwrap();
    std::fs::write(&q, lines.iter().rev().cloned().collect::<Vec<_>>().join("\n")).unwrap();
    let (x, y) = (io::load_annotations(&p, None).unwrap(), io::load_annotations(&q, None).unwrap());
    assert_eq!(x, y);
    assert_eq!(x.annotators(), ["a", "b"]);
    assert_eq!(x.samples(), ["s1", "s2"]);
}
