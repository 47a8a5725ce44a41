//! Standard-corpus figures compared byte-for-byte with checked-in renders.
//! Set `UPDATE_GOLDEN=1` to rewrite them after an intended change.

use std::path::PathBuf;

use tendeval::svg::{heatmap_svg, scatter_svg};
use tendeval_core::sim::{gen_corpus, SynthConfig};
use tendeval_core::{
    agreement_clusters, classical_mds, consistency_matrix, model_similarity, to_dissimilarity, SimilarityMatrix,
};

fn golden(name: &str, rendered: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, rendered).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == rendered, "{name} differs from the golden render");
}

#[test]
fn standard_corpus_heatmap() {
    let corpus = gen_corpus(&SynthConfig::default()).unwrap();
    let m = consistency_matrix(&corpus.annotations, 10).unwrap();
    let first = heatmap_svg(&m.matrix, &m.annotators, "Annotation consistency (kappa)").unwrap();
    assert_eq!(first, heatmap_svg(&m.matrix, &m.annotators, "Annotation consistency (kappa)").unwrap());
    golden("heatmap_standard.svg", &first);
}

#[test]
fn standard_corpus_scatter() {
    let corpus = gen_corpus(&SynthConfig::default()).unwrap();
    let truth = SimilarityMatrix::from(consistency_matrix(&corpus.annotations, 10).unwrap());
    let feat = model_similarity(&corpus.features).unwrap();
    let e = classical_mds(&to_dissimilarity(&feat).unwrap()).unwrap();
    let clusters = agreement_clusters(&truth, 0.6);
    golden("scatter_standard.svg", &scatter_svg(&e, &clusters, "Feature-level projection").unwrap());
}
