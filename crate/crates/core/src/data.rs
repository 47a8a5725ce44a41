//! In-memory annotation and vector tables.
//!
//! Annotators and samples are always ordered lexicographically by id, so
//! matrix indices are reproducible across loads and runs.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{Label, LabelDomain};
use crate::sum::sum;

/// One categorical label given by one annotator (or predicted for one
/// annotator) on one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub sample_id: String,
    pub annotator_id: String,
    pub label: Label,
}

/// Sparse (annotator, sample) → label map.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    annotators: Vec<String>,
    samples: Vec<String>,
    domain: LabelDomain,
    /// Per annotator, (sample index, label) sorted by sample index.
    rows: Vec<Vec<(usize, Label)>>,
}

impl AnnotationSet {
    pub fn from_records<I>(records: I, domain: LabelDomain) -> Result<Self>
    where
        I: IntoIterator<Item = LabelRecord>,
    {
        let mut by_key: BTreeMap<(String, String), Label> = BTreeMap::new();
        for r in records {
            if !domain.contains(r.label) {
                return Err(Error::LabelOutOfDomain(r.label));
            }
            match by_key.entry((r.annotator_id, r.sample_id)) {
                Entry::Occupied(e) => {
                    let (annotator, sample) = e.key().clone();
                    return Err(Error::DuplicatePair { annotator, sample });
                }
                Entry::Vacant(e) => {
                    e.insert(r.label);
                }
            }
        }
        if by_key.is_empty() {
            return Err(Error::Empty("annotation records"));
        }
        let mut samples: Vec<String> = by_key.keys().map(|(_, s)| s.clone()).collect();
        samples.sort_unstable();
        samples.dedup();
        let mut annotators: Vec<String> = Vec::new();
        let mut rows: Vec<Vec<(usize, Label)>> = Vec::new();
        // BTreeMap iteration is already (annotator, sample) ordered
        for ((a, s), label) in by_key {
            if annotators.last() != Some(&a) {
                annotators.push(a);
                rows.push(Vec::new());
            }
            let si = samples.binary_search(&s).expect("sample collected above");
            rows.last_mut().unwrap().push((si, label));
        }
        Ok(Self { annotators, samples, domain, rows })
    }

    /// Label domain made of every label that occurs in `records`.
    pub fn infer_domain<'a, I>(records: I) -> Result<LabelDomain>
    where
        I: IntoIterator<Item = &'a LabelRecord>,
    {
        LabelDomain::new(records.into_iter().map(|r| r.label))
    }

    pub fn annotators(&self) -> &[String] {
        &self.annotators
    }

    pub fn samples(&self) -> &[String] {
        &self.samples
    }

    pub fn domain(&self) -> &LabelDomain {
        &self.domain
    }

    pub fn annotator_index(&self, id: &str) -> Option<usize> {
        self.annotators.binary_search_by(|a| a.as_str().cmp(id)).ok()
    }

    /// (sample index, label) pairs of annotator `k`, in sample order.
    pub fn labels_of(&self, k: usize) -> &[(usize, Label)] {
        &self.rows[k]
    }

    pub fn label(&self, k: usize, sample: usize) -> Option<Label> {
        let row = &self.rows[k];
        row.binary_search_by_key(&sample, |&(s, _)| s).ok().map(|i| row[i].1)
    }

    /// Total number of labels.
    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All labels as records, ordered by (annotator, sample).
    pub fn records(&self) -> Vec<LabelRecord> {
        let mut out = Vec::with_capacity(self.len());
        for (k, row) in self.rows.iter().enumerate() {
            for &(s, label) in row {
                out.push(LabelRecord {
                    sample_id: self.samples[s].clone(),
                    annotator_id: self.annotators[k].clone(),
                    label,
                });
            }
        }
        out
    }

    /// Same key set with every label replaced by `f(annotator, sample, label)`.
    ///
    /// # Panics
    ///
    /// If `f` returns a label outside the domain.
    pub fn map_labels(&self, mut f: impl FnMut(usize, usize, Label) -> Label) -> AnnotationSet {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(k, row)| {
                row.iter()
                    .map(|&(s, l)| {
                        let new = f(k, s, l);
                        assert!(self.domain.contains(new), "mapped label outside domain");
                        (s, new)
                    })
                    .collect()
            })
            .collect();
        AnnotationSet {
            annotators: self.annotators.clone(),
            samples: self.samples.clone(),
            domain: self.domain.clone(),
            rows,
        }
    }

    /// Ok when both sets carry exactly the same (annotator, sample) keys.
    pub fn check_same_keys(&self, other: &AnnotationSet) -> Result<()> {
        let mismatch = |a: &str, s: &str| Error::KeyMismatch { annotator: a.into(), sample: s.into() };
        let mine = self.records();
        let theirs = other.records();
        for (x, y) in mine.iter().zip(&theirs) {
            if x.annotator_id != y.annotator_id || x.sample_id != y.sample_id {
                let first = if (&x.annotator_id, &x.sample_id) < (&y.annotator_id, &y.sample_id) { x } else { y };
                return Err(mismatch(&first.annotator_id, &first.sample_id));
            }
        }
        if mine.len() != theirs.len() {
            let extra = if mine.len() > theirs.len() { &mine[theirs.len()] } else { &theirs[mine.len()] };
            return Err(mismatch(&extra.annotator_id, &extra.sample_id));
        }
        Ok(())
    }

    /// Per sample, the (annotator index, label) pairs that cover it.
    pub fn by_sample(&self) -> Vec<Vec<(usize, Label)>> {
        let mut out = vec![Vec::new(); self.samples.len()];
        for (k, row) in self.rows.iter().enumerate() {
            for &(s, l) in row {
                out[s].push((k, l));
            }
        }
        out
    }
}

/// Which per-(annotator, sample) vectors a [`VectorTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    /// Learned representations or importance vectors.
    Feature,
    /// Non-negative attention over a fixed set of regions, unit sum.
    Attention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorRecord {
    pub sample_id: String,
    pub annotator_id: String,
    pub values: Vec<f64>,
}

/// Sparse (annotator, sample) → real vector map with a shared dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTable {
    kind: VectorKind,
    dimension: usize,
    annotators: Vec<String>,
    /// Per annotator, (sample id, vector) sorted by sample id.
    rows: Vec<Vec<(String, Vec<f64>)>>,
}

impl VectorTable {
    pub fn features<I: IntoIterator<Item = VectorRecord>>(records: I) -> Result<Self> {
        Self::build(VectorKind::Feature, records)
    }

    /// Attention vectors are checked for non-negativity and rescaled to
    /// unit sum.
    pub fn attentions<I: IntoIterator<Item = VectorRecord>>(records: I) -> Result<Self> {
        Self::build(VectorKind::Attention, records)
    }

    fn build<I: IntoIterator<Item = VectorRecord>>(kind: VectorKind, records: I) -> Result<Self> {
        let mut by_key: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
        let mut dimension = None;
        for mut r in records {
            let expected = *dimension.get_or_insert(r.values.len());
            if r.values.len() != expected {
                return Err(Error::DimensionMismatch { expected, found: r.values.len() });
            }
            if r.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { annotator: r.annotator_id, sample: r.sample_id });
            }
            if kind == VectorKind::Attention {
                if let Some(&value) = r.values.iter().find(|&&x| x < 0.0) {
                    return Err(Error::NegativeWeight { annotator: r.annotator_id, sample: r.sample_id, value });
                }
                let total = sum(r.values.iter().copied());
                if total <= 0.0 {
                    return Err(Error::ZeroWeightSum { annotator: r.annotator_id, sample: r.sample_id });
                }
                r.values.iter_mut().for_each(|x| *x /= total);
            }
            match by_key.entry((r.annotator_id, r.sample_id)) {
                Entry::Occupied(e) => {
                    let (annotator, sample) = e.key().clone();
                    return Err(Error::DuplicatePair { annotator, sample });
                }
                Entry::Vacant(e) => {
                    e.insert(r.values);
                }
            }
        }
        let dimension = match dimension {
            None => return Err(Error::Empty("vector records")),
            Some(0) => return Err(Error::Empty("zero-length vectors")),
            Some(d) => d,
        };
        let mut annotators: Vec<String> = Vec::new();
        let mut rows: Vec<Vec<(String, Vec<f64>)>> = Vec::new();
        for ((a, s), v) in by_key {
            if annotators.last() != Some(&a) {
                annotators.push(a);
                rows.push(Vec::new());
            }
            rows.last_mut().unwrap().push((s, v));
        }
        Ok(Self { kind, dimension, annotators, rows })
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn annotators(&self) -> &[String] {
        &self.annotators
    }

    pub fn annotator_index(&self, id: &str) -> Option<usize> {
        self.annotators.binary_search_by(|a| a.as_str().cmp(id)).ok()
    }

    pub fn entries_of(&self, k: usize) -> &[(String, Vec<f64>)] {
        &self.rows[k]
    }

    pub fn get(&self, annotator: &str, sample: &str) -> Option<&[f64]> {
        let row = &self.rows[self.annotator_index(annotator)?];
        row.binary_search_by(|(s, _)| s.as_str().cmp(sample)).ok().map(|i| row[i].1.as_slice())
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All vectors as records, ordered by (annotator, sample).
    pub fn records(&self) -> Vec<VectorRecord> {
        let mut out = Vec::with_capacity(self.len());
        for (a, row) in self.annotators.iter().zip(&self.rows) {
            for (s, v) in row {
                out.push(VectorRecord { sample_id: s.clone(), annotator_id: a.clone(), values: v.clone() });
            }
        }
        out
    }
}

/// Pairwise sample overlap |S_k ∩ S_l| between annotators.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapIndex {
    size: usize,
    counts: Vec<usize>,
    /// Shared sample indices for each pair k < l, row-major over the upper
    /// triangle; empty when the pair shares nothing.
    shared: Vec<Vec<usize>>,
}

impl OverlapIndex {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn count(&self, k: usize, l: usize) -> usize {
        self.counts[k * self.size + l]
    }

    fn pair_slot(&self, k: usize, l: usize) -> usize {
        let (i, j) = if k < l { (k, l) } else { (l, k) };
        // offset of row i in the strict upper triangle
        i * self.size - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Shared sample indices in canonical (sorted id) order.
    ///
    /// # Panics
    ///
    /// When `k == l`.
    pub fn shared(&self, k: usize, l: usize) -> &[usize] {
        assert!(k != l, "no shared list for the diagonal");
        &self.shared[self.pair_slot(k, l)]
    }
}

/// Computes |S_k ∩ S_l| and the shared sample lists for every pair.
pub fn overlap_index(ann: &AnnotationSet) -> OverlapIndex {
    let m = ann.annotators().len();
    let mut counts = vec![0usize; m * m];
    let mut shared = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for k in 0..m {
        counts[k * m + k] = ann.labels_of(k).len();
        for l in (k + 1)..m {
            let (a, b) = (ann.labels_of(k), ann.labels_of(l));
            let (mut i, mut j) = (0, 0);
            let mut common = Vec::new();
            while i < a.len() && j < b.len() {
                match a[i].0.cmp(&b[j].0) {
                    core::cmp::Ordering::Less => i += 1,
                    core::cmp::Ordering::Greater => j += 1,
                    core::cmp::Ordering::Equal => {
                        common.push(a[i].0);
                        i += 1;
                        j += 1;
                    }
                }
            }
            counts[k * m + l] = common.len();
            counts[l * m + k] = common.len();
            shared.push(common);
        }
    }
    OverlapIndex { size: m, counts, shared }
}
