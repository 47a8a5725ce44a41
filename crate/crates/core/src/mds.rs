//! 2D behavioral projections: similarity → dissimilarity, classical
//! (Torgerson) MDS and κ-threshold agreement clusters.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::alignment::SimilarityMatrix;
use crate::eigen::jacobi_eigen;
use crate::error::{Error, Result};
use crate::sum::{sum, CompensatedSum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMatrix {
    pub annotators: Vec<String>,
    /// Row-major, symmetric, zero diagonal.
    pub entries: Vec<Vec<f64>>,
    /// Pairs that had no valid similarity and received the mean valid
    /// dissimilarity instead.
    pub imputed: Vec<(String, String)>,
}

impl DissimilarityMatrix {
    /// Wraps a complete distance matrix.
    #[allow(clippy::needless_range_loop)]
    pub fn from_entries(annotators: Vec<String>, entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = annotators.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::SizeMismatch { left: n, right: entries.len() });
        }
        for i in 0..n {
            if entries[i][i] != 0.0 {
                return Err(Error::InvalidConfig("dissimilarity diagonal must be zero".into()));
            }
            for j in 0..n {
                let x = entries[i][j];
                if !x.is_finite() || x < 0.0 || x != entries[j][i] {
                    return Err(Error::InvalidConfig(
                        "dissimilarities must be finite, non-negative and symmetric".into(),
                    ));
                }
            }
        }
        Ok(Self { annotators, entries, imputed: Vec::new() })
    }

    pub fn size(&self) -> usize {
        self.annotators.len()
    }
}

/// `d = 1 - s`, clamped to `[0, 2]`. Missing pairs get the mean of the
/// valid dissimilarities.
#[allow(clippy::needless_range_loop)]
pub fn to_dissimilarity(s: &SimilarityMatrix) -> Result<DissimilarityMatrix> {
    let n = s.matrix.size();
    let valid: Vec<(usize, usize, f64)> =
        s.matrix.valid_pairs().map(|(i, j, v)| (i, j, (1.0 - v).clamp(0.0, 2.0))).collect();
    if valid.is_empty() {
        return Err(Error::EmptyMask);
    }
    let fill = sum(valid.iter().map(|t| t.2)) / valid.len() as f64;
    let mut entries = vec![vec![0.0; n]; n];
    let mut imputed = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = match s.matrix.get(i, j) {
                Some(v) => (1.0 - v).clamp(0.0, 2.0),
                None => {
                    imputed.push((s.annotators[i].clone(), s.annotators[j].clone()));
                    fill
                }
            };
            entries[i][j] = d;
            entries[j][i] = d;
        }
    }
    Ok(DissimilarityMatrix { annotators: s.annotators.clone(), entries, imputed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding2D {
    pub annotators: Vec<String>,
    pub coords: Vec<[f64; 2]>,
    /// The two retained eigenvalues, after flooring at zero.
    pub eigenvalues: [f64; 2],
    /// Kruskal stress-1 between input and reconstructed distances.
    pub stress: f64,
    /// A retained eigenvalue was negative (non-Euclidean input).
    pub floored_negative_eigenvalue: bool,
    pub imputed: Vec<(String, String)>,
}

/// Classical MDS into two dimensions.
///
/// Double-centers the squared dissimilarities and keeps the top two
/// eigenpairs; coordinates are eigenvectors scaled by the square root of
/// their eigenvalue.
pub fn classical_mds(d: &DissimilarityMatrix) -> Result<Embedding2D> {
    let n = d.size();
    if n < 3 {
        return Err(Error::TooFewPoints { found: n, required: 3 });
    }
    let sq: Vec<f64> = d.entries.iter().flat_map(|r| r.iter().map(|x| x * x)).collect();
    let row_mean: Vec<f64> = (0..n).map(|i| sum(sq[i * n..(i + 1) * n].iter().copied()) / n as f64).collect();
    let grand = sum(row_mean.iter().copied()) / n as f64;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
        }
    }
    let eig = jacobi_eigen(&b, n)?;
    let mut floored = false;
    let mut eigenvalues = [0.0; 2];
    for (k, slot) in eigenvalues.iter_mut().enumerate() {
        let v = eig.values[k];
        if v < 0.0 {
            floored = true;
        }
        *slot = v.max(0.0);
    }
    let roots = [libm::sqrt(eigenvalues[0]), libm::sqrt(eigenvalues[1])];
    let mut coords: Vec<[f64; 2]> =
        (0..n).map(|i| [eig.vectors[0][i] * roots[0], eig.vectors[1][i] * roots[1]]).collect();
    for axis in 0..2 {
        let mean = sum(coords.iter().map(|c| c[axis])) / n as f64;
        coords.iter_mut().for_each(|c| c[axis] -= mean);
    }

    let mut resid = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (dx, dy) = (coords[i][0] - coords[j][0], coords[i][1] - coords[j][1]);
            let fit = libm::sqrt(dx * dx + dy * dy);
            let target = d.entries[i][j];
            resid.add((target - fit) * (target - fit));
            total.add(target * target);
        }
    }
    let stress = if total.value() > 0.0 { libm::sqrt(resid.value() / total.value()) } else { 0.0 };
    Ok(Embedding2D {
        annotators: d.annotators.clone(),
        coords,
        eigenvalues,
        stress,
        floored_negative_eigenvalue: floored,
        imputed: d.imputed.clone(),
    })
}

/// Connected components of the graph whose edges are valid entries above
/// `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementClusters {
    pub threshold: f64,
    pub annotators: Vec<String>,
    /// Cluster id per annotator; ids are numbered in order of each cluster's
    /// first member.
    pub assignment: Vec<usize>,
}

impl AgreementClusters {
    pub fn cluster_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }
}

pub fn agreement_clusters(s: &SimilarityMatrix, threshold: f64) -> AgreementClusters {
    let n = s.matrix.size();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, j, v) in s.matrix.valid_pairs() {
        if v > threshold {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    let assignment = (0..n)
        .map(|i| {
            let root = find(&mut parent, i);
            if ids[root] == usize::MAX {
                ids[root] = next;
                next += 1;
            }
            ids[root]
        })
        .collect();
    AgreementClusters { threshold, annotators: s.annotators.clone(), assignment }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::SimilarityKind;
    use crate::matrix::MaskedMatrix;
    use alloc::format;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i}")).collect()
    }

    fn sim(n: usize, f: impl FnMut(usize, usize) -> f64) -> SimilarityMatrix {
        SimilarityMatrix {
            kind: SimilarityKind::GroundTruthKappa,
            annotators: ids(n),
            matrix: MaskedMatrix::from_fn(n, f),
        }
    }

    #[test]
    fn dissimilarity_map() {
        let s = sim(3, |i, j| [[0.0, 1.0, -1.0], [1.0, 0.0, 0.25], [-1.0, 0.25, 0.0]][i][j]);
        let d = to_dissimilarity(&s).unwrap();
        assert_eq!(d.entries[0][1], 0.0);
        assert_eq!(d.entries[0][2], 2.0);
        assert_eq!(d.entries[2][1], 0.75);
        assert!(d.imputed.is_empty());
    }

    #[test]
    fn dissimilarity_imputes_missing() {
        let mut s = sim(3, |_, j| if j == 2 { 0.5 } else { 0.9 });
        s.matrix.invalidate(0, 2);
        let d = to_dissimilarity(&s).unwrap();
        assert!((d.entries[0][2] - (0.1 + 0.5) / 2.0).abs() < 1e-15);
        assert_eq!(d.imputed, vec![("a0".into(), "a2".into())]);
        let empty = SimilarityMatrix { matrix: MaskedMatrix::new(3), ..s };
        assert_eq!(to_dissimilarity(&empty).unwrap_err(), Error::EmptyMask);
    }

    #[test]
    fn equilateral_triangle() {
        let d = DissimilarityMatrix::from_entries(
            ids(3),
            vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap();
        let e = classical_mds(&d).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (dx, dy) = (e.coords[i][0] - e.coords[j][0], e.coords[i][1] - e.coords[j][1]);
                assert!((libm::sqrt(dx * dx + dy * dy) - 1.0).abs() < 1e-9);
            }
        }
        assert!(e.stress < 1e-9);
    }

    #[test]
    fn two_point_clusters_collapse() {
        let group = [0, 0, 1, 1];
        let entries = (0..4).map(|i| (0..4).map(|j| if group[i] == group[j] { 0.0 } else { 1.0 }).collect()).collect();
        let e = classical_mds(&DissimilarityMatrix::from_entries(ids(4), entries).unwrap()).unwrap();
        for (i, j) in [(0, 1), (2, 3)] {
            assert!((e.coords[i][0] - e.coords[j][0]).abs() < 1e-9);
            assert!((e.coords[i][1] - e.coords[j][1]).abs() < 1e-9);
        }
        let cx: f64 = e.coords.iter().map(|c| c[0]).sum();
        assert!(cx.abs() < 1e-9);
    }

    #[test]
    fn too_few_points() {
        let d = DissimilarityMatrix::from_entries(ids(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(classical_mds(&d).unwrap_err(), Error::TooFewPoints { found: 2, required: 3 });
    }

    #[test]
    fn clusters_by_threshold() {
        assert_eq!(agreement_clusters(&sim(4, |_, _| 0.9), 0.6).assignment, vec![0, 0, 0, 0]);
        assert_eq!(agreement_clusters(&sim(4, |_, _| 0.1), 0.6).assignment, vec![0, 1, 2, 3]);
        let c = agreement_clusters(&sim(5, |i, j| if i % 2 == j % 2 { 0.8 } else { 0.2 }), 0.6);
        assert_eq!(c.assignment, vec![0, 1, 0, 1, 0]);
        assert_eq!(c.cluster_count(), 2);
        // exactly at the threshold is not an edge
        assert_eq!(agreement_clusters(&sim(2, |_, _| 0.6), 0.6).cluster_count(), 2);
    }
}
