//! Classical MDS, Procrustes and agreement clusters against
//! generate-then-recover and brute-force oracles.

use proptest::prelude::*;
use tendeval_core::rng::CounterRng;
use tendeval_core::{
    agreement_clusters, classical_mds, procrustes_align, DissimilarityMatrix, MaskedMatrix, SimilarityKind,
    SimilarityMatrix,
};

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("a{i:02}")).collect()
}

fn distances(points: &[[f64; 2]]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| points.iter().map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()).collect())
        .collect()
}

fn random_points(seed: u64, n: usize) -> Vec<[f64; 2]> {
    let mut rng = CounterRng::new(seed, "test/points");
    (0..n).map(|_| [4.0 * rng.next_f64() - 2.0, 4.0 * rng.next_f64() - 2.0]).collect()
}

#[test]
fn planar_points_are_recovered() {
    for seed in 0..10 {
        let pts = random_points(seed, 10);
        let d = distances(&pts);
        let e = classical_mds(&DissimilarityMatrix::from_entries(ids(10), d.clone()).unwrap()).unwrap();
        let fit = distances(&e.coords);
        for i in 0..10 {
            for j in (i + 1)..10 {
                assert!((fit[i][j] - d[i][j]).abs() <= 1e-6 * d[i][j], "seed {seed} ({i},{j})");
            }
        }
        assert!(e.eigenvalues[0] >= e.eigenvalues[1] && e.eigenvalues[1] >= 0.0);
        assert!(!e.floored_negative_eigenvalue);
        assert!(e.stress < 1e-9);
        let cx: f64 = e.coords.iter().map(|c| c[0]).sum::<f64>() / 10.0;
        let cy: f64 = e.coords.iter().map(|c| c[1]).sum::<f64>() / 10.0;
        assert!(cx.abs() < 1e-9 && cy.abs() < 1e-9);

        let again = classical_mds(&DissimilarityMatrix::from_entries(ids(10), d).unwrap()).unwrap();
        assert_eq!(e, again, "bit-identical on identical input");
    }
}

#[test]
fn non_euclidean_input_floors_and_reports_stress() {
    // violates the triangle inequality
    let d =
        vec![vec![0.0, 1.0, 5.0, 1.0], vec![1.0, 0.0, 1.0, 3.0], vec![5.0, 1.0, 0.0, 1.0], vec![1.0, 3.0, 1.0, 0.0]];
    let e = classical_mds(&DissimilarityMatrix::from_entries(ids(4), d).unwrap()).unwrap();
    assert!(e.eigenvalues.iter().all(|&v| v >= 0.0));
    assert!(e.stress > 0.0);
}

/// Disparity by scanning the rotation angle for both handedness choices,
/// then refining the best bracket by golden-section search.
fn disparity_oracle(reference: &[[f64; 2]], target: &[[f64; 2]]) -> f64 {
    let norm = |p: &[[f64; 2]]| {
        let n = p.len() as f64;
        let (mx, my) = (p.iter().map(|v| v[0]).sum::<f64>() / n, p.iter().map(|v| v[1]).sum::<f64>() / n);
        let c: Vec<[f64; 2]> = p.iter().map(|v| [v[0] - mx, v[1] - my]).collect();
        let s = c.iter().map(|v| v[0] * v[0] + v[1] * v[1]).sum::<f64>().sqrt();
        c.into_iter().map(|v| [v[0] / s, v[1] / s]).collect::<Vec<_>>()
    };
    let (r, t) = (norm(reference), norm(target));
    let residual = |theta: f64, mirror: bool| {
        let (s, c) = theta.sin_cos();
        let mapped: Vec<[f64; 2]> = t
            .iter()
            .map(|v| {
                let y = if mirror { -v[1] } else { v[1] };
                [c * v[0] - s * y, s * v[0] + c * y]
            })
            .collect();
        let dot: f64 = mapped.iter().zip(&r).map(|(m, q)| m[0] * q[0] + m[1] * q[1]).sum();
        let scale = dot.max(0.0);
        mapped.iter().zip(&r).map(|(m, q)| (q[0] - scale * m[0]).powi(2) + (q[1] - scale * m[1]).powi(2)).sum::<f64>()
    };
    let steps = 3600;
    let h = std::f64::consts::TAU / steps as f64;
    let mut best = f64::INFINITY;
    for mirror in [false, true] {
        let (mut bi, mut bv) = (0, f64::INFINITY);
        for i in 0..steps {
            let v = residual(i as f64 * h, mirror);
            if v < bv {
                bv = v;
                bi = i;
            }
        }
        let (mut lo, mut hi) = ((bi as f64 - 1.0) * h, (bi as f64 + 1.0) * h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if residual(a, mirror) < residual(b, mirror) {
                hi = b;
            } else {
                lo = a;
            }
        }
        best = best.min(residual(0.5 * (lo + hi), mirror));
    }
    best
}

#[test]
fn procrustes_matches_angle_scan_oracle() {
    for seed in 0..10 {
        let reference = random_points(seed, 12);
        let mut rng = CounterRng::new(seed, "test/perturb");
        let (s, c) = (0.3 * seed as f64).sin_cos();
        let target: Vec<[f64; 2]> = reference
            .iter()
            .map(|p| {
                let (x, y) = (p[0] + 0.1 * rng.normal(), p[1] + 0.1 * rng.normal());
                [2.0 * (c * x - s * y) + 1.0, 2.0 * (s * x + c * y) - 3.0]
            })
            .collect();
        let fit = procrustes_align(&reference, &target).unwrap();
        let oracle = disparity_oracle(&reference, &target);
        assert!((fit.disparity - oracle).abs() < 1e-6, "seed {seed}: {} vs {oracle}", fit.disparity);
        assert!(fit.disparity > 0.0);
    }
}

#[test]
fn procrustes_rotated_and_scaled_copies() {
    let reference = random_points(99, 8);
    let (s, c) = 2.2f64.sin_cos();
    let rotated: Vec<[f64; 2]> = reference.iter().map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]).collect();
    assert!(procrustes_align(&reference, &rotated).unwrap().disparity < 1e-10);
    let scaled: Vec<[f64; 2]> = reference.iter().map(|p| [3.0 * p[0], 3.0 * p[1]]).collect();
    assert!(procrustes_align(&reference, &scaled).unwrap().disparity < 1e-10);
    assert!(procrustes_align(&reference, &reference).unwrap().disparity < 1e-12);
}

proptest! {
    #[test]
    fn disparity_ignores_pre_rotation(seed in any::<u64>(), angle in 0.0f64..std::f64::consts::TAU) {
        let reference = random_points(seed, 7);
        let target = random_points(seed.wrapping_add(1), 7);
        let (s, c) = angle.sin_cos();
        let turned: Vec<[f64; 2]> = target.iter().map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]).collect();
        let a = procrustes_align(&reference, &target).unwrap().disparity;
        let b = procrustes_align(&reference, &turned).unwrap().disparity;
        prop_assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn planted_clusters_are_recovered() {
    for seed in 0..10 {
        let mut rng = CounterRng::new(seed, "test/planted");
        let n = 12;
        let group: Vec<usize> = (0..n).map(|i| (i * 7 + seed as usize) % 3).collect();
        let matrix = MaskedMatrix::from_fn(n, |i, j| {
            let base = if group[i] == group[j] { 0.8 } else { 0.2 };
            base + 0.1 * (rng.next_f64() - 0.5)
        });
        let s = SimilarityMatrix { kind: SimilarityKind::GroundTruthKappa, annotators: ids(n), matrix };
        let c = agreement_clusters(&s, 0.6);
        assert_eq!(c.cluster_count(), 3);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(c.assignment[i] == c.assignment[j], group[i] == group[j]);
            }
        }
    }
}
