//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sum::sum;

/// Convergence threshold on the off-diagonal Frobenius mass, relative to the
/// Frobenius norm of the input (absolute when the norm is below one).
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`, with its first
    /// non-negligible component positive.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Decomposes the symmetric `n×n` row-major matrix `a`.
///
/// Rows and columns are rotated in a fixed (p, q) order, so the result is a
/// deterministic function of the input bits.
pub fn jacobi_eigen(a: &[f64], n: usize) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = libm::sqrt(sum(a.iter().map(|x| x * x))).max(1.0);
    let off = |m: &[f64]| {
        libm::sqrt(sum((0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| m[i * n + j] * m[i * n + j]))))
    };

    let mut sweeps = 0;
    while off(&m) >= OFF_DIAGONAL_TOLERANCE * scale {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (m[p * n + p], m[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                // A <- A J (columns p, q)
                for k in 0..n {
                    let (akp, akq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                // A <- Jᵀ A (rows p, q)
                for k in 0..n {
                    let (apk, aqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in index order
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<f64> = (0..n).map(|row| v[row * n + col]).collect();
            if let Some(first) = vec.iter().copied().find(|x| x.abs() > 1e-12) {
                if first < 0.0 {
                    vec.iter_mut().for_each(|x| *x = -*x);
                }
            }
            vec
        })
        .collect();
    Ok(SymmetricEigen { values, vectors, sweeps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let e = jacobi_eigen(&[1.0, 0.0, 0.0, 3.0], 2).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_eq!(e.vectors[0], vec![0.0, 1.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn two_by_two() {
        // eigenvalues 3 and 1, vectors (1,1)/√2 and (1,-1)/√2
        let e = jacobi_eigen(&[2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[0][0] - h).abs() < 1e-14 && (e.vectors[0][1] - h).abs() < 1e-14);
        assert!((e.vectors[1][0] - h).abs() < 1e-14 && (e.vectors[1][1] + h).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_input() {
        let a = [4.0, 1.0, -2.0, 0.5, 1.0, 3.0, 0.0, 1.5, -2.0, 0.0, 5.0, -1.0, 0.5, 1.5, -1.0, 2.0];
        let n = 4;
        let e = jacobi_eigen(&a, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n).map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j]).sum();
                assert!((r - a[i * n + j]).abs() < 1e-12);
            }
        }
        for k in 0..n {
            for l in 0..n {
                let d: f64 = (0..n).map(|i| e.vectors[k][i] * e.vectors[l][i]).sum();
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
    }
}
