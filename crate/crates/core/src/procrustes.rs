//! Orthogonal Procrustes alignment of 2D configurations.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcrustesFit {
    /// Target points mapped into the reference frame.
    pub aligned: Vec<[f64; 2]>,
    /// Residual sum of squares after both configurations are centered and
    /// scaled to unit Frobenius norm; in `[0, 1]`.
    pub disparity: f64,
    /// Row-major 2×2 orthogonal map applied to the centered target.
    pub linear: [[f64; 2]; 2],
    pub scale: f64,
    pub reflected: bool,
}

fn centered(points: &[[f64; 2]]) -> (Vec<[f64; 2]>, [f64; 2]) {
    let n = points.len() as f64;
    let c = [sum(points.iter().map(|p| p[0])) / n, sum(points.iter().map(|p| p[1])) / n];
    (points.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect(), c)
}

/// Finds translation, rotation or reflection, and uniform scale mapping
/// `target` onto `reference` with least squared residual.
pub fn procrustes_align(reference: &[[f64; 2]], target: &[[f64; 2]]) -> Result<ProcrustesFit> {
    if reference.len() != target.len() {
        return Err(Error::LengthMismatch { left: reference.len(), right: target.len() });
    }
    if reference.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let (r, r_mean) = centered(reference);
    let (t, _) = centered(target);
    let t_norm2 = sum(t.iter().map(|p| p[0] * p[0] + p[1] * p[1]));
    let r_norm2 = sum(r.iter().map(|p| p[0] * p[0] + p[1] * p[1]));
    if t_norm2 <= 0.0 || r_norm2 <= 0.0 {
        return Err(Error::DegenerateConfiguration);
    }

    // Best rotation maximizes Σ rᵢ·R tᵢ = a cos θ + b sin θ.
    let a = sum(t.iter().zip(&r).map(|(t, r)| t[0] * r[0] + t[1] * r[1]));
    let b = sum(t.iter().zip(&r).map(|(t, r)| t[0] * r[1] - t[1] * r[0]));
    // Same with the target mirrored across the x axis.
    let a_ref = sum(t.iter().zip(&r).map(|(t, r)| t[0] * r[0] - t[1] * r[1]));
    let b_ref = sum(t.iter().zip(&r).map(|(t, r)| t[0] * r[1] + t[1] * r[0]));
    let proper = libm::hypot(a, b);
    let mirrored = libm::hypot(a_ref, b_ref);

    let reflected = mirrored > proper;
    let (score, theta) = if reflected { (mirrored, libm::atan2(b_ref, a_ref)) } else { (proper, libm::atan2(b, a)) };
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let linear = if reflected { [[c, s], [s, -c]] } else { [[c, -s], [s, c]] };
    let scale = score / t_norm2;

    let aligned = t
        .iter()
        .map(|p| {
            let x = linear[0][0] * p[0] + linear[0][1] * p[1];
            let y = linear[1][0] * p[0] + linear[1][1] * p[1];
            [scale * x + r_mean[0], scale * y + r_mean[1]]
        })
        .collect();
    let fit = score / libm::sqrt(t_norm2 * r_norm2);
    let disparity = (1.0 - fit * fit).max(0.0);
    Ok(ProcrustesFit { aligned, disparity, linear, scale, reflected })
}
