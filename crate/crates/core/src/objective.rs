//! Unsupervised losses and evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{ChannelSet, ComplexVec, HermitianMatrix};
use crate::projection::FeasibilitySpec;

/// Sharpness of the softmin used by the max-min-fair training loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftminWeight(pub f64);

impl Default for SoftminWeight {
    fn default() -> Self {
        SoftminWeight(3.0)
    }
}

/// Sum of constraint gaps: `sum_k max(0, gamma - <X, Q_k>) + max(0, tr X - P)`.
/// Zero exactly when `X` lies in every half-space of `spec`.
pub fn feasibility_loss(x: &HermitianMatrix, spec: &FeasibilitySpec) -> f64 {
    let qos: f64 = spec.qos().iter().map(|c| c.gap(x).max(0.0)).sum();
    let power = spec.power().map_or(0.0, |p| p.excess(x).max(0.0));
    qos + power
}

/// Exponentially weighted average `sum s e^{-beta s} / sum e^{-beta s}`.
///
/// Exponents are shifted by their maximum so large `beta * s` cannot overflow;
/// at `beta = 0` every weight is exactly one and the result is the plain mean.
pub fn softmin(s: &[f64], beta: f64) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Empty("softmin input"));
    }
    let shift = s.iter().map(|&v| -beta * v).fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    for &v in s {
        let w = (-beta * v - shift).exp();
        num += v * w;
        den += w;
    }
    if beta == 0.0 {
        return Ok(num / den);
    }
    // rounding can push the weighted average a few ulps outside the range
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((num / den).clamp(lo, hi))
}

/// Per-user SNR `|w^H h_k|^2 / (sigma^2 |w|^2)`.
pub fn user_snrs(w: &ComplexVec, channels: &ChannelSet) -> Result<Vec<f64>> {
    let cfg = channels.config();
    if w.len() != cfg.n_antennas {
        return Err(Error::DimensionMismatch {
            expected: cfg.n_antennas,
            actual: w.len(),
        });
    }
    let wn = w.norm_sqr();
    if wn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let denom = cfg.noise_std * cfg.noise_std * wn;
    Ok(channels
        .channels()
        .iter()
        .map(|h| w.dot(h).norm_sqr() / denom)
        .collect())
}

/// Worst-user SNR of beamformer `w`; invariant to scaling and phase of `w`.
pub fn min_snr(w: &ComplexVec, channels: &ChannelSet) -> Result<f64> {
    Ok(user_snrs(w, channels)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Negated softmin of the per-user SNRs.
pub fn mmf_loss(w: &ComplexVec, channels: &ChannelSet, weight: SoftminWeight) -> Result<f64> {
    Ok(-softmin(&user_snrs(w, channels)?, weight.0)?)
}

/// `10 log10(x)`.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
