//! Comparison points: the hand-tuned perturbed-POCS schedule, Gaussian
//! randomization of a relaxed solution, and a relaxation upper bound found
//! by bisecting over the transmit-power budget.

use num_complex::Complex64;

use crate::eigen::{eig_oracle, project_psd};
use crate::error::{Error, Result};
use crate::hermitian::{sample_cn_vector, stream_rng, ChannelSet, ComplexVec, HermitianMatrix};
use crate::objective::{feasibility_loss, min_snr};
use crate::projection::{FeasibilitySpec, PowerHalfSpace};
use crate::unfolded::{sweep_in_place, UnfoldedSchedule};

/// Relaxation used by the hand-tuned schedule and by the bound's inner POCS.
pub const REFERENCE_LAMBDA: f64 = 1.9;

/// Hand-tuned perturbed POCS: `lambda_t = 1.9`, perturbation weight
/// `beta_t^2 = 0.9 exp(-t / 500)` for `t = 1..=depth`.
pub fn reference_schedule(depth: usize) -> Result<UnfoldedSchedule> {
    let beta = (1..=depth)
        .map(|t| (0.9 * (-(t as f64) / 500.0).exp()).sqrt())
        .collect();
    UnfoldedSchedule::new(vec![REFERENCE_LAMBDA; depth], beta)
}

/// Eigenvalues in `(-PSD_TOL, 0)` are treated as zero; anything lower is an error.
pub const PSD_TOL: f64 = 1e-8;

/// Randomized rounding of a PSD matrix to a beamformer.
///
/// With `X = V S V^H`, draws `n_samples` candidates `w = V S^{1/2} e` for
/// `e` uniform on the complex unit sphere and keeps the one with the largest
/// min-SNR (lowest sample index on ties). Candidate `i` always uses stream
/// `i` of `seed`, so a larger `n_samples` extends the same candidate list.
pub fn rand_a(x: &HermitianMatrix, channels: &ChannelSet, n_samples: usize, seed: u64) -> Result<ComplexVec> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("rand_a needs n_samples >= 1".into()));
    }
    if x.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let n = x.dim();
    let pairs = eig_oracle(x)?;
    let lowest = pairs.last().map_or(0.0, |p| p.value);
    if lowest < -PSD_TOL {
        return Err(Error::NotPsd(lowest));
    }
    // Eigenvalues at round-off level relative to the top one are numerical
    // noise; dropping them keeps rank-one inputs exactly rank one.
    let cutoff = pairs[0].value * 1e-12;
    let factors: Vec<(f64, &ComplexVec)> = pairs
        .iter()
        .filter(|p| p.value > cutoff)
        .map(|p| (p.value.sqrt(), &p.vector))
        .collect();
    if factors.is_empty() {
        return Err(Error::ZeroMatrix);
    }

    let mut best: Option<(f64, ComplexVec)> = None;
    for i in 0..n_samples {
        let e = unit_sphere_sample(n, seed, i as u64);
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for (j, (s, v)) in factors.iter().enumerate() {
            let coeff = e[j] * *s;
            for (wk, vk) in w.iter_mut().zip(v.as_slice()) {
                *wk += vk * coeff;
            }
        }
        let w = ComplexVec::from_vec_unchecked(w);
        let Ok(snr) = min_snr(&w, channels) else {
            continue;
        };
        if best.as_ref().is_none_or(|(b, _)| snr > *b) {
            best = Some((snr, w));
        }
    }
    best.map(|(_, w)| w).ok_or(Error::ZeroVector)
}

/// Uniform draw from the unit sphere of `C^n`: normalized CN(0, I).
pub fn unit_sphere_sample(n: usize, seed: u64, index: u64) -> Vec<Complex64> {
    let mut rng = stream_rng(seed, index);
    loop {
        let v = sample_cn_vector(n, &mut rng);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

// Feasibility-loss threshold, relative to sum(gamma) + P, below which a
// bisection probe counts as feasible.
const FEASIBILITY_RTOL: f64 = 1e-12;

/// Output of [`sdp_bound_estimate`].
#[derive(Clone, Debug)]
pub struct SdpBound {
    /// PSD matrix satisfying every QoS constraint with `tr(X) <= power`.
    pub x: HermitianMatrix,
    /// `min_k h_k^H X h_k / (tr(X) sigma^2)`, linear scale.
    pub bound: f64,
    /// Smallest power budget certified feasible.
    pub power: f64,
    /// Largest budget certified infeasible (or the analytic lower bracket).
    pub power_lower: f64,
    pub tol: f64,
    pub iter_cap: usize,
}

fn relaxation_ratio(x: &HermitianMatrix, channels: &ChannelSet) -> f64 {
    let sigma2 = channels.config().noise_std.powi(2);
    let tr = x.trace();
    channels
        .channels()
        .iter()
        .map(|h| x.quad_form(h) / (tr * sigma2))
        .fold(f64::INFINITY, f64::min)
}

/// Runs relaxed POCS over the QoS and power half-spaces followed by the PSD
/// projection, from `x0`, until an iterate is feasible up to rounding.
///
/// An exact-zero test is too strict here: on a thin feasible set the iterate
/// can settle where the trace exceeds the budget by one ulp.
fn psd_pocs_feasible(x0: &HermitianMatrix, spec: &FeasibilitySpec, iter_cap: usize) -> Result<Option<HermitianMatrix>> {
    let scale = spec.qos().iter().map(|c| c.gamma()).sum::<f64>() + spec.power().map_or(0.0, |b| b.bound());
    let accept = FEASIBILITY_RTOL * scale;
    let mut x = x0.clone();
    for _ in 0..iter_cap {
        sweep_in_place(&mut x, spec, REFERENCE_LAMBDA);
        x = project_psd(&x)?;
        if feasibility_loss(&x, spec) <= accept {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Approximates the semidefinite-relaxation upper bound on the max-min SNR.
///
/// The relaxed QoS problem asks for the smallest `tr(X)` over PSD `X` with
/// `h_k^H X h_k >= gamma`. For a fixed budget `P` that is a convex
/// feasibility problem, which POCS (QoS half-spaces, power half-space, PSD
/// cone) decides within `iter_cap` sweeps; bisection on `P` then narrows the
/// budget to within `tol`. The bracket starts at `[gamma / max |h|^2,
/// N gamma / min |h|^2]`; the top is certified by the scaled identity.
pub fn sdp_bound_estimate(channels: &ChannelSet, tol: f64, iter_cap: usize) -> Result<SdpBound> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidConfig("tol must be positive".into()));
    }
    if iter_cap == 0 {
        return Err(Error::InvalidConfig("iter_cap must be >= 1".into()));
    }
    let cfg = channels.config();
    let n = cfg.n_antennas;
    let gamma = cfg.snr_target;
    let norms: Vec<f64> = channels.channels().iter().map(|h| h.norm_sqr()).collect();
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let max_norm = norms.iter().copied().fold(0.0, f64::max);

    let base = FeasibilitySpec::from_channels(channels, None)?;
    let mut x_hi = HermitianMatrix::identity(n).scaled(gamma / min_norm);
    let mut p_hi = x_hi.trace();
    let mut p_lo = gamma / max_norm;

    while p_hi - p_lo > tol {
        let mid = 0.5 * (p_lo + p_hi);
        let spec = base.with_power(PowerHalfSpace::new(mid, n)?);
        match psd_pocs_feasible(&x_hi, &spec, iter_cap)? {
            Some(x) => {
                p_hi = mid;
                x_hi = x;
            }
            None => p_lo = mid,
        }
    }
    Ok(SdpBound {
        bound: relaxation_ratio(&x_hi, channels),
        x: x_hi,
        power: p_hi,
        power_lower: p_lo,
        tol,
        iter_cap,
    })
}
