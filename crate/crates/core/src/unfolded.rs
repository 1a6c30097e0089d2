//! POCS and POCS with bounded perturbation, in both fixed-parameter and
//! unfolded (per-iteration parameter) form.
//!
//! All engines share one shape: a sweep of relaxed projections through the
//! QoS half-spaces in ascending user order, optionally followed by the power
//! half-space. The perturbed variant first shrinks every non-dominant spectral
//! component of the iterate, pulling it toward a rank-one matrix from which a
//! beamformer is read off as the dominant eigenvector.

use serde::{Deserialize, Serialize};

use crate::eigen::{default_start, EigenPair, PowerMethod};
use crate::error::{Error, Result};
use crate::hermitian::{ChannelSet, ComplexVec, HermitianMatrix};
use crate::objective::{feasibility_loss, min_snr, to_db};
use crate::projection::FeasibilitySpec;

/// Per-iteration relaxation `lambda_t` and perturbation root-coefficient
/// `beta_t` (the perturbation weight is `beta_t^2`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnfoldedSchedule {
    lambda: Vec<f64>,
    beta: Vec<f64>,
}

impl UnfoldedSchedule {
    pub fn new(lambda: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Empty("schedule"));
        }
        if lambda.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: lambda.len(),
                actual: beta.len(),
            });
        }
        if lambda.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("schedule parameter".into()));
        }
        Ok(Self { lambda, beta })
    }

    pub fn constant(depth: usize, lambda: f64, beta: f64) -> Result<Self> {
        Self::new(vec![lambda; depth], vec![beta; depth])
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// The first `depth` iterations.
    pub fn prefix(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.len() {
            return Err(Error::InvalidConfig(format!(
                "prefix depth {depth} outside 1..={}",
                self.len()
            )));
        }
        Self::new(self.lambda[..depth].to_vec(), self.beta[..depth].to_vec())
    }

    /// Lengthens the schedule to `iterations` by holding the last entry.
    pub fn extended(&self, iterations: usize) -> Self {
        let mut out = self.clone();
        let (l, b) = (*self.lambda.last().unwrap(), *self.beta.last().unwrap());
        while out.len() < iterations {
            out.lambda.push(l);
            out.beta.push(b);
        }
        out
    }

    /// Parameters as one flat vector `[lambda_1..lambda_T, beta_1..beta_T]`.
    pub fn to_params(&self) -> Vec<f64> {
        self.lambda.iter().chain(&self.beta).copied().collect()
    }

    pub fn from_params(params: &[f64]) -> Result<Self> {
        if !params.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig("odd parameter count".into()));
        }
        let t = params.len() / 2;
        Self::new(params[..t].to_vec(), params[t..].to_vec())
    }
}

/// One row of an [`IterateTrace`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateRecord {
    /// 1-based iteration index; the record describes `X_t` after iteration `t`.
    pub iteration: usize,
    pub feasibility_loss: f64,
    /// Worst-user SNR of the dominant eigenvector of `X_t`, when tracked.
    pub min_snr: Option<f64>,
}

impl IterateRecord {
    pub fn min_snr_db(&self) -> Option<f64> {
        self.min_snr.map(to_db)
    }
}

/// Per-iteration diagnostics of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterateTrace {
    pub records: Vec<IterateRecord>,
}

impl IterateTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// First iteration whose iterate satisfies every constraint exactly.
    pub fn first_feasible(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.feasibility_loss == 0.0)
            .map(|r| r.iteration)
    }

    pub fn min_snr_db(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.min_snr_db()).collect()
    }
}

/// First 1-based index after which every value stays within `tol` of the
/// last one. `None` for an empty curve.
pub fn convergence_iteration(curve: &[f64], tol: f64) -> Option<usize> {
    let last = *curve.last()?;
    let mut t = curve.len();
    while t > 1 && (curve[t - 2] - last).abs() <= tol {
        t -= 1;
    }
    Some(t)
}

/// Default "converged" band for min-SNR curves, in dB.
pub const CONVERGENCE_TOL_DB: f64 = 0.01;

/// One sweep `T_{B_P} T_{C_K} ... T_{C_1}` with a shared relaxation `lambda`.
pub fn pocs_sweep(x: &HermitianMatrix, spec: &FeasibilitySpec, lambda: f64) -> Result<HermitianMatrix> {
    if x.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: x.dim(),
        });
    }
    let mut out = x.clone();
    sweep_in_place(&mut out, spec, lambda);
    Ok(out)
}

pub(crate) fn sweep_in_place(x: &mut HermitianMatrix, spec: &FeasibilitySpec, lambda: f64) {
    for c in spec.qos() {
        c.relax_in_place(x, lambda);
    }
    if let Some(p) = spec.power() {
        p.relax_in_place(x, lambda);
    }
}

/// Runs `X_{t+1} = sweep(X_t, lambda_t)` over `lambdas`, recording the
/// feasibility loss after every iteration. With `stop_on_feasible`, halts at
/// the first exactly feasible iterate.
pub fn run_pocs(
    x0: &HermitianMatrix,
    spec: &FeasibilitySpec,
    lambdas: &[f64],
    stop_on_feasible: bool,
) -> Result<(HermitianMatrix, IterateTrace)> {
    run_pocs_tracked(x0, spec, lambdas, stop_on_feasible, None)
}

/// [`run_pocs`], additionally tracking the min-SNR of the dominant
/// eigenvector of each iterate when `channels` is given.
pub fn run_pocs_tracked(
    x0: &HermitianMatrix,
    spec: &FeasibilitySpec,
    lambdas: &[f64],
    stop_on_feasible: bool,
    channels: Option<&ChannelSet>,
) -> Result<(HermitianMatrix, IterateTrace)> {
    if lambdas.is_empty() {
        return Err(Error::Empty("lambda schedule"));
    }
    if x0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: x0.dim(),
        });
    }
    let pm = PowerMethod::default();
    let mut u = default_start(x0.dim());
    let mut x = x0.clone();
    let mut trace = IterateTrace::default();
    for (t, &lambda) in lambdas.iter().enumerate() {
        sweep_in_place(&mut x, spec, lambda);
        let loss = feasibility_loss(&x, spec);
        let snr = match channels {
            Some(ch) => {
                let pair = pm.run_from(&x, &u);
                u = pair.vector.as_slice().to_vec();
                Some(min_snr(&pair.vector, ch)?)
            }
            None => None,
        };
        trace.records.push(IterateRecord {
            iteration: t + 1,
            feasibility_loss: loss,
            min_snr: snr,
        });
        if stop_on_feasible && loss == 0.0 {
            break;
        }
    }
    Ok((x, trace))
}

/// Final iterate of fixed-length POCS without tracing; the training hot path.
pub(crate) fn pocs_final(x0: &HermitianMatrix, spec: &FeasibilitySpec, lambdas: &[f64]) -> HermitianMatrix {
    let mut x = x0.clone();
    for &lambda in lambdas {
        sweep_in_place(&mut x, spec, lambda);
    }
    x
}

/// How the bounded-perturbation step uses the dominant pair `(lambda_max, u)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    /// `X - beta^2 (X - lambda_max u u^H)`: shrink the non-dominant residual.
    #[default]
    Residual,
    /// `X - beta^2 lambda_max u u^H`: the literal pseudo-code line, kept for
    /// experimentation.
    DominantComponent,
}

/// Result of a perturbed POCS run.
#[derive(Clone, Debug)]
pub struct PocsBpOutput {
    pub x: HermitianMatrix,
    /// Phase-normalized unit dominant eigenvector of the final iterate.
    pub beamformer: ComplexVec,
    pub trace: IterateTrace,
}

/// Perturbed POCS engine: power-method settings plus perturbation semantics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PocsBp {
    pub power: PowerMethod,
    pub mode: PerturbationMode,
}

impl PocsBp {
    fn perturb(&self, x: &mut HermitianMatrix, pair: &EigenPair, beta: f64) {
        let w = beta * beta;
        if w == 0.0 {
            return;
        }
        match self.mode {
            PerturbationMode::Residual => {
                x.scale(1.0 - w);
                x.add_rank_one(w * pair.value, pair.vector.as_slice());
            }
            PerturbationMode::DominantComponent => {
                x.add_rank_one(-w * pair.value, pair.vector.as_slice());
            }
        }
    }

    fn iterate<F>(
        &self,
        x0: &HermitianMatrix,
        channels: &ChannelSet,
        schedule: &UnfoldedSchedule,
        mut observe: F,
    ) -> Result<(HermitianMatrix, EigenPair)>
    where
        F: FnMut(usize, &HermitianMatrix, &EigenPair, &FeasibilitySpec) -> Result<()>,
    {
        let spec = FeasibilitySpec::from_channels(channels, None)?;
        if x0.dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                actual: x0.dim(),
            });
        }
        let mut x = x0.clone();
        let mut pair = self.power.run(&x);
        for t in 0..schedule.len() {
            self.perturb(&mut x, &pair, schedule.beta[t]);
            sweep_in_place(&mut x, &spec, schedule.lambda[t]);
            // Warm start from the previous dominant direction.
            pair = self.power.run_from(&x, pair.vector.as_slice());
            observe(t + 1, &x, &pair, &spec)?;
        }
        Ok((x, pair))
    }

    /// Full run with a per-iteration trace of feasibility loss (QoS only) and min-SNR.
    pub fn run(
        &self,
        x0: &HermitianMatrix,
        channels: &ChannelSet,
        schedule: &UnfoldedSchedule,
    ) -> Result<PocsBpOutput> {
        let mut trace = IterateTrace::default();
        let (x, pair) = self.iterate(x0, channels, schedule, |t, x, pair, spec| {
            trace.records.push(IterateRecord {
                iteration: t,
                feasibility_loss: feasibility_loss(x, spec),
                min_snr: Some(min_snr(&pair.vector, channels)?),
            });
            Ok(())
        })?;
        Ok(PocsBpOutput {
            x,
            beamformer: pair.vector,
            trace,
        })
    }

    /// Final beamformer only, starting from the zero matrix.
    pub fn beamformer(&self, channels: &ChannelSet, schedule: &UnfoldedSchedule) -> Result<ComplexVec> {
        let n = channels.config().n_antennas;
        let (_, pair) = self.iterate(&HermitianMatrix::zeros(n), channels, schedule, |_, _, _, _| Ok(()))?;
        Ok(pair.vector)
    }
}

/// Perturbed POCS with default settings; returns `w_T` and the min-SNR trace.
pub fn run_pocs_bp(
    x0: &HermitianMatrix,
    channels: &ChannelSet,
    schedule: &UnfoldedSchedule,
) -> Result<(ComplexVec, IterateTrace)> {
    let out = PocsBp::default().run(x0, channels, schedule)?;
    Ok((out.beamformer, out.trace))
}

/// Phase-normalized unit dominant eigenvector of `x`.
pub fn extract_beamformer(x: &HermitianMatrix) -> Result<ComplexVec> {
    if x.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    Ok(PowerMethod::default().run(x).vector)
}
