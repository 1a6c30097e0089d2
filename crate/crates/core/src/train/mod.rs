//! Unsupervised training of unfolded schedules.
//!
//! Every mini-batch is a set of freshly sampled channel realizations. The
//! loss is evaluated only at the unfolded output, its gradient with respect
//! to the schedule is estimated by central finite differences, and Adam
//! applies the update. For the perturbed algorithm the depth grows one
//! iteration at a time, each stage starting from the previous stage's
//! trained values.

mod adam;
mod checkpoint;
mod config;
mod fd;

use std::time::Instant;

use rayon::prelude::*;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use config::{Algorithm, TrainConfig};
pub use fd::fd_grad;

use crate::error::{Error, Result};
use crate::hermitian::{sample_channels_indexed, ChannelSet, HermitianMatrix};
use crate::objective::{feasibility_loss, mmf_loss, SoftminWeight};
use crate::projection::FeasibilitySpec;
use crate::unfolded::{pocs_final, PocsBp, UnfoldedSchedule};

/// Channel streams at or above this index are never used for training, so
/// evaluation pools drawn from them are disjoint from every training batch.
pub const HOLDOUT_STREAM_BASE: u64 = 1 << 63;

/// Size of the fixed evaluation pool used for reporting.
pub const HOLDOUT_REALIZATIONS: usize = 50;

/// Channel set `r` of the held-out pool for `seed`.
pub fn holdout_channels(cfg: &TrainConfig, seed: u64, r: usize) -> Result<ChannelSet> {
    sample_channels_indexed(&cfg.problem(), seed, HOLDOUT_STREAM_BASE + r as u64)
}

/// One line of the training log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainLogEntry {
    pub depth: usize,
    pub batch_index: usize,
    /// Mini-batch loss at the parameters before this batch's update.
    pub mean_loss: f64,
    pub wall_time_ms: u128,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub schedule: UnfoldedSchedule,
    pub log: Vec<TrainLogEntry>,
}

/// A mini-batch: the data behind one deterministic loss function of the
/// schedule parameters.
trait BatchLoss: Sync {
    /// Loss of one sample for a schedule.
    fn sample_loss(&self, index: usize, schedule: &UnfoldedSchedule) -> f64;
    fn len(&self) -> usize;

    /// Mean over the batch, summed in sample order.
    fn mean(&self, schedule: &UnfoldedSchedule) -> f64 {
        let losses: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|i| self.sample_loss(i, schedule))
            .collect();
        losses.iter().sum::<f64>() / self.len() as f64
    }
}

struct FeasibilityBatch {
    specs: Vec<FeasibilitySpec>,
}

impl BatchLoss for FeasibilityBatch {
    fn sample_loss(&self, index: usize, schedule: &UnfoldedSchedule) -> f64 {
        let spec = &self.specs[index];
        let x = pocs_final(&HermitianMatrix::zeros(spec.dim()), spec, schedule.lambda());
        feasibility_loss(&x, spec)
    }

    fn len(&self) -> usize {
        self.specs.len()
    }
}

struct MmfBatch {
    channels: Vec<ChannelSet>,
    weight: SoftminWeight,
    engine: PocsBp,
}

impl BatchLoss for MmfBatch {
    fn sample_loss(&self, index: usize, schedule: &UnfoldedSchedule) -> f64 {
        let ch = &self.channels[index];
        self.engine
            .beamformer(ch, schedule)
            .and_then(|w| mmf_loss(&w, ch, self.weight))
            .unwrap_or(f64::NAN)
    }

    fn len(&self) -> usize {
        self.channels.len()
    }
}

/// Which parameters of the full schedule a stage may move.
#[derive(Clone, Copy)]
enum Trainable {
    LambdaOnly,
    LambdaAndBeta,
}

fn sample_batch(cfg: &TrainConfig, stage: usize, batch: usize) -> Result<Vec<ChannelSet>> {
    let problem = cfg.problem();
    (0..cfg.batch_size)
        .map(|i| {
            let stream = ((stage * cfg.n_batches + batch) * cfg.batch_size + i) as u64;
            sample_channels_indexed(&problem, cfg.seed, stream)
        })
        .collect()
}

/// Trains the first `depth` iterations of `schedule` in place over
/// `cfg.n_batches` mini-batches. Entries past `depth` are never touched.
fn train_stage<B, M>(
    cfg: &TrainConfig,
    schedule: &mut UnfoldedSchedule,
    depth: usize,
    stage: usize,
    trainable: Trainable,
    make_batch: M,
    log: &mut Vec<TrainLogEntry>,
) -> Result<()>
where
    B: BatchLoss,
    M: Fn(Vec<ChannelSet>) -> Result<B>,
{
    let full = schedule.to_params();
    let t_total = schedule.len();
    let n_active = match trainable {
        Trainable::LambdaOnly => depth,
        Trainable::LambdaAndBeta => 2 * depth,
    };
    // Active parameters: lambda_1..lambda_d then (optionally) beta_1..beta_d.
    let gather = |full: &[f64]| -> Vec<f64> {
        let mut p = full[..depth].to_vec();
        if let Trainable::LambdaAndBeta = trainable {
            p.extend_from_slice(&full[t_total..t_total + depth]);
        }
        p
    };
    let scatter = |active: &[f64]| -> UnfoldedSchedule {
        let mut lambda = full[..depth].to_vec();
        let mut beta = full[t_total..t_total + depth].to_vec();
        lambda.copy_from_slice(&active[..depth]);
        if let Trainable::LambdaAndBeta = trainable {
            beta.copy_from_slice(&active[depth..]);
        }
        UnfoldedSchedule::new(lambda, beta).expect("active parameters are finite")
    };

    let mut params = gather(&full);
    let mut adam = AdamState::new(n_active, cfg.adam());
    let start = Instant::now();
    for batch_index in 0..cfg.n_batches {
        let batch = make_batch(sample_batch(cfg, stage, batch_index)?)?;
        let mean_loss = batch.mean(&scatter(&params));
        if !mean_loss.is_finite() {
            return Err(Error::NonFinite(format!(
                "mini-batch loss (seed {}, depth {depth}, batch {batch_index})",
                cfg.seed
            )));
        }
        let grad = fd_grad(
            |p| {
                if p.iter().all(|v| v.is_finite()) {
                    batch.mean(&scatter(p))
                } else {
                    f64::NAN
                }
            },
            &params,
            cfg.fd_step,
        )
        .map_err(|e| Error::NonFinite(format!("{e} (seed {}, depth {depth}, batch {batch_index})", cfg.seed)))?;
        adam.step(&mut params, &grad, cfg.learning_rate)?;
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "parameters after update (seed {}, depth {depth}, batch {batch_index})",
                cfg.seed
            )));
        }
        log.push(TrainLogEntry {
            depth,
            batch_index,
            mean_loss,
            wall_time_ms: start.elapsed().as_millis(),
        });
    }

    let trained = scatter(&params);
    let mut lambda = schedule.lambda().to_vec();
    let mut beta = schedule.beta().to_vec();
    lambda[..depth].copy_from_slice(trained.lambda());
    beta[..depth].copy_from_slice(trained.beta());
    *schedule = UnfoldedSchedule::new(lambda, beta)?;
    Ok(())
}

fn initial_schedule(cfg: &TrainConfig) -> Result<UnfoldedSchedule> {
    UnfoldedSchedule::constant(cfg.depth, cfg.init_lambda, cfg.init_beta)
}

/// Trains the per-iteration relaxations of unfolded POCS by minimizing the
/// mean feasibility loss of the final iterate.
pub fn train_du_pocs(cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let power = cfg
        .power_bound
        .ok_or_else(|| Error::InvalidConfig("du_pocs requires power_bound".into()))?;
    let mut schedule = initial_schedule(cfg)?;
    let mut log = Vec::new();
    let make_batch = |chans: Vec<ChannelSet>| -> Result<FeasibilityBatch> {
        let specs = chans
            .iter()
            .map(|c| FeasibilitySpec::from_channels(c, Some(power)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeasibilityBatch { specs })
    };
    if cfg.incremental {
        for d in 1..=cfg.depth {
            train_stage(
                cfg,
                &mut schedule,
                d,
                d - 1,
                Trainable::LambdaOnly,
                make_batch,
                &mut log,
            )?;
        }
    } else {
        train_stage(
            cfg,
            &mut schedule,
            cfg.depth,
            0,
            Trainable::LambdaOnly,
            make_batch,
            &mut log,
        )?;
    }
    Ok(TrainOutcome { schedule, log })
}

/// Trains relaxations and perturbation coefficients of unfolded POCS with
/// bounded perturbation by minimizing the negated softmin SNR of the output
/// beamformer; incrementally over depth when `cfg.incremental` is set.
pub fn train_du_pocs_bp(cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_du_pocs_bp_with(cfg, PocsBp::default())
}

pub fn train_du_pocs_bp_with(cfg: &TrainConfig, engine: PocsBp) -> Result<TrainOutcome> {
    cfg.validate()?;
    let mut schedule = initial_schedule(cfg)?;
    let mut log = Vec::new();
    let weight = SoftminWeight(cfg.softmin_beta);
    let make_batch = |channels: Vec<ChannelSet>| -> Result<MmfBatch> {
        Ok(MmfBatch {
            channels,
            weight,
            engine,
        })
    };
    if cfg.incremental {
        for d in 1..=cfg.depth {
            train_stage(
                cfg,
                &mut schedule,
                d,
                d - 1,
                Trainable::LambdaAndBeta,
                make_batch,
                &mut log,
            )?;
        }
    } else {
        train_stage(
            cfg,
            &mut schedule,
            cfg.depth,
            0,
            Trainable::LambdaAndBeta,
            make_batch,
            &mut log,
        )?;
    }
    Ok(TrainOutcome { schedule, log })
}

/// Dispatches on `cfg.algorithm`.
pub fn train(cfg: &TrainConfig) -> Result<TrainOutcome> {
    match cfg.algorithm {
        Algorithm::DuPocs => train_du_pocs(cfg),
        Algorithm::DuPocsBp => train_du_pocs_bp(cfg),
    }
}

/// Mean mini-batch loss for `schedule` on batch `batch` of the given stage;
/// exposed for gradient diagnostics.
pub fn minibatch_loss(cfg: &TrainConfig, schedule: &UnfoldedSchedule, stage: usize, batch: usize) -> Result<f64> {
    minibatch_loss_with(cfg, PocsBp::default(), schedule, stage, batch)
}

/// [`minibatch_loss`] with an explicit perturbed-POCS engine (ignored for
/// `du_pocs`).
pub fn minibatch_loss_with(
    cfg: &TrainConfig,
    engine: PocsBp,
    schedule: &UnfoldedSchedule,
    stage: usize,
    batch: usize,
) -> Result<f64> {
    let chans = sample_batch(cfg, stage, batch)?;
    Ok(match cfg.algorithm {
        Algorithm::DuPocs => {
            let power = cfg
                .power_bound
                .ok_or_else(|| Error::InvalidConfig("du_pocs requires power_bound".into()))?;
            let specs = chans
                .iter()
                .map(|c| FeasibilitySpec::from_channels(c, Some(power)))
                .collect::<Result<Vec<_>>>()?;
            FeasibilityBatch { specs }.mean(schedule)
        }
        Algorithm::DuPocsBp => MmfBatch {
            channels: chans,
            weight: SoftminWeight(cfg.softmin_beta),
            engine,
        }
        .mean(schedule),
    })
}
