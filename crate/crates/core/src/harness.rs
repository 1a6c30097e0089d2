//! Experiment runners and CSV emission behind the command-line tool.
//!
//! Every runner is a pure function of its inputs: realizations come from the
//! held-out channel streams of the given seed and rows are returned sorted,
//! so output files are byte-identical across runs and worker counts.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::baselines::{rand_a, reference_schedule, sdp_bound_estimate};
use crate::error::{Error, Result};
use crate::hermitian::{ChannelSet, HermitianMatrix};
use crate::objective::to_db;
use crate::projection::FeasibilitySpec;
use crate::train::{holdout_channels, train, Algorithm, Checkpoint, TrainConfig, TrainLogEntry};
use crate::unfolded::{
    convergence_iteration, run_pocs_tracked, IterateTrace, PocsBp, UnfoldedSchedule, CONVERGENCE_TOL_DB,
};

pub const TOOL_NAME: &str = "pocs-unfold";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// First 16 hex digits of the SHA-256 of the canonical config text.
pub fn config_hash(cfg: &TrainConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml_string().as_bytes());
    hex::encode(digest)[..16].to_string()
}

/// Provenance comment that opens every CSV file.
pub fn provenance_line(cfg: &TrainConfig, seed: u64) -> String {
    format!(
        "# {TOOL_NAME} {TOOL_VERSION} config_hash={} seed={seed}",
        config_hash(cfg)
    )
}

/// Writes `# provenance`, a header row, then `rows` (already comma-joined).
pub fn write_csv(path: &Path, provenance: &str, header: &[&str], rows: &[String]) -> Result<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 2));
    writeln!(text, "{provenance}").unwrap();
    writeln!(text, "{}", header.join(",")).unwrap();
    for row in rows {
        writeln!(text, "{row}").unwrap();
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

fn check_finite(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Runs the checkpoint's algorithm on one channel set for `iterations`
/// iterations (the schedule is held at its last entry past its depth).
pub fn run_schedule(
    cfg: &TrainConfig,
    schedule: &UnfoldedSchedule,
    channels: &ChannelSet,
    iterations: usize,
) -> Result<IterateTrace> {
    let schedule = schedule.extended(iterations).prefix(iterations)?;
    let zero = HermitianMatrix::zeros(cfg.n_antennas);
    match cfg.algorithm {
        Algorithm::DuPocs => {
            let spec = FeasibilitySpec::from_channels(channels, cfg.power_bound)?;
            let (_, trace) = run_pocs_tracked(&zero, &spec, schedule.lambda(), false, Some(channels))?;
            Ok(trace)
        }
        Algorithm::DuPocsBp => Ok(PocsBp::default().run(&zero, channels, &schedule)?.trace),
    }
}

/// One row of `eval` output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalRow {
    pub realization: usize,
    pub iteration: usize,
    pub feasibility_loss: f64,
    pub min_snr_db: f64,
}

pub const EVAL_HEADER: [&str; 4] = ["realization", "iteration", "feasibility_loss", "min_snr_db"];

impl EvalRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{}",
            self.realization, self.iteration, self.feasibility_loss, self.min_snr_db
        )
    }
}

/// Evaluates a trained checkpoint on `realizations` held-out channel sets.
pub fn eval_checkpoint(
    ck: &Checkpoint,
    realizations: usize,
    seed: u64,
    iterations: Option<usize>,
) -> Result<Vec<EvalRow>> {
    let cfg = &ck.train_config;
    let iterations = iterations.unwrap_or(ck.schedule.len());
    let per: Vec<Vec<EvalRow>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let ch = holdout_channels(cfg, seed, r)?;
            let trace = run_schedule(cfg, &ck.schedule, &ch, iterations)?;
            trace
                .records
                .iter()
                .map(|rec| {
                    Ok(EvalRow {
                        realization: r,
                        iteration: rec.iteration,
                        feasibility_loss: check_finite("feasibility loss", rec.feasibility_loss)?,
                        min_snr_db: rec.min_snr_db().unwrap_or(f64::NEG_INFINITY),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Settings for [`compare`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareOptions {
    pub realizations: usize,
    pub seed: u64,
    /// Iterations for the hand-tuned and fixed-relaxation baselines.
    pub horizon: usize,
    pub rand_samples: usize,
    pub bound_tol: f64,
    pub bound_iter_cap: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            realizations: crate::train::HOLDOUT_REALIZATIONS,
            seed: 1,
            horizon: 200,
            rand_samples: 5000,
            bound_tol: 1e-4,
            bound_iter_cap: 2000,
        }
    }
}

/// One row of `compare` output; `iteration` is 0 for non-iterative methods.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub realization: usize,
    pub iteration: usize,
    pub method: String,
    pub value_db: f64,
}

pub const COMPARE_HEADER: [&str; 4] = ["realization", "iteration", "method", "value_db"];

impl CompareRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{}",
            self.realization, self.iteration, self.method, self.value_db
        )
    }
}

pub const METHOD_TRAINED: &str = "trained";
pub const METHOD_REFERENCE: &str = "reference";
pub const METHOD_POCS_FIXED_19: &str = "pocs_lambda_1.9";
pub const METHOD_POCS_FIXED_10: &str = "pocs_lambda_1.0";
pub const METHOD_RAND_A: &str = "rand_a_sdp";
pub const METHOD_SDP_BOUND: &str = "sdp_bound";

fn trace_rows(r: usize, method: &str, trace: &IterateTrace) -> Result<Vec<CompareRow>> {
    trace
        .records
        .iter()
        .map(|rec| {
            Ok(CompareRow {
                realization: r,
                iteration: rec.iteration,
                method: method.to_string(),
                value_db: check_finite("min-SNR", rec.min_snr_db().unwrap_or(f64::NAN))
                    .or_else(|_| rec.min_snr_db().ok_or(Error::NonFinite("min-SNR".into())))?,
            })
        })
        .collect()
}

/// Evaluates the trained schedule against the baselines on shared
/// realizations: the hand-tuned perturbed schedule, unperturbed POCS with
/// fixed relaxation 1.9 and 1.0, randomized rounding of the relaxation
/// solution, and the relaxation bound itself.
pub fn compare(cfg: &TrainConfig, ck: &Checkpoint, opts: &CompareOptions) -> Result<Vec<CompareRow>> {
    let reference = reference_schedule(opts.horizon)?;
    let fixed = |lambda: f64| UnfoldedSchedule::constant(opts.horizon, lambda, 0.0);
    let (fixed_19, fixed_10) = (fixed(1.9)?, fixed(1.0)?);
    let per: Vec<Vec<CompareRow>> = (0..opts.realizations)
        .into_par_iter()
        .map(|r| {
            let ch = holdout_channels(cfg, opts.seed, r)?;
            let mut rows = Vec::new();
            let trained = run_schedule(&ck.train_config, &ck.schedule, &ch, ck.schedule.len())?;
            rows.extend(trace_rows(r, METHOD_TRAINED, &trained)?);
            let bp = PocsBp::default();
            let zero = HermitianMatrix::zeros(cfg.n_antennas);
            rows.extend(trace_rows(r, METHOD_REFERENCE, &bp.run(&zero, &ch, &reference)?.trace)?);
            rows.extend(trace_rows(
                r,
                METHOD_POCS_FIXED_19,
                &bp.run(&zero, &ch, &fixed_19)?.trace,
            )?);
            rows.extend(trace_rows(
                r,
                METHOD_POCS_FIXED_10,
                &bp.run(&zero, &ch, &fixed_10)?.trace,
            )?);

            let bound = sdp_bound_estimate(&ch, opts.bound_tol, opts.bound_iter_cap)?;
            let w = rand_a(&bound.x, &ch, opts.rand_samples, opts.seed ^ r as u64)?;
            let rand_snr = crate::objective::min_snr(&w, &ch)?;
            rows.push(CompareRow {
                realization: r,
                iteration: 0,
                method: METHOD_RAND_A.to_string(),
                value_db: check_finite("rand_a min-SNR", to_db(rand_snr))?,
            });
            rows.push(CompareRow {
                realization: r,
                iteration: 0,
                method: METHOD_SDP_BOUND.to_string(),
                value_db: check_finite("bound", to_db(bound.bound))?,
            });
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<CompareRow> = per.into_iter().flatten().collect();
    rows.sort_by(|a, b| (a.realization, a.iteration, &a.method).cmp(&(b.realization, b.iteration, &b.method)));
    Ok(rows)
}

/// Mean over realizations of the per-iteration min-SNR (linear average,
/// reported in dB).
pub fn mean_snr_curve_db(traces: &[IterateTrace]) -> Vec<f64> {
    let len = traces.iter().map(|t| t.len()).min().unwrap_or(0);
    (0..len)
        .map(|i| {
            let sum: f64 = traces.iter().map(|t| t.records[i].min_snr.unwrap_or(0.0)).sum();
            to_db(sum / traces.len() as f64)
        })
        .collect()
}

/// Per-realization iterations until the min-SNR curve stays within
/// [`CONVERGENCE_TOL_DB`] of its final value.
pub fn convergence_iterations(traces: &[IterateTrace]) -> Vec<usize> {
    traces
        .iter()
        .map(|t| convergence_iteration(&t.min_snr_db(), CONVERGENCE_TOL_DB).unwrap_or(0))
        .collect()
}

/// One row of `sweep-beta` output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub softmin_beta: f64,
    pub iteration: usize,
    pub mean_min_snr_db: f64,
}

pub const SWEEP_HEADER: [&str; 3] = ["softmin_beta", "iteration", "mean_min_snr_db"];

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!("{},{},{}", self.softmin_beta, self.iteration, self.mean_min_snr_db)
    }
}

/// Retrains at every softmin sharpness in `betas` and records the mean
/// min-SNR curve over `realizations` held-out channel sets.
pub fn sweep_softmin_beta(cfg: &TrainConfig, betas: &[f64], realizations: usize, seed: u64) -> Result<Vec<SweepRow>> {
    if cfg.algorithm != Algorithm::DuPocsBp {
        return Err(Error::InvalidConfig(
            "sweep-beta requires algorithm = du_pocs_bp".into(),
        ));
    }
    let mut rows = Vec::new();
    for &beta in betas {
        let run_cfg = TrainConfig {
            softmin_beta: beta,
            ..cfg.clone()
        };
        let outcome = train(&run_cfg)?;
        let traces = (0..realizations)
            .into_par_iter()
            .map(|r| {
                let ch = holdout_channels(cfg, seed, r)?;
                run_schedule(&run_cfg, &outcome.schedule, &ch, outcome.schedule.len())
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, v) in mean_snr_curve_db(&traces).into_iter().enumerate() {
            rows.push(SweepRow {
                softmin_beta: beta,
                iteration: i + 1,
                mean_min_snr_db: check_finite("mean min-SNR", v)?,
            });
        }
    }
    Ok(rows)
}

pub const TRAIN_LOG_HEADER: [&str; 4] = ["depth", "batch_index", "mean_loss", "wall_time_ms"];

pub fn train_log_rows(log: &[TrainLogEntry]) -> Vec<String> {
    log.iter()
        .map(|e| format!("{},{},{},{}", e.depth, e.batch_index, e.mean_loss, e.wall_time_ms))
        .collect()
}

/// `t,lambda,beta` table of a schedule, header first.
pub fn schedule_table(schedule: &UnfoldedSchedule) -> String {
    let mut out = String::from("t,lambda,beta\n");
    for (t, (l, b)) in schedule.lambda().iter().zip(schedule.beta()).enumerate() {
        writeln!(out, "{},{l},{b}", t + 1).unwrap();
    }
    out
}
