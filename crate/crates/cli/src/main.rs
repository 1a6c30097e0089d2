use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pocs_unfold::harness::{self, CompareOptions};
use pocs_unfold::train::{load_checkpoint, save_checkpoint, train, Checkpoint, TrainConfig};
use pocs_unfold::Error;

#[derive(Parser)]
#[command(
    name = "pocs-unfold",
    version,
    about = "Learned POCS schedules for multicast beamforming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a schedule and write a checkpoint.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Training log CSV (defaults to <out>.log.csv).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run a checkpoint on held-out channel realizations.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Iterations to run; the schedule holds its last entry past its depth.
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a checkpoint against the baselines.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        horizon: usize,
        #[arg(long, default_value_t = 5000)]
        rand_samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Retrain across softmin sharpness values.
    SweepBeta {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a checkpoint's schedule.
    Show {
        #[arg(long)]
        checkpoint: PathBuf,
    },
}

/// A failure with its exit code and stable kind tag.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            kind,
            message: message.into(),
        }
    }

    fn input(path: &Path, e: std::io::Error) -> Self {
        Self::new(3, "unreadable-input", format!("{}: {e}", path.display()))
    }

    fn output(e: Error) -> Self {
        match e {
            Error::Io(io) => Self::new(7, "output-io", io.to_string()),
            other => other.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Io(_) => (3, "unreadable-input"),
            Error::InvalidConfig(_) => (4, "invalid-config"),
            Error::CheckpointVersion { .. } | Error::CheckpointHash { .. } | Error::CheckpointMalformed(_) => {
                (5, "invalid-checkpoint")
            }
            Error::NonFinite(_) => (6, "non-finite"),
            _ => (1, "internal"),
        };
        Self::new(code, kind, e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_config(path: &Path) -> Outcome<TrainConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(path, e))?;
    Ok(TrainConfig::from_toml_str(&text)?)
}

fn read_checkpoint(path: &Path) -> Outcome<Checkpoint> {
    if let Err(e) = std::fs::metadata(path) {
        return Err(Failure::input(path, e));
    }
    Ok(load_checkpoint(path)?)
}

fn write_csv(path: &Path, provenance: &str, header: &[&str], rows: &[String]) -> Outcome<()> {
    harness::write_csv(path, provenance, header, rows).map_err(Failure::output)
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Train { config, out, log } => {
            let cfg = read_config(&config)?;
            let outcome = train(&cfg)?;
            save_checkpoint(&out, &Checkpoint::new(outcome.schedule, cfg.clone())).map_err(Failure::output)?;
            let log_path = log.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".log.csv");
                PathBuf::from(p)
            });
            write_csv(
                &log_path,
                &harness::provenance_line(&cfg, cfg.seed),
                &harness::TRAIN_LOG_HEADER,
                &harness::train_log_rows(&outcome.log),
            )
        }
        Command::Eval {
            checkpoint,
            realizations,
            seed,
            iterations,
            out,
        } => {
            let ck = read_checkpoint(&checkpoint)?;
            let rows = harness::eval_checkpoint(&ck, realizations, seed, iterations)?;
            let rows: Vec<String> = rows.iter().map(|r| r.to_csv()).collect();
            write_csv(
                &out,
                &harness::provenance_line(&ck.train_config, seed),
                &harness::EVAL_HEADER,
                &rows,
            )
        }
        Command::Compare {
            config,
            checkpoint,
            realizations,
            seed,
            horizon,
            rand_samples,
            out,
        } => {
            let cfg = read_config(&config)?;
            let ck = read_checkpoint(&checkpoint)?;
            if (cfg.n_antennas, cfg.n_users) != (ck.train_config.n_antennas, ck.train_config.n_users) {
                return Err(Failure::new(
                    4,
                    "invalid-config",
                    "config and checkpoint disagree on n_antennas or n_users",
                ));
            }
            let opts = CompareOptions {
                realizations,
                seed,
                horizon,
                rand_samples,
                ..CompareOptions::default()
            };
            let rows = harness::compare(&cfg, &ck, &opts)?;
            let rows: Vec<String> = rows.iter().map(|r| r.to_csv()).collect();
            write_csv(
                &out,
                &harness::provenance_line(&cfg, seed),
                &harness::COMPARE_HEADER,
                &rows,
            )
        }
        Command::SweepBeta {
            config,
            betas,
            realizations,
            seed,
            out,
        } => {
            let cfg = read_config(&config)?;
            let rows = harness::sweep_softmin_beta(&cfg, &betas, realizations, seed)?;
            let rows: Vec<String> = rows.iter().map(|r| r.to_csv()).collect();
            write_csv(
                &out,
                &harness::provenance_line(&cfg, seed),
                &harness::SWEEP_HEADER,
                &rows,
            )
        }
        Command::Show { checkpoint } => {
            let ck = read_checkpoint(&checkpoint)?;
            let cfg = &ck.train_config;
            println!(
                "# algorithm={} depth={} n_antennas={} n_users={} seed={}",
                cfg.algorithm.as_str(),
                ck.schedule.len(),
                cfg.n_antennas,
                cfg.n_users,
                cfg.seed
            );
            print!("{}", harness::schedule_table(&ck.schedule));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.exit_code() == 0 {
                e.print().ok();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let detail = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {detail}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let message = f.message.replace('\n', " ");
            eprintln!("error[{}]: {message}", f.kind);
            ExitCode::from(f.code)
        }
    }
}
