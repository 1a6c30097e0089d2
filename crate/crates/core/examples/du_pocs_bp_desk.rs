//! Trains unfolded POCS with bounded perturbation at N = 8, K = 12, T = 15
//! and compares it with the hand-tuned schedule on held-out channels.
//!
//! cargo run --release --example du_pocs_bp_desk [-- <n_users> <n_antennas> <depth> <n_batches> <batch_size>]

use std::time::Instant;

use pocs_unfold::harness::{convergence_iterations, mean_snr_curve_db, run_schedule};
use pocs_unfold::prelude::*;
use pocs_unfold::train::{holdout_channels, HOLDOUT_REALIZATIONS};

const HORIZON: usize = 300;

fn main() -> pocs_unfold::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let mut cfg = TrainConfig::du_pocs_bp_desk();
    if let [k, n, t, nb, bs] = args[..] {
        cfg = TrainConfig {
            n_users: k,
            n_antennas: n,
            depth: t,
            n_batches: nb,
            batch_size: bs,
            ..cfg
        };
    }
    let start = Instant::now();
    let outcome = train(&cfg)?;
    println!("trained in {:.1}s", start.elapsed().as_secs_f64());
    println!("lambda = {:?}", outcome.schedule.lambda());
    println!(
        "beta^2 = {:?}",
        outcome.schedule.beta().iter().map(|b| b * b).collect::<Vec<_>>()
    );

    let reference = reference_schedule(HORIZON)?;
    let mut trained = Vec::new();
    let mut hand = Vec::new();
    for r in 0..HOLDOUT_REALIZATIONS {
        let ch = holdout_channels(&cfg, 1, r)?;
        trained.push(run_schedule(&cfg, &outcome.schedule, &ch, HORIZON)?);
        hand.push(run_schedule(&cfg, &reference, &ch, HORIZON)?);
    }
    let (ct, ch) = (mean_snr_curve_db(&trained), mean_snr_curve_db(&hand));
    let t = cfg.depth;
    println!(
        "mean min-SNR at {t}: trained {:.3} dB, reference {:.3} dB",
        ct[t - 1],
        ch[t - 1]
    );
    println!(
        "mean min-SNR at {HORIZON}: trained {:.3} dB, reference {:.3} dB",
        ct[HORIZON - 1],
        ch[HORIZON - 1]
    );
    let mean = |v: Vec<usize>| v.iter().sum::<usize>() as f64 / v.len() as f64;
    println!(
        "mean convergence iteration (horizon {HORIZON}): trained {:.1}, reference {:.1}",
        mean(convergence_iterations(&trained)),
        mean(convergence_iterations(&hand))
    );
    for i in [1, 2, 5, 10, 15, 20, 30, 50, 100, 200, 300] {
        if i <= HORIZON {
            println!("  t={i:3} trained {:.3} reference {:.3}", ct[i - 1], ch[i - 1]);
        }
    }
    Ok(())
}
