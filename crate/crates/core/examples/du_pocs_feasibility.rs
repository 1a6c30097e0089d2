//! Trains unfolded POCS on the N = 5, K = 15, P = 0.5 feasibility problem and
//! reports how quickly held-out problems become feasible.
//!
//! cargo run --release --example du_pocs_feasibility

use std::time::Instant;

use pocs_unfold::prelude::*;
use pocs_unfold::train::{holdout_channels, HOLDOUT_REALIZATIONS};

const CAP: usize = 5000;

fn iterations_to_feasible(spec: &FeasibilitySpec, lambdas: &[f64]) -> Option<usize> {
    let (_, trace) = run_pocs(&HermitianMatrix::zeros(spec.dim()), spec, lambdas, true).ok()?;
    trace.first_feasible()
}

fn main() -> pocs_unfold::Result<()> {
    let cfg = TrainConfig::du_pocs_reference();
    let start = Instant::now();
    let outcome = train(&cfg)?;
    println!("trained in {:.1}s", start.elapsed().as_secs_f64());
    println!("lambda = {:?}", outcome.schedule.lambda());
    let first = &outcome.log[..10];
    let last = &outcome.log[outcome.log.len() - 10..];
    let mean = |s: &[pocs_unfold::train::TrainLogEntry]| s.iter().map(|e| e.mean_loss).sum::<f64>() / s.len() as f64;
    println!("loss first10 {:.4} last10 {:.4}", mean(first), mean(last));

    let trained = outcome.schedule.extended(CAP);
    let fixed = vec![1.0; CAP];
    let mut trained_its = Vec::new();
    let mut fixed_its = Vec::new();
    for r in 0..HOLDOUT_REALIZATIONS {
        let ch = holdout_channels(&cfg, 1, r)?;
        let spec = FeasibilitySpec::from_channels(&ch, cfg.power_bound)?;
        trained_its.push(iterations_to_feasible(&spec, trained.lambda()));
        fixed_its.push(iterations_to_feasible(&spec, &fixed));
    }
    let within = trained_its.iter().filter(|t| t.is_some_and(|t| t <= cfg.depth)).count();
    let mean_its = trained_its.iter().map(|t| t.unwrap_or(CAP) as f64).sum::<f64>() / trained_its.len() as f64;
    let fixed_fail = fixed_its.iter().filter(|t| t.is_none()).count();
    println!(
        "trained: {within}/{} feasible within {}; mean iterations {mean_its:.2}",
        trained_its.len(),
        cfg.depth
    );
    println!("trained its {trained_its:?}");
    println!("lambda=1.0: {fixed_fail}/{} not feasible within {CAP}", fixed_its.len());
    println!("lambda=1.0 its {fixed_its:?}");
    Ok(())
}
