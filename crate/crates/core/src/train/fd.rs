//! Central finite-difference gradients.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// `(f(p + h e_i) - f(p - h e_i)) / 2h` for every coordinate.
///
/// The `2 * len` evaluations run on the rayon pool. Each evaluation is
/// independent, so the result does not depend on the worker count.
pub fn fd_grad<F>(loss_fn: F, params: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig("finite-difference step must be positive".into()));
    }
    (0..params.len())
        .into_par_iter()
        .map(|i| {
            let mut p = params.to_vec();
            p[i] = params[i] + h;
            let up = loss_fn(&p);
            p[i] = params[i] - h;
            let down = loss_fn(&p);
            if !up.is_finite() || !down.is_finite() {
                return Err(Error::NonFinite(format!(
                    "loss at coordinate {i} (+h: {up}, -h: {down})"
                )));
            }
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}
