use serde::{Deserialize, Serialize};

use super::adam::AdamHyper;
use crate::error::{Error, Result};
use crate::hermitian::SystemConfig;

/// Which unfolded algorithm a configuration trains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Unfolded POCS with a trainable relaxation per iteration; needs a power bound.
    DuPocs,
    /// Unfolded POCS with bounded perturbation; trains relaxation and perturbation.
    DuPocsBp,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::DuPocs => "du_pocs",
            Algorithm::DuPocsBp => "du_pocs_bp",
        }
    }
}

fn default_learning_rate() -> f64 {
    0.003
}
fn default_fd_step() -> f64 {
    1e-4
}
fn default_softmin_beta() -> f64 {
    3.0
}
fn default_init_lambda() -> f64 {
    1.0
}
fn default_init_beta() -> f64 {
    0.9f64.sqrt()
}
fn default_sigma() -> f64 {
    1.0
}
fn default_gamma() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_adam_beta1() -> f64 {
    AdamHyper::default().beta1
}
fn default_adam_beta2() -> f64 {
    AdamHyper::default().beta2
}
fn default_adam_eps() -> f64 {
    AdamHyper::default().eps
}

/// Training configuration. This is also the flat key-value experiment file
/// read by the CLI: unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub n_antennas: usize,
    pub n_users: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_bound: Option<f64>,
    pub depth: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    pub n_batches: usize,
    pub batch_size: usize,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_softmin_beta")]
    pub softmin_beta: f64,
    #[serde(default = "default_init_lambda")]
    pub init_lambda: f64,
    #[serde(default = "default_init_beta")]
    pub init_beta: f64,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub incremental: bool,
    #[serde(default = "default_adam_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "default_adam_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_adam_eps")]
    pub adam_eps: f64,
}

impl TrainConfig {
    /// Unfolded POCS feasibility experiment: N = 5, K = 15, P = 0.5, T = 20,
    /// 1000 mini-batches of 30, trained in one stage.
    pub fn du_pocs_reference() -> Self {
        Self {
            algorithm: Algorithm::DuPocs,
            n_antennas: 5,
            n_users: 15,
            gamma: 1.0,
            sigma: 1.0,
            power_bound: Some(0.5),
            depth: 20,
            learning_rate: 0.003,
            n_batches: 1000,
            batch_size: 30,
            fd_step: default_fd_step(),
            softmin_beta: default_softmin_beta(),
            init_lambda: 1.0,
            init_beta: 0.0,
            seed: 2020,
            incremental: false,
            adam_beta1: default_adam_beta1(),
            adam_beta2: default_adam_beta2(),
            adam_eps: default_adam_eps(),
        }
    }

    /// Desk-scale perturbed POCS preset: N = 8, K = 12, T = 15, incremental,
    /// 200 mini-batches of 10 per depth.
    pub fn du_pocs_bp_desk() -> Self {
        Self {
            algorithm: Algorithm::DuPocsBp,
            n_antennas: 8,
            n_users: 12,
            power_bound: None,
            depth: 15,
            n_batches: 200,
            batch_size: 10,
            init_lambda: 1.0,
            init_beta: default_init_beta(),
            incremental: true,
            ..Self::du_pocs_reference()
        }
    }

    /// Full-scale perturbed POCS preset: N = 30, T = 35, 1000 mini-batches of
    /// 30 per depth. Long-running.
    pub fn du_pocs_bp_full(n_users: usize) -> Self {
        Self {
            n_antennas: 30,
            n_users,
            depth: 35,
            n_batches: 1000,
            batch_size: 30,
            ..Self::du_pocs_bp_desk()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn problem(&self) -> SystemConfig {
        SystemConfig {
            n_antennas: self.n_antennas,
            n_users: self.n_users,
            noise_std: self.sigma,
            snr_target: self.gamma,
        }
    }

    pub fn adam(&self) -> AdamHyper {
        AdamHyper {
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.problem().validate()?;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.depth == 0 {
            return bad("depth must be >= 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return bad("fd_step must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1");
        }
        for (name, v) in [
            ("softmin_beta", self.softmin_beta),
            ("init_lambda", self.init_lambda),
            ("init_beta", self.init_beta),
            ("adam_eps", self.adam_eps),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("adam moment rates must lie in [0, 1)");
        }
        match (self.algorithm, self.power_bound) {
            (Algorithm::DuPocs, None) => bad("du_pocs requires power_bound"),
            (_, Some(p)) if !(p > 0.0 && p.is_finite()) => bad("power_bound must be positive"),
            _ => Ok(()),
        }
    }
}
