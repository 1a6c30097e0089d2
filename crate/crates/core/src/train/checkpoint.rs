//! Versioned, hash-protected JSON checkpoints for trained schedules.
//!
//! The file is a pretty-printed JSON object:
//!
//! ```text
//! {
//!   "format": "pocs-unfold-checkpoint",
//!   "version": 1,
//!   "content_hash": "<sha256 of the compact body>",
//!   "body": { "depth": T, "lambda": [...], "beta": [...], "seed": s, "train_config": {...} }
//! }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed with exact
//! rounding, so a save/load cycle reproduces every parameter bit-for-bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::TrainConfig;
use crate::error::{Error, Result};
use crate::unfolded::UnfoldedSchedule;

pub const CHECKPOINT_VERSION: u32 = 1;
const FORMAT_TAG: &str = "pocs-unfold-checkpoint";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Body {
    depth: usize,
    lambda: Vec<f64>,
    beta: Vec<f64>,
    seed: u64,
    train_config: TrainConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    format: String,
    version: u32,
    content_hash: String,
    body: Body,
}

/// A trained schedule with the configuration that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub schedule: UnfoldedSchedule,
    pub train_config: TrainConfig,
}

impl Checkpoint {
    pub fn new(schedule: UnfoldedSchedule, train_config: TrainConfig) -> Self {
        Self { schedule, train_config }
    }

    fn body(&self) -> Body {
        Body {
            depth: self.schedule.len(),
            lambda: self.schedule.lambda().to_vec(),
            beta: self.schedule.beta().to_vec(),
            seed: self.train_config.seed,
            train_config: self.train_config.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let body = self.body();
        let env = Envelope {
            format: FORMAT_TAG.to_string(),
            version: CHECKPOINT_VERSION,
            content_hash: body_hash(&body),
            body,
        };
        let mut text = serde_json::to_string_pretty(&env).expect("checkpoint serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::CheckpointMalformed(e.to_string()))?;
        match raw.get("format").and_then(|f| f.as_str()) {
            Some(FORMAT_TAG) => {}
            other => return Err(Error::CheckpointMalformed(format!("unexpected format tag {other:?}"))),
        }
        let version = raw
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::CheckpointMalformed("missing version".into()))?;
        if version != CHECKPOINT_VERSION as u64 {
            return Err(Error::CheckpointVersion {
                found: u32::try_from(version).unwrap_or(u32::MAX),
                expected: CHECKPOINT_VERSION,
            });
        }
        let env: Envelope = serde_json::from_value(raw).map_err(|e| Error::CheckpointMalformed(e.to_string()))?;
        let computed = body_hash(&env.body);
        if computed != env.content_hash {
            return Err(Error::CheckpointHash {
                stored: env.content_hash,
                computed,
            });
        }
        let Body {
            depth,
            lambda,
            beta,
            seed,
            train_config,
        } = env.body;
        if depth != lambda.len() {
            return Err(Error::CheckpointMalformed(format!(
                "depth {depth} but {} lambda entries",
                lambda.len()
            )));
        }
        if seed != train_config.seed {
            return Err(Error::CheckpointMalformed("seed disagrees with train_config".into()));
        }
        train_config
            .validate()
            .map_err(|e| Error::CheckpointMalformed(e.to_string()))?;
        let schedule = UnfoldedSchedule::new(lambda, beta).map_err(|e| Error::CheckpointMalformed(e.to_string()))?;
        Ok(Self { schedule, train_config })
    }
}

fn body_hash(body: &Body) -> String {
    let bytes = serde_json::to_vec(body).expect("checkpoint body serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    std::fs::write(path, checkpoint.to_json_string())?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    Checkpoint::from_json_str(&std::fs::read_to_string(path)?)
}
