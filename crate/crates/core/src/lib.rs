//! Multicast beamforming by projections onto convex sets (POCS) with bounded
//! perturbation, and deep-unfolded variants whose per-iteration parameters
//! are learned without labels.
//!
//! The crate is organized bottom-up:
//!
//! - [`hermitian`]: complex vectors, Hermitian matrices, channel sampling
//! - [`projection`]: QoS and power half-spaces and their relaxed projections
//! - [`eigen`]: power iteration, the perturbation residual, a dense reference solver
//! - [`unfolded`]: POCS and perturbed-POCS engines driven by a per-iteration schedule
//! - [`objective`]: feasibility loss, softmin, min-SNR and the max-min-fair loss
//! - [`train`]: finite-difference gradients, Adam, incremental training, checkpoints
//! - [`baselines`]: hand-tuned schedule, randomized rounding, relaxation bound
//! - [`harness`]: experiment runners and CSV emission behind the CLI
//!
//! ```
//! use pocs_unfold::prelude::*;
//!
//! let cfg = SystemConfig::new(8, 12, 1.0, 1.0)?;
//! let channels = sample_channels(&cfg, 7)?;
//! let (w, trace) = run_pocs_bp(
//!     &HermitianMatrix::zeros(8),
//!     &channels,
//!     &reference_schedule(30)?,
//! )?;
//! assert_eq!(trace.len(), 30);
//! assert!(min_snr(&w, &channels)? > 0.0);
//! # Ok::<(), pocs_unfold::Error>(())
//! ```

pub mod baselines;
pub mod eigen;
mod error;
pub mod harness;
pub mod hermitian;
pub mod objective;
pub mod projection;
pub mod train;
pub mod unfolded;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::baselines::{rand_a, reference_schedule, sdp_bound_estimate, SdpBound};
    pub use crate::eigen::{eig_oracle, power_method, residual_component, EigenPair, PowerMethod};
    pub use crate::hermitian::{
        sample_channels, sample_channels_indexed, ChannelSet, ComplexVec, HermitianMatrix, SystemConfig,
    };
    pub use crate::objective::{feasibility_loss, min_snr, mmf_loss, softmin, to_db, SoftminWeight};
    pub use crate::projection::{project_power, project_qos, relax, FeasibilitySpec, PowerHalfSpace, QosHalfSpace};
    pub use crate::train::{
        fd_grad, load_checkpoint, save_checkpoint, train, train_du_pocs, train_du_pocs_bp, Algorithm, Checkpoint,
        TrainConfig,
    };
    pub use crate::unfolded::{
        extract_beamformer, pocs_sweep, run_pocs, run_pocs_bp, IterateTrace, PocsBp, UnfoldedSchedule,
    };
    pub use crate::{Error, Result};
}

// The guide's code listings are compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/hilbert-space.md")]
    mod hilbert_space {}
    #[doc = include_str!("../../../book/src/pocs.md")]
    mod pocs {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/unfolding.md")]
    mod unfolding {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
