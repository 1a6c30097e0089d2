//! Metric projections onto the QoS and power half-spaces, and the relaxed
//! operator `T(X) = X + lambda (P(X) - X)`.

use crate::error::{Error, Result};
use crate::hermitian::{ChannelSet, HermitianMatrix};

/// `C_k = { X : <X, Q> >= gamma }` for a rank-one PSD `Q = h h^H`.
#[derive(Clone, Debug)]
pub struct QosHalfSpace {
    q: HermitianMatrix,
    gamma: f64,
    q_norm_sqr: f64,
}

impl QosHalfSpace {
    pub fn new(q: HermitianMatrix, gamma: f64) -> Result<Self> {
        let q_norm_sqr = q.inner_unchecked(&q);
        if q_norm_sqr == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig("gamma must be positive".into()));
        }
        Ok(Self { q, gamma, q_norm_sqr })
    }

    pub fn q(&self) -> &HermitianMatrix {
        &self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `gamma - <X, Q>`; positive when the constraint is violated.
    pub fn gap(&self, x: &HermitianMatrix) -> f64 {
        self.gamma - x.inner_unchecked(&self.q)
    }

    pub fn contains(&self, x: &HermitianMatrix) -> bool {
        self.gap(x) <= 0.0
    }

    /// Applies `T^lambda` in place.
    pub(crate) fn relax_in_place(&self, x: &mut HermitianMatrix, lambda: f64) {
        let gap = self.gap(x);
        if gap > 0.0 {
            x.add_scaled(lambda * gap / self.q_norm_sqr, &self.q);
        }
    }
}

/// `B_P = { X : tr(X) <= P }` on `N x N` matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerHalfSpace {
    bound: f64,
    dim: usize,
}

impl PowerHalfSpace {
    pub fn new(bound: f64, dim: usize) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidConfig("power bound must be positive".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be >= 1".into()));
        }
        Ok(Self { bound, dim })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `tr(X) - P`; positive when violated.
    pub fn excess(&self, x: &HermitianMatrix) -> f64 {
        x.trace() - self.bound
    }

    pub fn contains(&self, x: &HermitianMatrix) -> bool {
        self.excess(x) <= 0.0
    }

    pub(crate) fn relax_in_place(&self, x: &mut HermitianMatrix, lambda: f64) {
        let excess = self.excess(x);
        if excess > 0.0 {
            x.add_identity(-lambda * excess / self.dim as f64);
        }
    }
}

/// The constraint family `S = (intersection of C_k) ∩ B_P`; the power
/// half-space is optional.
#[derive(Clone, Debug)]
pub struct FeasibilitySpec {
    qos: Vec<QosHalfSpace>,
    power: Option<PowerHalfSpace>,
}

impl FeasibilitySpec {
    pub fn new(qos: Vec<QosHalfSpace>, power: Option<PowerHalfSpace>) -> Result<Self> {
        let Some(first) = qos.first() else {
            return Err(Error::Empty("QoS constraint list"));
        };
        let n = first.q.dim();
        if let Some(bad) = qos.iter().find(|c| c.q.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.q.dim(),
            });
        }
        if let Some(p) = power {
            if p.dim != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: p.dim,
                });
            }
        }
        Ok(Self { qos, power })
    }

    /// One QoS half-space per user (`Q_k = h_k h_k^H`, threshold `gamma`),
    /// plus `B_P` when `power_bound` is given.
    pub fn from_channels(channels: &ChannelSet, power_bound: Option<f64>) -> Result<Self> {
        let cfg = channels.config();
        let qos = channels
            .channels()
            .iter()
            .map(|h| QosHalfSpace::new(HermitianMatrix::outer(h)?, cfg.snr_target))
            .collect::<Result<Vec<_>>>()?;
        let power = power_bound
            .map(|p| PowerHalfSpace::new(p, cfg.n_antennas))
            .transpose()?;
        Self::new(qos, power)
    }

    pub fn qos(&self) -> &[QosHalfSpace] {
        &self.qos
    }

    pub fn power(&self) -> Option<&PowerHalfSpace> {
        self.power.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.qos[0].q.dim()
    }

    pub fn without_power(&self) -> Self {
        Self {
            qos: self.qos.clone(),
            power: None,
        }
    }

    pub fn with_power(&self, power: PowerHalfSpace) -> Self {
        Self {
            qos: self.qos.clone(),
            power: Some(power),
        }
    }

    pub fn contains(&self, x: &HermitianMatrix) -> bool {
        self.qos.iter().all(|c| c.contains(x)) && self.power.is_none_or(|p| p.contains(x))
    }
}

/// Metric projection onto a QoS half-space.
pub fn project_qos(x: &HermitianMatrix, c: &QosHalfSpace) -> Result<HermitianMatrix> {
    check_dim(x.dim(), c.q.dim())?;
    let mut out = x.clone();
    c.relax_in_place(&mut out, 1.0);
    Ok(out)
}

/// Metric projection onto the power half-space; only the diagonal moves.
pub fn project_power(x: &HermitianMatrix, b: &PowerHalfSpace) -> Result<HermitianMatrix> {
    check_dim(x.dim(), b.dim)?;
    let mut out = x.clone();
    b.relax_in_place(&mut out, 1.0);
    Ok(out)
}

/// `X + lambda (PX - X)`.
pub fn relax(x: &HermitianMatrix, px: &HermitianMatrix, lambda: f64) -> Result<HermitianMatrix> {
    let mut out = x.clone();
    out.add_scaled(lambda, &px.sub(x)?);
    Ok(out)
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}
