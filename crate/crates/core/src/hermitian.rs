//! Complex vectors, Hermitian matrices and channel sampling.
//!
//! Hermitian matrices form a real Hilbert space under `<X, Y> = Re tr(XY)`.
//! Every algorithm in this crate moves through that space, so the matrix type
//! here only carries the handful of operations those algorithms need.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A length-`N` complex column vector (channel, beamformer or eigenvector).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVec(Vec<Complex64>);

impl ComplexVec {
    /// Wraps `entries`, rejecting empty or non-finite input.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("complex vector"));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("complex vector entry".into()));
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// The `i`-th standard basis vector of length `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![ZERO; n];
        v[i] = ONE;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    /// `self^H other`.
    pub fn dot(&self, other: &ComplexVec) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, c: Complex64) -> ComplexVec {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    /// Unit-norm copy; errors on the zero vector.
    pub fn normalized(&self) -> Result<ComplexVec> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Rotates the global phase so the first entry of largest modulus is real
    /// and nonnegative. Ties go to the lowest index.
    pub fn phase_normalized(&self) -> ComplexVec {
        let mut best = 0;
        let mut best_mod = -1.0;
        for (i, z) in self.0.iter().enumerate() {
            let m = z.norm_sqr();
            if m > best_mod {
                best_mod = m;
                best = i;
            }
        }
        let pivot = self.0[best];
        if pivot == ZERO {
            return self.clone();
        }
        let rot = pivot.conj() / pivot.norm();
        Self(self.0.iter().map(|z| z * rot).collect())
    }
}

impl std::ops::Index<usize> for ComplexVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// A dense `N x N` complex Hermitian matrix, stored row-major.
///
/// Constructors that accept arbitrary entries symmetrize them as
/// `(A + A^H) / 2`; every arithmetic operation below maps Hermitian inputs to
/// exactly Hermitian outputs, so the invariant holds bit-for-bit afterwards.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HermitianMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, symmetrizing them.
    pub fn from_row_major(n: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(entries[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let z = (entries[i * n + j] + entries[j * n + i].conj()) * 0.5;
                data[i * n + j] = z;
                data[j * n + i] = z.conj();
            }
        }
        Ok(Self { n, data })
    }

    /// `Q = h h^H`. Errors on the zero vector.
    pub fn outer(h: &ComplexVec) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(Self::rank_one(h.as_slice(), 1.0))
    }

    /// `c * u u^H`, built so the lower triangle is the exact conjugate of the upper.
    pub(crate) fn rank_one(u: &[Complex64], c: f64) -> Self {
        let n = u.len();
        let mut m = Self::zeros(n);
        m.add_rank_one(c, u);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(())
    }

    /// `<X, Y> = Re tr(XY)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.inner_unchecked(other))
    }

    // For Hermitian Y, tr(XY) = sum_ij X_ij conj(Y_ij).
    pub(crate) fn inner_unchecked(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Frobenius norm induced by [`HermitianMatrix::inner`].
    pub fn fro_norm(&self) -> f64 {
        self.inner_unchecked(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    /// `h^H X h`, real for Hermitian `X`.
    pub fn quad_form(&self, h: &ComplexVec) -> f64 {
        let n = self.n;
        let h = h.as_slice();
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let xh: Complex64 = row.iter().zip(h).map(|(a, b)| a * b).sum();
            acc += (h[i].conj() * xh).re;
        }
        acc
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n];
        self.matvec_into(v, &mut out);
        out
    }

    pub(crate) fn matvec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    /// `self += c * u u^H`.
    pub fn add_rank_one(&mut self, c: f64, u: &[Complex64]) {
        let n = self.n;
        for i in 0..n {
            self.data[i * n + i].re += c * u[i].norm_sqr();
            for j in (i + 1)..n {
                let z = u[i] * u[j].conj() * c;
                self.data[i * n + j] += z;
                self.data[j * n + i] += z.conj();
            }
        }
    }

    /// `self += c * I`.
    pub fn add_identity(&mut self, c: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i].re += c;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for z in &mut self.data {
            *z *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut m = self.clone();
        m.scale(c);
        m
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut m = self.clone();
        m.add_scaled(-1.0, other);
        Ok(m)
    }

    /// Largest `|X_ij - conj(X_ji)|`; zero for every matrix built through this API.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}

/// System parameters: antennas `N`, users `K`, noise std `sigma`, SNR target `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n_antennas: usize,
    pub n_users: usize,
    pub noise_std: f64,
    pub snr_target: f64,
}

impl SystemConfig {
    pub fn new(n_antennas: usize, n_users: usize, noise_std: f64, snr_target: f64) -> Result<Self> {
        let cfg = Self {
            n_antennas,
            n_users,
            noise_std,
            snr_target,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 {
            return Err(Error::InvalidConfig("n_antennas must be >= 1".into()));
        }
        if self.n_users == 0 {
            return Err(Error::InvalidConfig("n_users must be >= 1".into()));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(Error::InvalidConfig("sigma must be positive".into()));
        }
        if !(self.snr_target > 0.0 && self.snr_target.is_finite()) {
            return Err(Error::InvalidConfig("gamma must be positive".into()));
        }
        Ok(())
    }
}

/// One channel realization: `K` nonzero channel vectors of length `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    config: SystemConfig,
    channels: Vec<ComplexVec>,
}

impl ChannelSet {
    pub fn new(config: SystemConfig, channels: Vec<ComplexVec>) -> Result<Self> {
        config.validate()?;
        if channels.len() != config.n_users {
            return Err(Error::DimensionMismatch {
                expected: config.n_users,
                actual: channels.len(),
            });
        }
        for h in &channels {
            if h.len() != config.n_antennas {
                return Err(Error::DimensionMismatch {
                    expected: config.n_antennas,
                    actual: h.len(),
                });
            }
            if h.is_zero() {
                return Err(Error::ZeroVector);
            }
        }
        Ok(Self { config, channels })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn channels(&self) -> &[ComplexVec] {
        &self.channels
    }
}

/// Deterministic generator for `(seed, stream)`. Streams are independent
/// ChaCha8 keystreams, so sample `i` of a batch never depends on sample `i - 1`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a vector with i.i.d. CN(0, 1) entries.
pub fn sample_cn_vector<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

/// Samples `K` Rayleigh-fading channels (i.i.d. CN(0, 1) entries) from stream 0 of `seed`.
pub fn sample_channels(config: &SystemConfig, seed: u64) -> Result<ChannelSet> {
    sample_channels_indexed(config, seed, 0)
}

/// Samples the channel set for `(seed, index)`; used to give every batch
/// element its own reproducible stream.
pub fn sample_channels_indexed(config: &SystemConfig, seed: u64, index: u64) -> Result<ChannelSet> {
    config.validate()?;
    let mut rng = stream_rng(seed, index);
    let channels = (0..config.n_users)
        .map(|_| ComplexVec(sample_cn_vector(config.n_antennas, &mut rng)))
        .collect();
    ChannelSet::new(*config, channels)
}
