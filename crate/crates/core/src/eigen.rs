//! Dominant eigenpairs by power iteration, the bounded-perturbation residual,
//! and a dense reference eigensolver.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{ComplexVec, HermitianMatrix};

/// Default power-iteration cap.
pub const DEFAULT_PM_ITERS: usize = 50;
/// Default `|u - u'|_inf` stopping threshold.
pub const DEFAULT_PM_EPS: f64 = 1e-8;
/// Largest dimension accepted by [`eig_oracle`].
pub const ORACLE_MAX_DIM: usize = 64;

const STALL: f64 = 1e-300;

/// An eigenvalue with its unit-norm eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: ComplexVec,
}

/// Power-iteration settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerMethod {
    pub max_iters: usize,
    pub eps: f64,
}

impl Default for PowerMethod {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_PM_ITERS,
            eps: DEFAULT_PM_EPS,
        }
    }
}

/// The normalized all-ones start vector.
pub fn default_start(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]
}

// Fallback start with entries (-1)^i / (i + 1), normalized. It is not
// parallel to the all-ones start for any n >= 2.
fn alternate_start(n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 } / (i + 1) as f64, 0.0))
        .collect();
    let nrm = vec_norm(&v);
    v.into_iter().map(|z| z / nrm).collect()
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl PowerMethod {
    pub fn new(max_iters: usize, eps: f64) -> Result<Self> {
        if max_iters == 0 {
            return Err(Error::InvalidConfig("power method needs max_iters >= 1".into()));
        }
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidConfig("power method needs eps > 0".into()));
        }
        Ok(Self { max_iters, eps })
    }

    /// Runs from the deterministic all-ones start.
    pub fn run(&self, a: &HermitianMatrix) -> EigenPair {
        self.run_from(a, &default_start(a.dim()))
    }

    /// Runs from `start` (assumed nonzero). If `A start` vanishes the
    /// iteration restarts once from the fixed alternate vector; if that also
    /// vanishes the result is `(0, start)`, which makes any downstream
    /// perturbation a no-op.
    pub fn run_from(&self, a: &HermitianMatrix, start: &[Complex64]) -> EigenPair {
        let n = a.dim();
        let mut u = start.to_vec();
        let mut av = a.matvec(&u);
        if vec_norm(&av) < STALL {
            let alt = alternate_start(n);
            let alt_av = a.matvec(&alt);
            if a.is_zero() || vec_norm(&alt_av) < STALL {
                return EigenPair {
                    value: 0.0,
                    vector: ComplexVec::from_vec_unchecked(start.to_vec()).phase_normalized(),
                };
            }
            u = alt;
            av = alt_av;
        }

        let mut value = 0.0;
        for _ in 0..self.max_iters {
            let nrm = vec_norm(&av);
            if nrm < STALL {
                break;
            }
            let inv = 1.0 / nrm;
            let mut delta: f64 = 0.0;
            for (ui, ai) in u.iter_mut().zip(&av) {
                let next = ai * inv;
                delta = delta.max((next - *ui).norm());
                *ui = next;
            }
            a.matvec_into(&u, &mut av);
            value = u.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum();
            if delta < self.eps {
                break;
            }
        }
        EigenPair {
            value,
            vector: ComplexVec::from_vec_unchecked(u).phase_normalized(),
        }
    }
}

/// Power method with explicit settings, from the default start.
///
/// If the largest-magnitude eigenvalue is negative the iteration limit is
/// returned as-is.
pub fn power_method(a: &HermitianMatrix, max_iters: usize, eps: f64) -> Result<EigenPair> {
    Ok(PowerMethod::new(max_iters, eps)?.run(a))
}

/// `X - lambda_max u u^H`: every spectral component except the dominant one.
pub fn residual_component(x: &HermitianMatrix, pair: &EigenPair) -> HermitianMatrix {
    let mut out = x.clone();
    out.add_rank_one(-pair.value, pair.vector.as_slice());
    out
}

/// Full eigendecomposition, eigenvalues sorted descending, eigenvectors
/// phase-normalized. Backed by a Householder + implicit-QR dense solver.
pub fn eig_oracle(a: &HermitianMatrix) -> Result<Vec<EigenPair>> {
    let n = a.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::InvalidConfig(format!(
            "eig_oracle supports N <= {ORACLE_MAX_DIM}, got {n}"
        )));
    }
    let defect = a.hermitian_defect();
    if defect > 1e-12 {
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::new(a.to_nalgebra());
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|i| EigenPair {
            value: eig.eigenvalues[i],
            vector: ComplexVec::from_vec_unchecked(eig.eigenvectors.column(i).iter().copied().collect())
                .phase_normalized(),
        })
        .collect();
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

/// Rebuilds `sum_i lambda_i v_i v_i^H` from a decomposition.
pub fn reconstruct(pairs: &[EigenPair]) -> HermitianMatrix {
    let n = pairs.first().map_or(0, |p| p.vector.len());
    let mut out = HermitianMatrix::zeros(n);
    for p in pairs {
        out.add_rank_one(p.value, p.vector.as_slice());
    }
    out
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to 0).
pub fn project_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let pairs = eig_oracle(a)?;
    if pairs.iter().all(|p| p.value >= 0.0) {
        return Ok(a.clone());
    }
    let mut out = HermitianMatrix::zeros(a.dim());
    for p in pairs.iter().filter(|p| p.value > 0.0) {
        out.add_rank_one(p.value, p.vector.as_slice());
    }
    Ok(out)
}
