//! Spectral functionals: probability vectors, entropy, majorization.

use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigen;
use super::matrix::ComplexMatrix;
use crate::error::{QlockError, Result};

/// Tolerance for normalization and majorization comparisons.
pub const PROB_TOL: f64 = 1e-10;
/// Tolerance on trace and positivity when a raw matrix is treated as a state.
pub const STATE_TOL: f64 = 1e-8;

/// Non-negative reals summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates normalization within 1e-10. Entries in [−1e-10, 0) are
    /// clamped to zero.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(QlockError::BadProbs("empty vector".into()));
        }
        if let Some(&bad) = probs.iter().find(|&&p| !p.is_finite() || p < -PROB_TOL) {
            return Err(QlockError::BadProbs(format!("entry {bad} is negative or non-finite")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(QlockError::BadProbs(format!("entries sum to {total}")));
        }
        Ok(Self(probs.into_iter().map(|p| p.max(0.0)).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sorted_descending(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        Self(v)
    }

    /// Shannon entropy in bits.
    pub fn shannon_entropy(&self) -> f64 {
        shannon_bits(&self.0)
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = QlockError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Vec<f64> {
        p.0
    }
}

/// −Σ p log₂ p with 0 log 0 = 0; non-positive entries contribute nothing.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Spectrum of a matrix that should be a density operator, checked to
/// `STATE_TOL` and clamped to [0, 1].
pub fn state_spectrum(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    let eig = hermitian_eigen(rho).map_err(|e| match e {
        QlockError::NotHermitian { defect } => {
            QlockError::InvalidState(format!("not Hermitian (defect {defect:.3e})"))
        }
        other => other,
    })?;
    let trace: f64 = eig.values.iter().sum();
    if (trace - 1.0).abs() > STATE_TOL {
        return Err(QlockError::InvalidState(format!("trace {trace}")));
    }
    if let Some(&neg) = eig.values.first().filter(|&&v| v < -STATE_TOL) {
        return Err(QlockError::InvalidState(format!("negative eigenvalue {neg:.3e}")));
    }
    Ok(eig.values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_bits(&state_spectrum(rho)?))
}

/// Entropy of a positive operator whose trace may differ from one, Σ −λ log₂ λ;
/// used for unnormalized conditional blocks.
pub(crate) fn entropy_of_positive(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigen(m)?;
    Ok(shannon_bits(&eig.values))
}

/// `p ≻ q`: after sorting both ascending, every prefix sum of `p` is at most
/// the matching prefix sum of `q`, and the totals agree.
pub fn majorizes(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<bool> {
    majorizes_slices(p.as_slice(), q.as_slice(), PROB_TOL)
}

/// Majorization test on raw real vectors with an explicit tolerance.
pub fn majorizes_slices(p: &[f64], q: &[f64], tol: f64) -> Result<bool> {
    if p.len() != q.len() {
        return Err(QlockError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut a = p.to_vec();
    let mut b = q.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut sa, mut sb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sa += x;
        sb += y;
        if sa > sb + tol {
            return Ok(false);
        }
    }
    Ok((sa - sb).abs() <= tol)
}

/// ½‖a − b‖₁ for Hermitian `a`, `b`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = (a - b).hermitian_part();
    let eig = hermitian_eigen(&diff)?;
    Ok(0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// Largest |eigenvalue| of a Hermitian matrix.
pub fn operator_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigen(&m.hermitian_part())?;
    Ok(eig.values.iter().map(|x| x.abs()).fold(0.0, f64::max))
}
