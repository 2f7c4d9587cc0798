use num_complex::Complex64 as C64;

use super::DensityOperator;
use crate::error::{QlockError, Result};
use crate::linalg::{orthonormality_defect, ComplexMatrix, ProbabilityVector, HERMITIAN_TOL};

/// Computational basis vector |k⟩ in C^d.
pub fn basis_state(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// |ψ⟩⟨ψ| for a normalized vector on C^{d1} ⊗ C^{d2}.
pub fn pure_state(psi: &[C64], dims: (usize, usize)) -> Result<DensityOperator> {
    DensityOperator::new(ComplexMatrix::outer(psi), dims)
}

/// The four Bell vectors (φ+, φ−, ψ+, ψ−).
pub fn bell_states() -> [Vec<C64>; 4] {
    let s = C64::new(0.5f64.sqrt(), 0.0);
    let z = C64::new(0.0, 0.0);
    [
        vec![s, z, z, s],
        vec![s, z, z, -s],
        vec![z, s, s, z],
        vec![z, s, -s, z],
    ]
}

/// |ψ−⟩⟨ψ−|.
pub fn singlet() -> DensityOperator {
    pure_state(&bell_states()[3], (2, 2)).expect("singlet is a valid state")
}

/// α|ψ−⟩⟨ψ−| + (1 − α) I/4 for α ∈ [0, 1].
///
/// Both marginals are I/2, the correlation matrix is −α·I₃ and the spectrum
/// is {(1+3α)/4, (1−α)/4 ×3}.
pub fn werner(alpha: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(QlockError::OutOfRange {
            value: alpha,
            min: 0.0,
            max: 1.0,
        });
    }
    let noise = ComplexMatrix::identity(4).scale_real((1.0 - alpha) / 4.0);
    let m = &ComplexMatrix::outer(&bell_states()[3]).scale_real(alpha) + &noise;
    DensityOperator::new(m, (2, 2))
}

/// Σ w_k |β_k⟩⟨β_k| over the Bell basis (φ+, φ−, ψ+, ψ−).
pub fn bell_diagonal(weights: &ProbabilityVector) -> Result<DensityOperator> {
    if weights.len() != 4 {
        return Err(QlockError::LengthMismatch {
            left: weights.len(),
            right: 4,
        });
    }
    let mut m = ComplexMatrix::zeros(4);
    for (w, b) in weights.as_slice().iter().zip(bell_states()) {
        m = &m + &ComplexMatrix::outer(&b).scale_real(*w);
    }
    DensityOperator::new(m, (2, 2))
}

pub fn product_state(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    DensityOperator::new(a.matrix().kron(b.matrix()), (a.dim(), b.dim()))
}

/// Σ_i p_i |b_i⟩⟨b_i| ⊗ ρ_i with {b_i} orthonormal on the first factor.
pub fn make_cq(
    probs: &ProbabilityVector,
    conditionals: &[DensityOperator],
    basis: &[Vec<C64>],
) -> Result<DensityOperator> {
    if probs.len() != conditionals.len() || probs.len() != basis.len() {
        return Err(QlockError::BadProbs(format!(
            "{} weights for {} conditional states and {} basis vectors",
            probs.len(),
            conditionals.len(),
            basis.len()
        )));
    }
    let d1 = basis[0].len();
    if basis.len() > d1 || basis.iter().any(|b| b.len() != d1) {
        return Err(QlockError::BadBasis { defect: f64::INFINITY });
    }
    let defect = orthonormality_defect(basis);
    if defect > HERMITIAN_TOL {
        return Err(QlockError::BadBasis { defect });
    }
    let d2 = conditionals[0].dim();
    if let Some(c) = conditionals.iter().find(|c| c.dim() != d2) {
        return Err(QlockError::DimensionMismatch {
            expected: d2,
            found: c.dim(),
        });
    }
    let mut m = ComplexMatrix::zeros(d1 * d2);
    for ((p, rho), b) in probs.as_slice().iter().zip(conditionals).zip(basis) {
        m = &m + &ComplexMatrix::outer(b).kron(rho.matrix()).scale_real(*p);
    }
    DensityOperator::new(m, (d1, d2))
}
