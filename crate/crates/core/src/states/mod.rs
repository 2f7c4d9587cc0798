//! Bipartite density operators and the state families used by the
//! quantifiers.

mod bloch;
mod cq;
mod families;
pub mod random;

pub use bloch::{bloch_compose, bloch_decompose, BlochForm};
pub use cq::{dephase_first, is_cq, is_cq_default, CqCertificate, DEFAULT_CQ_TOL};
pub use families::{
    bell_diagonal, bell_states, basis_state, make_cq, product_state, pure_state, singlet, werner,
};
pub use random::{random_density, random_pure};

use crate::error::{QlockError, Result};
use crate::linalg::{
    hermitian_eigen, partial_trace, ComplexMatrix, ProbabilityVector, Subsystem, HERMITIAN_TOL,
};

/// Tolerance on trace and negative eigenvalues for a `DensityOperator`.
pub const DENSITY_TOL: f64 = 1e-10;

/// A validated state on C^{d1} ⊗ C^{d2}. Single systems use `d2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: (usize, usize),
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let (d1, d2) = dims;
        if d1 == 0 || d2 == 0 || matrix.dim() != d1 * d2 {
            return Err(QlockError::DimensionMismatch {
                expected: d1 * d2,
                found: matrix.dim(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(QlockError::InvalidState(format!(
                "not Hermitian (defect {defect:.3e})"
            )));
        }
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(QlockError::InvalidState(format!("trace {trace}")));
        }
        let min = hermitian_eigen(&matrix)?.values[0];
        if min < -DENSITY_TOL {
            return Err(QlockError::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// A state of a single system.
    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.dim();
        Self::new(matrix, (d, 1))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims == (2, 2)
    }

    pub fn require_dims(&self, expected: (usize, usize)) -> Result<()> {
        if self.dims == expected {
            Ok(())
        } else {
            Err(QlockError::WrongDims {
                expected,
                found: self.dims,
            })
        }
    }

    /// Eigenvalues ascending, clamped to be non-negative.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix)
            .expect("density operator is Hermitian")
            .values
            .into_iter()
            .map(|x| x.max(0.0))
            .collect()
    }

    /// Eigenvalues descending as a probability vector.
    pub fn spectrum_descending(&self) -> ProbabilityVector {
        let mut s = self.spectrum();
        let total: f64 = s.iter().sum();
        s.iter_mut().for_each(|x| *x /= total);
        s.reverse();
        ProbabilityVector::new(s).expect("spectrum of a state is normalized")
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        crate::linalg::shannon_bits(&self.spectrum())
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn marginal(&self, keep: Subsystem) -> DensityOperator {
        let m = partial_trace(&self.matrix, self.dims, keep).expect("dims are consistent");
        let d = m.dim();
        DensityOperator {
            matrix: m.hermitian_part(),
            dims: (d, 1),
        }
    }

    /// Tr(O ρ) for a Hermitian `O` on the full space.
    pub fn expectation(&self, obs: &ComplexMatrix) -> Result<f64> {
        if obs.dim() != self.dim() {
            return Err(QlockError::DimensionMismatch {
                expected: self.dim(),
                found: obs.dim(),
            });
        }
        Ok(obs.trace_product(&self.matrix).re)
    }

    /// u ρ u† for a unitary on the full space.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        if u.dim() != self.dim() {
            return Err(QlockError::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let defect = u.unitarity_defect();
        if defect > HERMITIAN_TOL {
            return Err(QlockError::NotUnitary { defect });
        }
        DensityOperator::new(self.matrix.conjugate_by(u), self.dims)
    }

    /// (u1 ⊗ u2) ρ (u1 ⊗ u2)†.
    pub fn conjugate_local(&self, u1: &ComplexMatrix, u2: &ComplexMatrix) -> Result<DensityOperator> {
        self.conjugate(&u1.kron(u2))
    }
}
