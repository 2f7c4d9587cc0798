use serde::{Deserialize, Serialize};

use super::{DensityOperator, DENSITY_TOL};
use crate::error::{QlockError, Result};
use crate::linalg::{hermitian_eigen, pauli, ComplexMatrix};

/// Two-qubit state in the Pauli basis:
/// ρ = ¼(I + Σ r1_i σ_i⊗I + Σ r2_j I⊗σ_j + Σ T_ij σ_i⊗σ_j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochForm {
    pub r1: [f64; 3],
    pub r2: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn r1_norm(&self) -> f64 {
        norm3(&self.r1)
    }

    pub fn r2_norm(&self) -> f64 {
        norm3(&self.r2)
    }

    /// The operator the coefficients describe, without positivity checks.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let s = pauli();
        let id = ComplexMatrix::identity(2);
        let mut m = ComplexMatrix::identity(4);
        for i in 0..3 {
            m = &m + &s[i].kron(&id).scale_real(self.r1[i]);
            m = &m + &id.kron(&s[i]).scale_real(self.r2[i]);
            for j in 0..3 {
                if self.t[i][j] != 0.0 {
                    m = &m + &s[i].kron(&s[j]).scale_real(self.t[i][j]);
                }
            }
        }
        m.scale_real(0.25)
    }

    /// mᵀT as a row vector.
    pub fn m_times_t(&self, m: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|i| m[i] * self.t[i][j]).sum();
        }
        out
    }
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// r1 = Tr(ρ σ⊗I), r2 = Tr(ρ I⊗σ), T_ij = Tr(ρ σ_i⊗σ_j).
pub fn bloch_decompose(rho: &DensityOperator) -> Result<BlochForm> {
    rho.require_dims((2, 2))?;
    let s = pauli();
    let id = ComplexMatrix::identity(2);
    let m = rho.matrix();
    let mut b = BlochForm {
        r1: [0.0; 3],
        r2: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        b.r1[i] = s[i].kron(&id).trace_product(m).re;
        b.r2[i] = id.kron(&s[i]).trace_product(m).re;
        for j in 0..3 {
            b.t[i][j] = s[i].kron(&s[j]).trace_product(m).re;
        }
    }
    Ok(b)
}

/// Inverse of [`bloch_decompose`]; fails if the coefficients give an
/// operator with an eigenvalue below −1e-10.
pub fn bloch_compose(b: &BlochForm) -> Result<DensityOperator> {
    let m = b.to_matrix();
    let min = hermitian_eigen(&m)?.values[0];
    if min < -DENSITY_TOL {
        return Err(QlockError::NotAState {
            min_eigenvalue: min,
        });
    }
    DensityOperator::new(m, (2, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{singlet, werner};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn white_noise() {
        let rho = DensityOperator::new(ComplexMatrix::identity(4).scale_real(0.25), (2, 2)).unwrap();
        let b = bloch_decompose(&rho).unwrap();
        assert!(close(&b.r1, &[0.0; 3], 1e-15));
        assert!(close(&b.r2, &[0.0; 3], 1e-15));
        assert!(b.t.iter().flatten().all(|x| x.abs() < 1e-15));
        assert!((&bloch_compose(&b).unwrap().into_matrix() - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn singlet_correlations() {
        let b = bloch_decompose(&singlet()).unwrap();
        assert!(close(&b.r1, &[0.0; 3], 1e-15));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((b.t[i][j] - want).abs() < 1e-15);
            }
        }
        assert!((&bloch_compose(&b).unwrap().into_matrix() - singlet().matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn ground_product_state() {
        // |00⟩: Tr(ρ σz⊗I) = 1, Tr(ρ σz⊗σz) = 1, every other coefficient 0.
        let rho = DensityOperator::new(ComplexMatrix::from_diag(&[1.0, 0.0, 0.0, 0.0]), (2, 2)).unwrap();
        let b = bloch_decompose(&rho).unwrap();
        assert!(close(&b.r1, &[0.0, 0.0, 1.0], 1e-15));
        assert!(close(&b.r2, &[0.0, 0.0, 1.0], 1e-15));
        let mut t = [[0.0; 3]; 3];
        t[2][2] = 1.0;
        assert_eq!(b.t, t);
        assert!((&bloch_compose(&b).unwrap().into_matrix() - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn werner_correlation_matrix() {
        let b = bloch_decompose(&werner(0.3).unwrap()).unwrap();
        for i in 0..3 {
            assert!((b.t[i][i] + 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_rejects_non_states() {
        let b = BlochForm {
            r1: [0.0, 0.0, 1.0],
            r2: [0.0, 0.0, -1.0],
            t: [[0.0; 3], [0.0; 3], [0.0, 0.0, 1.0]],
        };
        assert!(matches!(bloch_compose(&b), Err(QlockError::NotAState { .. })));
    }

    #[test]
    fn decompose_requires_two_qubits() {
        let rho = DensityOperator::new(ComplexMatrix::identity(6).scale_real(1.0 / 6.0), (2, 3)).unwrap();
        assert!(matches!(bloch_decompose(&rho), Err(QlockError::WrongDims { .. })));
    }
}
