//! Algebraic test for classical-quantum structure.
//!
//! Writing ρ = Σ_{mn} Λ_mn ⊗ |m⟩⟨n| over the computational basis of the second
//! factor, ρ is CQ with respect to the first factor iff the blocks Λ_mn form a
//! commuting family of normal operators. Such a family is simultaneously
//! unitarily diagonalizable; a common eigenbasis is recovered from a fixed
//! generic combination of the Hermitian and anti-Hermitian parts and then
//! certified by dephasing.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::DensityOperator;
use crate::io::ComplexEntry;
use crate::linalg::{hermitian_eigen, trace_distance, ComplexMatrix};

/// Default commutator/normality tolerance, scaled by max(1, ‖ρ‖_F).
pub const DEFAULT_CQ_TOL: f64 = 1e-9;
/// Trace-distance bound for the dephasing certificate.
pub const DEPHASING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqCertificate {
    pub is_cq: bool,
    /// Orthonormal basis of the first factor in which ρ is block diagonal.
    pub basis: Option<Vec<Vec<ComplexEntry>>>,
    pub max_commutator_norm: f64,
    pub max_normality_defect: f64,
    /// ½‖ρ − Δ(ρ)‖₁ after dephasing the first factor in `basis`.
    pub dephasing_defect: Option<f64>,
}

impl CqCertificate {
    pub fn basis_vectors(&self) -> Option<Vec<Vec<C64>>> {
        self.basis
            .as_ref()
            .map(|b| b.iter().map(|v| v.iter().map(|&e| e.into()).collect()).collect())
    }
}

fn blocks(rho: &DensityOperator) -> Vec<ComplexMatrix> {
    let (d1, d2) = rho.dims();
    let m = rho.matrix();
    let mut out = Vec::with_capacity(d2 * d2);
    for a in 0..d2 {
        for b in 0..d2 {
            let mut blk = ComplexMatrix::zeros(d1);
            for i in 0..d1 {
                for j in 0..d1 {
                    blk[(i, j)] = m[(i * d2 + a, j * d2 + b)];
                }
            }
            out.push(blk);
        }
    }
    out
}

fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (&(a * b) - &(b * a)).frobenius_norm()
}

/// Σ_l (|b_l⟩⟨b_l| ⊗ I) ρ (|b_l⟩⟨b_l| ⊗ I).
pub fn dephase_first(rho: &ComplexMatrix, dims: (usize, usize), basis: &[Vec<C64>]) -> ComplexMatrix {
    let id = ComplexMatrix::identity(dims.1);
    let mut out = ComplexMatrix::zeros(rho.dim());
    for b in basis {
        let p = ComplexMatrix::outer(b).kron(&id);
        out = &out + &(&(&p * rho) * &p);
    }
    out
}

/// Runs [`is_cq`] with [`DEFAULT_CQ_TOL`].
pub fn is_cq_default(rho: &DensityOperator) -> CqCertificate {
    is_cq(rho, DEFAULT_CQ_TOL)
}

pub fn is_cq(rho: &DensityOperator, tol: f64) -> CqCertificate {
    let tol = tol * rho.matrix().frobenius_norm().max(1.0);
    let blks = blocks(rho);

    let mut max_normality: f64 = 0.0;
    let mut max_comm: f64 = 0.0;
    for (i, a) in blks.iter().enumerate() {
        max_normality = max_normality.max(commutator_norm(a, &a.adjoint()));
        for b in &blks[i + 1..] {
            max_comm = max_comm.max(commutator_norm(a, b));
        }
    }
    let mut cert = CqCertificate {
        is_cq: false,
        basis: None,
        max_commutator_norm: max_comm,
        max_normality_defect: max_normality,
        dephasing_defect: None,
    };
    if max_comm > tol || max_normality > tol {
        return cert;
    }

    let d1 = rho.dims().0;
    let half = C64::new(0.5, 0.0);
    let half_i = C64::new(0.0, -0.5);
    let generators: Vec<ComplexMatrix> = blks
        .iter()
        .flat_map(|b| {
            let adj = b.adjoint();
            [(b + &adj).scale(half), (b - &adj).scale(half_i)]
        })
        .collect();

    let mut best: Option<(f64, Vec<Vec<C64>>)> = None;
    for attempt in 0..3 {
        let mut h = ComplexMatrix::zeros(d1);
        for (k, g) in generators.iter().enumerate() {
            // Weyl sequence: distinct, incommensurate weights.
            let w = ((k + 1) as f64 * (0.618_033_988_749_894_9 + 0.414_213_562_373_095 * attempt as f64)).fract() + 0.5;
            h = &h + &g.scale_real(w);
        }
        let Ok(eig) = hermitian_eigen(&h.hermitian_part()) else {
            continue;
        };
        let dephased = dephase_first(rho.matrix(), rho.dims(), &eig.vectors);
        let Ok(defect) = trace_distance(rho.matrix(), &dephased) else {
            continue;
        };
        if best.as_ref().is_none_or(|(d, _)| defect < *d) {
            best = Some((defect, eig.vectors));
        }
        if defect <= DEPHASING_TOL {
            break;
        }
    }
    if let Some((defect, basis)) = best {
        cert.dephasing_defect = Some(defect);
        if defect <= DEPHASING_TOL {
            cert.is_cq = true;
            cert.basis = Some(
                basis
                    .into_iter()
                    .map(|v| v.into_iter().map(ComplexEntry::from).collect())
                    .collect(),
            );
        }
    }
    cert
}
