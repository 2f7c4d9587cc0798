//! Observables, passive states, ergotropy and the ergotropic gap.
//!
//! For an observable with ascending levels E₁ ≤ … ≤ E_d and a state with
//! descending populations p₁ ≥ … ≥ p_d, the passive state Σ p_k |o_k⟩⟨o_k|
//! minimizes Tr(O u ρ u†) over unitaries u, so the passive energy is Σ p_k E_k
//! and the ergotropy is ⟨O⟩_ρ − Σ p_k E_k. With degenerate levels the passive
//! energy is still unique but the passive state is not; [`passive_state`]
//! returns the representative built on the solver's canonical eigenbasis.

use serde::{Deserialize, Serialize};

use crate::error::{QlockError, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, EigenSystem, ProbabilityVector, Subsystem};
use crate::states::DensityOperator;

/// Two adjacent levels closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// A Hermitian operator with its cached ascending eigensystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
    eig: EigenSystem,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eig = hermitian_eigen(&matrix)?;
        Ok(Self {
            matrix: matrix.hermitian_part(),
            eig,
        })
    }

    /// Diagonal observable Σ E_k |k⟩⟨k|.
    pub fn from_levels(levels: &[f64]) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|x| !x.is_finite()) {
            return Err(QlockError::Parse("levels must be a non-empty list of finite numbers".into()));
        }
        Self::new(ComplexMatrix::from_diag(levels))
    }

    /// diag(0, gap).
    pub fn qubit_gap(gap: f64) -> Result<Self> {
        Self::from_levels(&[0.0, gap])
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues ascending.
    pub fn levels(&self) -> &[f64] {
        &self.eig.values
    }

    /// Eigenvector of the lowest level.
    pub fn ground_state(&self) -> &[num_complex::Complex64] {
        &self.eig.vectors[0]
    }

    pub fn min_level_gap(&self) -> f64 {
        self.eig
            .values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_degenerate(&self) -> bool {
        let scale = self.eig.values.iter().map(|x| x.abs()).fold(1.0, f64::max);
        self.min_level_gap() <= DEGENERACY_TOL * scale
    }

    pub fn require_dim(&self, d: usize) -> Result<()> {
        if self.dim() == d {
            Ok(())
        } else {
            Err(QlockError::DimensionMismatch {
                expected: d,
                found: self.dim(),
            })
        }
    }
}

/// O₁ ⊗ I + I ⊗ O₂.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteObservable {
    pub o1: Observable,
    pub o2: Observable,
    pub total: Observable,
    pub degenerate: bool,
}

impl BipartiteObservable {
    pub fn new(o1: Observable, o2: Observable) -> Result<Self> {
        let total = &o1.matrix().kron(&ComplexMatrix::identity(o2.dim()))
            + &ComplexMatrix::identity(o1.dim()).kron(o2.matrix());
        let total = Observable::new(total)?;
        let degenerate = total.is_degenerate();
        Ok(Self {
            o1,
            o2,
            total,
            degenerate,
        })
    }

    /// Local Hamiltonians diag(0, ε₁) and diag(0, ε₂).
    pub fn from_gaps(eps1: f64, eps2: f64) -> Result<Self> {
        Self::new(Observable::qubit_gap(eps1)?, Observable::qubit_gap(eps2)?)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.o1.dim(), self.o2.dim())
    }

    /// Ascending levels of the total observable.
    pub fn levels(&self) -> &[f64] {
        self.total.levels()
    }

    pub fn require_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() == dims {
            Ok(())
        } else {
            Err(QlockError::DimensionMismatch {
                expected: dims.0 * dims.1,
                found: self.total.dim(),
            })
        }
    }
}

/// Populations descending paired with levels ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPair {
    pub p_desc: ProbabilityVector,
    pub e_asc: Vec<f64>,
}

impl SpectrumPair {
    pub fn new(rho: &DensityOperator, obs: &Observable) -> Result<Self> {
        obs.require_dim(rho.dim())?;
        Ok(Self {
            p_desc: rho.spectrum_descending(),
            e_asc: obs.levels().to_vec(),
        })
    }

    /// Σ p_k E_k.
    pub fn passive_energy(&self) -> f64 {
        rearranged_energy(self.p_desc.as_slice(), &self.e_asc)
    }
}

/// Σ p↓_k E↑_k for unsorted populations and ascending levels.
pub fn rearranged_energy(populations: &[f64], levels_asc: &[f64]) -> f64 {
    let mut p = populations.to_vec();
    p.sort_by(|a, b| b.total_cmp(a));
    p.iter().zip(levels_asc).map(|(p, e)| p * e).sum()
}

pub fn passive_energy(rho: &DensityOperator, obs: &Observable) -> Result<f64> {
    Ok(SpectrumPair::new(rho, obs)?.passive_energy())
}

pub fn passive_state(rho: &DensityOperator, obs: &Observable) -> Result<DensityOperator> {
    let pair = SpectrumPair::new(rho, obs)?;
    let d = rho.dim();
    let mut m = ComplexMatrix::zeros(d);
    for (p, v) in pair.p_desc.as_slice().iter().zip(&obs.eigen().vectors) {
        m = &m + &ComplexMatrix::outer(v).scale_real(*p);
    }
    DensityOperator::new(m, rho.dims())
}

pub fn ergotropy(rho: &DensityOperator, obs: &Observable) -> Result<f64> {
    let mean = rho.expectation(obs.matrix())?;
    Ok(mean - passive_energy(rho, obs)?)
}

/// Global ergotropy minus the two local ergotropies.
pub fn ergotropic_gap(rho: &DensityOperator, bobs: &BipartiteObservable) -> Result<f64> {
    bobs.require_dims(rho.dims())?;
    let global = ergotropy(rho, &bobs.total)?;
    let local1 = ergotropy(&rho.marginal(Subsystem::A1), &bobs.o1)?;
    let local2 = ergotropy(&rho.marginal(Subsystem::A2), &bobs.o2)?;
    Ok(global - local1 - local2)
}
