//! Observable locking: the part of the globally extractable value of an
//! additive observable that local unitaries plus a free classical channel on
//! the first factor cannot reach.
//!
//! Three independent routes compute it for two qubits. The Bloch-sphere
//! route minimizes over the measured direction m the passive energy built
//! from the conditional spectra s_ij(m) = ¼(1 + (−1)^i m·r₁ ± |r₂ + (−1)^i Tᵀm|).
//! The closed form applies when both marginals are maximally mixed. The
//! brute-force route follows the definition literally: a local SU(2) on the
//! first qubit, dephasing in the eigenbasis of O₁, then the global passive
//! energy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{make_free_observable_channel, FreeBranch};
use crate::error::{QlockError, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, ComplexMatrix, ProbabilityVector, Subsystem};
use crate::optim::{minimize_on_sphere, minimize_over_su2, OptimConfig};
use crate::passive::{passive_energy, rearranged_energy, BipartiteObservable};
use crate::states::{bloch_compose, bloch_decompose, BlochForm, DensityOperator};

/// Bound on |r₁|, |r₂| for the closed form.
pub const MIXED_BLOCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LockingMethod {
    Theorem3Grid,
    Corollary1ClosedForm,
    BruteforceSu2,
}

impl LockingMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theorem3Grid => "theorem3-grid",
            Self::Corollary1ClosedForm => "corollary1-closed-form",
            Self::BruteforceSu2 => "bruteforce-su2",
        }
    }
}

impl fmt::Display for LockingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LockingMethod {
    type Err = QlockError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem3" | "theorem3-grid" => Ok(Self::Theorem3Grid),
            "corollary1" | "corollary1-closed-form" => Ok(Self::Corollary1ClosedForm),
            "bruteforce" | "bruteforce-su2" => Ok(Self::BruteforceSu2),
            other => Err(QlockError::Parse(format!(
                "unknown method {other:?} (expected theorem3, corollary1 or bruteforce)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockingDiagnostics {
    /// Locked value if the channel were the pin-to-ground branch instead;
    /// reported only, never folded into `value`.
    pub pin_branch: Option<f64>,
    /// Best grid value minus the refined value.
    pub refinement_residual: f64,
    pub degenerate_spectrum: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockingReport {
    pub value: f64,
    pub optimal_m: [f64; 3],
    pub q_at_optimum: ProbabilityVector,
    pub p_desc: ProbabilityVector,
    pub e_asc: Vec<f64>,
    pub method: LockingMethod,
    pub diagnostics: LockingDiagnostics,
}

fn require_two_qubit_observable(bobs: &BipartiteObservable) -> Result<()> {
    if bobs.dims() != (2, 2) {
        return Err(QlockError::WrongDims {
            expected: (2, 2),
            found: bobs.dims(),
        });
    }
    Ok(())
}

/// Conditional spectra for measurement direction `m`, sorted descending.
pub fn conditional_spectrum(b: &BlochForm, m: &[f64; 3]) -> [f64; 4] {
    let mt = b.m_times_t(m);
    let mr1 = m[0] * b.r1[0] + m[1] * b.r1[1] + m[2] * b.r1[2];
    let mut s = [0.0; 4];
    for i in 0..2 {
        let sign = if i == 0 { 1.0 } else { -1.0 };
        let v = [b.r2[0] + sign * mt[0], b.r2[1] + sign * mt[1], b.r2[2] + sign * mt[2]];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        for j in 0..2 {
            let sj = if j == 0 { 1.0 } else { -1.0 };
            s[2 * i + j] = 0.25 * (1.0 + sign * mr1 + sj * n);
        }
    }
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Σ E↑_k (q_k(m) − p↓_k).
pub fn theorem3_objective(b: &BlochForm, p_desc: &[f64], e_asc: &[f64], m: &[f64; 3]) -> f64 {
    let q = conditional_spectrum(b, m);
    e_asc.iter().zip(q.iter().zip(p_desc)).map(|(e, (q, p))| e * (q - p)).sum()
}

fn probs(v: Vec<f64>) -> ProbabilityVector {
    let v: Vec<f64> = v.into_iter().map(|x| x.max(0.0)).collect();
    let total: f64 = v.iter().sum();
    ProbabilityVector::new(v.into_iter().map(|x| x / total).collect()).expect("normalized spectrum")
}

/// O^p(|g⟩⟨g| ⊗ ρ₂) + o₁^p(ρ₁) − E_g − O^p(ρ): the locked value if the free
/// channel were the pin to the ground state |g⟩ of O₁. The first factor's
/// local ergotropy is still extracted before the reset; the reset itself
/// yields nothing.
pub fn pin_branch_value(rho: &DensityOperator, bobs: &BipartiteObservable) -> Result<f64> {
    let ground = DensityOperator::single(ComplexMatrix::outer(bobs.o1.ground_state()))?;
    let pinned = crate::states::product_state(&ground, &rho.marginal(Subsystem::A2))?;
    let e_g = bobs.o1.levels()[0];
    Ok(passive_energy(&pinned, &bobs.total)? + passive_energy(&rho.marginal(Subsystem::A1), &bobs.o1)?
        - e_g
        - passive_energy(rho, &bobs.total)?)
}

/// Minimum over the Bloch sphere of the conditional-spectrum objective.
/// Refuses degenerate total spectra.
pub fn observable_locking_theorem3(
    b: &BlochForm,
    bobs: &BipartiteObservable,
    cfg: &OptimConfig,
) -> Result<LockingReport> {
    require_two_qubit_observable(bobs)?;
    if bobs.degenerate {
        return Err(QlockError::DegenerateSpectrum {
            gap: bobs.total.min_level_gap(),
        });
    }
    let rho = bloch_compose(b)?;
    let p_desc = rho.spectrum_descending();
    let e_asc = bobs.levels().to_vec();
    let p = p_desc.as_slice().to_vec();
    let best = minimize_on_sphere(|m| theorem3_objective(b, &p, &e_asc, m), cfg);
    let m = best.point;
    Ok(LockingReport {
        value: best.value,
        optimal_m: m,
        q_at_optimum: probs(conditional_spectrum(b, &m).to_vec()),
        p_desc,
        e_asc,
        method: LockingMethod::Theorem3Grid,
        diagnostics: LockingDiagnostics {
            pin_branch: Some(pin_branch_value(&rho, bobs)?),
            refinement_residual: best.grid_value - best.value,
            degenerate_spectrum: false,
            evaluations: best.evaluations,
        },
    })
}

/// Closed form for maximally mixed marginals:
/// ω(E₁+E₂)/2 + (1−ω)(E₃+E₄)/2 − Σ p↓E↑ with 2ω = 1 + √λ_max(TTᵀ).
pub fn observable_locking_corollary1(b: &BlochForm, bobs: &BipartiteObservable) -> Result<LockingReport> {
    require_two_qubit_observable(bobs)?;
    let (r1, r2) = (b.r1_norm(), b.r2_norm());
    if r1 > MIXED_BLOCH_TOL || r2 > MIXED_BLOCH_TOL {
        return Err(QlockError::MarginalsNotMixed { r1, r2 });
    }
    let rho = bloch_compose(b)?;
    let mut ttt = [[0.0; 3]; 3];
    for (i, row) in ttt.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (0..3).map(|k| b.t[i][k] * b.t[j][k]).sum();
        }
    }
    let eig = hermitian_eigen(&ComplexMatrix::from_real_rows(&[&ttt[0], &ttt[1], &ttt[2]]))?;
    let lambda = eig.values[2].max(0.0);
    let omega = 0.5 * (1.0 + lambda.sqrt());
    let v = &eig.vectors[2];
    let m = crate::optim::normalize([v[0].re, v[1].re, v[2].re]);

    let e = bobs.levels().to_vec();
    let p_desc = rho.spectrum_descending();
    let channel_energy = omega * (e[0] + e[1]) / 2.0 + (1.0 - omega) * (e[2] + e[3]) / 2.0;
    let value = channel_energy - rearranged_energy(p_desc.as_slice(), &e);
    Ok(LockingReport {
        value,
        optimal_m: m,
        q_at_optimum: probs(vec![omega / 2.0, omega / 2.0, (1.0 - omega) / 2.0, (1.0 - omega) / 2.0]),
        p_desc,
        e_asc: e,
        method: LockingMethod::Corollary1ClosedForm,
        diagnostics: LockingDiagnostics {
            pin_branch: Some(pin_branch_value(&rho, bobs)?),
            refinement_residual: 0.0,
            degenerate_spectrum: bobs.degenerate,
            evaluations: 1,
        },
    })
}

/// Global passive energy after u₁ on the first qubit and dephasing in the
/// eigenbasis of O₁. Works on raw matrices: this runs inside the optimizer.
struct DephasedPassiveEnergy {
    rho: ComplexMatrix,
    /// |o_k⟩⟨o_k| ⊗ I.
    projectors: Vec<ComplexMatrix>,
    e_asc: Vec<f64>,
}

impl DephasedPassiveEnergy {
    fn new(rho: &DensityOperator, bobs: &BipartiteObservable) -> Self {
        let deph = make_free_observable_channel(&bobs.o1, FreeBranch::Dephasing);
        let id = ComplexMatrix::identity(bobs.o2.dim());
        Self {
            rho: rho.matrix().clone(),
            projectors: deph.povm().iter().map(|p| p.kron(&id)).collect(),
            e_asc: bobs.levels().to_vec(),
        }
    }

    fn dephased(&self, u1: &ComplexMatrix) -> ComplexMatrix {
        let u = u1.kron(&ComplexMatrix::identity(self.rho.dim() / u1.dim()));
        let tau = self.rho.conjugate_by(&u);
        let mut chi = ComplexMatrix::zeros(tau.dim());
        for p in &self.projectors {
            chi = &chi + &(&(p * &tau) * p);
        }
        chi.hermitian_part()
    }

    fn eval(&self, u1: &ComplexMatrix) -> f64 {
        match hermitian_eigenvalues(&self.dephased(u1)) {
            Ok(populations) => rearranged_energy(&populations, &self.e_asc),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Bloch vector of the measured direction: u₁†|o₁⟩ for the ground vector
/// |o₁⟩ of O₁.
fn measured_direction(u1: &ComplexMatrix, bobs: &BipartiteObservable) -> [f64; 3] {
    let v = u1.adjoint().apply(bobs.o1.ground_state());
    let proj = ComplexMatrix::outer(&v);
    let s = crate::linalg::pauli();
    crate::optim::normalize(s.map(|sk| sk.trace_product(&proj).re))
}

/// Definitional oracle over U₁ ∈ SU(2). Accepts degenerate spectra and flags
/// them in the diagnostics.
pub fn observable_locking_bruteforce(
    rho: &DensityOperator,
    bobs: &BipartiteObservable,
    cfg: &OptimConfig,
) -> Result<LockingReport> {
    rho.require_dims((2, 2))?;
    require_two_qubit_observable(bobs)?;
    let objective = DephasedPassiveEnergy::new(rho, bobs);
    let best = minimize_over_su2(|u| objective.eval(u), cfg);
    let u1 = best.point.to_unitary();
    let baseline = passive_energy(rho, &bobs.total)?;
    let dephased_spectrum = hermitian_eigenvalues(&objective.dephased(&u1))?;
    let mut q = dephased_spectrum;
    q.reverse();
    Ok(LockingReport {
        value: best.value - baseline,
        optimal_m: measured_direction(&u1, bobs),
        q_at_optimum: probs(q),
        p_desc: rho.spectrum_descending(),
        e_asc: bobs.levels().to_vec(),
        method: LockingMethod::BruteforceSu2,
        diagnostics: LockingDiagnostics {
            pin_branch: Some(pin_branch_value(rho, bobs)?),
            refinement_residual: best.grid_value - best.value,
            degenerate_spectrum: bobs.degenerate,
            evaluations: best.evaluations,
        },
    })
}

/// Dispatches to the requested route. The sphere route uses `cfg` as given;
/// the brute-force route scales `cfg.grid_points` to an SU(2) budget when the
/// caller left the sphere default in place.
pub fn observable_locking(
    rho: &DensityOperator,
    bobs: &BipartiteObservable,
    method: LockingMethod,
    cfg: &OptimConfig,
) -> Result<LockingReport> {
    rho.require_dims((2, 2))?;
    bobs.require_dims(rho.dims())?;
    match method {
        LockingMethod::Theorem3Grid => observable_locking_theorem3(&bloch_decompose(rho)?, bobs, cfg),
        LockingMethod::Corollary1ClosedForm => observable_locking_corollary1(&bloch_decompose(rho)?, bobs),
        LockingMethod::BruteforceSu2 => {
            let cfg = if cfg.grid_points == OptimConfig::default().grid_points {
                OptimConfig {
                    grid_points: OptimConfig::su2_default().grid_points,
                    ..*cfg
                }
            } else {
                *cfg
            };
            observable_locking_bruteforce(rho, bobs, &cfg)
        }
    }
}

/// Locking values of ρ and of (u₁ ⊗ u₂) ρ (u₁ ⊗ u₂)†.
pub fn lu_invariance_check(
    rho: &DensityOperator,
    bobs: &BipartiteObservable,
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    method: LockingMethod,
    cfg: &OptimConfig,
) -> Result<(f64, f64)> {
    for u in [u1, u2] {
        let defect = u.unitarity_defect();
        if defect > crate::linalg::HERMITIAN_TOL {
            return Err(QlockError::NotUnitary { defect });
        }
    }
    let rotated = rho.conjugate_local(u1, u2)?;
    let before = observable_locking(rho, bobs, method, cfg)?.value;
    let after = observable_locking(&rotated, bobs, method, cfg)?.value;
    Ok((before, after))
}
