//! Measure-and-prepare channels N(ρ) = Σ_l Tr(π_l ρ) |ψ_l⟩⟨ψ_l| with
//! orthonormal preparations, and the free subfamilies of the purity and
//! observable theories.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QlockError, Result};
use crate::linalg::{
    hermitian_eigen, orthonormality_defect, partial_trace, trace_distance, ComplexMatrix, Subsystem,
    HERMITIAN_TOL,
};
use crate::passive::{ergotropy, passive_energy, BipartiteObservable, Observable};
use crate::states::random::{random_density_with, random_pure_with, rng_from_seed};
use crate::states::DensityOperator;

/// Slack allowed in the falsifier inequalities.
pub const FREE_CHECK_TOL: f64 = 1e-9;
/// Trace-distance bound for [`fixed_point_check`].
pub const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelFlavor {
    General,
    /// d unit-trace POVM elements.
    FreePurity,
    /// Measure and re-prepare in one orthonormal basis.
    #[serde(alias = "dephasing")]
    DephasingInBasis,
    /// Discard the input and prepare a fixed state.
    Pin,
}

/// The two free forms under an observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreeBranch {
    Dephasing,
    Pin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    povm: Vec<ComplexMatrix>,
    preps: Vec<Vec<C64>>,
    flavor: ChannelFlavor,
    /// Set when the basis came from a degenerate observable and is therefore
    /// one canonical choice among many.
    degenerate_basis: bool,
}

impl ClassicalChannel {
    /// General measure-and-prepare channel on C^d.
    pub fn new(povm: Vec<ComplexMatrix>, preps: Vec<Vec<C64>>) -> Result<Self> {
        Self::with_flavor(povm, preps, ChannelFlavor::General)
    }

    pub fn with_flavor(povm: Vec<ComplexMatrix>, preps: Vec<Vec<C64>>, flavor: ChannelFlavor) -> Result<Self> {
        let d = validate_povm(&povm)?;
        if preps.len() != povm.len() {
            return Err(QlockError::LengthMismatch {
                left: povm.len(),
                right: preps.len(),
            });
        }
        if let Some(p) = preps.iter().find(|p| p.len() != d) {
            return Err(QlockError::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        let defect = orthonormality_defect(&preps);
        if defect > HERMITIAN_TOL {
            return Err(QlockError::NonOrthogonalPreps { defect });
        }
        match flavor {
            ChannelFlavor::General => {}
            ChannelFlavor::FreePurity => {
                if povm.len() != d {
                    return Err(QlockError::NotPovm(format!(
                        "free-purity channel needs {d} elements, found {}",
                        povm.len()
                    )));
                }
                check_unit_traces(&povm)?;
            }
            ChannelFlavor::DephasingInBasis => {
                for (p, v) in povm.iter().zip(&preps) {
                    let defect = (p - &ComplexMatrix::outer(v)).max_abs();
                    if defect > HERMITIAN_TOL {
                        return Err(QlockError::ChannelMismatch(format!(
                            "dephasing element differs from its preparation projector by {defect:.3e}"
                        )));
                    }
                }
            }
            ChannelFlavor::Pin => {
                if povm.len() != 1 {
                    return Err(QlockError::ChannelMismatch(format!(
                        "pin channel has one outcome, found {}",
                        povm.len()
                    )));
                }
            }
        }
        Ok(Self {
            povm,
            preps,
            flavor,
            degenerate_basis: false,
        })
    }

    /// Discards the input and prepares |ψ⟩⟨ψ|. Flavor `General`: only the
    /// ground state of a reference observable makes a free pin.
    pub fn prepare(psi: Vec<C64>) -> Result<Self> {
        let d = psi.len();
        Self::new(vec![ComplexMatrix::identity(d)], vec![psi])
    }

    /// Projective measurement in `basis` followed by re-preparation of the
    /// outcome vector.
    pub fn dephasing(basis: Vec<Vec<C64>>) -> Result<Self> {
        let povm = basis.iter().map(|v| ComplexMatrix::outer(v)).collect();
        Self::with_flavor(povm, basis, ChannelFlavor::DephasingInBasis)
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn preps(&self) -> &[Vec<C64>] {
        &self.preps
    }

    pub fn flavor(&self) -> ChannelFlavor {
        self.flavor
    }

    pub fn dim(&self) -> usize {
        self.povm[0].dim()
    }

    pub fn degenerate_basis(&self) -> bool {
        self.degenerate_basis
    }

    /// N(m) for an operator on C^d, positivity not required.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (p, v) in self.povm.iter().zip(&self.preps) {
            out = &out + &ComplexMatrix::outer(v).scale(p.trace_product(m));
        }
        out
    }

    /// N(ρ) for a single-system state.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(QlockError::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        DensityOperator::new(self.apply_matrix(rho.matrix()), rho.dims())
    }

    /// (N ⊗ 𝓘)(ρ) or (𝓘 ⊗ N)(ρ). With N on the first factor the result is
    /// Σ_l |ψ_l⟩⟨ψ_l| ⊗ Tr₁[(π_l ⊗ I) ρ].
    pub fn apply_local(&self, rho: &DensityOperator, side: Subsystem) -> Result<DensityOperator> {
        let (d1, d2) = rho.dims();
        let local = if side == Subsystem::A1 { d1 } else { d2 };
        if local != self.dim() {
            return Err(QlockError::DimensionMismatch {
                expected: local,
                found: self.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(d1 * d2);
        for (p, v) in self.povm.iter().zip(&self.preps) {
            let prep = ComplexMatrix::outer(v);
            let term = match side {
                Subsystem::A1 => {
                    let measured = rho.matrix() * &p.kron(&ComplexMatrix::identity(d2));
                    prep.kron(&partial_trace(&measured, (d1, d2), Subsystem::A2)?)
                }
                Subsystem::A2 => {
                    let measured = rho.matrix() * &ComplexMatrix::identity(d1).kron(p);
                    partial_trace(&measured, (d1, d2), Subsystem::A1)?.kron(&prep)
                }
            };
            out = &out + &term;
        }
        DensityOperator::new(out.hermitian_part(), (d1, d2))
    }
}

fn validate_povm(povm: &[ComplexMatrix]) -> Result<usize> {
    let Some(first) = povm.first() else {
        return Err(QlockError::NotPovm("no elements".into()));
    };
    let d = first.dim();
    if povm.len() > d {
        return Err(QlockError::NotPovm(format!("{} outcomes exceed dimension {d}", povm.len())));
    }
    let mut sum = ComplexMatrix::zeros(d);
    for (k, p) in povm.iter().enumerate() {
        if p.dim() != d {
            return Err(QlockError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        if p.hermiticity_defect() > HERMITIAN_TOL {
            return Err(QlockError::NotPovm(format!("element {k} is not Hermitian")));
        }
        let min = hermitian_eigen(&p.hermitian_part())?.values[0];
        if min < -HERMITIAN_TOL {
            return Err(QlockError::NotPovm(format!("element {k} has eigenvalue {min:.3e}")));
        }
        sum = &sum + p;
    }
    let defect = (&sum - &ComplexMatrix::identity(d)).max_abs();
    if defect > HERMITIAN_TOL {
        return Err(QlockError::NotPovm(format!("elements sum to identity only within {defect:.3e}")));
    }
    Ok(d)
}

fn check_unit_traces(povm: &[ComplexMatrix]) -> Result<()> {
    for (index, p) in povm.iter().enumerate() {
        let trace = p.trace().re;
        if (trace - 1.0).abs() > HERMITIAN_TOL {
            return Err(QlockError::NotUnitTrace { index, trace });
        }
    }
    Ok(())
}

/// Free channel of the purity theory: d unit-trace POVM elements and an
/// orthonormal preparation basis. Such a channel is unital.
pub fn make_free_purity_channel(povm: Vec<ComplexMatrix>, preps: Vec<Vec<C64>>) -> Result<ClassicalChannel> {
    // Trace check first so the more specific error wins.
    check_unit_traces(&povm)?;
    ClassicalChannel::with_flavor(povm, preps, ChannelFlavor::FreePurity)
}

/// The qubit free-purity channel with POVM ½(I ± b·σ) and preparations along
/// ±a on the Bloch sphere.
pub fn qubit_free_purity_channel(a: [f64; 3], b: [f64; 3]) -> Result<ClassicalChannel> {
    let plus = crate::linalg::qubit_operator(b);
    let minus = crate::linalg::qubit_operator([-b[0], -b[1], -b[2]]);
    let proj = hermitian_eigen(&crate::linalg::qubit_operator(a))?;
    // Eigenvalues ascending: index 1 is the +a direction.
    let preps = vec![proj.vectors[1].clone(), proj.vectors[0].clone()];
    make_free_purity_channel(vec![plus, minus], preps)
}

/// Dephasing in the eigenbasis of `obs`, or pinning to its ground state.
pub fn make_free_observable_channel(obs: &Observable, branch: FreeBranch) -> ClassicalChannel {
    let vectors = obs.eigen().vectors.clone();
    let mut ch = match branch {
        FreeBranch::Dephasing => ClassicalChannel::dephasing(vectors),
        FreeBranch::Pin => {
            let d = obs.dim();
            ClassicalChannel::with_flavor(
                vec![ComplexMatrix::identity(d)],
                vec![obs.ground_state().to_vec()],
                ChannelFlavor::Pin,
            )
        }
    }
    .expect("eigenbasis of a Hermitian matrix is orthonormal");
    ch.degenerate_basis = obs.is_degenerate();
    ch
}

/// First state on which a falsifier inequality failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeViolation {
    pub sample: usize,
    /// Tr(O N(ρ)) − Tr(O ρ).
    pub energy_increase: f64,
    /// Ergotropy of N(ρ) minus ergotropy of ρ.
    pub ergotropy_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeCheckReport {
    pub samples: usize,
    pub passed: bool,
    pub max_energy_increase: f64,
    pub max_ergotropy_increase: f64,
    pub first_violation: Option<FreeViolation>,
}

/// Tests Tr(O N(ρ)) ≤ Tr(O ρ) and ergotropy(N(ρ)) ≤ ergotropy(ρ) on the
/// eigenstates of `obs` followed by seeded random mixed and pure states.
/// Sampling can refute freeness but never prove it.
pub fn falsify_free_observable(
    channel: &ClassicalChannel,
    obs: &Observable,
    samples: usize,
    seed: u64,
) -> Result<FreeCheckReport> {
    let d = obs.dim();
    if channel.dim() != d {
        return Err(QlockError::DimensionMismatch {
            expected: d,
            found: channel.dim(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut report = FreeCheckReport {
        samples,
        passed: true,
        max_energy_increase: f64::NEG_INFINITY,
        max_ergotropy_increase: f64::NEG_INFINITY,
        first_violation: None,
    };
    for k in 0..samples {
        let rho = if k < d {
            DensityOperator::single(ComplexMatrix::outer(&obs.eigen().vectors[k]))?
        } else if rng.random_bool(0.5) {
            random_density_with(d, 1, &mut rng)
        } else {
            random_pure_with(d, 1, &mut rng)
        };
        let out = channel.apply(&rho)?;
        let energy_increase = out.expectation(obs.matrix())? - rho.expectation(obs.matrix())?;
        let ergotropy_increase = ergotropy(&out, obs)? - ergotropy(&rho, obs)?;
        report.max_energy_increase = report.max_energy_increase.max(energy_increase);
        report.max_ergotropy_increase = report.max_ergotropy_increase.max(ergotropy_increase);
        if (energy_increase > FREE_CHECK_TOL || ergotropy_increase > FREE_CHECK_TOL) && report.passed {
            report.passed = false;
            report.first_violation = Some(FreeViolation {
                sample: k,
                energy_increase,
                ergotropy_increase,
            });
        }
    }
    Ok(report)
}

pub fn check_free_observable(channel: &ClassicalChannel, obs: &Observable, samples: usize, seed: u64) -> bool {
    falsify_free_observable(channel, obs, samples, seed).is_ok_and(|r| r.passed)
}

/// Fails unless `channel` dephases in an eigenbasis of `obs`.
fn require_dephasing_of(channel: &ClassicalChannel, obs: &Observable) -> Result<()> {
    if channel.flavor() != ChannelFlavor::DephasingInBasis {
        return Err(QlockError::ChannelMismatch(format!("expected a dephasing channel, got {:?}", channel.flavor())));
    }
    obs.require_dim(channel.dim())?;
    let scale = obs.matrix().max_abs().max(1.0);
    for v in channel.preps() {
        let ov = obs.matrix().apply(v);
        let mean = obs.matrix().expectation(v);
        let residual = ov
            .iter()
            .zip(v)
            .map(|(a, b)| (a - mean * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > 1e-8 * scale {
            return Err(QlockError::ChannelMismatch(format!(
                "preparation is not an eigenvector of the observable (residual {residual:.3e})"
            )));
        }
    }
    Ok(())
}

/// Whether ρ is left unchanged, within [`FIXED_POINT_TOL`] in trace
/// distance, by `channel` on the first factor. `obs` is the first-factor
/// observable whose eigenbasis the channel dephases in.
pub fn fixed_point_check(channel: &ClassicalChannel, rho: &DensityOperator, obs: &Observable) -> Result<bool> {
    require_dephasing_of(channel, obs)?;
    let out = channel.apply_local(rho, Subsystem::A1)?;
    Ok(trace_distance(rho.matrix(), out.matrix())? <= FIXED_POINT_TOL)
}

/// O^p((N ⊗ 𝓘)(ρ)) − O^p(ρ) for the total observable; never negative for the
/// dephasing channel of O₁, and zero exactly on its fixed points.
pub fn passive_energy_shift(channel: &ClassicalChannel, rho: &DensityOperator, bobs: &BipartiteObservable) -> Result<f64> {
    bobs.require_dims(rho.dims())?;
    let out = channel.apply_local(rho, Subsystem::A1)?;
    Ok(passive_energy(&out, &bobs.total)? - passive_energy(rho, &bobs.total)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{qubit_operator, shannon_bits};
    use crate::states::{basis_state, make_cq, random_density, singlet};
    use crate::linalg::ProbabilityVector;

    fn z_basis() -> Vec<Vec<C64>> {
        vec![basis_state(2, 0), basis_state(2, 1)]
    }

    #[test]
    fn dephasing_erases_x_coherence() {
        let ch = ClassicalChannel::dephasing(z_basis()).unwrap();
        let a = DensityOperator::single(qubit_operator([0.7, 0.0, 0.0])).unwrap();
        let b = DensityOperator::single(ComplexMatrix::from_diag(&[0.3, 0.7])).unwrap();
        let rho = crate::states::product_state(&a, &b).unwrap();
        let out = ch.apply_local(&rho, Subsystem::A1).unwrap();
        let m = out.marginal(Subsystem::A1).into_matrix();
        assert!((&m - &ComplexMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn dephasing_fixes_classical_mixture() {
        let ch = ClassicalChannel::dephasing(z_basis()).unwrap();
        let rho = DensityOperator::new(ComplexMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]), (2, 2)).unwrap();
        let out = ch.apply_local(&rho, Subsystem::A1).unwrap();
        assert!((&out.into_matrix() - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn dephasing_singlet() {
        let ch = ClassicalChannel::dephasing(z_basis()).unwrap();
        let out = ch.apply_local(&singlet(), Subsystem::A1).unwrap();
        let want = ComplexMatrix::from_diag(&[0.0, 0.5, 0.5, 0.0]);
        assert!((out.matrix() - &want).max_abs() < 1e-15);
        assert!((out.entropy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn right_side_application_mirrors_left() {
        let ch = ClassicalChannel::dephasing(z_basis()).unwrap();
        let rho = random_density(2, 2, 4);
        let swap = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        let swapped = rho.conjugate(&swap).unwrap();
        let left = ch.apply_local(&swapped, Subsystem::A1).unwrap().into_matrix();
        let right = ch.apply_local(&rho, Subsystem::A2).unwrap().into_matrix().conjugate_by(&swap);
        assert!((&left - &right).max_abs() < 1e-14);
    }

    #[test]
    fn free_purity_constructions() {
        let ch = qubit_free_purity_channel([0.0, 0.0, 1.0], [0.3, -0.2, 0.5]).unwrap();
        assert_eq!(ch.flavor(), ChannelFlavor::FreePurity);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((&ch.apply_matrix(&mixed) - &mixed).max_abs() < 1e-15);

        let proj = z_basis().iter().map(|v| ComplexMatrix::outer(v)).collect();
        assert!(make_free_purity_channel(proj, z_basis()).is_ok());

        let bad = vec![ComplexMatrix::from_diag(&[1.0, 0.5]), ComplexMatrix::from_diag(&[0.0, 0.5])];
        assert!(matches!(
            make_free_purity_channel(bad, z_basis()),
            Err(QlockError::NotUnitTrace { index: 0, .. })
        ));
        let not_povm = vec![ComplexMatrix::from_diag(&[1.0, 0.0]), ComplexMatrix::from_diag(&[1.0, 0.0])];
        assert!(matches!(make_free_purity_channel(not_povm, z_basis()), Err(QlockError::NotPovm(_))));
    }

    #[test]
    fn rejects_non_orthogonal_preps() {
        let s = 0.5f64.sqrt();
        let preps = vec![basis_state(2, 0), vec![C64::new(s, 0.0), C64::new(s, 0.0)]];
        let povm = z_basis().iter().map(|v| ComplexMatrix::outer(v)).collect();
        assert!(matches!(
            ClassicalChannel::new(povm, preps),
            Err(QlockError::NonOrthogonalPreps { .. })
        ));
    }

    #[test]
    fn free_observable_branches() {
        let obs = Observable::qubit_gap(1.5).unwrap();
        let deph = make_free_observable_channel(&obs, FreeBranch::Dephasing);
        let pin = make_free_observable_channel(&obs, FreeBranch::Pin);
        let rho = random_density(2, 1, 11);
        let before = rho.expectation(obs.matrix()).unwrap();
        let after = deph.apply(&rho).unwrap().expectation(obs.matrix()).unwrap();
        assert!((before - after).abs() < 1e-14);
        assert!(pin.apply(&rho).unwrap().expectation(obs.matrix()).unwrap().abs() < 1e-15);
        assert!(check_free_observable(&deph, &obs, 200, 1));
        assert!(check_free_observable(&pin, &obs, 200, 1));
        let excited = ClassicalChannel::prepare(basis_state(2, 1)).unwrap();
        let report = falsify_free_observable(&excited, &obs, 200, 1).unwrap();
        assert!(!report.passed);
        let v = report.first_violation.unwrap();
        assert_eq!(v.sample, 0);
        assert!(v.energy_increase > 1.0);
    }

    #[test]
    fn fixed_points_and_passive_shift() {
        let o1 = Observable::qubit_gap(1.0).unwrap();
        let bobs = BipartiteObservable::new(o1.clone(), Observable::qubit_gap(2.0).unwrap()).unwrap();
        let ch = make_free_observable_channel(&o1, FreeBranch::Dephasing);

        let conds = [random_density(2, 1, 1), random_density(2, 1, 2)];
        let cq = make_cq(&ProbabilityVector::new(vec![0.3, 0.7]).unwrap(), &conds, &z_basis()).unwrap();
        assert!(fixed_point_check(&ch, &cq, &o1).unwrap());
        assert!(passive_energy_shift(&ch, &cq, &bobs).unwrap().abs() < 1e-12);

        assert!(!fixed_point_check(&ch, &singlet(), &o1).unwrap());
        assert!(passive_energy_shift(&ch, &singlet(), &bobs).unwrap() > 0.1);

        let pin = make_free_observable_channel(&o1, FreeBranch::Pin);
        assert!(matches!(fixed_point_check(&pin, &cq, &o1), Err(QlockError::ChannelMismatch(_))));
    }

    #[test]
    fn free_purity_channel_does_not_lower_entropy() {
        let ch = qubit_free_purity_channel([0.6, 0.0, 0.8], [0.0, 0.4, 0.4]).unwrap();
        for seed in 0..50 {
            let rho = random_density(2, 1, seed);
            let out = ch.apply(&rho).unwrap();
            assert!(out.entropy() >= rho.entropy() - 1e-12);
            assert!(shannon_bits(&out.spectrum()) <= 1.0 + 1e-12);
        }
    }
}
