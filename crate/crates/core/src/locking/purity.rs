//! Purity-based quantifiers: extractable purity, its global-local gap and the
//! part of it that free classical channels on the first qubit cannot unlock.

use serde::{Deserialize, Serialize};

use crate::error::{QlockError, Result};
use crate::linalg::{
    operator_norm_hermitian, partial_trace, pauli, spectral::entropy_of_positive, ComplexMatrix, Subsystem,
};
use crate::optim::{minimize_on_ball, minimize_on_sphere, normalize, OptimConfig};
use crate::states::DensityOperator;

/// Allowed deviation of ρ₁ from I/2 before [`purity_locking`] refuses.
pub const MIXED_MARGINAL_TOL: f64 = 1e-8;

/// log₂ d − S(ρ).
pub fn purity_extractable(rho: &DensityOperator) -> f64 {
    ((rho.dim() as f64).log2() - rho.entropy()).max(0.0)
}

/// S(ρ₁) + S(ρ₂) − S(ρ) in bits.
pub fn mutual_information(rho: &DensityOperator) -> f64 {
    rho.marginal(Subsystem::A1).entropy() + rho.marginal(Subsystem::A2).entropy() - rho.entropy()
}

/// Extractable purity of ρ minus that of its two marginals; equals the
/// mutual information.
pub fn purity_gap_global_local(rho: &DensityOperator) -> f64 {
    let local = purity_extractable(&rho.marginal(Subsystem::A1)) + purity_extractable(&rho.marginal(Subsystem::A2));
    purity_extractable(rho) - local
}

/// Qubit channel parameters: preparations along ±a, POVM ½(I ± b·σ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityChannelParams {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    pub f_gl: f64,
    /// `None` when the maximally mixed marginal precondition was not met.
    pub f_gn: Option<f64>,
    pub mutual_information: f64,
    pub optimal_channel_params: Option<PurityChannelParams>,
    /// Present when `f_gn` was skipped.
    pub skipped_reason: Option<String>,
}

/// σ± = Tr₁[(½(I ± b·σ) ⊗ I) ρ] expanded as ½(ρ₂ ± Σ_k b_k τ_k).
struct ConditionalBlocks {
    rho2: ComplexMatrix,
    tau: [ComplexMatrix; 3],
}

impl ConditionalBlocks {
    fn new(rho: &DensityOperator) -> Result<Self> {
        let (d1, d2) = rho.dims();
        if d1 != 2 {
            return Err(QlockError::WrongDims {
                expected: (2, d2),
                found: (d1, d2),
            });
        }
        let id = ComplexMatrix::identity(d2);
        let s = pauli();
        let tau = s.map(|sk| {
            partial_trace(&(&sk.kron(&id) * rho.matrix()), (2, d2), Subsystem::A2).expect("dims checked")
        });
        Ok(Self {
            rho2: rho.marginal(Subsystem::A2).into_matrix(),
            tau,
        })
    }

    /// (σ₊, σ₋) for the POVM with parameter `b`.
    fn blocks(&self, b: &[f64; 3]) -> (ComplexMatrix, ComplexMatrix) {
        let mut shift = ComplexMatrix::zeros(self.rho2.dim());
        for (bk, t) in b.iter().zip(&self.tau) {
            shift = &shift + &t.scale_real(*bk);
        }
        (
            (&self.rho2 + &shift).scale_real(0.5),
            (&self.rho2 - &shift).scale_real(0.5),
        )
    }

    /// S((N ⊗ 𝓘)ρ): the output is block diagonal in the preparation basis,
    /// so its entropy is the sum of the block entropies whatever `a` is.
    fn output_entropy(&self, b: &[f64; 3]) -> f64 {
        let (p, m) = self.blocks(b);
        let sp = entropy_of_positive(&p.hermitian_part()).unwrap_or(f64::NAN);
        let sm = entropy_of_positive(&m.hermitian_part()).unwrap_or(f64::NAN);
        sp + sm
    }
}

/// min_b S((N_b ⊗ 𝓘)ρ) − S(ρ) over the qubit free-purity channels, without
/// any precondition on ρ₁. Returns the value and the optimal parameters.
pub fn free_purity_entropy_gap(rho: &DensityOperator, cfg: &OptimConfig) -> Result<(f64, PurityChannelParams)> {
    let blocks = ConditionalBlocks::new(rho)?;
    let s_rho = rho.entropy();
    let f = |b: &[f64; 3]| blocks.output_entropy(b) - s_rho;
    let ball = minimize_on_ball(f, cfg);
    // Entropy is concave and the blocks are affine in b, so the minimum sits
    // on the sphere |b| = 1; a sphere search polishes the boundary.
    let sphere = minimize_on_sphere(f, cfg);
    let (value, b) = if sphere.value <= ball.value {
        (sphere.value, sphere.point)
    } else {
        (ball.value, ball.point)
    };
    let a = normalize(b);
    Ok((value.max(0.0), PurityChannelParams { a, b }))
}

/// Operator-norm distance of the first marginal from I/d₁.
pub fn first_marginal_deviation(rho: &DensityOperator) -> f64 {
    let r1 = rho.marginal(Subsystem::A1).into_matrix();
    let d1 = r1.dim();
    let mixed = ComplexMatrix::identity(d1).scale_real(1.0 / d1 as f64);
    operator_norm_hermitian(&(&r1 - &mixed)).unwrap_or(f64::INFINITY)
}

/// Full purity report for a state with qubit first factor and maximally
/// mixed first marginal. The locked part vanishes exactly on CQ states.
pub fn purity_locking(rho: &DensityOperator, cfg: &OptimConfig) -> Result<PurityReport> {
    let (d1, d2) = rho.dims();
    if d1 != 2 {
        return Err(QlockError::WrongDims {
            expected: (2, d2),
            found: (d1, d2),
        });
    }
    let deviation = first_marginal_deviation(rho);
    if deviation > MIXED_MARGINAL_TOL {
        return Err(QlockError::MarginalNotMixed { deviation });
    }
    let (f_gn, params) = free_purity_entropy_gap(rho, cfg)?;
    let mi = mutual_information(rho);
    Ok(PurityReport {
        f_gl: purity_gap_global_local(rho),
        f_gn: Some(f_gn),
        mutual_information: mi,
        optimal_channel_params: Some(params),
        skipped_reason: None,
    })
}

/// Like [`purity_locking`] but reports the skip instead of failing when the
/// precondition does not hold.
pub fn purity_report(rho: &DensityOperator, cfg: &OptimConfig) -> Result<PurityReport> {
    match purity_locking(rho, cfg) {
        Ok(r) => Ok(r),
        Err(e @ (QlockError::MarginalNotMixed { .. } | QlockError::WrongDims { .. })) => Ok(PurityReport {
            f_gl: purity_gap_global_local(rho),
            f_gn: None,
            mutual_information: mutual_information(rho),
            optimal_channel_params: None,
            skipped_reason: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}
