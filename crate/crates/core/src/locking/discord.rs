//! Entropic discord with rank-one projective measurements on the first qubit.

use crate::error::{QlockError, Result};
use crate::linalg::{pauli, partial_trace, shannon_bits, spectral::entropy_of_positive, ComplexMatrix, Subsystem};
use crate::optim::{minimize_on_sphere, Minimum, OptimConfig};
use crate::states::DensityOperator;

use super::purity::mutual_information;

/// Σ_± q_± S(ρ_{2|±}) for the measurement along ±m, using
/// q S(σ/q) = S(σ) + q log₂ q on the unnormalized blocks σ_±.
struct ConditionalEntropy {
    rho2: ComplexMatrix,
    tau: [ComplexMatrix; 3],
}

impl ConditionalEntropy {
    fn new(rho: &DensityOperator) -> Self {
        let d2 = rho.dims().1;
        let id = ComplexMatrix::identity(d2);
        let tau = pauli().map(|s| {
            partial_trace(&(&s.kron(&id) * rho.matrix()), (2, d2), Subsystem::A2).expect("dims checked")
        });
        Self {
            rho2: rho.marginal(Subsystem::A2).into_matrix(),
            tau,
        }
    }

    fn eval(&self, m: &[f64; 3]) -> f64 {
        let mut shift = ComplexMatrix::zeros(self.rho2.dim());
        for (mk, t) in m.iter().zip(&self.tau) {
            shift = &shift + &t.scale_real(*mk);
        }
        let mut total = 0.0;
        for sigma in [&self.rho2 + &shift, &self.rho2 - &shift] {
            let sigma = sigma.scale_real(0.5).hermitian_part();
            let q = sigma.trace().re;
            if q <= 0.0 {
                continue;
            }
            total += entropy_of_positive(&sigma).unwrap_or(f64::NAN) + q * q.log2();
        }
        total
    }
}

/// Measurement direction and value of the minimal conditional entropy.
pub fn min_conditional_entropy(rho: &DensityOperator, cfg: &OptimConfig) -> Result<Minimum<[f64; 3]>> {
    let (d1, d2) = rho.dims();
    if d1 != 2 {
        return Err(QlockError::WrongDims {
            expected: (2, d2),
            found: (d1, d2),
        });
    }
    let c = ConditionalEntropy::new(rho);
    Ok(minimize_on_sphere(|m| c.eval(m), cfg))
}

/// I(A₁:A₂) − max_m [S(ρ₂) − Σ q S(ρ_{2|m})] in bits.
pub fn discord_entropic(rho: &DensityOperator, cfg: &OptimConfig) -> Result<f64> {
    let best = min_conditional_entropy(rho, cfg)?;
    let s2 = rho.marginal(Subsystem::A2).entropy();
    let classical = s2 - best.value;
    Ok((mutual_information(rho) - classical).max(0.0))
}

/// Werner discord in closed form, base-2 logarithms, 0·log 0 = 0:
/// (1−α)/4·log(1−α) − (1+α)/2·log(1+α) + (1+3α)/4·log(1+3α).
pub fn werner_discord_closed_form(alpha: f64) -> f64 {
    let xlog = |c: f64, x: f64| if x > 0.0 { c * x.log2() } else { 0.0 };
    xlog((1.0 - alpha) / 4.0, 1.0 - alpha) - xlog((1.0 + alpha) / 2.0, 1.0 + alpha)
        + xlog((1.0 + 3.0 * alpha) / 4.0, 1.0 + 3.0 * alpha)
}

/// Discord of the Werner state from its spectrum and the binary entropy of
/// its isotropic conditional states: 2 − S(W) − 1 + h((1+α)/2).
pub fn werner_discord_spectral(alpha: f64) -> f64 {
    let s = shannon_bits(&[(1.0 + 3.0 * alpha) / 4.0, (1.0 - alpha) / 4.0, (1.0 - alpha) / 4.0, (1.0 - alpha) / 4.0]);
    let h = shannon_bits(&[(1.0 + alpha) / 2.0, (1.0 - alpha) / 2.0]);
    1.0 - s + h
}
