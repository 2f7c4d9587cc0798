//! Seeded generators for test and benchmark states.
//!
//! Every generator has a `*_with` form that draws from a caller-supplied RNG
//! and a convenience form that takes a seed. The seeded forms use ChaCha8, so
//! a seed reproduces a byte-identical state on every platform.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{make_cq, DensityOperator};
use crate::linalg::{ComplexMatrix, ProbabilityVector};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// d×d matrix of i.i.d. standard complex Gaussians.
pub fn ginibre_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let entries = (0..d * d).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_row_major(entries).expect("square and finite")
}

/// Haar-distributed unitary: Gram–Schmidt on Ginibre columns.
pub fn random_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre_with(d, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        // Two passes keep the columns orthonormal to rounding for d ≤ 16.
        for _ in 0..2 {
            for c in &cols {
                let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= overlap * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        cols.push(v);
    }
    ComplexMatrix::from_columns(&cols)
}

/// Haar-random unit vector.
pub fn random_unit_vector_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// Uniform point of the probability simplex.
pub fn random_probabilities_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProbabilityVector {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    ProbabilityVector::new(raw.into_iter().map(|x| x / total).collect()).expect("normalized")
}

/// Ginibre-induced mixed state G G† / Tr(G G†); full rank almost surely.
pub fn random_density_with<R: Rng + ?Sized>(d1: usize, d2: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre_with(d1 * d2, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr), (d1, d2)).expect("Ginibre state is valid")
}

pub fn random_pure_with<R: Rng + ?Sized>(d1: usize, d2: usize, rng: &mut R) -> DensityOperator {
    let psi = random_unit_vector_with(d1 * d2, rng);
    DensityOperator::new(ComplexMatrix::outer(&psi), (d1, d2)).expect("pure state is valid")
}

pub fn random_density(d1: usize, d2: usize, seed: u64) -> DensityOperator {
    random_density_with(d1, d2, &mut rng_from_seed(seed))
}

pub fn random_pure(d1: usize, d2: usize, seed: u64) -> DensityOperator {
    random_pure_with(d1, d2, &mut rng_from_seed(seed))
}

/// Σ_i p_i |b_i⟩⟨b_i| ⊗ ρ_i with a Haar-random basis, uniform weights on the
/// simplex and Ginibre conditional states.
pub fn random_cq_with<R: Rng + ?Sized>(d1: usize, d2: usize, rng: &mut R) -> DensityOperator {
    let u = random_unitary_with(d1, rng);
    let basis: Vec<Vec<C64>> = (0..d1).map(|j| u.column(j)).collect();
    let probs = random_probabilities_with(d1, rng);
    let conds: Vec<DensityOperator> = (0..d1).map(|_| random_density_with(d2, 1, rng)).collect();
    make_cq(&probs, &conds, &basis).expect("valid CQ ingredients")
}

/// CQ state with first marginal exactly I/d1.
pub fn random_cq_mixed_marginal_with<R: Rng + ?Sized>(d1: usize, d2: usize, rng: &mut R) -> DensityOperator {
    let u = random_unitary_with(d1, rng);
    let basis: Vec<Vec<C64>> = (0..d1).map(|j| u.column(j)).collect();
    let probs = ProbabilityVector::new(vec![1.0 / d1 as f64; d1]).expect("uniform");
    let conds: Vec<DensityOperator> = (0..d1).map(|_| random_density_with(d2, 1, rng)).collect();
    make_cq(&probs, &conds, &basis).expect("valid CQ ingredients")
}

/// Random local filtering of a random state so that the first marginal is
/// exactly I/d1: ρ ↦ (M ⊗ I) ρ (M ⊗ I)† with M = (d1 ρ₁)^{-1/2}.
pub fn random_mixed_marginal_with<R: Rng + ?Sized>(d1: usize, d2: usize, rng: &mut R) -> DensityOperator {
    let rho = random_density_with(d1, d2, rng);
    let r1 = rho.marginal(crate::linalg::Subsystem::A1);
    let eig = crate::linalg::hermitian_eigen(r1.matrix()).expect("marginal is Hermitian");
    let filter = eig.map_values(|x| 1.0 / (d1 as f64 * x).sqrt());
    let m = filter.kron(&ComplexMatrix::identity(d2));
    let out = rho.matrix().conjugate_by(&m);
    let tr = out.trace().re;
    DensityOperator::new(out.scale_real(1.0 / tr), (d1, d2)).expect("filtered state is valid")
}

/// Bell-diagonal state with uniform random weights.
pub fn random_bell_diagonal_with<R: Rng + ?Sized>(rng: &mut R) -> DensityOperator {
    super::bell_diagonal(&random_probabilities_with(4, rng)).expect("valid weights")
}

/// A Haar-random local unitary u1 ⊗ u2 on C^{d1} ⊗ C^{d2}.
pub fn random_local_unitary_with<R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    rng: &mut R,
) -> (ComplexMatrix, ComplexMatrix) {
    (random_unitary_with(d1, rng), random_unitary_with(d2, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Subsystem;

    #[test]
    fn seeded_generation_is_reproducible() {
        assert_eq!(random_density(2, 3, 42), random_density(2, 3, 42));
        assert_ne!(random_density(2, 3, 42), random_density(2, 3, 43));
        assert_eq!(random_pure(2, 2, 7), random_pure(2, 2, 7));
    }

    #[test]
    fn random_pure_has_unit_purity() {
        for seed in 0..50 {
            assert!((random_pure(2, 3, seed).purity() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn validity_over_many_samples() {
        let mut rng = rng_from_seed(1);
        for k in 0..1000 {
            let (d1, d2) = (1 + k % 3, 1 + (k / 3) % 3);
            let rho = random_density_with(d1, d2, &mut rng);
            assert!(rho.spectrum()[0] >= 0.0);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = rng_from_seed(3);
        for d in 1..=8 {
            assert!(random_unitary_with(d, &mut rng).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn filtered_marginal_is_maximally_mixed() {
        let mut rng = rng_from_seed(9);
        for _ in 0..20 {
            let rho = random_mixed_marginal_with(2, 3, &mut rng);
            let m = rho.marginal(Subsystem::A1).into_matrix();
            assert!((&m - &ComplexMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-12);
        }
    }
}
