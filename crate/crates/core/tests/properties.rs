use proptest::prelude::*;

use qlock::channels::{make_free_observable_channel, qubit_free_purity_channel, FreeBranch};
use qlock::io::{fmt_sig, state_from_json, state_to_json, JSON_DIGITS};
use qlock::linalg::{hermitian_eigen, majorizes_slices, orthonormality_defect, shannon_bits, ComplexMatrix, Subsystem};
use qlock::locking::{
    discord_entropic, mutual_information, observable_locking_corollary1, observable_locking_theorem3,
    purity_gap_global_local,
};
use qlock::optim::{minimize_on_sphere, OptimConfig};
use qlock::passive::{ergotropy, passive_energy, BipartiteObservable, Observable};
use qlock::states::random::{
    ginibre_with, random_bell_diagonal_with, random_cq_with, random_density_with, random_unitary_with, rng_from_seed,
};
use qlock::states::{bloch_compose, bloch_decompose, dephase_first, is_cq_default, product_state};

fn small() -> OptimConfig {
    OptimConfig::default().with_grid_points(1024)
}

fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
    let g = ginibre_with(d, &mut rng_from_seed(seed));
    (&g + &g.adjoint()).scale_real(0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstructs(d in 1usize..=6, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let e = hermitian_eigen(&h).unwrap();
        prop_assert!((&e.reconstruct() - &h).max_abs() < 1e-10);
        prop_assert!(orthonormality_defect(&e.vectors) < 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn entropy_bounds_and_unitary_invariance(d1 in 1usize..=3, d2 in 1usize..=3, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_with(d1, d2, &mut rng);
        let s = rho.entropy();
        prop_assert!(s >= -1e-12 && s <= ((d1 * d2) as f64).log2() + 1e-12);
        let u = random_unitary_with(d1 * d2, &mut rng);
        prop_assert!((rho.conjugate(&u).unwrap().entropy() - s).abs() < 1e-9);
    }

    #[test]
    fn entropy_is_additive_on_products(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = random_density_with(2, 1, &mut rng);
        let b = random_density_with(3, 1, &mut rng);
        let ab = product_state(&a, &b).unwrap();
        prop_assert!((ab.entropy() - a.entropy() - b.entropy()).abs() < 1e-9);
        prop_assert!(mutual_information(&ab).abs() < 1e-9);
    }

    #[test]
    fn marginals_are_states_and_mutual_information_is_bounded(d1 in 2usize..=3, d2 in 2usize..=3, seed in any::<u64>()) {
        let rho = random_density_with(d1, d2, &mut rng_from_seed(seed));
        let r1 = rho.marginal(Subsystem::A1);
        let r2 = rho.marginal(Subsystem::A2);
        prop_assert!((r1.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!((r2.matrix().trace().re - 1.0).abs() < 1e-12);
        let mi = mutual_information(&rho);
        prop_assert!(mi >= -1e-10);
        prop_assert!(mi <= 2.0 * r1.entropy().min(r2.entropy()) + 1e-10);
        prop_assert!((purity_gap_global_local(&rho) - mi).abs() < 1e-10);
    }

    #[test]
    fn bloch_round_trip(seed in any::<u64>()) {
        let rho = random_density_with(2, 2, &mut rng_from_seed(seed));
        let back = bloch_compose(&bloch_decompose(&rho).unwrap()).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn state_json_round_trip(d1 in 1usize..=3, d2 in 1usize..=3, seed in any::<u64>()) {
        let rho = random_density_with(d1, d2, &mut rng_from_seed(seed));
        prop_assert_eq!(state_from_json(&state_to_json(&rho)).unwrap(), rho);
    }

    #[test]
    fn formatted_floats_parse_back(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_sig(x, JSON_DIGITS).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn passive_energy_is_a_unitary_invariant_lower_bound(d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_with(d, 1, &mut rng);
        let obs = Observable::new(random_hermitian(d, seed ^ 1)).unwrap();
        let floor = passive_energy(&rho, &obs).unwrap();
        prop_assert!(floor <= rho.expectation(obs.matrix()).unwrap() + 1e-12);
        prop_assert!(ergotropy(&rho, &obs).unwrap() >= -1e-12);
        let u = random_unitary_with(d, &mut rng);
        prop_assert!((passive_energy(&rho.conjugate(&u).unwrap(), &obs).unwrap() - floor).abs() < 1e-10);
    }

    #[test]
    fn diagonal_is_majorized_by_spectrum(d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_with(d, 1, &mut rng);
        let u = random_unitary_with(d, &mut rng);
        let diag: Vec<f64> = rho.matrix().conjugate_by(&u).diagonal().iter().map(|z| z.re).collect();
        prop_assert!(majorizes_slices(&rho.spectrum(), &diag, 1e-10).unwrap());
        prop_assert!(shannon_bits(&diag) >= rho.entropy() - 1e-10);
    }

    #[test]
    fn dephasing_output_is_majorized(d in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_with(d, 1, &mut rng);
        let obs = Observable::new(random_hermitian(d, seed ^ 2)).unwrap();
        let out = make_free_observable_channel(&obs, FreeBranch::Dephasing).apply(&rho).unwrap();
        prop_assert!(majorizes_slices(&rho.spectrum(), &out.spectrum(), 1e-10).unwrap());
        prop_assert!(out.entropy() >= rho.entropy() - 1e-10);
    }

    #[test]
    fn free_purity_channels_keep_the_mixed_state(a in prop::array::uniform3(-1.0f64..1.0), b in prop::array::uniform3(-1.0f64..1.0)) {
        prop_assume!(a.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        let b = b.map(|x| x / nb);
        let ch = qubit_free_purity_channel(a, b).unwrap();
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        prop_assert!((&ch.apply_matrix(&mixed) - &mixed).max_abs() < 1e-12);
    }

    #[test]
    fn cq_states_are_certified_and_unlocked(seed in any::<u64>()) {
        let rho = random_cq_with(2, 2, &mut rng_from_seed(seed));
        let cert = is_cq_default(&rho);
        prop_assert!(cert.is_cq);
        let basis = cert.basis_vectors().unwrap();
        prop_assert!((&dephase_first(rho.matrix(), (2, 2), &basis) - rho.matrix()).max_abs() < 1e-8);
        let bobs = BipartiteObservable::from_gaps(1.0, 2.0).unwrap();
        let v = observable_locking_theorem3(&bloch_decompose(&rho).unwrap(), &bobs, &small()).unwrap().value;
        prop_assert!(v.abs() <= 1e-8);
        prop_assert!(discord_entropic(&rho, &small()).unwrap() <= 1e-8);
    }

    #[test]
    fn locking_and_discord_are_nonnegative(seed in any::<u64>()) {
        let rho = random_density_with(2, 2, &mut rng_from_seed(seed));
        let bobs = BipartiteObservable::from_gaps(1.0, 2.0).unwrap();
        let r = observable_locking_theorem3(&bloch_decompose(&rho).unwrap(), &bobs, &small()).unwrap();
        prop_assert!(r.value >= -1e-12);
        let d = discord_entropic(&rho, &small()).unwrap();
        prop_assert!(d >= 0.0 && d <= mutual_information(&rho) + 1e-10);
    }

    #[test]
    fn bell_diagonal_closed_form_matches_sphere_route(seed in any::<u64>()) {
        let rho = random_bell_diagonal_with(&mut rng_from_seed(seed));
        let b = bloch_decompose(&rho).unwrap();
        let bobs = BipartiteObservable::from_gaps(1.0, 2.0).unwrap();
        let c1 = observable_locking_corollary1(&b, &bobs).unwrap().value;
        let t3 = observable_locking_theorem3(&b, &bobs, &OptimConfig::default()).unwrap().value;
        prop_assert!((c1 - t3).abs() < 1e-6);
    }

    #[test]
    fn sphere_search_is_deterministic_and_refines(c in prop::array::uniform3(-2.0f64..2.0), seed in any::<u64>()) {
        let f = |m: &[f64; 3]| (m[0] - c[0]).powi(2) + (m[1] - c[1]).powi(2) + (m[2] * c[2]).sin();
        let cfg = small().with_seed(seed);
        let a = minimize_on_sphere(f, &cfg);
        let b = minimize_on_sphere(f, &cfg);
        prop_assert_eq!(&a, &b);
        prop_assert!(a.value <= a.grid_value);
    }
}
