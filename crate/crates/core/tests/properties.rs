//! Randomized invariants.

use mdslab::dissipator::*;
use mdslab::dynamics::entropy_production;
use mdslab::linops::*;
use mdslab::model::presets::*;
use mdslab::model::*;
use mdslab::Operator;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(dim: usize, seed: u64, beta: f64, scheme: Scheme) -> SystemModel {
    let h = random_hermitian(dim, seed);
    let r = random_hermitian(dim, seed.wrapping_add(1000));
    let bath = BathSpec {
        beta,
        spectral: ohmic(0.1),
        coupling: r,
        scheme,
    };
    SystemModel::new(h, vec![bath]).unwrap()
}

fn scheme_for(idx: u8, h: &Operator) -> Scheme {
    match idx % 3 {
        0 => Scheme::Davies,
        1 => Scheme::Gaussian(GaussianScheme::new(2.0 / min_bohr_gap(h).unwrap())),
        _ => Scheme::SingleQ,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dissipator_is_traceless_and_hermitian(dim in 2usize..5, seed in 0u64..500, beta in 0.2f64..3.0, s in 0u8..3) {
        let h = random_hermitian(dim, seed);
        let m = model(dim, seed, beta, scheme_for(s, &h));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = mdslab::random::state(dim, &mut rng);
        let d = mds_dissipator(&rho, &m.baths()[0].family, m.h_s(), m.lambda).unwrap();
        let scale = max_abs(&d).max(1e-300);
        prop_assert!(trace(&d).norm() < 1e-12 * scale.max(1.0));
        prop_assert!(hermiticity_residual(&d) < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn entropy_production_is_nonnegative(dim in 2usize..5, seed in 0u64..500, beta in 0.2f64..3.0, s in 0u8..3) {
        let h = random_hermitian(dim, seed);
        let m = model(dim, seed, beta, scheme_for(s, &h));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let rho = mdslab::random::state(dim, &mut rng);
        prop_assert!(entropy_production(&rho, &m).unwrap().total >= -1e-12);
    }

    #[test]
    fn gibbs_state_is_stationary(dim in 2usize..5, seed in 0u64..500, beta in 0.2f64..3.0, s in 0u8..3) {
        let h = random_hermitian(dim, seed);
        let m = model(dim, seed, beta, scheme_for(s, &h));
        let g = gibbs_state(m.h_s(), beta).unwrap();
        let d = mds_dissipator(&g, &m.baths()[0].family, m.h_s(), m.lambda).unwrap();
        prop_assert!(max_abs(&d) < 1e-12);
    }

    #[test]
    fn log_mean_map_is_inverted(dim in 2usize..6, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = mdslab::random::state(dim, &mut rng);
        let a = mdslab::random::complex_matrix(dim, &mut rng);
        let back = krho_inv_apply(&rho, &krho_apply(&rho, &a)).unwrap();
        prop_assert!(max_abs(&(back - &a)) < 1e-8 * max_abs(&a).max(1.0));
    }

    #[test]
    fn bohr_components_reconstruct_coupling(dim in 2usize..6, seed in 0u64..1000) {
        let h = random_hermitian(dim, seed);
        let r = random_hermitian(dim, seed + 1);
        let parts = bohr_decompose(&h, &r).unwrap();
        let sum = parts.iter().fold(Operator::zeros(dim, dim), |acc, (_, a)| acc + a);
        prop_assert!(max_abs(&(sum - &r)) < 1e-10);
        for (nu, a) in &parts {
            let lhs = commutator(a, &h);
            prop_assert!(max_abs(&(lhs - a * cr(*nu))) < 1e-9);
        }
    }
}
