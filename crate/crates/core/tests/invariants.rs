use ising_core::eigensolve::diagonalize;
use ising_core::empirics::{empirical_participation_ratio, spacing_ratio};
use ising_core::hamiltonian::build_sector_hamiltonian;
use ising_core::moments::{analytic_moments, bruteforce_state_moments, domain_wall_k, Walls};
use ising_core::spin_basis::{momentum_bases, MomentumBasis, SpinConfig};
use ising_core::statmodel::gram_charlier_series;
use ising_core::statmodel::quadrature::QuadratureRule;
use ising_core::ModelParams;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_moments_match_bruteforce(sites in 5usize..=11, raw in any::<u32>(), lambda in -2.0f64..2.0, alpha in -2.0f64..2.0) {
        let config = SpinConfig::new(raw & ((1u32 << sites) - 1), sites).unwrap();
        let params = ModelParams::new(sites, lambda, alpha).unwrap();
        let m = analytic_moments(&params, config.up_count(), Walls::Exact(domain_wall_k(config))).unwrap();
        let exact = bruteforce_state_moments(config, &params, 4).unwrap();
        for (j, (a, b)) in m.raw().iter().zip(&exact).enumerate() {
            prop_assert!(close(*a, *b, 1e-9), "order {}: {} vs {}", j + 1, a, b);
        }
    }

    #[test]
    fn sector_spectra_obey_trace_identities(sites in 3usize..=9, lambda in -2.0f64..2.0, alpha in -2.0f64..2.0) {
        let params = ModelParams::new(sites, lambda, alpha).unwrap();
        let (mut first, mut second, mut dim) = (0.0, 0.0, 0);
        for basis in momentum_bases(sites).unwrap() {
            let d = diagonalize(&build_sector_hamiltonian(&basis, &params).unwrap()).unwrap();
            prop_assert!(d.energies.windows(2).all(|w| w[0] <= w[1]));
            first += d.energies.iter().sum::<f64>();
            second += d.energies.iter().map(|e| e * e).sum::<f64>();
            dim += d.dim();
        }
        let states = (1usize << sites) as f64;
        prop_assert_eq!(dim, 1 << sites);
        prop_assert!(close(first / states, 0.0, 1e-10));
        let expected = sites as f64 * (1.0 + lambda * lambda + alpha * alpha);
        prop_assert!(close(second / states, expected, 1e-10));
    }

    #[test]
    fn participation_ratio_bounds(sites in 4usize..=10, pick in any::<usize>(), lambda in 0.1f64..2.0, alpha in 0.0f64..2.0) {
        let k = pick % sites;
        let basis = MomentumBasis::new(sites, k).unwrap();
        let params = ModelParams::new(sites, lambda, alpha).unwrap();
        let d = diagonalize(&build_sector_hamiltonian(&basis, &params).unwrap()).unwrap();
        for (_, pr) in empirical_participation_ratio(&d) {
            prop_assert!(pr >= 1.0 - 1e-9 && pr <= d.dim() as f64 + 1e-9);
        }
    }

    #[test]
    fn spacing_ratios_lie_in_unit_interval(mut levels in prop::collection::vec(-10.0f64..10.0, 8..200), bulk in 0.3f64..=1.0) {
        levels.sort_by(f64::total_cmp);
        if let Ok(stats) = spacing_ratio(&levels, bulk) {
            prop_assert!((0.0..=1.0).contains(&stats.mean_r));
        }
    }

    #[test]
    fn gram_charlier_keeps_normalization(sites in 5usize..=20, pick in any::<usize>(), lambda in 0.0f64..2.0, alpha in 0.0f64..2.0) {
        let params = ModelParams::new(sites, lambda, alpha).unwrap();
        let m = analytic_moments(&params, pick % (sites + 1), Walls::Mean).unwrap();
        let reach = 12.0 * m.sigma();
        let rule = QuadratureRule::composite(m.energy - reach, m.energy + reach, 48, 16);
        let mass = rule.integrate(|e| gram_charlier_series(&m, e));
        let mean = rule.integrate(|e| e * gram_charlier_series(&m, e));
        prop_assert!(close(mass, 1.0, 1e-10));
        prop_assert!(close(mean, m.energy, 1e-9));
    }
}
