use ising_core::eigensolve::{diagonalize, EigenDecomposition};
use ising_core::empirics::{empirical_strength_function, product_state_strength, spectral_histogram, strength_moments};
use ising_core::hamiltonian::build_sector_hamiltonian;
use ising_core::moments::bruteforce_state_moments;
use ising_core::spin_basis::{momentum_bases, MomentumBasis, SpinConfig};
use ising_core::ModelParams;

fn all_sectors(params: &ModelParams) -> Vec<(MomentumBasis, EigenDecomposition)> {
    momentum_bases(params.sites)
        .unwrap()
        .into_iter()
        .map(|b| {
            let d = diagonalize(&build_sector_hamiltonian(&b, params).unwrap()).unwrap();
            (b, d)
        })
        .collect()
}

#[test]
fn product_state_sum_rules() {
    let params = ModelParams::new(10, 1.0, 1.0).unwrap();
    let sectors = all_sectors(&params);
    let refs: Vec<_> = sectors.iter().map(|(b, d)| (b, d)).collect();
    for bits in [0u32, 0b1, 0b1010101010, 0b0000011111, 0b1100100011, 0b1111111111] {
        let config = SpinConfig::new(bits, 10).unwrap();
        let sums = strength_moments(&product_state_strength(&refs, config), 4);
        assert!((sums[0] - 1.0).abs() < 1e-10);
        let exact = bruteforce_state_moments(config, &params, 4).unwrap();
        for k in 1..=4 {
            let scale = exact[k - 1].abs().max(1.0);
            assert!((sums[k] - exact[k - 1]).abs() < 1e-8 * scale, "{config} k={k}");
        }
    }
}

#[test]
fn strength_function_weights() {
    let params = ModelParams::new(9, 1.0, 1.0).unwrap();
    let sectors = all_sectors(&params);
    let (_, d) = &sectors[0];
    for i in 0..d.dim() {
        let h = empirical_strength_function(d, i, 30).unwrap();
        assert!((h.total_weight - 1.0).abs() < 1e-10);
        let mass: f64 = h.weights.iter().sum();
        assert!((mass - 1.0).abs() < 1e-10);
    }
    assert!(empirical_strength_function(d, d.dim(), 30).is_err());
}

#[test]
fn strength_functions_add_up_to_spectral_measure() {
    let params = ModelParams::new(12, 1.0, 1.0).unwrap();
    let basis = MomentumBasis::new(12, 3).unwrap();
    let d = diagonalize(&build_sector_hamiltonian(&basis, &params).unwrap()).unwrap();
    let bins = 40;
    let levels = spectral_histogram(&d.energies, d.energies[0], d.energies[d.dim() - 1], bins);
    let mut summed = vec![0.0; bins];
    for i in 0..d.dim() {
        let h = empirical_strength_function(&d, i, bins).unwrap();
        for (s, w) in summed.iter_mut().zip(&h.weights) {
            *s += w;
        }
    }
    for (s, c) in summed.iter().zip(&levels.weights) {
        assert!((s - c).abs() < 1e-9);
    }
}

#[test]
fn strong_field_centres_strength_on_diagonal() {
    let params = ModelParams::new(9, 5.0, 1.0).unwrap();
    let basis = MomentumBasis::new(9, 0).unwrap();
    let h = build_sector_hamiltonian(&basis, &params).unwrap();
    let d = diagonalize(&h).unwrap();
    for i in 0..basis.dim() {
        let mean: f64 = (0..d.dim())
            .map(|a| d.coefficient(i, a).norm_sqr() * d.energies[a])
            .sum();
        assert!((mean - h.get(i, i).re).abs() < 1e-10);
        let diagonal = params.diagonal_energy(basis.state(i).up_count());
        assert!((mean - diagonal).abs() < params.lambda, "{mean} vs {diagonal}");
    }
}
