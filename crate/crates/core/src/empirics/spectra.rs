use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::windows::EnergyWindowing;
use super::Histogram;
use crate::eigensolve::EigenDecomposition;
use crate::spin_basis::{MomentumBasis, SpinConfig};
use crate::{Error, Result};

/// Histogram of `E_a` weighted by `|C_i(a)|^2` over `[E_min, E_max]` of the sector.
pub fn empirical_strength_function(decomp: &EigenDecomposition, basis_index: usize, bins: usize) -> Result<Histogram> {
    if basis_index >= decomp.dim() {
        return Err(Error::InvalidParameter(format!(
            "symbol index {basis_index} outside basis of dimension {}",
            decomp.dim()
        )));
    }
    let weights: Vec<f64> = (0..decomp.dim())
        .map(|a| decomp.coefficient(basis_index, a).norm_sqr())
        .collect();
    let lo = decomp.energies[0];
    let hi = decomp.energies[decomp.dim() - 1];
    Ok(Histogram::from_samples(&decomp.energies, lo, hi, bins, Some(&weights)))
}

/// Strength of the product state `config` over every supplied sector, as
/// `(E, weight)` pairs.
///
/// The state `T^j a` overlaps each sector admitting the orbit of `a` with
/// weight `|C_a|^2 / t`, `t` the orbit period; with all sectors present the
/// weights sum to one.
pub fn product_state_strength(
    sectors: &[(&MomentumBasis, &EigenDecomposition)],
    config: SpinConfig,
) -> Vec<(f64, f64)> {
    let mut points = Vec::new();
    for (basis, decomp) in sectors {
        if let Some((index, _)) = basis.locate(config) {
            let t = basis.state(index).period() as f64;
            for (a, &e) in decomp.energies.iter().enumerate() {
                points.push((e, decomp.coefficient(index, a).norm_sqr() / t));
            }
        }
    }
    points
}

/// `sum_a w_a E_a^k` for `k = 0..=max_order`.
pub fn strength_moments(points: &[(f64, f64)], max_order: usize) -> Vec<f64> {
    let mut sums = vec![0.0; max_order + 1];
    for &(e, w) in points {
        let mut p = w;
        for s in sums.iter_mut() {
            *s += p;
            p *= e;
        }
    }
    sums
}

/// Level histogram; `density` integrates to the fraction of levels inside `[lo, hi]`.
pub fn spectral_histogram(energies: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
    Histogram::from_samples(energies, lo, hi, bins, None)
}

/// `(E_a, 1 / sum_i |C_i(a)|^4)` for every eigenstate.
pub fn empirical_participation_ratio(decomp: &EigenDecomposition) -> Vec<(f64, f64)> {
    (0..decomp.dim())
        .into_par_iter()
        .map(|a| {
            let m2: f64 = decomp.vector(a).iter().map(|c| c.norm_sqr().powi(2)).sum();
            (decomp.energies[a], 1.0 / m2)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowMoment {
    pub lo: f64,
    pub hi: f64,
    pub mean_energy: f64,
    pub states: usize,
    /// Window mean of `sum_i |C_i|^{2q}`.
    pub direct: f64,
    /// Reciprocal of the window mean of `1 / sum_i |C_i|^{2q}`.
    pub harmonic: f64,
    pub short: bool,
}

/// Window averages of the per-state moments `sum_i |C_i|^{2q}`; `q = 1` gives 1.
pub fn empirical_moments(
    decomp: &EigenDecomposition,
    q: f64,
    windowing: &EnergyWindowing,
) -> Result<Vec<WindowMoment>> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("moment order {q} below 1")));
    }
    let per_state: Vec<f64> = if q == 1.0 {
        vec![1.0; decomp.dim()]
    } else {
        (0..decomp.dim())
            .into_par_iter()
            .map(|a| decomp.vector(a).iter().map(|c| c.norm_sqr().powf(q)).sum())
            .collect()
    };
    Ok(windowing
        .windows
        .iter()
        .map(|w| {
            let values = &per_state[w.states.clone()];
            let n = values.len() as f64;
            WindowMoment {
                lo: w.lo,
                hi: w.hi,
                mean_energy: w.mean_energy(&decomp.energies),
                states: w.len(),
                direct: values.iter().sum::<f64>() / n,
                harmonic: n / values.iter().map(|v| 1.0 / v).sum::<f64>(),
                short: w.short,
            }
        })
        .collect())
}
