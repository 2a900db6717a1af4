use faer::{c64, Mat, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{eigenvalues_real_symmetric, EigenDecomposition};
use crate::spin_basis::MomentumBasis;
use crate::{Error, Result};

/// Spacings below this are treated as exact degeneracies and dropped.
pub const DEGENERATE_SPACING: f64 = 1e-12;
/// Levels closer than this are diagonalized together under inversion.
pub const CLUSTER_GAP: f64 = 1e-9;
/// Maximum `|<S> -+ 1|` for a parity assignment.
pub const PARITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingStats {
    /// Mean of `min(s_i, s_{i+1}) / max(s_i, s_{i+1})`.
    pub mean_r: f64,
    pub ratios: usize,
    /// Numerically degenerate spacings excluded from the ratios.
    pub excluded: usize,
}

impl SpacingStats {
    /// Ratio-weighted mean over several spectra.
    pub fn pooled(stats: &[SpacingStats]) -> Self {
        let ratios: usize = stats.iter().map(|s| s.ratios).sum();
        let sum: f64 = stats.iter().map(|s| s.mean_r * s.ratios as f64).sum();
        Self {
            mean_r: sum / ratios as f64,
            ratios,
            excluded: stats.iter().map(|s| s.excluded).sum(),
        }
    }
}

/// Mean spacing ratio over the central `bulk_fraction` of ascending `energies`.
pub fn spacing_ratio(energies: &[f64], bulk_fraction: f64) -> Result<SpacingStats> {
    if !(bulk_fraction > 0.0 && bulk_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("bulk fraction {bulk_fraction}")));
    }
    if energies.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("energies must be ascending".into()));
    }
    let cut = ((1.0 - bulk_fraction) / 2.0 * energies.len() as f64).floor() as usize;
    let bulk = &energies[cut..energies.len() - cut];
    let all: Vec<f64> = bulk.windows(2).map(|w| w[1] - w[0]).collect();
    let spacings: Vec<f64> = all.iter().copied().filter(|&s| s >= DEGENERATE_SPACING).collect();
    let excluded = all.len() - spacings.len();
    if spacings.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "{} usable spacings in the bulk",
            spacings.len()
        )));
    }
    let sum: f64 = spacings.windows(2).map(|w| w[0].min(w[1]) / w[0].max(w[1])).sum();
    let ratios = spacings.len() - 1;
    Ok(SpacingStats {
        mean_r: sum / ratios as f64,
        ratios,
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
    Unresolved,
}

impl Parity {
    fn of(value: f64) -> Self {
        if (value - 1.0).abs() < PARITY_THRESHOLD {
            Parity::Even
        } else if (value + 1.0).abs() < PARITY_THRESHOLD {
            Parity::Odd
        } else {
            Parity::Unresolved
        }
    }
}

fn inversion_element(basis: &MomentumBasis, decomp: &EigenDecomposition, left: usize, right: usize) -> Complex64 {
    let (phi, psi) = (decomp.vector(left), decomp.vector(right));
    (0..basis.dim())
        .map(|a| phi[basis.inversion_partner(a)].conj() * basis.inversion_phase(a) * psi[a])
        .sum()
}

/// Inversion parity of every eigenstate of a self-conjugate sector.
///
/// Isolated levels use `<S>` directly. Within a cluster of levels closer than
/// [`CLUSTER_GAP`] the inversion matrix is diagonalized and its eigenvalues are
/// handed to the cluster members in ascending order, odd first.
pub fn inversion_parities(basis: &MomentumBasis, decomp: &EigenDecomposition) -> Result<Vec<Parity>> {
    if !basis.is_self_conjugate() {
        return Err(Error::Momentum {
            momentum: basis.momentum(),
            sites: basis.sites(),
        });
    }
    if basis.dim() != decomp.dim() {
        return Err(Error::InvalidParameter(
            "basis and decomposition dimensions differ".into(),
        ));
    }
    let e = &decomp.energies;
    let mut parities = Vec::with_capacity(e.len());
    let mut start = 0;
    while start < e.len() {
        let mut end = start + 1;
        while end < e.len() && e[end] - e[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        if end - start == 1 {
            parities.push(Parity::of(inversion_element(basis, decomp, start, start).re));
        } else {
            let m = end - start;
            let s = Mat::<c64>::from_fn(m, m, |i, j| inversion_element(basis, decomp, start + i, start + j));
            let values = s
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|err| Error::Convergence {
                    fingerprint: String::new(),
                    reason: format!("{err:?}"),
                })?;
            parities.extend(values.into_iter().map(Parity::of));
        }
        start = end;
    }
    Ok(parities)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParitySpectra {
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
    pub unresolved: usize,
}

pub fn parity_resolved_spectra(basis: &MomentumBasis, decomp: &EigenDecomposition) -> Result<ParitySpectra> {
    let parities = inversion_parities(basis, decomp)?;
    let mut split = ParitySpectra {
        even: Vec::new(),
        odd: Vec::new(),
        unresolved: 0,
    };
    for (&p, &e) in parities.iter().zip(&decomp.energies) {
        match p {
            Parity::Even => split.even.push(e),
            Parity::Odd => split.odd.push(e),
            Parity::Unresolved => split.unresolved += 1,
        }
    }
    if split.unresolved > 0 {
        log::warn!("{} eigenstates without definite inversion parity", split.unresolved);
    }
    Ok(split)
}

/// Pooled spacing ratio of `samples` GOE matrices of size `dim`.
pub fn goe_surrogate(dim: usize, samples: usize, bulk_fraction: f64, seed: u64) -> Result<SpacingStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut h = vec![0.0; dim * dim];
        for i in 0..dim {
            h[i * dim + i] = std::f64::consts::SQRT_2 * rng.sample::<f64, _>(StandardNormal);
            for j in 0..i {
                let x: f64 = rng.sample(StandardNormal);
                h[i * dim + j] = x;
                h[j * dim + i] = x;
            }
        }
        let mut levels = eigenvalues_real_symmetric(&h, dim)?;
        levels.sort_by(f64::total_cmp);
        stats.push(spacing_ratio(&levels, bulk_fraction)?);
    }
    Ok(SpacingStats::pooled(&stats))
}

/// Pooled spacing ratio of `samples` spectra of `levels` independent uniform levels.
pub fn poisson_surrogate(levels: usize, samples: usize, bulk_fraction: f64, seed: u64) -> Result<SpacingStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut e: Vec<f64> = (0..levels).map(|_| rng.random::<f64>()).collect();
        e.sort_by(f64::total_cmp);
        stats.push(spacing_ratio(&e, bulk_fraction)?);
    }
    Ok(SpacingStats::pooled(&stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_of_known_spacings() {
        let e = [0.0, 1.0, 3.0, 4.0];
        let s = spacing_ratio(&e, 1.0).unwrap();
        assert_eq!(s.ratios, 2);
        assert!((s.mean_r - 0.5).abs() < 1e-15);
        let degenerate = [0.0, 1.0, 1.0, 3.0, 4.0];
        let s = spacing_ratio(&degenerate, 1.0).unwrap();
        assert_eq!((s.ratios, s.excluded), (2, 1));
        assert!(spacing_ratio(&[0.0, 1.0], 1.0).is_err());
        assert!(spacing_ratio(&e, 0.0).is_err());
    }

    #[test]
    fn uniform_ladder_has_unit_ratio() {
        let e: Vec<f64> = (0..100).map(f64::from).collect();
        let s = spacing_ratio(&e, 0.6).unwrap();
        assert_eq!(s.mean_r, 1.0);
        assert_eq!(s.ratios, 58);
    }

    #[test]
    fn surrogates_are_seeded() {
        let a = poisson_surrogate(200, 3, 0.6, 11).unwrap();
        assert_eq!(a, poisson_surrogate(200, 3, 0.6, 11).unwrap());
        assert_ne!(a, poisson_surrogate(200, 3, 0.6, 12).unwrap());
    }
}
