use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::windows::EnergyWindowing;
use super::Histogram;
use crate::eigensolve::EigenDecomposition;
use crate::{Error, Result};

/// Windows with fewer samples are reported but flagged.
pub const MIN_SAMPLES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientOptions {
    /// Bins of the exported histogram, spanning `mean +- 4 sd`.
    pub histogram_bins: usize,
    /// Equal-probability bins of the chi-square test.
    pub chi2_bins: usize,
}

impl Default for CoefficientOptions {
    fn default() -> Self {
        Self {
            histogram_bins: 40,
            chi2_bins: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientWindowStats {
    pub lo: f64,
    pub hi: f64,
    /// Real coefficients in self-conjugate sectors, real and imaginary parts otherwise.
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    /// `<|C|^2>` over the window's states.
    pub mean_square_modulus: f64,
    pub histogram: Histogram,
    /// Chi-square per degree of freedom against the fitted Gaussian.
    pub reduced_chi2: f64,
    pub degrees_of_freedom: usize,
    pub insufficient: bool,
}

/// Reduced chi-square of `samples` against `N(mean, variance)` using `bins`
/// equal-probability cells; two fitted parameters are subtracted.
pub fn gaussian_chi2(samples: &[f64], mean: f64, variance: f64, bins: usize) -> Result<(f64, usize)> {
    if bins < 4 {
        return Err(Error::InvalidParameter(format!(
            "{bins} bins leave no degrees of freedom"
        )));
    }
    let normal =
        Normal::new(mean, variance.sqrt()).map_err(|e| Error::InvalidParameter(format!("gaussian fit: {e}")))?;
    let edges: Vec<f64> = (1..bins).map(|i| normal.inverse_cdf(i as f64 / bins as f64)).collect();
    let mut observed = vec![0usize; bins];
    for &x in samples {
        observed[edges.partition_point(|&e| e <= x)] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    let chi2: f64 = observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let dof = bins - 3;
    Ok((chi2 / dof as f64, dof))
}

pub fn windowed_coefficient_stats(
    decomp: &EigenDecomposition,
    basis_index: usize,
    windowing: &EnergyWindowing,
    self_conjugate: bool,
    options: &CoefficientOptions,
) -> Result<Vec<CoefficientWindowStats>> {
    if basis_index >= decomp.dim() {
        return Err(Error::InvalidParameter(format!(
            "symbol index {basis_index} outside basis of dimension {}",
            decomp.dim()
        )));
    }
    windowing
        .windows
        .iter()
        .map(|w| {
            let mut samples = Vec::with_capacity(2 * w.len());
            let mut square = 0.0;
            for a in w.states.clone() {
                let c = decomp.coefficient(basis_index, a);
                square += c.norm_sqr();
                samples.push(c.re);
                if !self_conjugate {
                    samples.push(c.im);
                }
            }
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let variance = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let sd = variance.sqrt();
            let histogram =
                Histogram::from_samples(&samples, mean - 4.0 * sd, mean + 4.0 * sd, options.histogram_bins, None);
            let (reduced_chi2, degrees_of_freedom) = if variance > 0.0 {
                gaussian_chi2(&samples, mean, variance, options.chi2_bins)?
            } else {
                (f64::NAN, 0)
            };
            Ok(CoefficientWindowStats {
                lo: w.lo,
                hi: w.hi,
                samples: samples.len(),
                mean,
                variance,
                mean_square_modulus: square / w.len() as f64,
                histogram,
                reduced_chi2,
                degrees_of_freedom,
                insufficient: samples.len() < MIN_SAMPLES,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn true_gaussian_gives_unit_reduced_chi2() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut values = Vec::new();
        for _ in 0..200 {
            let samples: Vec<f64> = (0..2000)
                .map(|_| 0.3 * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect();
            let mean = samples.iter().sum::<f64>() / 2000.0;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 1999.0;
            values.push(gaussian_chi2(&samples, mean, var, 20).unwrap().0);
        }
        // with fitted mean and variance the statistic lies between chi2(17) and chi2(19)
        let mean = values.iter().sum::<f64>() / 200.0;
        assert!(mean > 0.9 && mean < 1.22, "mean reduced chi2 {mean}");
    }

    #[test]
    fn uniform_samples_are_rejected() {
        let samples: Vec<f64> = (0..5000).map(|i| i as f64 / 5000.0 - 0.5).collect();
        let var = 1.0 / 12.0;
        assert!(gaussian_chi2(&samples, 0.0, var, 20).unwrap().0 > 5.0);
    }
}
