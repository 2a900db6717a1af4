//! Statistics measured on eigen-decompositions and their comparison with the
//! model predictions.

mod coefficients;
mod compare;
mod spacing;
mod spectra;
mod windows;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::format::float;
use crate::Result;

pub use coefficients::{
    gaussian_chi2, windowed_coefficient_stats, CoefficientOptions, CoefficientWindowStats, MIN_SAMPLES,
};
pub use compare::{
    compare, compare_with, BulkDefinition, ComparisonPoint, ComparisonReport, EmpiricalSeries, Quantity,
};
pub use spacing::{
    goe_surrogate, inversion_parities, parity_resolved_spectra, poisson_surrogate, spacing_ratio, Parity,
    ParitySpectra, SpacingStats, DEGENERATE_SPACING, PARITY_THRESHOLD,
};
pub use spectra::{
    empirical_moments, empirical_participation_ratio, empirical_strength_function, product_state_strength,
    spectral_histogram, strength_moments, WindowMoment,
};
pub use windows::{default_level_count, EnergyWindowing, Window, WindowPolicy};

/// Weighted histogram with uniform bins on `[edges[0], edges[bins]]`.
///
/// `density` is weight per unit length divided by the total weight of all
/// samples, including any that fell outside the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub weights: Vec<f64>,
    pub density: Vec<f64>,
    pub total_weight: f64,
}

impl Histogram {
    /// Samples equal to `hi` go into the last bin.
    pub fn from_samples(samples: &[f64], lo: f64, hi: f64, bins: usize, weights: Option<&[f64]>) -> Self {
        let bins = bins.max(1);
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0.0; bins];
        let mut total = 0.0;
        for (i, &x) in samples.iter().enumerate() {
            let w = weights.map_or(1.0, |w| w[i]);
            total += w;
            if !(x >= lo && x <= hi) || width <= 0.0 {
                continue;
            }
            let b = (((x - lo) / width) as usize).min(bins - 1);
            counts[b] += w;
        }
        let density = counts
            .iter()
            .map(|c| {
                if total > 0.0 && width > 0.0 {
                    c / (total * width)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            edges,
            weights: counts,
            density,
            total_weight: total,
        }
    }

    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    pub fn center(&self, bin: usize) -> f64 {
        0.5 * (self.edges[bin] + self.edges[bin + 1])
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|b| self.center(b)).collect()
    }

    /// `bin_lo,bin_hi,density` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bin_lo,bin_hi,density")?;
        for (b, d) in self.density.iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                float(self.edges[b]),
                float(self.edges[b + 1]),
                float(*d)
            )?;
        }
        Ok(())
    }
}
