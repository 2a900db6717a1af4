//! Strength functions `P_n(E)` of product states with `n` up spins.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use super::gibbs::{fit_gibbs, GibbsFit, GibbsOptions};
use crate::moments::{analytic_moments, LocalMomentSet, Walls};
use crate::{Error, ModelParams, Result};

/// Gram-Charlier values are only clamped this many standard deviations out.
pub const CLAMP_SIGMAS: f64 = 6.0;

static CLAMP_WARNED: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Gaussian,
    GramCharlier,
    Gibbs,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Gaussian => "gaussian",
            Variant::GramCharlier => "gram-charlier",
            Variant::Gibbs => "gibbs",
        }
    }
}

pub fn gaussian_density(m: &LocalMomentSet, energy: f64) -> f64 {
    let d = energy - m.energy;
    (-0.5 * d * d / m.sigma2).exp() / (2.0 * PI * m.sigma2).sqrt()
}

/// Gaussian times `1 + k3/(6 sigma^3) He_3(x) + k4/(24 sigma^4) He_4(x)`, without clamping.
pub fn gram_charlier_series(m: &LocalMomentSet, energy: f64) -> f64 {
    let x = (energy - m.energy) / m.sigma();
    let h3 = x * x * x - 3.0 * x;
    let h4 = x * x * x * x - 6.0 * x * x + 3.0;
    gaussian_density(m, energy) * (1.0 + m.skewness() / 6.0 * h3 + m.excess_kurtosis() / 24.0 * h4)
}

/// The series with negative values beyond [`CLAMP_SIGMAS`] set to zero.
///
/// Closer to the centre the series is returned unchanged, negative or not, so
/// that its normalization and first four moments stay exact.
pub fn gram_charlier_density(m: &LocalMomentSet, energy: f64) -> f64 {
    let value = gram_charlier_series(m, energy);
    if value >= 0.0 || (energy - m.energy).abs() <= CLAMP_SIGMAS * m.sigma() {
        return value;
    }
    if !CLAMP_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!("Gram-Charlier strength function negative beyond {CLAMP_SIGMAS} sigma; clamped to zero");
    }
    0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Gaussian,
    GramCharlier,
    Gibbs(GibbsFit),
}

/// Per-`n` strength functions for one set of couplings, built from the
/// analytic moments with the mean domain-wall number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthModel {
    pub variant: Variant,
    pub params: ModelParams,
    pub moments: Vec<LocalMomentSet>,
    pub shapes: Vec<Shape>,
    /// Up counts whose maximum-entropy fit did not converge and use Gram-Charlier instead.
    pub fallbacks: Vec<usize>,
}

impl StrengthModel {
    pub fn new(params: &ModelParams, variant: Variant) -> Result<Self> {
        Self::with_gibbs_options(params, variant, &GibbsOptions::default())
    }

    pub fn with_gibbs_options(params: &ModelParams, variant: Variant, options: &GibbsOptions) -> Result<Self> {
        let moments = (0..=params.sites)
            .map(|n| analytic_moments(params, n, Walls::Mean))
            .collect::<Result<Vec<_>>>()?;
        let mut fallbacks = Vec::new();
        let shapes = moments
            .iter()
            .map(|m| match variant {
                Variant::Gaussian => Ok(Shape::Gaussian),
                Variant::GramCharlier => Ok(Shape::GramCharlier),
                Variant::Gibbs => match fit_gibbs(m, options) {
                    Ok(fit) => Ok(Shape::Gibbs(fit)),
                    Err(Error::NotConverged { iterations, residual }) => {
                        log::warn!(
                            "max-entropy fit for n={} stopped after {iterations} iterations (residual {residual:e}); using Gram-Charlier",
                            m.n
                        );
                        fallbacks.push(m.n);
                        Ok(Shape::GramCharlier)
                    }
                    Err(e) => Err(e),
                },
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            variant,
            params: *params,
            moments,
            shapes,
            fallbacks,
        })
    }

    pub fn sites(&self) -> usize {
        self.params.sites
    }

    /// `P_n(E)`.
    pub fn density(&self, n: usize, energy: f64) -> f64 {
        let m = &self.moments[n];
        match &self.shapes[n] {
            Shape::Gaussian => gaussian_density(m, energy),
            Shape::GramCharlier => gram_charlier_density(m, energy),
            Shape::Gibbs(fit) => fit.density(energy),
        }
    }

    /// `P_n(E)` for every `n`.
    pub fn densities(&self, energy: f64) -> Vec<f64> {
        (0..=self.sites()).map(|n| self.density(n, energy)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statmodel::quadrature::QuadratureRule;

    fn params() -> ModelParams {
        ModelParams::new(17, 1.0, 1.0).unwrap()
    }

    #[test]
    fn gaussian_peak_and_symmetry() {
        let model = StrengthModel::new(&params(), Variant::Gaussian).unwrap();
        let m = model.moments[8];
        assert!((model.density(8, m.energy) - 1.0 / (68.0 * PI).sqrt()).abs() < 1e-15);
        for x in [0.3, 2.0, 7.5] {
            assert_eq!(model.density(8, m.energy + x), model.density(8, m.energy - x));
        }
    }

    #[test]
    fn gram_charlier_peak_and_gaussian_limit() {
        let model = StrengthModel::new(&params(), Variant::GramCharlier).unwrap();
        let m = model.moments[8];
        let expected = (1.0 + m.k4 / (8.0 * m.sigma2 * m.sigma2)) / (68.0 * PI).sqrt();
        assert!((model.density(8, m.energy) - expected).abs() < 1e-15);
        let flat = LocalMomentSet { k3: 0.0, k4: 0.0, ..m };
        for e in [-20.0, -3.0, 0.0, 4.0, 11.0] {
            assert_eq!(gram_charlier_series(&flat, e), gaussian_density(&flat, e));
        }
    }

    #[test]
    fn normalization_and_moment_fidelity() {
        let p = ModelParams::new(14, 1.0, 1.0).unwrap();
        for variant in [Variant::Gaussian, Variant::GramCharlier, Variant::Gibbs] {
            let model = StrengthModel::new(&p, variant).unwrap();
            assert!(model.fallbacks.is_empty());
            for (n, m) in model.moments.iter().enumerate() {
                let s = m.sigma();
                let rule = QuadratureRule::composite(m.energy - 12.0 * s, m.energy + 12.0 * s, 100, 40);
                let norm = rule.integrate(|e| model.density(n, e));
                assert!((norm - 1.0).abs() < 1e-8, "{variant:?} n={n}: {norm}");
                let orders = if variant == Variant::Gaussian { 2 } else { 4 };
                // Gram-Charlier fidelity is a property of the unclamped series
                let density = |e: f64| match variant {
                    Variant::GramCharlier => gram_charlier_series(m, e),
                    _ => model.density(n, e),
                };
                for (j, target) in m.raw().iter().enumerate().take(orders) {
                    let value = rule.integrate(|e| e.powi(j as i32 + 1) * density(e));
                    let tol = if variant == Variant::Gibbs { 1e-8 } else { 1e-6 };
                    assert!(
                        (value - target).abs() < tol * target.abs().max(1.0),
                        "{variant:?} n={n} j={}",
                        j + 1
                    );
                }
            }
        }
    }
}
