//! Statistical model of chaotic eigenfunctions.
//!
//! Expansion coefficients of eigenstates at energy `E` are treated as Gaussian
//! random variables whose variance is set by the strength function `P_n(E)` of
//! the product state. The strength functions are Gaussian to leading order and
//! can be corrected with the third and fourth cumulants, either through the
//! Gram-Charlier series or a maximum-entropy fit.

pub mod gibbs;
mod predict;
pub mod quadrature;
mod strength;

pub use gibbs::{fit_gibbs, Constraints, GibbsFit, GibbsOptions};
pub use predict::{
    delta_correction, energy_grid, gauss_factor_complex, gauss_factor_real, model_spectral_density, predict_moment,
    predict_participation_ratio, DeltaMode, ParitySplit, PredictionCurve, Predictor, SectorKind, Weighting,
};
pub use strength::{
    gaussian_density, gram_charlier_density, gram_charlier_series, Shape, StrengthModel, Variant, CLAMP_SIGMAS,
};
