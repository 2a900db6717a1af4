use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Couplings of `H = -sum s^x_n s^x_{n+1} - lambda sum s^z_n - alpha sum s^x_n`
/// on a ring of `sites` spins (periodic boundary conditions only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub sites: usize,
    pub lambda: f64,
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(sites: usize, lambda: f64, alpha: f64) -> Result<Self> {
        let params = Self { sites, lambda, alpha };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::Size {
                sites: self.sites,
                min: 2,
                max: 32,
            });
        }
        if !self.lambda.is_finite() || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "fields must be finite (lambda={}, alpha={})",
                self.lambda, self.alpha
            )));
        }
        Ok(())
    }

    /// Diagonal energy `lambda (N - 2n)` of any product state with `n` up spins.
    pub fn diagonal_energy(&self, up: usize) -> f64 {
        self.lambda * (self.sites as f64 - 2.0 * up as f64)
    }
}
