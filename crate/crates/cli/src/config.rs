use std::path::{Path, PathBuf};

use ising_core::empirics::WindowPolicy;
use ising_core::statmodel::Variant;
use ising_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Corrections {
    /// Plain Gaussian strength functions, approximate sector weights.
    None,
    GramCharlier,
    Gibbs,
}

impl Corrections {
    pub fn label(self) -> &'static str {
        match self {
            Corrections::None => "none",
            Corrections::GramCharlier => "gram-charlier",
            Corrections::Gibbs => "gibbs",
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            Corrections::None => Variant::Gaussian,
            Corrections::GramCharlier => Variant::GramCharlier,
            Corrections::Gibbs => Variant::Gibbs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub sites: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub momenta: Vec<usize>,
    pub corrections: Vec<Corrections>,
    /// `None` uses `max(50, dim / 40)` levels per window.
    pub windowing: Option<WindowPolicy>,
    pub bulk_fraction: f64,
    pub grid: usize,
    pub orders: Vec<f64>,
    /// Basis index or spin string for `coeff-hist`; `None` picks the middle of the basis.
    pub symbol: Option<String>,
    pub seed: u64,
    pub cache_dir: PathBuf,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(self.sites, self.lambda, self.alpha)?)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if let Some(k) = self.momenta.iter().find(|&&k| k >= self.sites) {
            return Err(CliError::usage(format!("momentum {k} is not in 0..{}", self.sites)));
        }
        if self.momenta.is_empty() {
            return Err(CliError::usage("no momentum sectors selected"));
        }
        if !(self.bulk_fraction > 0.0 && self.bulk_fraction <= 1.0) {
            return Err(CliError::usage(format!(
                "bulk fraction {} outside (0, 1]",
                self.bulk_fraction
            )));
        }
        if self.grid < 2 {
            return Err(CliError::usage("grid needs at least two points"));
        }
        if self.orders.iter().any(|&q| !(q >= 1.0)) {
            return Err(CliError::usage("moment orders must be at least 1"));
        }
        Ok(())
    }

    /// Reads a bare config or the `config` member of a provenance file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
}

impl Provenance {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            tool: "ising".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
        }
    }
}
