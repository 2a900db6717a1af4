//! Spectral density, eigenfunction moments and participation ratio predicted
//! from the strength functions.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::strength::{StrengthModel, Variant};
use crate::format::float;
use crate::spin_basis::{binomial, SectorCounts};
use crate::Result;

/// `<|z|^{2q}>` for a unit-variance complex Gaussian: `Gamma(q + 1)`.
pub fn gauss_factor_complex(q: f64) -> f64 {
    gamma(q + 1.0)
}

/// `<x^{2q}>` for a unit-variance real Gaussian: `2^q Gamma(q + 1/2) / sqrt(pi)`.
pub fn gauss_factor_real(q: f64) -> f64 {
    2f64.powf(q) * gamma(q + 0.5) / std::f64::consts::PI.sqrt()
}

/// Weights `w_n` of the strength functions in the mixture.
#[derive(Debug, Clone, Copy)]
pub enum Weighting<'a> {
    /// `C(N, n)`: all `2^N` product states.
    FullBasis,
    /// Exact sector counts `nu_tot(n)`.
    Sector(&'a SectorCounts),
    /// `C(N, n) / N`, the large-`N` sector estimate.
    ApproxSector,
}

impl Weighting<'_> {
    pub fn weights(&self, sites: usize) -> Vec<f64> {
        match self {
            Weighting::FullBasis => (0..=sites).map(|n| binomial(sites as u64, n as u64) as f64).collect(),
            Weighting::Sector(counts) => counts.nu_tot.iter().map(|&v| v as f64).collect(),
            Weighting::ApproxSector => (0..=sites)
                .map(|n| binomial(sites as u64, n as u64) as f64 / sites as f64)
                .collect(),
        }
    }
}

/// `rho(E) = sum_n w_n P_n(E) / sum_n w_n`.
pub fn model_spectral_density(model: &StrengthModel, energy: f64, weighting: Weighting<'_>) -> f64 {
    let w = weighting.weights(model.sites());
    let total: f64 = w.iter().sum();
    w.iter()
        .enumerate()
        .map(|(n, w)| w * model.density(n, energy))
        .sum::<f64>()
        / total
}

#[derive(Debug, Clone, Copy)]
pub enum DeltaMode<'a> {
    /// No invariant-state correction.
    Off,
    /// `N_inv / N_tot`.
    Uniform(&'a SectorCounts),
    /// `sum nu_inv P^q / sum nu_tot P^q`.
    Exact(&'a SectorCounts),
}

/// Coefficient variance `P_n(E)`, floored at zero where a truncated series dips below it.
fn variance(model: &StrengthModel, n: usize, energy: f64) -> f64 {
    model.density(n, energy).max(0.0)
}

pub fn delta_correction(model: &StrengthModel, energy: f64, q: f64, mode: DeltaMode<'_>) -> f64 {
    match mode {
        DeltaMode::Off => 0.0,
        DeltaMode::Uniform(counts) => counts.delta(),
        DeltaMode::Exact(counts) => {
            let (mut inv, mut tot) = (0.0, 0.0);
            for n in 0..=model.sites() {
                let p = variance(model, n, energy).powf(q);
                inv += counts.nu_inv[n] as f64 * p;
                tot += counts.nu_tot[n] as f64 * p;
            }
            if tot > 0.0 {
                inv / tot
            } else {
                counts.delta()
            }
        }
    }
}

/// Whether eigenfunctions of the sector are real (`k = 0`, `k = N/2`) or complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorKind {
    SelfConjugate,
    Complex,
}

impl SectorKind {
    pub fn of(sites: usize, momentum: usize) -> Self {
        if (2 * momentum).is_multiple_of(sites) {
            SectorKind::SelfConjugate
        } else {
            SectorKind::Complex
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Predictor<'a> {
    pub model: &'a StrengthModel,
    pub weighting: Weighting<'a>,
    pub sector: SectorKind,
    pub delta: DeltaMode<'a>,
}

impl<'a> Predictor<'a> {
    /// Plain Gaussian model with approximate sector weights and no symmetry correction.
    pub fn uncorrected(model: &'a StrengthModel, sector: SectorKind) -> Self {
        Self {
            model,
            weighting: Weighting::ApproxSector,
            sector,
            delta: DeltaMode::Off,
        }
    }

    /// Exact sector weights and the uniform invariant fraction.
    pub fn corrected(model: &'a StrengthModel, counts: &'a SectorCounts) -> Self {
        Self {
            model,
            weighting: Weighting::Sector(counts),
            sector: SectorKind::of(counts.sites, counts.momentum),
            delta: DeltaMode::Uniform(counts),
        }
    }

    /// `sum w P^q / (sum w P)^q`.
    pub fn mixture_ratio(&self, energy: f64, q: f64) -> f64 {
        let w = self.weighting.weights(self.model.sites());
        let (mut num, mut den) = (0.0, 0.0);
        for (n, w) in w.iter().enumerate() {
            let p = variance(self.model, n, energy);
            num += w * p.powf(q);
            den += w * p;
        }
        num / den.powf(q)
    }

    /// Effective `R_q` including the invariant-state correction.
    pub fn gauss_factor(&self, energy: f64, q: f64) -> f64 {
        let real = gauss_factor_real(q);
        match self.sector {
            SectorKind::Complex => {
                let complex = gauss_factor_complex(q);
                complex + (real - complex) * delta_correction(self.model, energy, q, self.delta)
            }
            SectorKind::SelfConjugate => {
                let delta = delta_correction(self.model, energy, q, self.delta);
                real * (1.0 + (2f64.powf(q - 1.0) - 1.0) * delta)
            }
        }
    }

    /// `M_q(E) = <sum |C|^{2q}>`.
    pub fn moment(&self, energy: f64, q: f64) -> f64 {
        self.gauss_factor(energy, q) * self.mixture_ratio(energy, q)
    }

    /// `Pr(E) = 1 / M_2(E)`.
    pub fn participation_ratio(&self, energy: f64) -> f64 {
        1.0 / self.moment(energy, 2.0)
    }
}

pub fn predict_moment(predictor: &Predictor<'_>, energy: f64, q: f64) -> f64 {
    predictor.moment(energy, q)
}

pub fn predict_participation_ratio(predictor: &Predictor<'_>, energy: f64) -> f64 {
    predictor.participation_ratio(energy)
}

/// Split of a self-conjugate sector into inversion-even and -odd subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParitySplit {
    pub delta: f64,
    pub total: f64,
    pub dim_plus: f64,
    pub dim_minus: f64,
    /// `rho_+- / rho`.
    pub density_plus: f64,
    pub density_minus: f64,
    /// `Sigma~^2(+-) / Sigma^2`.
    pub variance_plus: f64,
    pub variance_minus: f64,
}

impl ParitySplit {
    pub fn new(counts: &SectorCounts) -> Self {
        Self::from_delta(counts.delta(), counts.total() as f64)
    }

    pub fn from_delta(delta: f64, total: f64) -> Self {
        Self {
            delta,
            total,
            dim_plus: 0.5 * (1.0 + delta) * total,
            dim_minus: 0.5 * (1.0 - delta) * total,
            density_plus: 0.5 * (1.0 + delta),
            density_minus: 0.5 * (1.0 - delta),
            variance_plus: 2.0 / (1.0 + delta),
            variance_minus: 2.0 / (1.0 - delta),
        }
    }

    /// `(M_q^+, M_q^-)` from the unsplit real-Gaussian moment `M_q`.
    ///
    /// The odd subspace contains only pair combinations, so its moments are
    /// those of a real Gaussian over `N_-` components rescaled by
    /// `(1 - delta)^{1-q}`.
    pub fn moments(&self, q: f64, m_q: f64) -> (f64, f64) {
        let d = self.delta;
        let plus = (1.0 - d + 2f64.powf(q) * d) / (1.0 + d).powf(q) * m_q;
        let minus = m_q / (1.0 - d).powf(q - 1.0);
        (plus, minus)
    }

    /// Density-weighted average of the two parities.
    pub fn averaged_moment(&self, q: f64, m_q: f64) -> f64 {
        let (plus, minus) = self.moments(q, m_q);
        self.density_plus * plus + self.density_minus * minus
    }
}

/// Uniform energy grid of `points` values on `[lo, hi]`.
pub fn energy_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionCurve {
    pub energies: Vec<f64>,
    pub rho: Vec<f64>,
    pub orders: Vec<f64>,
    /// `moments[i][j]`: order `orders[i]` at `energies[j]`.
    pub moments: Vec<Vec<f64>>,
    pub participation: Vec<f64>,
    pub variant: Variant,
    pub momentum: usize,
    pub sector: SectorKind,
    pub corrections: String,
}

impl PredictionCurve {
    pub fn compute(
        predictor: &Predictor<'_>,
        momentum: usize,
        energies: &[f64],
        orders: &[f64],
        corrections: &str,
    ) -> Self {
        let rows: Vec<(f64, Vec<f64>, f64)> = energies
            .par_iter()
            .map(|&e| {
                let rho = model_spectral_density(predictor.model, e, predictor.weighting);
                let m = orders.iter().map(|&q| predictor.moment(e, q)).collect();
                (rho, m, predictor.participation_ratio(e))
            })
            .collect();
        let mut moments = vec![Vec::with_capacity(energies.len()); orders.len()];
        let mut rho = Vec::with_capacity(energies.len());
        let mut participation = Vec::with_capacity(energies.len());
        for (r, m, pr) in rows {
            rho.push(r);
            participation.push(pr);
            for (column, value) in moments.iter_mut().zip(m) {
                column.push(value);
            }
        }
        Self {
            energies: energies.to_vec(),
            rho,
            orders: orders.to_vec(),
            moments,
            participation,
            variant: predictor.model.variant,
            momentum,
            sector: predictor.sector,
            corrections: corrections.to_string(),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        self.write_csv_header(&mut out)?;
        self.write_csv_rows(out)
    }

    pub fn write_csv_header<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "E,rho")?;
        for q in &self.orders {
            write!(out, ",M_{q}")?;
        }
        writeln!(out, ",Pr,variant,sector,corrections")?;
        Ok(())
    }

    /// Data rows only, for concatenating curves that share a header.
    pub fn write_csv_rows<W: Write>(&self, mut out: W) -> Result<()> {
        let sector = match self.sector {
            SectorKind::SelfConjugate => "self-conjugate",
            SectorKind::Complex => "complex",
        };
        for (j, e) in self.energies.iter().enumerate() {
            write!(out, "{},{}", float(*e), float(self.rho[j]))?;
            for column in &self.moments {
                write!(out, ",{}", float(column[j]))?;
            }
            writeln!(
                out,
                ",{},{},k={}:{},{}",
                float(self.participation[j]),
                self.variant.label(),
                self.momentum,
                sector,
                self.corrections
            )?;
        }
        Ok(())
    }
}
