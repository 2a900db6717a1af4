//! Maximum-entropy densities `exp(-sum_j mu_j E^j) / Z` matching prescribed moments.
//!
//! The fit works in the standardized variable `x = (E - E_n) / sigma` on the
//! truncated support `|x| <= half_width`. Writing the density as
//! `exp(-theta . x^j) / Z(theta)`, the multipliers minimize the convex function
//! `ln Z(theta) + theta . m`, whose gradient is `m - <x^j>` and whose Hessian is
//! the covariance matrix of the powers `x^j`.

use serde::{Deserialize, Serialize};

use super::quadrature::QuadratureRule;
use crate::moments::LocalMomentSet;
use crate::spin_basis::binomial;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraints {
    /// Mean and variance; the solution is the Gaussian.
    Two,
    /// Moments up to the fourth.
    Four,
}

impl Constraints {
    fn count(self) -> usize {
        match self {
            Constraints::Two => 2,
            Constraints::Four => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsOptions {
    pub constraints: Constraints,
    /// Newton iterations allowed per continuation stage.
    pub max_iterations: usize,
    pub continuation_stages: usize,
    pub tolerance: f64,
    /// Support is `E_n +- half_width * sigma`.
    pub half_width: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Node doublings allowed when the self-check on a finer rule fails.
    pub max_refinements: usize,
}

impl Default for GibbsOptions {
    fn default() -> Self {
        Self {
            constraints: Constraints::Four,
            max_iterations: 100,
            continuation_stages: 10,
            tolerance: 1e-8,
            half_width: 12.0,
            panels: 50,
            nodes_per_panel: 40,
            max_refinements: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsFit {
    pub center: f64,
    pub scale: f64,
    pub half_width: f64,
    /// Multipliers of `x, x^2, x^3, x^4` (unused orders are zero).
    pub theta: [f64; 4],
    /// `ln Z` in the standardized variable, on the fitting rule.
    pub log_z: f64,
    pub iterations: usize,
    /// Largest relative moment mismatch on the fitting rule.
    pub residual: f64,
    pub nodes: usize,
    /// The leading multiplier is not positive, so the density is only
    /// normalizable because of the truncated support.
    pub support_bounded: bool,
}

impl GibbsFit {
    fn exponent(&self, x: f64) -> f64 {
        let t = &self.theta;
        x * (t[0] + x * (t[1] + x * (t[2] + x * t[3])))
    }

    /// Density in the energy variable; zero outside the fitted support.
    pub fn density(&self, energy: f64) -> f64 {
        let x = (energy - self.center) / self.scale;
        if x.abs() > self.half_width {
            return 0.0;
        }
        (-self.exponent(x) - self.log_z).exp() / self.scale
    }

    /// Multipliers `mu_1..mu_4` of `exp(-sum_j mu_j E^j) / Z` and `ln Z` in the energy variable.
    pub fn energy_multipliers(&self) -> ([f64; 4], f64) {
        let (c, s) = (self.center, self.scale);
        let mut mu = [0.0; 4];
        let mut constant = 0.0;
        for j in 1..=4 {
            let coeff = self.theta[j - 1] / s.powi(j as i32);
            constant += coeff * (-c).powi(j as i32);
            for (i, m) in mu.iter_mut().enumerate().take(j) {
                let i = i + 1;
                *m += coeff * binomial(j as u64, i as u64) as f64 * (-c).powi((j - i) as i32);
            }
        }
        (mu, self.log_z + s.ln() + constant)
    }
}

/// Standardized targets `<x>, <x^2>, <x^3>, <x^4>`.
fn standardized_targets(moments: &LocalMomentSet) -> [f64; 4] {
    [0.0, 1.0, moments.skewness(), moments.excess_kurtosis() + 3.0]
}

struct Evaluation {
    log_z: f64,
    /// `<x^j>` for `j = 0..=8`, normalized.
    powers: [f64; 9],
}

fn evaluate(rule: &QuadratureRule, theta: &[f64; 4]) -> Evaluation {
    let exponent = |x: f64| x * (theta[0] + x * (theta[1] + x * (theta[2] + x * theta[3])));
    let shift = rule
        .nodes
        .iter()
        .map(|&x| -exponent(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sums = [0.0; 9];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let weight = w * (-exponent(x) - shift).exp();
        let mut p = 1.0;
        for s in sums.iter_mut() {
            *s += weight * p;
            p *= x;
        }
    }
    let z = sums[0];
    let mut powers = [0.0; 9];
    for (p, s) in powers.iter_mut().zip(&sums) {
        *p = s / z;
    }
    Evaluation {
        log_z: z.ln() + shift,
        powers,
    }
}

fn objective(rule: &QuadratureRule, theta: &[f64; 4], target: &[f64; 4]) -> f64 {
    let eval = evaluate(rule, theta);
    eval.log_z + theta.iter().zip(target).map(|(t, m)| t * m).sum::<f64>()
}

fn relative_residual(powers: &[f64; 9], target: &[f64; 4], active: usize) -> f64 {
    (0..active)
        .map(|j| (powers[j + 1] - target[j]).abs() / target[j].abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Solve the small symmetric positive-definite system by Cholesky factorization.
fn cholesky_solve(a: &mut [[f64; 4]; 4], b: &mut [f64; 4], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i][k] * b[k];
        }
        b[i] = s / a[i][i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[k][i] * b[k];
        }
        b[i] = s / a[i][i];
    }
    true
}

/// Damped Newton from `theta` towards `target`; returns iterations used.
fn newton(
    rule: &QuadratureRule,
    theta: &mut [f64; 4],
    target: &[f64; 4],
    active: usize,
    options: &GibbsOptions,
) -> Result<usize> {
    let mut residual = f64::INFINITY;
    for iteration in 0..options.max_iterations {
        let eval = evaluate(rule, theta);
        residual = relative_residual(&eval.powers, target, active);
        if residual < 0.1 * options.tolerance {
            return Ok(iteration);
        }
        let mut hessian = [[0.0; 4]; 4];
        let mut step = [0.0; 4];
        for i in 0..active {
            step[i] = eval.powers[i + 1] - target[i];
            for j in 0..active {
                hessian[i][j] = eval.powers[i + j + 2] - eval.powers[i + 1] * eval.powers[j + 1];
            }
        }
        if !cholesky_solve(&mut hessian, &mut step, active) {
            return Err(Error::NotConverged {
                iterations: iteration,
                residual,
            });
        }
        // step now solves H d = <x> - m, the descent direction for ln Z + theta . m
        let slope: f64 = (0..active).map(|i| (target[i] - eval.powers[i + 1]) * step[i]).sum();
        let current = eval.log_z + (0..active).map(|i| theta[i] * target[i]).sum::<f64>();
        let mut t = 1.0;
        loop {
            let mut trial = *theta;
            for i in 0..active {
                trial[i] += t * step[i];
            }
            let value = objective(rule, &trial, target);
            // near the optimum ln Z stops resolving the decrease; a smaller gradient then decides
            let armijo = value <= current + 1e-4 * t * slope;
            let flatter = t == 1.0 && value.is_finite() && {
                let trial_eval = evaluate(rule, &trial);
                relative_residual(&trial_eval.powers, target, active) < 0.5 * residual
            };
            if value.is_finite() && (armijo || flatter) || t < 1e-10 {
                *theta = trial;
                break;
            }
            t *= 0.5;
        }
    }
    let eval = evaluate(rule, theta);
    residual = relative_residual(&eval.powers, target, active).min(residual);
    if residual < options.tolerance {
        return Ok(options.max_iterations);
    }
    Err(Error::NotConverged {
        iterations: options.max_iterations,
        residual,
    })
}

/// Fit the maximum-entropy density for one up-spin count.
///
/// Returns [`Error::Infeasible`] when the targets are not the moments of any
/// distribution (non-positive Hankel matrix) and [`Error::NotConverged`] when
/// Newton fails; callers fall back to the Gram-Charlier form in the latter case.
pub fn fit_gibbs(moments: &LocalMomentSet, options: &GibbsOptions) -> Result<GibbsFit> {
    if !(moments.sigma2 > 0.0) {
        return Err(Error::Infeasible(format!(
            "variance {} is not positive",
            moments.sigma2
        )));
    }
    let active = options.constraints.count();
    let mut target = standardized_targets(moments);
    if active == 2 {
        target[2] = 0.0;
        target[3] = 0.0;
    } else {
        // Hankel determinant of (1, 0, 1, m3, m4)
        let det = target[3] - target[2] * target[2] - 1.0;
        if !(det > 0.0) {
            return Err(Error::Infeasible(format!(
                "standardized moments (m3={}, m4={}) admit no density",
                target[2], target[3]
            )));
        }
    }

    let mut panels = options.panels;
    let mut refinements = 0;
    loop {
        let rule = QuadratureRule::composite(-options.half_width, options.half_width, panels, options.nodes_per_panel);
        let mut theta = [0.0, 0.5, 0.0, 0.0];
        let gaussian = [0.0, 1.0, 0.0, 3.0];
        let mut iterations = 0;
        let stages = if active == 2 {
            1
        } else {
            options.continuation_stages.max(1)
        };
        for stage in 1..=stages {
            let f = stage as f64 / stages as f64;
            let mut stage_target = target;
            for j in 2..active {
                stage_target[j] = gaussian[j] + f * (target[j] - gaussian[j]);
            }
            iterations += newton(&rule, &mut theta, &stage_target, active, options)?;
        }
        let eval = evaluate(&rule, &theta);
        let residual = relative_residual(&eval.powers, &target, active);

        // self-check on a rule with twice the nodes
        let fine = QuadratureRule::composite(
            -options.half_width,
            options.half_width,
            2 * panels,
            options.nodes_per_panel,
        );
        let check = relative_residual(&evaluate(&fine, &theta).powers, &target, active);
        if check < options.tolerance || refinements >= options.max_refinements {
            if check >= options.tolerance {
                return Err(Error::NotConverged {
                    iterations,
                    residual: check,
                });
            }
            let support_bounded = active == 4 && theta[3] <= 0.0;
            if support_bounded {
                log::warn!(
                    "max-entropy density for n={} has non-positive quartic multiplier; valid only on |x| <= {}",
                    moments.n,
                    options.half_width
                );
            }
            return Ok(GibbsFit {
                center: moments.energy,
                scale: moments.sigma(),
                half_width: options.half_width,
                theta,
                log_z: eval.log_z,
                iterations,
                residual: residual.max(check),
                nodes: rule.len(),
                support_bounded,
            });
        }
        panels *= 2;
        refinements += 1;
    }
}
