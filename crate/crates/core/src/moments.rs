//! Moments of the Hamiltonian in product states, `<n|H^j|n>`.
//!
//! Closed forms depend on the up-spin count `n` and on the domain-wall number
//! `k` (half the number of anti-aligned neighbour pairs on the ring). Only the
//! fourth moment depends on `k`; the statistical model replaces it by its
//! average `<k> = n (N - n) / (N - 1)` over configurations with fixed `n`.

use serde::{Deserialize, Serialize};

use crate::hamiltonian::for_each_term;
use crate::spin_basis::SpinConfig;
use crate::{Error, ModelParams, Result};

pub const MAX_BRUTEFORCE_SITES: usize = 12;
pub const MAX_BRUTEFORCE_ORDER: usize = 6;

/// Half the number of domain walls; the number of up-spin blocks for mixed configurations.
pub fn domain_wall_k(config: SpinConfig) -> usize {
    config.domain_walls() / 2
}

pub fn mean_domain_walls(sites: usize, up: usize) -> f64 {
    (up * (sites - up)) as f64 / (sites - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Walls {
    Exact(usize),
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMomentSet {
    pub n: usize,
    pub energy: f64,
    pub sigma2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub k3: f64,
    pub k4: f64,
    pub k_walls: f64,
}

impl LocalMomentSet {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Raw moments `mu_1..mu_4`.
    pub fn raw(&self) -> [f64; 4] {
        [self.energy, self.sigma2 + self.energy * self.energy, self.mu3, self.mu4]
    }

    pub fn skewness(&self) -> f64 {
        self.k3 / self.sigma2.powf(1.5)
    }

    pub fn excess_kurtosis(&self) -> f64 {
        self.k4 / (self.sigma2 * self.sigma2)
    }
}

fn third_moment_unchecked(params: &ModelParams, up: usize) -> f64 {
    let n = params.sites as f64;
    let a2 = params.alpha * params.alpha;
    let e = params.diagonal_energy(up);
    e.powi(3) + (3.0 * (1.0 + a2) * n - 4.0 - 2.0 * a2) * e - 6.0 * n * a2
}

/// `mu_3`, valid from four sites on.
pub fn third_moment(params: &ModelParams, up: usize) -> Result<f64> {
    if params.sites < 4 {
        return Err(Error::ValidityRange {
            sites: params.sites,
            min: 4,
        });
    }
    Ok(third_moment_unchecked(params, up))
}

pub fn analytic_moments(params: &ModelParams, up: usize, walls: Walls) -> Result<LocalMomentSet> {
    params.validate()?;
    if params.sites < 5 {
        return Err(Error::ValidityRange {
            sites: params.sites,
            min: 5,
        });
    }
    if up > params.sites {
        return Err(Error::InvalidParameter(format!(
            "up count {up} exceeds N={}",
            params.sites
        )));
    }
    let n = params.sites as f64;
    let (l2, a2) = (params.lambda * params.lambda, params.alpha * params.alpha);
    let k = match walls {
        Walls::Exact(k) => k as f64,
        Walls::Mean => mean_domain_walls(params.sites, up),
    };
    let e = params.diagonal_energy(up);
    let sigma2 = n * (1.0 + a2);
    let mu3 = third_moment_unchecked(params, up);
    let tail = n * (24.0 * a2 - 2.0 - 2.0 * a2 * a2 + 16.0 * l2 + 4.0 * l2 * a2);
    let mu4 = e.powi(4)
        + e * e * (6.0 * n * (1.0 + a2) - 16.0 - 8.0 * a2)
        + 8.0 * e * (4.0 - 3.0 * n) * a2
        + 3.0 * n * n * (1.0 + a2).powi(2)
        - 32.0 * k * l2
        + tail;
    let k3 = -6.0 * n * a2 - 2.0 * e * (a2 + 2.0);
    let k4 = 32.0 * a2 * e - 32.0 * k * l2 + tail;
    Ok(LocalMomentSet {
        n: up,
        energy: e,
        sigma2,
        mu3,
        mu4,
        k3,
        k4,
        k_walls: k,
    })
}

/// `<config|H^j|config>` for `j = 1..=order` by repeated application of `H`.
pub fn bruteforce_state_moments(config: SpinConfig, params: &ModelParams, order: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let sites = config.sites();
    if sites != params.sites {
        return Err(Error::SiteMismatch {
            basis: sites,
            params: params.sites,
        });
    }
    if sites > MAX_BRUTEFORCE_SITES {
        return Err(Error::Size {
            sites,
            min: 2,
            max: MAX_BRUTEFORCE_SITES,
        });
    }
    if order > MAX_BRUTEFORCE_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order {order} exceeds {MAX_BRUTEFORCE_ORDER}"
        )));
    }
    let dim = 1usize << sites;
    let mut v = vec![0.0; dim];
    v[config.bits() as usize] = 1.0;
    let mut w = vec![0.0; dim];
    let mut moments = Vec::with_capacity(order);
    for _ in 0..order {
        w.iter_mut().for_each(|x| *x = 0.0);
        for (bits, &x) in v.iter().enumerate() {
            if x != 0.0 {
                let source = SpinConfig::new(bits as u32, sites)?;
                for_each_term(source, params, |b, c| w[b.bits() as usize] += c * x);
            }
        }
        std::mem::swap(&mut v, &mut w);
        moments.push(v[config.bits() as usize]);
    }
    Ok(moments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_basis::binomial;

    fn config(s: &str) -> SpinConfig {
        s.parse().unwrap()
    }

    #[test]
    fn domain_walls() {
        assert_eq!(domain_wall_k(config("00011")), 1);
        assert_eq!(domain_wall_k(config("111111")), 0);
        assert_eq!(domain_wall_k(config("0101")), 2);
        assert_eq!(domain_wall_k(config("0110110")), 2);
    }

    #[test]
    fn five_site_example() {
        let params = ModelParams::new(5, 1.0, 1.0).unwrap();
        let m = analytic_moments(&params, 2, Walls::Exact(1)).unwrap();
        assert_eq!(m.energy, 1.0);
        assert_eq!(m.mu3, -5.0);
        assert_eq!(m.mu4, 417.0);
        let brute = bruteforce_state_moments(config("00011"), &params, 4).unwrap();
        assert!((brute[2] + 5.0).abs() < 1e-12);
        assert!((brute[3] - 417.0).abs() < 1e-10);
    }

    #[test]
    fn seventeen_site_cumulants() {
        let params = ModelParams::new(17, 1.0, 1.0).unwrap();
        let m = analytic_moments(&params, 8, Walls::Mean).unwrap();
        assert_eq!((m.energy, m.sigma2, m.k3), (1.0, 34.0, -108.0));
        assert_eq!(m.k_walls, 4.5);
        assert_eq!(m.k4, 568.0);
        let centred = analytic_moments(&ModelParams::new(16, 1.0, 0.0).unwrap(), 8, Walls::Mean).unwrap();
        assert_eq!((centred.energy, centred.k3), (0.0, 0.0));
    }

    #[test]
    fn cumulants_follow_from_raw_moments() {
        for (l, a) in [(0.5, 2.0), (1.0, 1.0), (2.0, 0.5)] {
            let params = ModelParams::new(11, l, a).unwrap();
            for up in 0..=11 {
                let m = analytic_moments(&params, up, Walls::Exact(up.min(11 - up) / 2)).unwrap();
                let [m1, m2, m3, m4] = m.raw();
                let k3 = m3 - 3.0 * m2 * m1 + 2.0 * m1.powi(3);
                let k4 = m4 - 4.0 * m3 * m1 - 3.0 * m2 * m2 + 12.0 * m2 * m1 * m1 - 6.0 * m1.powi(4);
                assert!((k3 - m.k3).abs() < 1e-9 * m3.abs().max(1.0));
                assert!((k4 - m.k4).abs() < 1e-9 * m4.abs().max(1.0));
            }
        }
    }

    #[test]
    fn validity_range() {
        let params = ModelParams::new(4, 1.0, 1.0).unwrap();
        assert!(matches!(
            analytic_moments(&params, 2, Walls::Mean),
            Err(Error::ValidityRange { min: 5, .. })
        ));
        assert!(third_moment(&params, 2).is_ok());
        assert!(third_moment(&ModelParams::new(3, 1.0, 1.0).unwrap(), 1).is_err());
    }

    #[test]
    fn mean_domain_walls_is_exact_average() {
        for sites in 3..=12usize {
            let mut sums = vec![0u64; sites + 1];
            for bits in 0..(1u32 << sites) {
                let c = SpinConfig::new(bits, sites).unwrap();
                sums[c.up_count()] += domain_wall_k(c) as u64;
            }
            for (up, &sum) in sums.iter().enumerate() {
                let count = binomial(sites as u64, up as u64);
                assert_eq!(sum * (sites as u64 - 1), count * (up * (sites - up)) as u64);
            }
        }
    }

    #[test]
    fn third_moment_is_wall_independent() {
        let params = ModelParams::new(10, 0.5, 2.0).unwrap();
        for c in ["0000011111", "0101010101", "0011001011"] {
            let cfg = config(c);
            let brute = bruteforce_state_moments(cfg, &params, 3).unwrap();
            assert!((brute[2] - third_moment(&params, cfg.up_count()).unwrap()).abs() < 1e-9 * brute[2].abs());
        }
    }

    #[test]
    fn pure_longitudinal_third_moment() {
        for sites in 5..=9 {
            let params = ModelParams::new(sites, 0.0, 1.5).unwrap();
            let brute = bruteforce_state_moments(SpinConfig::new(5, sites).unwrap(), &params, 3).unwrap();
            assert!((brute[2] + 6.0 * sites as f64 * 2.25).abs() < 1e-9);
        }
    }

    #[test]
    fn bruteforce_first_moment_is_diagonal() {
        let params = ModelParams::new(8, 0.3, 0.9).unwrap();
        for bits in [0u32, 7, 0b10110010] {
            let c = SpinConfig::new(bits, 8).unwrap();
            let brute = bruteforce_state_moments(c, &params, 1).unwrap();
            assert_eq!(brute[0], params.diagonal_energy(c.up_count()));
        }
        assert!(bruteforce_state_moments(
            SpinConfig::new(0, 13).unwrap(),
            &ModelParams::new(13, 1.0, 1.0).unwrap(),
            2
        )
        .is_err());
    }
}
