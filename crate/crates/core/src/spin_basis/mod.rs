//! Spin configurations on a ring, translation orbits and momentum bases.
//!
//! A configuration `(n_1, ..., n_N)` is stored as an integer bitmask with site 1
//! in the most significant of the `N` bits, so that the string "00011" is the
//! integer 3 and lexicographic order on strings coincides with integer order.

mod counting;
mod momentum;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::{Error, Result};

pub use counting::{
    binomial, count_primitive_orbits, divisors, invariant_counts, invariant_total_odd, mobius, sector_dimension,
    sector_dimension_approx, totient, zero_momentum_dimension, CountMethod, InvariantCount,
};
pub use momentum::{
    classify_inversion, momentum_bases, BasisRecord, InversionClass, MomentumBasis, MomentumBasisState, SectorCounts,
};

/// Largest ring for which orbits are enumerated explicitly.
pub const MAX_ENUMERATION_SITES: usize = 24;

/// Largest ring a [`SpinConfig`] can describe.
pub const MAX_CONFIG_SITES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig {
    bits: u32,
    sites: u8,
}

impl SpinConfig {
    pub fn new(bits: u32, sites: usize) -> Result<Self> {
        if !(2..=MAX_CONFIG_SITES).contains(&sites) {
            return Err(Error::Size {
                sites,
                min: 2,
                max: MAX_CONFIG_SITES,
            });
        }
        if u64::from(bits) > mask(sites) {
            return Err(Error::InvalidParameter(format!(
                "bitmask {bits:#x} has bits beyond {sites} sites"
            )));
        }
        Ok(Self {
            bits,
            sites: sites as u8,
        })
    }

    pub(crate) fn from_raw(bits: u32, sites: usize) -> Self {
        debug_assert!(u64::from(bits) <= mask(sites));
        Self {
            bits,
            sites: sites as u8,
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn sites(self) -> usize {
        usize::from(self.sites)
    }

    /// Number of up spins `n`.
    pub fn up_count(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Spin at 0-based site `i` (site `i + 1` in 1-based notation); `true` is up.
    pub fn spin(self, site: usize) -> bool {
        self.bits >> (self.sites() - 1 - site) & 1 == 1
    }

    /// Flip the spin at 0-based `site`.
    pub fn flip(self, site: usize) -> Self {
        Self {
            bits: self.bits ^ (1 << (self.sites() - 1 - site)),
            ..self
        }
    }

    /// `T^shift`: `T|n_1..n_N> = |n_N, n_1, .., n_{N-1}>`, a right rotation of the string.
    pub fn translate(self, shift: usize) -> Self {
        let n = self.sites();
        let s = shift % n;
        if s == 0 {
            return self;
        }
        let x = u64::from(self.bits);
        let rotated = ((x >> s) | (x << (n - s))) & mask(n);
        Self {
            bits: rotated as u32,
            ..self
        }
    }

    /// Geometric inversion `|n_1, .., n_N> -> |n_N, .., n_1>`.
    pub fn reflect(self) -> Self {
        let n = self.sites();
        let bits = self.bits.reverse_bits() >> (32 - n);
        Self { bits, ..self }
    }

    /// Lexicographically smallest translate and the shift `s` with `rep = T^s self`.
    pub fn canonical(self) -> (Self, usize) {
        let mut best = self;
        let mut shift = 0;
        let mut current = self;
        for s in 1..self.sites() {
            current = current.translate(1);
            if current.bits < best.bits {
                best = current;
                shift = s;
            }
        }
        (best, shift)
    }

    /// Smallest `t > 0` with `T^t self = self`.
    pub fn period(self) -> usize {
        let mut current = self;
        for t in 1..=self.sites() {
            current = current.translate(1);
            if current == self {
                return t;
            }
        }
        unreachable!("T^N is the identity")
    }

    /// Number of anti-aligned nearest-neighbour pairs on the ring.
    pub fn domain_walls(self) -> usize {
        (self.bits ^ self.translate(1).bits).count_ones() as usize
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 0..self.sites() {
            f.write_str(if self.spin(site) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for SpinConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        for c in s.chars() {
            let bit = match c {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "spin string may only contain 0 and 1, found {other:?}"
                    )))
                }
            };
            bits = bits.checked_shl(1).unwrap_or(0) | bit;
        }
        Self::new(bits, s.len())
    }
}

pub(crate) fn mask(sites: usize) -> u64 {
    (1u64 << sites) - 1
}

/// Equivalence class of configurations under cyclic translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Orbit {
    pub representative: SpinConfig,
    pub period: usize,
}

impl Orbit {
    pub fn up_count(&self) -> usize {
        self.representative.up_count()
    }

    /// The `period` distinct translates, starting from the representative.
    pub fn members(&self) -> impl Iterator<Item = SpinConfig> + '_ {
        (0..self.period).map(move |j| self.representative.translate(j))
    }
}

/// All translation orbits of the `2^N` configurations, ordered by representative.
pub fn enumerate_orbits(sites: usize) -> Result<Vec<Orbit>> {
    if !(2..=MAX_ENUMERATION_SITES).contains(&sites) {
        return Err(Error::Size {
            sites,
            min: 2,
            max: MAX_ENUMERATION_SITES,
        });
    }
    let orbits = (0..(1u32 << sites))
        .into_par_iter()
        .with_min_len(1 << 12)
        .filter_map(|bits| {
            let config = SpinConfig::from_raw(bits, sites);
            let mut current = config;
            for t in 1..=sites {
                current = current.translate(1);
                if current.bits < bits {
                    return None;
                }
                if current == config {
                    return Some(Orbit {
                        representative: config,
                        period: t,
                    });
                }
            }
            unreachable!("T^N is the identity")
        })
        .collect();
    Ok(orbits)
}
