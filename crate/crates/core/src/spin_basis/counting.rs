//! Closed-form orbit counts (necklace combinatorics).

use crate::{Error, Result};

use super::{enumerate_orbits, MAX_ENUMERATION_SITES};

const MAX_FORMULA_SITES: usize = 62;

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Möbius function: `(-1)^p` for a product of `p` distinct primes, 0 otherwise.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n > 0, "mobius(0) is undefined");
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Euler's totient.
pub fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1)) as u64
}

/// Number of orbits with primitive period exactly `t`: `(1/t) sum_{d|t} 2^{t/d} mu(d)`.
pub fn count_primitive_orbits(t: usize) -> u64 {
    assert!((1..=MAX_FORMULA_SITES).contains(&t), "period {t} out of range");
    let t = t as u64;
    let sum: i128 = divisors(t)
        .into_iter()
        .map(|d| (1i128 << (t / d)) * i128::from(mobius(d)))
        .sum();
    (sum / i128::from(t)) as u64
}

fn check_sites(sites: usize) -> Result<()> {
    if !(2..=MAX_FORMULA_SITES).contains(&sites) {
        return Err(Error::Size {
            sites,
            min: 2,
            max: MAX_FORMULA_SITES,
        });
    }
    Ok(())
}

/// Exact dimension of the momentum-`k` sector: orbits whose period `t` obeys `k t = 0 mod N`.
pub fn sector_dimension(sites: usize, momentum: usize) -> Result<u64> {
    check_sites(sites)?;
    if momentum >= sites {
        return Err(Error::Momentum { momentum, sites });
    }
    let n = sites as u64;
    Ok(divisors(n)
        .into_iter()
        .filter(|&t| (momentum as u64 * t).is_multiple_of(n))
        .map(|t| count_primitive_orbits(t as usize))
        .sum())
}

/// Large-`N` approximation `2^N / N`, the same for every momentum.
pub fn sector_dimension_approx(sites: usize) -> f64 {
    2f64.powi(sites as i32) / sites as f64
}

/// Totient form of the zero-momentum dimension: `(1/N) sum_{d|N} 2^{N/d} phi(d)`.
pub fn zero_momentum_dimension(sites: usize) -> Result<u64> {
    check_sites(sites)?;
    let n = sites as u64;
    let sum: u128 = divisors(n)
        .into_iter()
        .map(|d| (1u128 << (n / d)) * u128::from(totient(d)))
        .sum();
    Ok((sum / u128::from(n)) as u64)
}

/// `2^{[N/2]+1}` reflection-invariant orbits, valid for odd `N`.
pub fn invariant_total_odd(sites: usize) -> Result<u64> {
    check_sites(sites)?;
    if sites.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "closed-form invariant total requires odd N, got {sites}"
        )));
    }
    Ok(1 << (sites / 2 + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Formula,
    Enumeration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantCount {
    pub value: u64,
    pub method: CountMethod,
}

/// Number of reflection-invariant orbits with `up` spins up (all momenta allowed).
///
/// Odd `N` uses `C([N/2], [n/2])`; even `N` has no closed form here and is
/// counted by enumeration, which the returned `method` records.
pub fn invariant_counts(sites: usize, up: usize) -> Result<InvariantCount> {
    check_sites(sites)?;
    if up > sites {
        return Err(Error::InvalidParameter(format!("up count {up} exceeds N={sites}")));
    }
    if sites % 2 == 1 {
        return Ok(InvariantCount {
            value: binomial((sites / 2) as u64, (up / 2) as u64),
            method: CountMethod::Formula,
        });
    }
    if sites > MAX_ENUMERATION_SITES {
        return Err(Error::Size {
            sites,
            min: 2,
            max: MAX_ENUMERATION_SITES,
        });
    }
    let value = enumerate_orbits(sites)?
        .iter()
        .filter(|o| o.up_count() == up && o.representative.reflect().canonical().0 == o.representative)
        .count() as u64;
    Ok(InvariantCount {
        value,
        method: CountMethod::Enumeration,
    })
}
