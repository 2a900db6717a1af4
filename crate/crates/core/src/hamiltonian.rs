//! The Ising Hamiltonian in the product basis and in fixed-momentum sectors.
//!
//! Phase convention: a term of `H |a>` reaching configuration `b` whose
//! canonical representative is `r = T^s b` contributes
//! `c sqrt(t_a / t_r) e^{2 pi i k s / N}` to `<r|H|a>_k`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::spin_basis::{MomentumBasis, SpinConfig};
use crate::{Error, ModelParams, Result};

pub const MAX_FULL_SITES: usize = 14;
pub const MAX_SECTOR_SITES: usize = 20;

/// Calls `f(target, coefficient)` for every term of `H` acting on `config`,
/// diagonal first. Terms are not merged.
pub fn for_each_term(config: SpinConfig, params: &ModelParams, mut f: impl FnMut(SpinConfig, f64)) {
    let n = config.sites();
    f(config, params.diagonal_energy(config.up_count()));
    for i in 0..n {
        f(config.flip(i).flip((i + 1) % n), -1.0);
    }
    for i in 0..n {
        f(config.flip(i), -params.alpha);
    }
}

/// Real symmetric `2^N x 2^N` matrix in compressed-row form.
#[derive(Debug, Clone)]
pub struct FullHamiltonian {
    params: ModelParams,
    row_start: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<f64>,
}

pub fn build_full_hamiltonian(params: &ModelParams) -> Result<FullHamiltonian> {
    params.validate()?;
    let sites = params.sites;
    if sites > MAX_FULL_SITES {
        return Err(Error::Size {
            sites,
            min: 2,
            max: MAX_FULL_SITES,
        });
    }
    let dim = 1usize << sites;
    let mut row_start = Vec::with_capacity(dim + 1);
    let mut columns = Vec::with_capacity(dim * (2 * sites + 1));
    let mut values = Vec::with_capacity(dim * (2 * sites + 1));
    let mut row: Vec<(u32, f64)> = Vec::with_capacity(2 * sites + 1);
    row_start.push(0);
    for bits in 0..dim as u32 {
        row.clear();
        for_each_term(SpinConfig::new(bits, sites)?, params, |b, c| row.push((b.bits(), c)));
        row.sort_by_key(|&(col, _)| col);
        let start = *row_start.last().unwrap();
        for &(col, value) in &row {
            if columns.len() > start && columns.last() == Some(&col) {
                *values.last_mut().unwrap() += value;
            } else {
                columns.push(col);
                values.push(value);
            }
        }
        row_start.push(columns.len());
    }
    Ok(FullHamiltonian {
        params: *params,
        row_start,
        columns,
        values,
    })
}

impl FullHamiltonian {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(column, value)` pairs of one row, ascending in column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[i]..self.row_start[i + 1];
        self.columns[range.clone()]
            .iter()
            .zip(&self.values[range])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `trace(H^2)`, the sum of all squared entries for a symmetric matrix.
    pub fn trace_of_square(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut dense = vec![0.0; dim * dim];
        for i in 0..dim {
            for (j, v) in self.row(i) {
                dense[i * dim + j] = v;
            }
        }
        dense
    }
}

/// Dense Hermitian matrix of one momentum sector, stored row-major.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub params: ModelParams,
    pub momentum: usize,
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl SectorMatrix {
    pub fn from_entries(params: ModelParams, momentum: usize, dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "{} entries do not form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            params,
            momentum,
            dim,
            entries,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_imaginary(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// All entries real, as for `k = 0` and `k = N/2`.
    pub fn is_real(&self) -> bool {
        self.max_imaginary() == 0.0
    }

    /// Frobenius norm, an upper bound on the spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `e^{2 pi i m / N}` with exact values on the real and imaginary axes.
pub(crate) fn root_of_unity(m: usize, sites: usize) -> Complex64 {
    let m = m % sites;
    if m == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * m == sites {
        Complex64::new(-1.0, 0.0)
    } else if 4 * m == sites {
        Complex64::new(0.0, 1.0)
    } else if 4 * m == 3 * sites {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / sites as f64)
    }
}

pub fn build_sector_hamiltonian(basis: &MomentumBasis, params: &ModelParams) -> Result<SectorMatrix> {
    params.validate()?;
    if basis.sites() != params.sites {
        return Err(Error::SiteMismatch {
            basis: basis.sites(),
            params: params.sites,
        });
    }
    if params.sites > MAX_SECTOR_SITES {
        return Err(Error::Size {
            sites: params.sites,
            min: 2,
            max: MAX_SECTOR_SITES,
        });
    }
    let dim = basis.dim();
    let sites = params.sites;
    let k = basis.momentum();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    // Row a of a Hermitian matrix is the conjugate of column a, and column a is H|a>_k.
    entries.par_chunks_mut(dim.max(1)).enumerate().for_each(|(a, row)| {
        let state = basis.state(a);
        let t_a = state.period() as f64;
        for_each_term(state.representative(), params, |b, c| {
            if c == 0.0 {
                return;
            }
            if let Some((r, s)) = basis.locate(b) {
                let t_r = basis.state(r).period() as f64;
                let value = root_of_unity(k * s, sites) * (c * (t_a / t_r).sqrt());
                row[r] += value.conj();
            }
        });
    });
    Ok(SectorMatrix {
        params: *params,
        momentum: k,
        dim,
        entries,
    })
}
