//! Dense Hermitian diagonalization of sector matrices.

mod cache;

use faer::{c64, Mat, Side};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::hamiltonian::SectorMatrix;
use crate::{Error, ModelParams, Result};

pub use cache::{CacheLookup, EigenCache, CACHE_VERSION};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Full spectrum and eigenvectors of one sector.
///
/// `vectors` is column-major: column `a` holds the coefficients of eigenstate `a`
/// in the basis order of the sector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub params: ModelParams,
    pub momentum: usize,
    pub energies: Vec<f64>,
    pub vectors: Vec<Complex64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn vector(&self, state: usize) -> &[Complex64] {
        let dim = self.dim();
        &self.vectors[state * dim..(state + 1) * dim]
    }

    /// `C_i(a)` for basis index `i` and eigenstate `a`.
    pub fn coefficient(&self, basis_index: usize, state: usize) -> Complex64 {
        self.vectors[state * self.dim() + basis_index]
    }

    /// `max |V^dagger V - I|`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let dim = self.dim();
        let v = Mat::<c64>::from_fn(dim, dim, |i, j| self.coefficient(i, j));
        let gram = v.adjoint() * &v;
        let mut worst = 0.0f64;
        for j in 0..dim {
            for i in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// SHA-256 of the raw entries, used to identify a matrix in diagnostics.
pub fn fingerprint(matrix: &SectorMatrix) -> String {
    let mut hasher = Sha256::new();
    for z in &matrix.entries {
        hasher.update(z.re.to_le_bytes());
        hasher.update(z.im.to_le_bytes());
    }
    hex(&hasher.finalize())
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn diagonalize(matrix: &SectorMatrix) -> Result<EigenDecomposition> {
    let deviation = matrix.hermiticity_deviation();
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    let dim = matrix.dim;
    let failure = |reason: String| Error::Convergence {
        fingerprint: fingerprint(matrix),
        reason,
    };

    let (energies, mut vectors) = if matrix.is_real() {
        let h = Mat::<f64>::from_fn(dim, dim, |i, j| matrix.get(i, j).re);
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| failure(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let energies: Vec<f64> = (0..dim).map(|i| s[i]).collect();
        let residual = &h * u - u * evd.S();
        check_residual(&energies, |j| residual.col(j).norm_l2()).map_err(failure)?;
        let mut vectors = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            vectors.extend((0..dim).map(|i| Complex64::new(u[(i, j)], 0.0)));
        }
        (energies, vectors)
    } else {
        let h = Mat::<c64>::from_fn(dim, dim, |i, j| matrix.get(i, j));
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| failure(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let energies: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
        let scaled = Mat::<c64>::from_fn(dim, dim, |i, j| u[(i, j)] * energies[j]);
        let residual = &h * u - scaled;
        check_residual(&energies, |j| residual.col(j).norm_l2()).map_err(failure)?;
        let mut vectors = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            vectors.extend((0..dim).map(|i| u[(i, j)]));
        }
        (energies, vectors)
    };

    for column in vectors.chunks_mut(dim.max(1)) {
        fix_gauge(column);
    }
    Ok(EigenDecomposition {
        params: matrix.params,
        momentum: matrix.momentum,
        energies,
        vectors,
    })
}

fn check_residual(energies: &[f64], residual: impl Fn(usize) -> f64) -> std::result::Result<(), String> {
    if let Some(e) = energies.iter().find(|e| !e.is_finite()) {
        return Err(format!("non-finite eigenvalue {e}"));
    }
    let norm = energies
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()))
        .max(f64::MIN_POSITIVE);
    for j in 0..energies.len() {
        let r = residual(j);
        if !(r < RESIDUAL_TOLERANCE * norm) {
            return Err(format!(
                "residual {r:e} of eigenpair {j} exceeds {:e}",
                RESIDUAL_TOLERANCE * norm
            ));
        }
    }
    Ok(())
}

/// Rotate the column so its largest-modulus component (first on ties) is real positive.
fn fix_gauge(column: &mut [Complex64]) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in column.iter().enumerate() {
        let n = z.norm();
        if n > best_norm * (1.0 + 1e-12) {
            best = i;
            best_norm = n;
        }
    }
    if best_norm <= 0.0 {
        return;
    }
    let phase = column[best].conj() / best_norm;
    for z in column.iter_mut() {
        *z *= phase;
    }
    column[best] = Complex64::new(column[best].re, 0.0);
}

/// Ascending eigenvalues of a sector matrix without eigenvectors or residual checks.
pub fn sector_eigenvalues(matrix: &SectorMatrix) -> Result<Vec<f64>> {
    let deviation = matrix.hermiticity_deviation();
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    let dim = matrix.dim;
    let failure = |e| Error::Convergence {
        fingerprint: fingerprint(matrix),
        reason: format!("{e:?}"),
    };
    if matrix.is_real() {
        Mat::<f64>::from_fn(dim, dim, |i, j| matrix.get(i, j).re)
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(failure)
    } else {
        Mat::<c64>::from_fn(dim, dim, |i, j| matrix.get(i, j))
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(failure)
    }
}

/// Eigenvalues only, for checks that do not need vectors.
pub fn eigenvalues_real_symmetric(dense: &[f64], dim: usize) -> Result<Vec<f64>> {
    let h = Mat::<f64>::from_fn(dim, dim, |i, j| dense[i * dim + j]);
    h.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Convergence {
        fingerprint: String::new(),
        reason: format!("{e:?}"),
    })
}
