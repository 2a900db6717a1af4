//! On-disk cache of eigen-decompositions.
//!
//! Each entry is a little-endian binary payload (energies, then interleaved
//! re/im eigenvector data, column-major) plus a JSON sidecar. The payload is
//! written first and the sidecar last, each through a temporary file and a
//! rename, so a sidecar never points at a partial payload.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{hex, EigenDecomposition};
use crate::{Error, ModelParams, Result};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Sidecar {
    #[serde(rename = "N")]
    sites: usize,
    k: usize,
    lambda: f64,
    alpha: f64,
    dim: usize,
    checksum: String,
    version: u32,
}

#[derive(Debug)]
pub enum CacheLookup {
    Hit(EigenDecomposition),
    Miss,
    /// Entry written by another format version; recompute.
    VersionMismatch {
        found: u32,
    },
}

#[derive(Debug, Clone)]
pub struct EigenCache {
    dir: PathBuf,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl EigenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Exact key: the field values enter by their bit patterns.
    pub fn stem(params: &ModelParams, momentum: usize) -> String {
        format!(
            "n{}_k{}_l{:016x}_a{:016x}",
            params.sites,
            momentum,
            params.lambda.to_bits(),
            params.alpha.to_bits()
        )
    }

    fn paths(&self, params: &ModelParams, momentum: usize) -> (PathBuf, PathBuf) {
        let stem = Self::stem(params, momentum);
        (
            self.dir.join(format!("{stem}.bin")),
            self.dir.join(format!("{stem}.json")),
        )
    }

    pub fn store(&self, decomp: &EigenDecomposition) -> Result<PathBuf> {
        let (payload_path, sidecar_path) = self.paths(&decomp.params, decomp.momentum);
        let payload = encode(decomp);
        let sidecar = Sidecar {
            sites: decomp.params.sites,
            k: decomp.momentum,
            lambda: decomp.params.lambda,
            alpha: decomp.params.alpha,
            dim: decomp.dim(),
            checksum: hex(&Sha256::digest(&payload)),
            version: CACHE_VERSION,
        };
        write_atomic(&payload_path, &payload)?;
        write_atomic(&sidecar_path, &serde_json::to_vec_pretty(&sidecar)?)?;
        Ok(payload_path)
    }

    pub fn contains(&self, params: &ModelParams, momentum: usize) -> bool {
        self.paths(params, momentum).1.exists()
    }

    pub fn load(&self, params: &ModelParams, momentum: usize) -> Result<CacheLookup> {
        let (payload_path, sidecar_path) = self.paths(params, momentum);
        let sidecar_bytes = match fs::read(&sidecar_path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(CacheLookup::Miss),
            Err(e) => return Err(e.into()),
        };
        let corrupted = |reason: String| Error::CacheCorrupted {
            path: payload_path.clone(),
            reason,
        };
        let sidecar: Sidecar =
            serde_json::from_slice(&sidecar_bytes).map_err(|e| corrupted(format!("unreadable sidecar: {e}")))?;
        if sidecar.version != CACHE_VERSION {
            return Ok(CacheLookup::VersionMismatch { found: sidecar.version });
        }
        if sidecar.sites != params.sites
            || sidecar.k != momentum
            || sidecar.lambda.to_bits() != params.lambda.to_bits()
            || sidecar.alpha.to_bits() != params.alpha.to_bits()
        {
            return Ok(CacheLookup::Miss);
        }
        let payload = match fs::read(&payload_path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(corrupted("payload missing".into())),
            Err(e) => return Err(e.into()),
        };
        let checksum = hex(&Sha256::digest(&payload));
        if checksum != sidecar.checksum {
            return Err(corrupted(format!(
                "checksum {checksum} does not match {}",
                sidecar.checksum
            )));
        }
        let dim = sidecar.dim;
        if payload.len() != 8 * (dim + 2 * dim * dim) {
            return Err(corrupted(format!(
                "payload of {} bytes does not hold dimension {dim}",
                payload.len()
            )));
        }
        let mut words = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let energies: Vec<f64> = words.by_ref().take(dim).collect();
        let mut vectors = Vec::with_capacity(dim * dim);
        while let (Some(re), Some(im)) = (words.next(), words.next()) {
            vectors.push(Complex64::new(re, im));
        }
        Ok(CacheLookup::Hit(EigenDecomposition {
            params: *params,
            momentum,
            energies,
            vectors,
        }))
    }
}

fn encode(decomp: &EigenDecomposition) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(8 * (decomp.energies.len() + 2 * decomp.vectors.len()));
    for e in &decomp.energies {
        bytes.extend_from_slice(&e.to_le_bytes());
    }
    for z in &decomp.vectors {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    bytes
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let unique = TEMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let temp = path.with_extension(format!("tmp{}.{unique}", std::process::id()));
    {
        let mut file = fs::File::create(&temp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&temp, path)?;
    Ok(())
}
