//! Versioned binary cache of converged eigen-solutions.
//!
//! Layout of one entry, all integers little-endian:
//! `b"DLEC" | version u32 | header length u64 | header JSON | energies f64[n] |
//! converged u8[n] | parity i8[n] | coefficients f64[rows * cols] | sha256`.
//! The trailing digest covers every preceding byte.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use dicke_core::model::{converged_sector, ConvergenceTolerances, EigenSolution, Parity};
use dicke_core::{BasisSpec, ModelParams};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

pub const CACHE_MAGIC: &[u8; 4] = b"DLEC";
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Environment variable overriding the cache root.
pub const CACHE_ROOT_ENV: &str = "DICKE_LAB_CACHE";

/// Everything that determines a converged sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub format: u32,
    pub params: ModelParams,
    pub basis: BasisSpec,
    pub parity: Parity,
    pub tolerances: ConvergenceTolerances,
    pub vectors: bool,
}

impl CacheKey {
    pub fn new(params: ModelParams, basis: BasisSpec, parity: Parity, tolerances: ConvergenceTolerances, vectors: bool) -> Self {
        CacheKey {
            format: CACHE_FORMAT_VERSION,
            params,
            basis,
            parity,
            tolerances,
            vectors,
        }
    }

    pub fn digest(&self) -> String {
        hex(&Sha256::digest(serde_json::to_vec(self).expect("key serializes")))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryHeader {
    key: CacheKey,
    len: usize,
    rows: usize,
    cols: usize,
    epsilon_t: Option<f64>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheEvent {
    Hit,
    Miss,
    Rebuilt,
    Disabled,
}

#[derive(Debug, Clone)]
pub struct EigenCache {
    root: Option<PathBuf>,
}

impl EigenCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        EigenCache { root: Some(root.into()) }
    }

    /// A cache that always recomputes.
    pub fn disabled() -> Self {
        EigenCache { root: None }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    fn entry_path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("{}.dlec", key.digest())))
    }

    /// Converged sector, from disk when a valid entry exists.
    pub fn converged_sector(
        &self,
        params: &ModelParams,
        basis: BasisSpec,
        parity: Parity,
        tol: ConvergenceTolerances,
        with_vectors: bool,
    ) -> Result<(EigenSolution, CacheEvent)> {
        let Some(root) = &self.root else {
            return Ok((converged_sector(params, basis, parity, tol, with_vectors)?, CacheEvent::Disabled));
        };
        fs::create_dir_all(root).map_err(|e| LabError::io(root, e))?;
        // an entry with vectors also serves a values-only request
        let mut candidates = vec![CacheKey::new(*params, basis, parity, tol, true)];
        if !with_vectors {
            candidates.push(CacheKey::new(*params, basis, parity, tol, false));
        }
        let mut corrupt = false;
        for key in &candidates {
            let path = self.entry_path(key).expect("cache enabled");
            if !path.exists() {
                continue;
            }
            match read_locked(&path, key) {
                Ok(mut sol) => {
                    if !with_vectors {
                        sol.coefficients = Array2::zeros((sol.basis.dim(params), 0));
                    }
                    return Ok((sol, CacheEvent::Hit));
                }
                Err(e) => {
                    log::warn!("{e}; rebuilding");
                    corrupt = true;
                }
            }
        }
        let sol = converged_sector(params, basis, parity, tol, with_vectors)?;
        let key = CacheKey::new(*params, basis, parity, tol, with_vectors);
        write_locked(&self.entry_path(&key).expect("cache enabled"), &key, &sol)?;
        Ok((sol, if corrupt { CacheEvent::Rebuilt } else { CacheEvent::Miss }))
    }
}

fn lock_file(path: &Path) -> Result<File> {
    let lock_path = path.with_extension("lock");
    OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lock_path)
        .map_err(|e| LabError::io(lock_path, e))
}

fn read_locked(path: &Path, key: &CacheKey) -> Result<EigenSolution> {
    let lock = lock_file(path)?;
    lock.lock_shared().map_err(|e| LabError::io(path, e))?;
    let bytes = fs::read(path).map_err(|e| LabError::io(path, e));
    drop(lock);
    decode(&bytes?, key).map_err(|reason| LabError::Cache {
        path: path.to_path_buf(),
        reason,
    })
}

fn write_locked(path: &Path, key: &CacheKey, sol: &EigenSolution) -> Result<()> {
    let bytes = encode(key, sol);
    let lock = lock_file(path)?;
    lock.lock().map_err(|e| LabError::io(path, e))?;
    let tmp = path.with_extension("tmp");
    let written = File::create(&tmp)
        .and_then(|mut f| f.write_all(&bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    drop(lock);
    written.map_err(|e| LabError::io(path, e))
}

pub fn encode(key: &CacheKey, sol: &EigenSolution) -> Vec<u8> {
    let (rows, cols) = if key.vectors { sol.coefficients.dim() } else { (0, 0) };
    let header = EntryHeader {
        key: key.clone(),
        len: sol.len(),
        rows,
        cols,
        epsilon_t: sol.epsilon_t,
    };
    let header = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(32 + header.len() + sol.len() * 10 + rows * cols * 8);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(&header);
    for e in &sol.energies {
        out.extend_from_slice(&e.to_le_bytes());
    }
    out.extend(sol.converged.iter().map(|&c| c as u8));
    out.extend(sol.parity.iter().map(|p| p.label() as u8));
    if key.vectors {
        for v in sol.coefficients.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or("entry is truncated")?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, String> {
        let raw = self.take(n.checked_mul(8).ok_or("size overflow")?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

pub fn decode(bytes: &[u8], key: &CacheKey) -> std::result::Result<EigenSolution, String> {
    if bytes.len() < 48 {
        return Err("entry is truncated".into());
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err("checksum mismatch".into());
    }
    let mut r = Reader { bytes: body, at: 0 };
    if r.take(4)? != CACHE_MAGIC {
        return Err("bad magic".into());
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != CACHE_FORMAT_VERSION {
        return Err(format!("format version {version}, expected {CACHE_FORMAT_VERSION}"));
    }
    let header_len = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
    let header: EntryHeader = serde_json::from_slice(r.take(header_len)?).map_err(|e| e.to_string())?;
    if &header.key != key {
        return Err("entry belongs to a different key".into());
    }
    let n = header.len;
    let energies = r.f64s(n)?;
    let converged = r.take(n)?.iter().map(|&b| b != 0).collect();
    let parity = r
        .take(n)?
        .iter()
        .map(|&b| match b as i8 {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            0 => Ok(Parity::Unresolved),
            other => Err(format!("bad parity label {other}")),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let coefficients = if key.vectors {
        Array2::from_shape_vec((header.rows, header.cols), r.f64s(header.rows * header.cols)?).map_err(|e| e.to_string())?
    } else {
        Array2::zeros((key.basis.dim(&key.params), 0))
    };
    if r.at != body.len() {
        return Err("trailing bytes".into());
    }
    Ok(EigenSolution {
        params: key.params,
        basis: key.basis,
        energies,
        coefficients,
        parity,
        converged,
        epsilon_t: header.epsilon_t,
        sector: Some(key.parity),
        excitations: None,
    })
}
