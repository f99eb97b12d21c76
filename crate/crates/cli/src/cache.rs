//! On-disk cache of Wiener-Hopf factors.
//!
//! One directory per key holding `gamma.csv`, `lambda_plus.csv` and
//! `metadata.json`. Entries are assembled in a temporary directory and renamed
//! into place, so concurrent writers never expose a partial entry.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use whlattice::lattice::HalfSpace;
use whlattice::symbols::SymbolCoefficients;
use whlattice::wienerhopf::WienerHopfFactor;

use crate::config::RunConfig;

const FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub format: u32,
    pub kernel: String,
    pub halfspace: String,
    pub symbol_radius: usize,
    pub grid_size: usize,
    pub lambda0: f64,
    pub factorization_residual: f64,
    pub support_leak: f64,
    pub tail_mass: f64,
    pub symbol_min: f64,
    pub gamma_sha256: String,
    pub lambda_plus_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn csv_bytes(s: &SymbolCoefficients) -> Vec<u8> {
    let mut v = Vec::new();
    s.write_csv(&mut v).expect("writing to a Vec cannot fail");
    v
}

/// Cache root: flag, then `WHLATTICE_CACHE`, then the config file, then `~/.cache/whlattice`.
pub fn resolve_root(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os("WHLATTICE_CACHE").filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    if let Some(p) = config {
        return p.to_path_buf();
    }
    match std::env::var_os("HOME") {
        Some(h) => PathBuf::from(h).join(".cache").join("whlattice"),
        None => std::env::temp_dir().join("whlattice-cache"),
    }
}

#[derive(Debug, Clone)]
pub struct FactorCache {
    pub root: PathBuf,
}

impl FactorCache {
    pub fn new(root: PathBuf) -> Self {
        Self { root }
    }

    /// Key over everything the factor depends on. Acceptance tolerances are
    /// not part of it; they are re-checked against the stored metadata.
    pub fn key(cfg: &RunConfig, kernel_label: &str, halfspace_label: &str) -> String {
        let desc = serde_json::json!({
            "format": FORMAT,
            "kernel": kernel_label,
            "halfspace": halfspace_label,
            "symbol_radius": cfg.symbol_radius,
            "grid_size": cfg.grid_size,
            "positivity_floor": cfg.positivity_floor,
            "trim_tolerance": cfg.trim_tolerance,
        });
        sha256_hex(desc.to_string().as_bytes())
    }

    fn entry(&self, key: &str) -> PathBuf {
        self.root.join(key)
    }

    /// A stored factor, if present, intact and within the configured tolerances.
    /// Entries failing these checks are removed.
    pub fn load(&self, key: &str, h: &HalfSpace, cfg: &RunConfig) -> Option<(WienerHopfFactor, Metadata)> {
        let dir = self.entry(key);
        if !dir.is_dir() {
            return None;
        }
        match read_entry(&dir, h, cfg) {
            Ok(v) => Some(v),
            Err(e) => {
                log::warn!("discarding cache entry {}: {e:#}", dir.display());
                // best effort, so that a fresh factor can take its place
                let _ = fs::remove_dir_all(&dir);
                None
            }
        }
    }

    pub fn store(&self, key: &str, factor: &WienerHopfFactor, kernel_label: &str, symbol_radius: usize) -> anyhow::Result<Metadata> {
        fs::create_dir_all(&self.root).with_context(|| format!("creating {}", self.root.display()))?;
        let gamma = csv_bytes(&factor.gamma);
        let lambda = csv_bytes(&factor.lambda_plus);
        let meta = Metadata {
            format: FORMAT,
            kernel: kernel_label.into(),
            halfspace: factor.halfspace.label(),
            symbol_radius,
            grid_size: factor.grid_size,
            lambda0: factor.lambda0,
            factorization_residual: factor.factorization_residual,
            support_leak: factor.support_leak,
            tail_mass: factor.tail_mass,
            symbol_min: factor.symbol_min,
            gamma_sha256: sha256_hex(&gamma),
            lambda_plus_sha256: sha256_hex(&lambda),
        };
        let tmp = tempfile::Builder::new().prefix(".partial-").tempdir_in(&self.root)?;
        fs::write(tmp.path().join("gamma.csv"), &gamma)?;
        fs::write(tmp.path().join("lambda_plus.csv"), &lambda)?;
        fs::write(tmp.path().join("metadata.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
        let dest = self.entry(key);
        if let Err(e) = fs::rename(tmp.path(), &dest) {
            // another process got there first; its entry is equivalent
            if !dest.is_dir() {
                return Err(e).with_context(|| format!("installing {}", dest.display()));
            }
        }
        Ok(meta)
    }

    pub fn list(&self) -> anyhow::Result<Vec<(String, Option<Metadata>)>> {
        let mut out = Vec::new();
        if !self.root.is_dir() {
            return Ok(out);
        }
        for e in fs::read_dir(&self.root)? {
            let e = e?;
            let name = e.file_name().to_string_lossy().into_owned();
            if name.starts_with('.') || !e.path().is_dir() {
                continue;
            }
            let meta = fs::read_to_string(e.path().join("metadata.json"))
                .ok()
                .and_then(|t| serde_json::from_str(&t).ok());
            out.push((name, meta));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> anyhow::Result<usize> {
        let mut n = 0;
        if !self.root.is_dir() {
            return Ok(0);
        }
        for e in fs::read_dir(&self.root)? {
            let p = e?.path();
            if p.is_dir() {
                fs::remove_dir_all(&p).with_context(|| format!("removing {}", p.display()))?;
                n += 1;
            }
        }
        Ok(n)
    }
}

fn read_coeffs(path: &Path, want_hash: &str) -> anyhow::Result<SymbolCoefficients> {
    let bytes = fs::read(path)?;
    anyhow::ensure!(sha256_hex(&bytes) == want_hash, "{} does not match its recorded hash", path.display());
    Ok(SymbolCoefficients::read_csv(BufReader::new(bytes.as_slice()))?)
}

fn read_entry(dir: &Path, h: &HalfSpace, cfg: &RunConfig) -> anyhow::Result<(WienerHopfFactor, Metadata)> {
    let meta: Metadata = serde_json::from_str(&fs::read_to_string(dir.join("metadata.json"))?)?;
    anyhow::ensure!(meta.format == FORMAT, "format {} is not {FORMAT}", meta.format);
    anyhow::ensure!(meta.halfspace == h.label(), "half-space {} differs", meta.halfspace);
    anyhow::ensure!(
        meta.factorization_residual <= cfg.residual_tolerance,
        "stored residual {:e} exceeds tolerance",
        meta.factorization_residual
    );
    anyhow::ensure!(meta.support_leak <= cfg.leak_tolerance, "stored leak {:e} exceeds tolerance", meta.support_leak);
    let gamma = read_coeffs(&dir.join("gamma.csv"), &meta.gamma_sha256)?;
    let lambda_plus = read_coeffs(&dir.join("lambda_plus.csv"), &meta.lambda_plus_sha256)?;
    anyhow::ensure!(gamma.dim() == h.dim(), "stored dimension {} differs", gamma.dim());
    let factor = WienerHopfFactor {
        halfspace: h.clone(),
        gamma,
        lambda_plus,
        lambda0: meta.lambda0,
        factorization_residual: meta.factorization_residual,
        support_leak: meta.support_leak,
        tail_mass: meta.tail_mass,
        grid_size: meta.grid_size,
        symbol_min: meta.symbol_min,
    };
    Ok((factor, meta))
}
