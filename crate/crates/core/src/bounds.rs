//! Reference classical bounds and the local cache of certified ones.
//!
//! The reference values ship as constants. `certify` may store a certified
//! upper bound under `$UCW_CACHE_DIR/bounds.json`; lookups prefer that entry
//! and report which one they used.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::BoundCertificate;

pub const CACHE_ENV: &str = "UCW_CACHE_DIR";
const CACHE_FILE: &str = "bounds.json";

/// `3/√2 + √7/6`.
pub fn reference_bound_i() -> f64 {
    3.0 / 2f64.sqrt() + 7f64.sqrt() / 6.0
}

/// `9/7 + (7/10)√6`.
pub fn reference_bound_f() -> f64 {
    9.0 / 7.0 + 0.7 * 6f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Published value shipped with the crate.
    Paper,
    /// Upper end of a converged local certificate.
    Certified,
    /// Supplied on the command line.
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredBound {
    pub witness: String,
    pub value: f64,
    pub provenance: Provenance,
}

impl std::fmt::Display for StoredBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.provenance {
            Provenance::Paper => "paper",
            Provenance::Certified => "certified",
            Provenance::Override => "override",
        };
        write!(f, "{} bound {:.9} [{tag}]", self.witness, self.value)
    }
}

pub fn reference_bound(witness: &str) -> Result<StoredBound> {
    let value = match witness {
        "I" => reference_bound_i(),
        "F" => reference_bound_f(),
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(StoredBound {
        witness: witness.to_string(),
        value,
        provenance: Provenance::Paper,
    })
}

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Cache {
    bounds: BTreeMap<String, BoundCertificate>,
}

fn read_cache(dir: &std::path::Path) -> Result<Cache> {
    let path = dir.join(CACHE_FILE);
    if !path.exists() {
        return Ok(Cache::default());
    }
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Certified bound for `witness` from the cache in `dir`, if present.
pub fn cached_bound_in(dir: &std::path::Path, witness: &str) -> Result<Option<StoredBound>> {
    Ok(read_cache(dir)?.bounds.get(witness).map(|c| StoredBound {
        witness: witness.to_string(),
        value: c.upper,
        provenance: Provenance::Certified,
    }))
}

/// Records a converged certificate in `dir`. Non-converged ones are refused.
pub fn store_certificate_in(dir: &std::path::Path, cert: &BoundCertificate) -> Result<PathBuf> {
    if !cert.converged {
        return Err(Error::Config(format!(
            "certificate for `{}` did not converge; not caching it",
            cert.witness
        )));
    }
    fs::create_dir_all(dir)?;
    let mut cache = read_cache(dir)?;
    cache.bounds.insert(cert.witness.clone(), cert.clone());
    let path = dir.join(CACHE_FILE);
    fs::write(&path, serde_json::to_string_pretty(&cache)?)?;
    Ok(path)
}

/// Certified bound from `$UCW_CACHE_DIR` when available, else the reference
/// bound. Witnesses without either have no bound.
pub fn resolve_bound(witness: &str) -> Result<Option<StoredBound>> {
    if let Some(dir) = cache_dir() {
        if let Some(b) = cached_bound_in(&dir, witness)? {
            return Ok(Some(b));
        }
    }
    match reference_bound(witness) {
        Ok(b) => Ok(Some(b)),
        Err(Error::UnknownName(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
