//! `certify`: branch-and-bound bracket on a witness's classical maximum.

use std::time::Duration;

use crate::bounds::{cache_dir, store_certificate_in};
use crate::error::Result;
use crate::optimizer::{branch_and_bound_with, BnbConfig, BoundCertificate};
use crate::witness::FunctionalSpec;

use super::exit;
use super::table::sig6;

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub gap: f64,
    pub node_cap: usize,
    pub workers: usize,
    pub seed: u64,
    pub time_limit: Option<Duration>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        let d = BnbConfig::default();
        Self {
            gap: d.abs_gap,
            node_cap: d.node_cap,
            workers: d.workers,
            seed: d.seed,
            time_limit: None,
        }
    }
}

impl CertifyOptions {
    pub fn config(&self) -> BnbConfig {
        BnbConfig {
            abs_gap: self.gap,
            node_cap: self.node_cap,
            workers: self.workers,
            seed: self.seed,
            time_limit: self.time_limit,
            ..BnbConfig::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOutcome {
    pub certificate: BoundCertificate,
    /// Cache file updated, if `UCW_CACHE_DIR` is set and the run converged.
    pub cached: Option<std::path::PathBuf>,
}

impl CertifyOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.certificate.converged {
            exit::OK
        } else {
            exit::NOT_CONVERGED
        }
    }

    pub fn summary(&self) -> String {
        let c = &self.certificate;
        format!(
            "{}: {} <= max <= {} (gap {}, {} nodes, {:.1}s, {})",
            c.witness,
            sig6(c.lower),
            sig6(c.upper),
            sig6(c.gap),
            c.nodes,
            c.seconds,
            if c.converged { "converged" } else { "NOT converged" }
        )
    }
}

pub fn certify(spec: &FunctionalSpec, opts: &CertifyOptions) -> Result<CertifyOutcome> {
    let certificate = branch_and_bound_with(spec, &opts.config())?;
    let cached = match cache_dir() {
        Some(dir) if certificate.converged => Some(store_certificate_in(&dir, &certificate)?),
        _ => None,
    };
    Ok(CertifyOutcome { certificate, cached })
}
