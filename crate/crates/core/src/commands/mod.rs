//! Command implementations shared by the `ucw` binary and the examples.
//!
//! Each command returns plain data; [`table`] renders it as aligned text or
//! CSV with six significant digits, and JSON keeps full precision.

pub mod certify;
pub mod critvis;
pub mod evaluate;
pub mod reproduce;
pub mod scan;
pub mod subspace;
pub mod table;

use std::path::Path;

use crate::error::{Error, Result};
use crate::witness::{builtin, parse, FunctionalSpec};

pub use table::{sig6, Format, TableRow};

/// Exit codes of the binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const NOT_CONVERGED: i32 = 2;
}

/// Shipped witness files.
pub const I_WITNESS: &str = include_str!("../../witnesses/I.witness");
pub const F_WITNESS: &str = include_str!("../../witnesses/F.witness");

/// Runs `f` on a thread pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?
        .install(f)
}

/// Resolves `--witness`: a built-in name, a witness file, or an inline
/// expression such as `sqrt(P(0,0,0))`.
pub fn load_witness(arg: &str) -> Result<FunctionalSpec> {
    if let Ok(spec) = builtin(arg) {
        return Ok(spec);
    }
    let path = Path::new(arg);
    if path.is_file() {
        return parse(&std::fs::read_to_string(path)?);
    }
    if arg.trim().is_empty() {
        return Err(Error::Config("empty witness argument".into()));
    }
    parse(&format!("name: {}\nmaximize: {arg}", arg.trim()))
}

/// Parses an angle: a number, `pi`, `pi/N`, `atan(X)` or `atan(X/Y)`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || Error::Config(format!("cannot read angle `{text}`"));
    let ratio = |s: &str| -> Result<f64> {
        match s.split_once('/') {
            Some((a, b)) => Ok(a.trim().parse::<f64>().map_err(|_| bad())?
                / b.trim().parse::<f64>().map_err(|_| bad())?),
            None => s.trim().parse().map_err(|_| bad()),
        }
    };
    if let Some(rest) = t.strip_prefix("pi") {
        return match rest.trim().strip_prefix('/') {
            Some(d) => Ok(std::f64::consts::PI / d.trim().parse::<f64>().map_err(|_| bad())?),
            None if rest.trim().is_empty() => Ok(std::f64::consts::PI),
            None => Err(bad()),
        };
    }
    if let Some(inner) = t.strip_prefix("atan(").and_then(|r| r.strip_suffix(')')) {
        return Ok(ratio(inner)?.atan());
    }
    ratio(t)
}
