//! Certified bracket on the classical maximum of a witness.
//!
//! `cargo run --release --example certify -- I 1e-3 [node_cap] [seconds]`

use std::time::Duration;

use ucw::builtin;
use ucw::optimizer::{branch_and_bound_with, BnbConfig};

fn main() -> ucw::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "F".into());
    let gap = args.next().and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let node_cap = args.next().and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let seconds: Option<u64> = args.next().and_then(|s| s.parse().ok());
    let cfg = BnbConfig {
        abs_gap: gap,
        node_cap,
        time_limit: seconds.map(Duration::from_secs),
        ..BnbConfig::default()
    };
    let cert = branch_and_bound_with(&builtin(&name)?, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&cert)?);
    Ok(())
}
