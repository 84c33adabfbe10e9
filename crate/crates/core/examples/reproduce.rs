//! The quick part of the reproduction report (no certification).

use ucw::commands::reproduce::{reproduce_all, ReproduceOptions};
use ucw::commands::{table, Format};

fn main() -> ucw::Result<()> {
    let opts = ReproduceOptions {
        skip: vec!["certify".into()],
        random_models: 1000,
        ..Default::default()
    };
    let report = reproduce_all(&opts)?;
    print!("{}", table::render(&report.checks, Format::Text)?);
    Ok(())
}
