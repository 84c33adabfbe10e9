//! Multi-start local search for the classical maximum of both witnesses.

use std::time::Instant;

use ucw::optimizer::local_search;
use ucw::builtin;

fn main() -> ucw::Result<()> {
    let starts = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    for name in ["I", "F"] {
        let spec = builtin(name)?;
        let t = Instant::now();
        let (model, value) = local_search(&spec, starts, 1)?;
        println!("{name}: {value:.9} after {starts} starts ({:.2}s)", t.elapsed().as_secs_f64());
        println!("  p(gamma) = {:?}", model.p_gamma());
        println!("  p(alpha) = {:?}", model.p_alpha());
    }
    Ok(())
}
