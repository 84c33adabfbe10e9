//! Lowest visibility at which each witness is still violated.

use ucw::bounds::reference_bound;
use ucw::commands::critvis::critvis;
use ucw::quantum::{maximize_over_theta, Which};

fn main() -> ucw::Result<()> {
    for which in [Which::I, Which::F] {
        let best = maximize_over_theta(which, 1.0);
        println!("{}: max {:.6} at theta = {:.6}", which.name(), best.value, best.theta);
        for row in critvis(which, &reference_bound(which.name())?)? {
            println!("  {}", row.describe());
        }
    }
    Ok(())
}
