//! Classify a coarse grid of the two-parameter slice and print it as a map.

use ucw::bounds::{reference_bound_f, reference_bound_i};
use ucw::commands::subspace::{subspace, Region, SubspaceWitnesses};
use ucw::builtin;

fn main() -> ucw::Result<()> {
    let (wi, wf) = (builtin("I")?, builtin("F")?);
    let w = SubspaceWitnesses {
        i: &wi,
        f: &wf,
        bound_i: reference_bound_i(),
        bound_f: reference_bound_f(),
    };
    let n = 21;
    let rows = subspace(&w, n, 0)?;
    // Rows come r-major; print s upward.
    for j in (0..n).rev() {
        let line: String = (0..n)
            .map(|i| match rows[i * n + j].region {
                Some(Region::IViolating) => 'I',
                Some(Region::FViolating) => 'F',
                _ => '.',
            })
            .collect();
        println!("{line}");
    }
    println!("r runs left to right over [-1/4, 1/4], s bottom to top");
    Ok(())
}
