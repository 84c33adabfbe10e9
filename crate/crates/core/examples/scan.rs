//! Witness values of the noisy family over an angle/visibility grid.

use ucw::bounds::{reference_bound_f, reference_bound_i};
use ucw::commands::scan::{scan, ScanGrid};
use ucw::commands::{table, Format};
use ucw::builtin;

fn main() -> ucw::Result<()> {
    let grid = ScanGrid::uniform(9, 3);
    let rows = scan(&grid, &builtin("I")?, &builtin("F")?, reference_bound_i(), reference_bound_f())?;
    print!("{}", table::render(&rows, Format::Text)?);
    Ok(())
}
