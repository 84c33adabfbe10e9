//! Evaluate both witnesses on the family strategy and print term breakdowns.

use ucw::bounds::reference_bound;
use ucw::commands::evaluate::{evaluate, InputSource};
use ucw::builtin;

fn main() -> ucw::Result<()> {
    let input: InputSource = std::env::args().nth(1).unwrap_or("family:pi/8:1".into()).parse()?;
    let data = input.load()?;
    for name in ["I", "F"] {
        let report = evaluate(&builtin(name)?, &data, Some(reference_bound(name)?))?;
        print!("{}", report.to_text());
        println!();
    }
    Ok(())
}
