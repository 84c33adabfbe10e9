//! Parse a witness from text, print it back, and evaluate it.

use ucw::witness::{parse, print};
use ucw::Behavior;

const TEXT: &str = "\
name: toy
maximize:
  sqrt(P(0,0,0)) + 2*sqrt(P(1,1,0))
  - abs(E_AC(1) - 1/4)
  - 3*abs(P_B(0) - 1/4)
";

fn main() -> ucw::Result<()> {
    let spec = parse(TEXT)?;
    println!("{}", print(&spec));
    let value = spec.evaluate(&Behavior::uniform(), None)?;
    println!("value on the uniform behavior: {:.6}", value.value);
    println!("certifiable: {}", spec.check_certifiable().is_ok());
    Ok(())
}
