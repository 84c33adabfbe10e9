//! Build the two-source quantum strategy and compute its behavior by the
//! Born rule, with and without white noise.

use std::f64::consts::FRAC_PI_8;

use ucw::QuantumStrategy;

fn main() -> ucw::Result<()> {
    for v in [1.0, 0.9] {
        let s = QuantumStrategy::family(FRAC_PI_8, v)?;
        let p = s.born_behavior()?;
        let d = s.born_do_data()?;
        println!("v = {v}");
        for b in 0..2 {
            for a in 0..2 {
                for c in 0..2 {
                    println!("  P({a},{b},{c}) = {:.6}", p.get(a, b, c));
                }
            }
        }
        println!("  P(b=0) = {:.6}", p.marginal_b(0));
        println!("  <A>_do = {:?}, <C>_do = {:?}", [d.a_mean(0), d.a_mean(1)], [d.c_mean(0), d.c_mean(1)]);
    }
    Ok(())
}
