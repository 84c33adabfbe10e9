//! Classical models: the tabulated fixtures, a deterministic strategy and
//! the interventional data each one implies.

use ucw::classical::{fixture_names, fixture_with_metadata, sample_random_model};
use ucw::{builtin, ClassicalModel};

fn report(label: &str, m: &ClassicalModel) -> ucw::Result<()> {
    let (p, d) = (m.behavior(), m.do_data());
    let i = builtin("I")?.evaluate(&p, Some(&d))?.value;
    let f = builtin("F")?.evaluate(&p, Some(&d))?.value;
    println!("{label:>12}: I = {i:.6}  F = {f:.6}  P(b=0) = {:.5}", p.marginal_b(0));
    Ok(())
}

fn main() -> ucw::Result<()> {
    for name in fixture_names() {
        let (m, meta) = fixture_with_metadata(name)?;
        report(name, &m)?;
        println!("{:>12}  source weight residuals {:.1e} / {:.1e}", "", meta.gamma_residual, meta.alpha_residual);
    }
    let mut b0 = [false; 16];
    b0[0] = true;
    report("deterministic", &ClassicalModel::deterministic(0, 0, b0))?;
    report("random", &sample_random_model(3))?;
    Ok(())
}
