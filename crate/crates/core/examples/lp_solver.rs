//! The dense LP solver on a small production-planning problem.

use ucw::optimizer::{solve_lp, LpProblem, Row};

fn main() -> ucw::Result<()> {
    // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18, 0 <= x, y <= 100
    let mut lp = LpProblem::new(2);
    lp.objective = vec![3.0, 5.0];
    lp.bounds = vec![(0.0, 100.0); 2];
    lp.inequalities = vec![
        Row::new(vec![1.0, 0.0], 4.0),
        Row::new(vec![0.0, 2.0], 12.0),
        Row::new(vec![3.0, 2.0], 18.0),
    ];
    let sol = solve_lp(&lp)?;
    println!("{:?}: value {} at {:?} after {} pivots", sol.status, sol.value, sol.x, sol.iterations);
    Ok(())
}
