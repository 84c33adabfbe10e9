//! Dense bounded-variable primal simplex.
//!
//! Problems are small (under a few hundred rows and columns), so the full
//! tableau is kept in memory and updated by Gauss-Jordan pivots. Variables
//! carry finite box bounds and are kept nonbasic at either end of their box.
//! Pricing is Dantzig's largest reduced cost; after a run of degenerate
//! pivots the solver switches to Bland's rule for the rest of the phase.

use serde::Serialize;

use crate::error::{Error, Result};

pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const OPT_TOL: f64 = 1e-10;
const DEGENERATE_RUN: usize = 60;

/// `coeffs · x <= rhs` or `coeffs · x == rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }
}

/// `max objective · x` subject to the rows and `lo <= x <= hi`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub inequalities: Vec<Row>,
    pub equalities: Vec<Row>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            inequalities: Vec::new(),
            equalities: Vec::new(),
            bounds: vec![(0.0, 1.0); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::Lp(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        for (k, row) in self.inequalities.iter().chain(&self.equalities).enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::Lp(format!(
                    "row {k} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Lp(format!("row {k} is not finite")));
            }
        }
        if let Some(k) = self.bounds.iter().position(|(l, h)| !l.is_finite() || !h.is_finite()) {
            return Err(Error::Lp(format!("variable {k} has an infinite bound")));
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |r: &Row| r.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let ineq = self.inequalities.iter().map(|r| (dot(r) - r.rhs).max(0.0));
        let eq = self.equalities.iter().map(|r| (dot(r) - r.rhs).abs());
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(l, h), &v)| (l - v).max(v - h).max(0.0));
        ineq.chain(eq).chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// `m x ncols`, row-major: `B^{-1} A`.
    t: Vec<f64>,
    /// Reduced costs of the current phase objective.
    d: Vec<f64>,
    /// Values of the basic variables per row.
    xb: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    upper: Vec<f64>,
    /// Columns that may not enter the basis.
    frozen: Vec<bool>,
    iterations: usize,
    cap: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.ncols + j]
    }

    fn set_objective(&mut self, cost: &[f64]) {
        self.d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
                for (dj, tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
    }

    fn value_of(&self, j: usize) -> f64 {
        match self.state[j] {
            State::AtLower => 0.0,
            State::AtUpper => self.upper[j],
            State::Basic => {
                let i = self.basis.iter().position(|&b| b == j).expect("basic column in basis");
                self.xb[i]
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let n = self.ncols;
        let p = self.at(r, j);
        let inv = 1.0 / p;
        for v in &mut self.t[r * n..(r + 1) * n] {
            *v *= inv;
        }
        let pivot_row: Vec<f64> = self.t[r * n..(r + 1) * n].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * n + j];
            if f != 0.0 {
                let row = &mut self.t[i * n..(i + 1) * n];
                for (v, pr) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                row[j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (v, pr) in self.d.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.d[j] = 0.0;
        }
    }

    fn run(&mut self) -> Result<Outcome> {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            self.iterations += 1;
            if self.iterations > self.cap {
                return Err(Error::Lp(format!(
                    "no convergence after {} iterations (cycling?)",
                    self.cap
                )));
            }
            // Pricing.
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if self.frozen[j] {
                    continue;
                }
                let dj = self.d[j];
                let improving = match self.state[j] {
                    State::Basic => false,
                    State::AtLower => dj > OPT_TOL && self.upper[j] > 0.0,
                    State::AtUpper => dj < -OPT_TOL,
                };
                if !improving {
                    continue;
                }
                if bland {
                    enter = Some((j, dj));
                    break;
                }
                if enter.is_none_or(|(_, best)| dj.abs() > best.abs()) {
                    enter = Some((j, dj));
                }
            }
            let Some((j, _)) = enter else {
                return Ok(Outcome::Optimal);
            };
            let sigma = if self.state[j] == State::AtLower { 1.0 } else { -1.0 };

            // Ratio test.
            let mut step = self.upper[j];
            let mut leave: Option<(usize, bool)> = None; // (row, leaves at upper)
            let mut leave_alpha = 0.0f64;
            for i in 0..self.m {
                let alpha = sigma * self.at(i, j);
                let b = self.basis[i];
                let (limit, to_upper) = if alpha > PIVOT_TOL {
                    (self.xb[i].max(0.0) / alpha, false)
                } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.xb[i]).max(0.0) / -alpha, true)
                } else {
                    continue;
                };
                let take = if limit < step - 1e-12 {
                    true
                } else if let Some((r, _)) = leave.filter(|_| limit <= step + 1e-12) {
                    if bland {
                        b < self.basis[r]
                    } else {
                        alpha.abs() > leave_alpha
                    }
                } else {
                    false
                };
                if take {
                    step = limit.min(step);
                    leave = Some((i, to_upper));
                    leave_alpha = alpha.abs();
                }
            }
            if !step.is_finite() {
                return Ok(Outcome::Unbounded);
            }

            if step <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }

            for i in 0..self.m {
                let a = self.at(i, j);
                if a != 0.0 {
                    self.xb[i] -= sigma * step * a;
                }
            }
            match leave {
                None => {
                    // Bound flip.
                    self.state[j] = if sigma > 0.0 { State::AtUpper } else { State::AtLower };
                }
                Some((r, to_upper)) => {
                    let entering_value = if sigma > 0.0 { step } else { self.upper[j] - step };
                    let old = self.basis[r];
                    self.state[old] = if to_upper { State::AtUpper } else { State::AtLower };
                    self.basis[r] = j;
                    self.state[j] = State::Basic;
                    self.xb[r] = entering_value;
                    self.pivot(r, j);
                }
            }
        }
    }
}

/// Solves `problem` to optimality, or reports infeasibility/unboundedness.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.num_vars();
    let lo: Vec<f64> = problem.bounds.iter().map(|b| b.0).collect();
    let width: Vec<f64> = problem.bounds.iter().map(|b| b.1 - b.0).collect();
    if width.iter().any(|w| *w < -FEAS_TOL) {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: lo,
            value: f64::NEG_INFINITY,
            iterations: 0,
        });
    }

    let m_ineq = problem.inequalities.len();
    let m = m_ineq + problem.equalities.len();
    // Shifted rows y = x - lo.
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::with_capacity(m);
    for (k, r) in problem.inequalities.iter().chain(&problem.equalities).enumerate() {
        let shift: f64 = r.coeffs.iter().zip(&lo).map(|(a, l)| a * l).sum();
        rows.push((r.coeffs.clone(), r.rhs - shift, k < m_ineq));
    }
    let needs_art: Vec<bool> = rows.iter().map(|(_, rhs, ineq)| !*ineq || *rhs < 0.0).collect();
    let n_art = needs_art.iter().filter(|x| **x).count();
    let ncols = n + m_ineq + n_art;

    let mut t = vec![0.0; m * ncols];
    let mut basis = vec![0; m];
    let mut xb = vec![0.0; m];
    let mut state = vec![State::AtLower; ncols];
    let mut upper = vec![f64::INFINITY; ncols];
    for (j, w) in width.iter().enumerate() {
        upper[j] = w.max(0.0);
    }
    let mut art = n + m_ineq;
    for (i, (coeffs, rhs, ineq)) in rows.iter().enumerate() {
        let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
        let row = &mut t[i * ncols..(i + 1) * ncols];
        for (v, c) in row.iter_mut().zip(coeffs) {
            *v = sign * c;
        }
        if *ineq {
            row[n + i] = sign;
        }
        xb[i] = sign * rhs;
        if needs_art[i] {
            row[art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
        state[basis[i]] = State::Basic;
    }

    let mut tab = Tableau {
        m,
        ncols,
        t,
        d: Vec::new(),
        xb,
        basis,
        state,
        upper,
        frozen: vec![false; ncols],
        iterations: 0,
        cap: 50 * (m + ncols) + 1000,
    };

    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(n + m_ineq) {
            *c = -1.0;
        }
        tab.set_objective(&cost);
        tab.run()?;
        let infeasibility: f64 = (n + m_ineq..ncols).map(|j| tab.value_of(j)).sum();
        if infeasibility > FEAS_TOL * (1.0 + m as f64) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: lo,
                value: f64::NEG_INFINITY,
                iterations: tab.iterations,
            });
        }
        for j in n + m_ineq..ncols {
            tab.frozen[j] = true;
            tab.upper[j] = 0.0;
        }
        // Drive zero-valued artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] < n + m_ineq {
                continue;
            }
            if let Some(j) = (0..n + m_ineq)
                .filter(|&j| tab.state[j] != State::Basic)
                .max_by(|&a, &b| tab.at(i, a).abs().total_cmp(&tab.at(i, b).abs()))
                .filter(|&j| tab.at(i, j).abs() > 1e-7)
            {
                let old = tab.basis[i];
                let value = tab.value_of(j);
                tab.state[old] = State::AtLower;
                tab.basis[i] = j;
                tab.state[j] = State::Basic;
                // Basic values are unchanged by a degenerate pivot except
                // for the entering column, which keeps its bound value.
                tab.xb[i] = value;
                tab.pivot(i, j);
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    cost[..n].copy_from_slice(&problem.objective);
    tab.set_objective(&cost);
    let outcome = tab.run()?;

    let x: Vec<f64> = (0..n).map(|j| lo[j] + tab.value_of(j)).collect();
    let value = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let status = match outcome {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
    };
    Ok(LpSolution {
        status,
        x,
        value,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let mut lp = LpProblem::new(1);
        lp.objective = vec![1.0];
        lp.bounds = vec![(0.0, 10.0)];
        lp.inequalities.push(Row::new(vec![1.0], 3.0));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_simplex() {
        let mut lp = LpProblem::new(3);
        lp.objective = vec![1.0, 1.0, 0.0];
        lp.equalities.push(Row::new(vec![1.0, 1.0, 1.0], 1.0));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(lp.max_violation(&s.x) < 1e-12);
    }

    #[test]
    fn infeasible() {
        let mut lp = LpProblem::new(2);
        lp.equalities.push(Row::new(vec![1.0, 1.0], 3.0));
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        let mut lp = LpProblem::new(1);
        lp.bounds = vec![(1.0, 0.0)];
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn negative_rhs_and_shifted_bounds() {
        // max -x - y  s.t. x + y >= 1.5, x in [0.5, 2], y in [-1, 1]
        let mut lp = LpProblem::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.bounds = vec![(0.5, 2.0), (-1.0, 1.0)];
        lp.inequalities.push(Row::new(vec![-1.0, -1.0], -1.5));
        let s = solve_lp(&lp).unwrap();
        assert!((s.value + 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_objective() {
        let mut lp = LpProblem::new(2);
        lp.objective = vec![0.0, 0.0];
        lp.bounds = vec![(0.0, 1.0), (0.0, 1.0)];
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Optimal);
    }

    #[test]
    fn rejects_malformed() {
        let mut lp = LpProblem::new(2);
        lp.inequalities.push(Row::new(vec![1.0], 1.0));
        assert!(solve_lp(&lp).is_err());
        let mut lp = LpProblem::new(1);
        lp.bounds = vec![(0.0, f64::INFINITY)];
        assert!(solve_lp(&lp).is_err());
    }
}
