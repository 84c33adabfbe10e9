//! `scan`: witness values of the noisy quantum family over a `(θ, v)` grid.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::DoData;
use crate::error::{Error, Result};
use crate::quantum::family_behavior;
use crate::witness::FunctionalSpec;

use super::table::{sig6, TableRow};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub thetas: Vec<f64>,
    pub visibilities: Vec<f64>,
}

impl ScanGrid {
    /// `nt` angles over `[0, π/2]` and `nv` visibilities over `[0, 1]`.
    pub fn uniform(nt: usize, nv: usize) -> Self {
        let spread = |n: usize, hi: f64| -> Vec<f64> {
            match n {
                0 => vec![],
                1 => vec![hi],
                _ => (0..n).map(|k| hi * k as f64 / (n - 1) as f64).collect(),
            }
        };
        Self {
            thetas: spread(nt, FRAC_PI_2),
            visibilities: spread(nv, 1.0),
        }
    }

    /// `N` or `NTxNV`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid must be `N` or `NTxNV`, got `{spec}`"));
        let (nt, nv) = match spec.split_once('x') {
            Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
            None => {
                let n = spec.parse().map_err(|_| bad())?;
                (n, n)
            }
        };
        Ok(Self::uniform(nt, nv))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta: f64,
    pub v: f64,
    pub i_q: f64,
    pub f_q: f64,
    #[serde(rename = "violatesI")]
    pub violates_i: bool,
    #[serde(rename = "violatesF")]
    pub violates_f: bool,
}

impl TableRow for ScanRow {
    fn header() -> Vec<&'static str> {
        vec!["theta", "v", "I_Q", "F_Q", "violatesI", "violatesF"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            sig6(self.theta),
            sig6(self.v),
            sig6(self.i_q),
            sig6(self.f_q),
            self.violates_i.to_string(),
            self.violates_f.to_string(),
        ]
    }
}

/// Rows in `θ`-major order. The family's do-data is unbiased at every point.
pub fn scan(
    grid: &ScanGrid,
    witness_i: &FunctionalSpec,
    witness_f: &FunctionalSpec,
    bound_i: f64,
    bound_f: f64,
) -> Result<Vec<ScanRow>> {
    let points: Vec<(f64, f64)> = grid
        .thetas
        .iter()
        .flat_map(|&t| grid.visibilities.iter().map(move |&v| (t, v)))
        .collect();
    let unbiased = DoData::unbiased();
    points
        .par_iter()
        .map(|&(theta, v)| {
            let p = family_behavior(theta, v);
            let i_q = witness_i.evaluate(&p, Some(&unbiased))?.value;
            let f_q = witness_f.evaluate(&p, Some(&unbiased))?.value;
            Ok(ScanRow {
                theta,
                v,
                i_q,
                f_q,
                violates_i: i_q > bound_i,
                violates_f: f_q > bound_f,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{reference_bound_f, reference_bound_i};
    use crate::witness::builtin;

    fn row(theta: f64, v: f64) -> ScanRow {
        let grid = ScanGrid {
            thetas: vec![theta],
            visibilities: vec![v],
        };
        let (i, f) = (builtin("I").unwrap(), builtin("F").unwrap());
        scan(&grid, &i, &f, reference_bound_i(), reference_bound_f()).unwrap()[0].clone()
    }

    #[test]
    fn reference_rows() {
        let r = row(std::f64::consts::FRAC_PI_8, 1.0);
        assert_eq!((sig6(r.i_q).as_str(), sig6(r.f_q).as_str()), ("2.69238", "3.15432"));
        assert!(r.violates_i && r.violates_f);
        assert!(!row(std::f64::consts::FRAC_PI_8, 0.9).violates_i);
        assert!((row((1f64 / 3.0).atan(), 1.0).f_q - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_shapes() {
        let g = ScanGrid::parse("5x3").unwrap();
        assert_eq!((g.thetas.len(), g.visibilities.len()), (5, 3));
        assert_eq!(g.thetas[4], FRAC_PI_2);
        assert_eq!(ScanGrid::parse("4").unwrap().visibilities, vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert!(ScanGrid::parse("ax2").is_err());
    }
}
