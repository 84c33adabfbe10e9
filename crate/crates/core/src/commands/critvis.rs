//! `critvis`: smallest visibility at which the family still violates a bound.

use serde::Serialize;

use crate::bounds::StoredBound;
use crate::error::Result;
use crate::quantum::{critical_visibility_with, maximize_over_theta, ThetaPolicy, Which};

use super::table::{opt_sig6, sig6, TableRow};

#[derive(Debug, Clone, Serialize)]
pub struct CritvisRow {
    pub witness: String,
    pub bound: StoredBound,
    /// `unit-visibility-optimum` keeps `θ` at its `v = 1` maximizer;
    /// `optimized` re-maximizes over `θ` at every `v`.
    pub theta_policy: &'static str,
    pub theta: Option<f64>,
    /// `None` when even `v = 1` does not violate the bound.
    pub critical_visibility: Option<f64>,
}

impl CritvisRow {
    pub fn describe(&self) -> String {
        match self.critical_visibility {
            Some(v) => format!("{}: v_crit = {} ({})", self.witness, sig6(v), self.theta_policy),
            None => format!("{}: no violation at v=1 ({})", self.witness, self.theta_policy),
        }
    }
}

impl TableRow for CritvisRow {
    fn header() -> Vec<&'static str> {
        vec!["witness", "bound", "provenance", "theta_policy", "theta", "v_crit"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.witness.clone(),
            sig6(self.bound.value),
            format!("{:?}", self.bound.provenance).to_lowercase(),
            self.theta_policy.to_string(),
            opt_sig6(self.theta),
            self.critical_visibility.map(sig6).unwrap_or_else(|| "none".into()),
        ]
    }
}

/// Both angle policies for one witness; the fixed-angle row comes first.
pub fn critvis(which: Which, bound: &StoredBound) -> Result<Vec<CritvisRow>> {
    let theta = maximize_over_theta(which, 1.0).theta;
    let policies = [
        ("unit-visibility-optimum", ThetaPolicy::UnitVisibilityOptimum, Some(theta)),
        ("optimized", ThetaPolicy::Optimized, None),
    ];
    policies
        .into_iter()
        .map(|(name, policy, theta)| {
            Ok(CritvisRow {
                witness: which.name().to_string(),
                bound: bound.clone(),
                theta_policy: name,
                theta,
                critical_visibility: critical_visibility_with(which, bound.value, policy)?.value(),
            })
        })
        .collect()
}
