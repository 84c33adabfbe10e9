//! `subspace`: witness values on the `(r, s)` slice and the quantum circle.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{subspace_behavior, DoData, SubspacePoint};
use crate::error::Result;
use crate::witness::FunctionalSpec;

use super::table::{opt_sig6, sig6, TableRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "classical-satisfying")]
    ClassicalSatisfying,
    #[serde(rename = "I-violating")]
    IViolating,
    #[serde(rename = "F-violating")]
    FViolating,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::ClassicalSatisfying => "classical-satisfying",
            Region::IViolating => "I-violating",
            Region::FViolating => "F-violating",
        }
    }
}

/// A grid point (with values) or a sample of the quantum circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceRecord {
    pub kind: String,
    pub r: f64,
    pub s: f64,
    pub i: Option<f64>,
    pub f: Option<f64>,
    pub region: Option<Region>,
}

impl TableRow for SubspaceRecord {
    fn header() -> Vec<&'static str> {
        vec!["kind", "r", "s", "I", "F", "region"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.kind.clone(),
            sig6(self.r),
            sig6(self.s),
            opt_sig6(self.i),
            opt_sig6(self.f),
            self.region.map(|r| r.label().to_string()).unwrap_or_default(),
        ]
    }
}

pub struct SubspaceWitnesses<'a> {
    pub i: &'a FunctionalSpec,
    pub f: &'a FunctionalSpec,
    pub bound_i: f64,
    pub bound_f: f64,
}

impl SubspaceWitnesses<'_> {
    /// `I` violation takes precedence over `F` violation. `F` is evaluated
    /// with vanishing do-correlators, as for the quantum family.
    pub fn classify(&self, r: f64, s: f64) -> Result<SubspaceRecord> {
        let p = subspace_behavior(SubspacePoint::new(r, s)?);
        let d = DoData::unbiased();
        let i = self.i.evaluate(&p, Some(&d))?.value;
        let f = self.f.evaluate(&p, Some(&d))?.value;
        let region = if i > self.bound_i {
            Region::IViolating
        } else if f > self.bound_f {
            Region::FViolating
        } else {
            Region::ClassicalSatisfying
        };
        Ok(SubspaceRecord {
            kind: "grid".into(),
            r,
            s,
            i: Some(i),
            f: Some(f),
            region: Some(region),
        })
    }
}

/// `n x n` grid over `[-1/4, 1/4]^2` followed by `samples` points of the
/// circle `16(r^2 + s^2) = 1`.
pub fn subspace(w: &SubspaceWitnesses<'_>, n: usize, samples: usize) -> Result<Vec<SubspaceRecord>> {
    let axis: Vec<f64> = match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|k| -0.25 + 0.5 * k as f64 / (n - 1) as f64).collect(),
    };
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&r| axis.iter().map(move |&s| (r, s)))
        .collect();
    let mut out: Vec<SubspaceRecord> = points
        .par_iter()
        .map(|&(r, s)| w.classify(r, s))
        .collect::<Result<_>>()?;
    out.extend(quantum_circle(samples).into_iter().map(|(r, s)| SubspaceRecord {
        kind: "quantum-curve".into(),
        r,
        s,
        i: None,
        f: None,
        region: None,
    }));
    Ok(out)
}

/// `(sin φ / 4, cos φ / 4)` for `samples` equally spaced `φ`.
pub fn quantum_circle(samples: usize) -> Vec<(f64, f64)> {
    (0..samples)
        .map(|k| {
            let phi = TAU * k as f64 / samples as f64;
            (phi.sin() / 4.0, phi.cos() / 4.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{reference_bound_f, reference_bound_i};
    use crate::witness::builtin;

    #[test]
    fn reference_points() {
        let (i, f) = (builtin("I").unwrap(), builtin("F").unwrap());
        let w = SubspaceWitnesses {
            i: &i,
            f: &f,
            bound_i: reference_bound_i(),
            bound_f: reference_bound_f(),
        };
        let q = std::f64::consts::FRAC_PI_4;
        assert_eq!(w.classify(q.sin() / 4.0, q.cos() / 4.0).unwrap().region, Some(Region::IViolating));
        assert_eq!(w.classify(0.0, 0.0).unwrap().region, Some(Region::ClassicalSatisfying));
        let rows = subspace(&w, 5, 8).unwrap();
        assert_eq!(rows.len(), 25 + 8);
    }

    #[test]
    fn circle_radius() {
        for (r, s) in quantum_circle(64) {
            assert!((16.0 * (r * r + s * s) - 1.0).abs() < 1e-12);
        }
    }
}
