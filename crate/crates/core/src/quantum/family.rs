//! Closed forms for the parametrized quantum family, scans over the
//! measurement angle, and critical visibilities.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::behavior::{slice_behavior, Behavior};
use crate::error::{Error, Result};

/// The two built-in witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Which {
    /// Purely observational.
    I,
    /// Observational plus interventional terms.
    F,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::I => "I",
            Which::F => "F",
        }
    }
}

impl std::str::FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Which::I),
            "F" => Ok(Which::F),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

/// `(r, s)` coordinates of the noisy family: `r = v^2 sin(2θ)/4`,
/// `s = v cos(2θ)/4`.
pub fn family_rs(theta: f64, v: f64) -> (f64, f64) {
    let t = 2.0 * theta;
    (v * v * t.sin() / 4.0, v * t.cos() / 4.0)
}

/// Behavior of the family with Bell sources at visibility `v`.
///
/// Both sources pick up a factor `v` in every two-body correlator, so
/// `<AC>_0 = r`, `<C>_1 = -<A>_1 = s`, `<AC>_1 = v^2/4` and `P(b=0) = 1/4`.
pub fn family_behavior(theta: f64, v: f64) -> Behavior {
    let (r, s) = family_rs(theta, v);
    slice_behavior(r, s, v * v)
}

/// Witness value of the family in closed form (the do-correlators of the
/// family vanish identically).
pub fn witness_value_closed_form(which: Which, theta: f64, v: f64) -> f64 {
    let t = 2.0 * theta;
    let v2 = v * v;
    let bob_fail = (3.0 - v2 + 2.0 * v * t.cos()).max(0.0).sqrt();
    let bob_hit = (1.0 + v2 * t.sin()).max(0.0).sqrt();
    match which {
        Which::I => 0.75 * bob_fail + bob_hit - 15.0 * (v2 - 1.0).abs() / 4.0,
        Which::F => bob_fail + bob_hit - (v2 - 1.0).abs() / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaOptimum {
    pub theta: f64,
    pub value: f64,
}

const THETA_TOL: f64 = 1e-8;

/// Maximizes the closed-form witness over `θ ∈ [0, π/2]`: coarse grid to
/// locate the peak, then golden-section refinement.
pub fn maximize_over_theta(which: Which, v: f64) -> ThetaOptimum {
    let f = |theta: f64| witness_value_closed_form(which, theta, v);
    const GRID: usize = 64;
    let step = FRAC_PI_2 / GRID as f64;
    let best = (0..=GRID)
        .max_by(|&i, &j| f(i as f64 * step).total_cmp(&f(j as f64 * step)))
        .unwrap_or(0);
    let lo = (best as f64 - 1.0).max(0.0) * step;
    let hi = ((best as f64 + 1.0) * step).min(FRAC_PI_2);
    golden_section_max(f, lo, hi, THETA_TOL)
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> ThetaOptimum {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let theta = 0.5 * (lo + hi);
    ThetaOptimum { theta, value: f(theta) }
}

/// How the measurement angle is chosen at each visibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaPolicy {
    /// Re-optimize `θ` for every `v`.
    Optimized,
    /// Keep `θ` at the maximizer found at `v = 1`.
    UnitVisibilityOptimum,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CriticalVisibility {
    /// Smallest visibility that still violates the bound.
    Root(f64),
    /// Even `v = 1` stays at or below the bound.
    NoViolation,
}

impl CriticalVisibility {
    pub fn value(&self) -> Option<f64> {
        match self {
            CriticalVisibility::Root(v) => Some(*v),
            CriticalVisibility::NoViolation => None,
        }
    }
}

const VIS_TOL: f64 = 1e-6;

/// Bisection on `v -> max_θ W(θ, v) - bound`.
pub fn critical_visibility(which: Which, bound: f64) -> Result<CriticalVisibility> {
    critical_visibility_with(which, bound, ThetaPolicy::Optimized)
}

pub fn critical_visibility_with(
    which: Which,
    bound: f64,
    policy: ThetaPolicy,
) -> Result<CriticalVisibility> {
    if !bound.is_finite() {
        return Err(Error::InvalidInput(format!("classical bound {bound} is not finite")));
    }
    let fixed = match policy {
        ThetaPolicy::Optimized => None,
        ThetaPolicy::UnitVisibilityOptimum => Some(maximize_over_theta(which, 1.0).theta),
        ThetaPolicy::Fixed(t) => Some(t),
    };
    let excess = |v: f64| -> f64 {
        let value = match fixed {
            Some(theta) => witness_value_closed_form(which, theta, v),
            None => maximize_over_theta(which, v).value,
        };
        value - bound
    };

    if excess(1.0) <= 0.0 {
        return Ok(CriticalVisibility::NoViolation);
    }

    // A single sign change on [0,1] is required for the bisection to mean
    // anything.
    const SAMPLES: usize = 40;
    let curve: Vec<(f64, f64)> = (0..=SAMPLES)
        .map(|k| {
            let v = k as f64 / SAMPLES as f64;
            (v, excess(v))
        })
        .collect();
    let sign_changes = curve
        .windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .count();
    if sign_changes > 1 {
        let samples = curve
            .iter()
            .map(|(v, e)| format!("{v:.3}:{e:+.6}"))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(Error::Monotonicity(format!(
            "excess over bound changes sign {sign_changes} times: {samples}"
        )));
    }
    if curve[0].1 > 0.0 {
        return Ok(CriticalVisibility::Root(0.0));
    }

    let (mut lo, mut hi) = (0.0, 1.0);
    for w in curve.windows(2) {
        if w[0].1 <= 0.0 && w[1].1 > 0.0 {
            lo = w[0].0;
            hi = w[1].0;
        }
    }
    while hi - lo > VIS_TOL * 1e-2 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalVisibility::Root(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_8, SQRT_2};

    use super::*;

    #[test]
    fn pi_over_8_correlators() {
        let view = family_behavior(FRAC_PI_8, 1.0).to_correlators();
        assert!((view.ac(0) - SQRT_2 / 8.0).abs() < 1e-15);
        assert!((view.a(1) + SQRT_2 / 8.0).abs() < 1e-15);
        assert!((view.c(1) - SQRT_2 / 8.0).abs() < 1e-15);
        assert!((view.ac(1) - 0.25).abs() < 1e-15);
        assert!((view.p_b(0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn theta_zero_coordinates() {
        let (r, s) = family_rs(0.0, 1.0);
        assert_eq!(r, 0.0);
        assert_eq!(s, 0.25);
    }

    #[test]
    fn closed_form_reference_values() {
        assert!((witness_value_closed_form(Which::I, FRAC_PI_8, 1.0) - 2.69238).abs() < 1e-5);
        assert!((witness_value_closed_form(Which::F, FRAC_PI_8, 1.0) - 3.15432).abs() < 1e-5);
        let theta_f = (1.0f64 / 3.0).atan();
        assert!((witness_value_closed_form(Which::F, theta_f, 1.0) - 3.16228).abs() < 1e-5);
        // sqrt(2+sqrt2)(3 sqrt2 + 4)/(4 sqrt2) and (2+sqrt2)^{3/2}/2 exactly.
        let exact_i = (2.0 + SQRT_2).sqrt() * (3.0 * SQRT_2 + 4.0) / (4.0 * SQRT_2);
        let exact_f = 0.5 * (2.0 + SQRT_2).powf(1.5);
        assert!((witness_value_closed_form(Which::I, FRAC_PI_8, 1.0) - exact_i).abs() < 1e-14);
        assert!((witness_value_closed_form(Which::F, FRAC_PI_8, 1.0) - exact_f).abs() < 1e-14);
    }

    #[test]
    fn maximizers_at_full_visibility() {
        let i = maximize_over_theta(Which::I, 1.0);
        assert!((i.theta - (2.0f64 / 5.0).atan()).abs() < 1e-6);
        assert!((i.value - 2.69258).abs() < 1e-5);
        // 14.5 / sqrt(29)
        assert!((i.value - 14.5 / 29f64.sqrt()).abs() < 1e-12);
        let f = maximize_over_theta(Which::F, 1.0);
        assert!((f.theta - (1.0f64 / 3.0).atan()).abs() < 1e-6);
        assert!((f.value - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn maximum_at_zero_visibility() {
        // All sources maximally mixed: the angle drops out entirely.
        let f = maximize_over_theta(Which::F, 0.0);
        assert!((f.value - (3f64.sqrt() + 1.0 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn no_violation_sentinel() {
        assert_eq!(critical_visibility(Which::I, 10.0).unwrap(), CriticalVisibility::NoViolation);
    }

    #[test]
    fn critical_visibility_rejects_nan() {
        assert!(critical_visibility(Which::F, f64::NAN).is_err());
    }

    #[test]
    fn quantum_curve_radius() {
        for k in 0..50 {
            let theta = k as f64 * 0.031;
            for &v in &[1.0, 0.9, 0.5] {
                let (r, s) = family_rs(theta, v);
                let t = 2.0 * theta;
                let lhs = 16.0 * (r * r + s * s);
                let rhs = v.powi(4) * t.sin().powi(2) + v * v * t.cos().powi(2);
                assert!((lhs - rhs).abs() < 1e-12);
                assert!(lhs <= 1.0 + 1e-12);
                if v == 1.0 {
                    assert!((lhs - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
