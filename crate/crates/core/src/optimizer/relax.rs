//! McCormick relaxation of the classical set over a box of source weights.
//!
//! LP variables, in order:
//!
//! | range    | meaning                                   |
//! |----------|-------------------------------------------|
//! | `0..4`   | `p(γ)`                                    |
//! | `4..8`   | `p(α)`                                    |
//! | `8..24`  | `q(γ,α) ≈ p(γ) p(α)` at `8 + 4γ + α`      |
//! | `24..40` | `w(0,γ,α) = q(γ,α) p(b=0|γ,α)`            |
//! | `40..`   | epigraph and square-root surrogates        |
//!
//! `w(1,γ,α)` is eliminated as `q(γ,α) - w(0,γ,α)`, so `Σ_b w = q` holds
//! exactly and `0 <= w <= q` becomes `0 <= w(0,·) <= q`. Bob's response is
//! free per `(γ,α)`, hence for fixed `q` this encoding is exact; all the
//! slack comes from the McCormick envelope of `q`.

use serde::Serialize;

use crate::classical::{response, ClassicalModel, HIDDEN_VALUES};
use crate::error::{Error, Result};
use crate::witness::{do_a_coord, do_c_coord, prob_coord, FunctionalSpec};

use super::lp::LpProblem;
use super::objective::{AffineCoords, WitnessLp, BASE_ABSCISSAS};

pub const PG: usize = 0;
pub const PA: usize = 4;
pub const Q: usize = 8;
pub const W0: usize = 24;
pub const BASE_VARS: usize = 40;

/// Cap on tangent cuts carried per square-root term.
pub const MAX_CUTS_PER_TERM: usize = 12;

#[inline]
pub fn q_var(g: usize, a: usize) -> usize {
    Q + 4 * g + a
}

#[inline]
pub fn w0_var(g: usize, a: usize) -> usize {
    W0 + 4 * g + a
}

pub type Interval = (f64, f64);

/// The four McCormick inequalities for `q = u v`, `u ∈ [ul, uh]`,
/// `v ∈ [vl, vh]`, as `(cu, cv, rhs, is_lower)` meaning
/// `q >= cu u + cv v - rhs` when `is_lower`, else `q <= cu u + cv v - rhs`.
pub fn mccormick(ub: Interval, vb: Interval) -> [(f64, f64, f64, bool); 4] {
    let (ul, uh) = ub;
    let (vl, vh) = vb;
    [
        (vl, ul, ul * vl, true),
        (vh, uh, uh * vh, true),
        (vl, uh, uh * vl, false),
        (vh, ul, ul * vh, false),
    ]
}

/// A box over the eight source weights, plus the tangent abscissas inherited
/// from its ancestors.
#[derive(Debug, Clone, Serialize)]
pub struct RelaxationNode {
    pub gamma: [Interval; 4],
    pub alpha: [Interval; 4],
    /// Abscissas per square-root term.
    pub cuts: Vec<Vec<f64>>,
    pub upper_bound: f64,
    pub depth: usize,
    /// LP point of this node once solved.
    #[serde(skip)]
    pub solution: Option<Vec<f64>>,
}

impl RelaxationNode {
    pub fn root(spec: &FunctionalSpec) -> Self {
        Self {
            gamma: [(0.0, 1.0); 4],
            alpha: [(0.0, 1.0); 4],
            cuts: vec![BASE_ABSCISSAS.to_vec(); spec.sqrt_terms.len()],
            upper_bound: f64::INFINITY,
            depth: 0,
            solution: None,
        }
    }

    /// Box around a single model's sources, with `radius` slack per side.
    pub fn around(spec: &FunctionalSpec, model: &ClassicalModel, radius: f64) -> Self {
        let widen = |p: &[f64; 4]| p.map(|v| ((v - radius).max(0.0), (v + radius).min(1.0)));
        let mut node = Self::root(spec);
        node.gamma = widen(model.p_gamma());
        node.alpha = widen(model.p_alpha());
        node
    }

    /// Interval of source coordinate `k` (`0..4` for γ, `4..8` for α).
    pub fn interval(&self, k: usize) -> Interval {
        if k < 4 {
            self.gamma[k]
        } else {
            self.alpha[k - 4]
        }
    }

    pub fn interval_mut(&mut self, k: usize) -> &mut Interval {
        if k < 4 {
            &mut self.gamma[k]
        } else {
            &mut self.alpha[k - 4]
        }
    }

    /// Interval nonempty and the simplex meets the box for both sources.
    pub fn is_feasible(&self) -> bool {
        [&self.gamma, &self.alpha].iter().all(|side| {
            let lo: f64 = side.iter().map(|i| i.0).sum();
            let hi: f64 = side.iter().map(|i| i.1).sum();
            side.iter().all(|(l, h)| l <= h) && lo <= 1.0 + 1e-12 && hi >= 1.0 - 1e-12
        })
    }

    /// Shrinks each interval using `Σ p = 1` against the other three boxes.
    pub fn tighten(&mut self) {
        for side in [&mut self.gamma, &mut self.alpha] {
            for _ in 0..2 {
                let lo: f64 = side.iter().map(|i| i.0).sum();
                let hi: f64 = side.iter().map(|i| i.1).sum();
                for i in side.iter_mut() {
                    let others_lo = lo - i.0;
                    let others_hi = hi - i.1;
                    i.0 = i.0.max(1.0 - others_hi).max(0.0);
                    i.1 = i.1.min(1.0 - others_lo).min(1.0);
                }
            }
        }
    }

    pub fn contains(&self, model: &ClassicalModel) -> bool {
        let inside = |p: &[f64; 4], b: &[Interval; 4]| {
            p.iter().zip(b).all(|(v, (l, h))| *v >= l - 1e-12 && *v <= h + 1e-12)
        };
        inside(model.p_gamma(), &self.gamma) && inside(model.p_alpha(), &self.alpha)
    }

    pub fn widest(&self) -> (usize, f64) {
        (0..8)
            .map(|k| {
                let (l, h) = self.interval(k);
                (k, h - l)
            })
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }
}

/// Witness coordinates as affine functions of the base variables.
pub fn lifted_coords() -> AffineCoords {
    let mut coords = AffineCoords::zeros(BASE_VARS);
    for g in 0..HIDDEN_VALUES {
        for a in 0..HIDDEN_VALUES {
            // b = 0 through w0, b = 1 through q - w0.
            let k0 = prob_coord(response(g, 0), 0, response(a, 0));
            coords.rows[k0][w0_var(g, a)] += 1.0;
            let k1 = prob_coord(response(g, 1), 1, response(a, 1));
            coords.rows[k1][q_var(g, a)] += 1.0;
            coords.rows[k1][w0_var(g, a)] -= 1.0;
        }
    }
    for b in 0..2 {
        for k in 0..HIDDEN_VALUES {
            coords.rows[do_a_coord(response(k, b), b)][PG + k] += 1.0;
            coords.rows[do_c_coord(response(k, b), b)][PA + k] += 1.0;
        }
    }
    coords
}

/// Builds the node LP. Its optimum plus the returned constant bounds the
/// witness over every classical model whose sources lie in the node's box.
pub fn relax_node(spec: &FunctionalSpec, node: &RelaxationNode) -> Result<WitnessLp> {
    if !node.is_feasible() {
        return Err(Error::InvalidInput("empty relaxation box".into()));
    }
    let mut bounds = vec![(0.0, 1.0); BASE_VARS];
    for k in 0..4 {
        bounds[PG + k] = node.gamma[k];
        bounds[PA + k] = node.alpha[k];
    }
    for g in 0..4 {
        for a in 0..4 {
            let (gl, gh) = node.gamma[g];
            let (al, ah) = node.alpha[a];
            bounds[q_var(g, a)] = (gl * al, gh * ah);
            bounds[w0_var(g, a)] = (0.0, gh * ah);
        }
    }
    let mut wlp = WitnessLp::build(spec, &bounds, &lifted_coords(), &node.cuts)?;

    let mut eqs = Vec::new();
    let simplex_g: Vec<_> = (0..4).map(|k| (PG + k, 1.0)).collect();
    let simplex_a: Vec<_> = (0..4).map(|k| (PA + k, 1.0)).collect();
    eqs.push(wlp.row(&simplex_g, 1.0));
    eqs.push(wlp.row(&simplex_a, 1.0));
    // Marginals of q reproduce the sources (valid for the exact product).
    for g in 0..4 {
        let mut e: Vec<_> = (0..4).map(|a| (q_var(g, a), 1.0)).collect();
        e.push((PG + g, -1.0));
        eqs.push(wlp.row(&e, 0.0));
    }
    for a in 0..3 {
        let mut e: Vec<_> = (0..4).map(|g| (q_var(g, a), 1.0)).collect();
        e.push((PA + a, -1.0));
        eqs.push(wlp.row(&e, 0.0));
    }

    let mut ineqs = Vec::new();
    for g in 0..4 {
        for a in 0..4 {
            let q = q_var(g, a);
            for (cu, cv, rhs, lower) in mccormick(node.gamma[g], node.alpha[a]) {
                // lower: cu*pg + cv*pa - q <= rhs ; upper: q - cu*pg - cv*pa <= -rhs
                let s = if lower { 1.0 } else { -1.0 };
                let row = wlp.row(&[(PG + g, s * cu), (PA + a, s * cv), (q, -s)], s * rhs);
                ineqs.push(row);
            }
            ineqs.push(wlp.row(&[(w0_var(g, a), 1.0), (q, -1.0)], 0.0));
        }
    }
    wlp.lp.equalities.extend(eqs);
    wlp.lp.inequalities.extend(ineqs);
    Ok(wlp)
}

/// Reads sources and Bob's response back out of an LP point.
pub fn model_from_lp(x: &[f64]) -> ClassicalModel {
    let project = |v: &[f64]| {
        let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let mut out = [0.25; 4];
        if total > 0.0 {
            for (o, c) in out.iter_mut().zip(&clipped) {
                *o = c / total;
            }
        }
        out
    };
    let pg = project(&x[PG..PG + 4]);
    let pa = project(&x[PA..PA + 4]);
    let mut b0 = [0.5; 16];
    for g in 0..4 {
        for a in 0..4 {
            let q = x[q_var(g, a)];
            if q > 1e-12 {
                b0[4 * g + a] = (x[w0_var(g, a)] / q).clamp(0.0, 1.0);
            }
        }
    }
    ClassicalModel::new(pg, pa, b0).expect("projected model is valid")
}

/// Point of the LP variables matching a classical model exactly
/// (surrogates left at zero).
pub fn lp_point_of(model: &ClassicalModel, wlp: &WitnessLp) -> Vec<f64> {
    let mut x = vec![0.0; wlp.num_vars()];
    x[PG..PG + 4].copy_from_slice(model.p_gamma());
    x[PA..PA + 4].copy_from_slice(model.p_alpha());
    for g in 0..4 {
        for a in 0..4 {
            let q = model.p_gamma()[g] * model.p_alpha()[a];
            x[q_var(g, a)] = q;
            x[w0_var(g, a)] = q * model.p_b0()[4 * g + a];
        }
    }
    x
}

/// Debug helper: LP of the root node.
pub fn root_lp(spec: &FunctionalSpec) -> Result<LpProblem> {
    Ok(relax_node(spec, &RelaxationNode::root(spec))?.lp)
}
