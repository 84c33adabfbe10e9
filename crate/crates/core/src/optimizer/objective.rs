//! LP encoding of a concave witness over coordinates that are affine in the
//! LP's base variables.
//!
//! Every negative-coefficient `|x_m|` gets an epigraph variable `t_m` with
//! `t_m >= ±x_m`, and every `sqrt(y_k)` gets a surrogate `u_k` bounded above
//! by tangent cuts `u_k <= sqrt(y0) + (y_k - y0)/(2 sqrt(y0))`.

use crate::error::{Error, Result};
use crate::witness::{FunctionalSpec, COORDS};

use super::lp::{solve_lp, LpProblem, LpSolution, LpStatus, Row};

/// Fixed tangent abscissas shared by every square-root term.
pub const BASE_ABSCISSAS: [f64; 6] = [1.0 / 64.0, 1.0 / 16.0, 1.0 / 8.0, 0.25, 0.5, 1.0];
/// Smallest abscissa a dynamic cut may use.
pub const MIN_ABSCISSA: f64 = 1e-6;

/// The 16 witness coordinates as affine functions of `n` base variables.
#[derive(Debug, Clone)]
pub struct AffineCoords {
    pub rows: Vec<Vec<f64>>,
    pub offset: [f64; COORDS],
}

impl AffineCoords {
    pub fn zeros(n: usize) -> Self {
        Self {
            rows: vec![vec![0.0; n]; COORDS],
            offset: [0.0; COORDS],
        }
    }
}

/// Affine function `coeffs · x + constant` over all LP variables.
#[derive(Debug, Clone)]
struct Affine {
    coeffs: Vec<f64>,
    constant: f64,
}

impl Affine {
    fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Tangent overestimator of `sqrt` at `y0 > 0`, as `(slope, intercept)`.
pub fn tangent(y0: f64) -> (f64, f64) {
    let s = y0.sqrt();
    (0.5 / s, 0.5 * s)
}

pub struct WitnessLp {
    pub lp: LpProblem,
    /// Added to the LP objective to obtain the witness value.
    pub constant: f64,
    pub base: usize,
    u_start: usize,
    sqrt_args: Vec<Affine>,
    sqrt_coeffs: Vec<f64>,
    /// Abscissas currently cut per square-root term.
    pub cuts: Vec<Vec<f64>>,
}

impl WitnessLp {
    /// `base_bounds` are the bounds of the caller's variables; rows on them
    /// are added afterwards with [`row`](Self::row).
    pub fn build(
        spec: &FunctionalSpec,
        base_bounds: &[(f64, f64)],
        coords: &AffineCoords,
        cuts: &[Vec<f64>],
    ) -> Result<Self> {
        spec.check_certifiable()?;
        let base = base_bounds.len();
        let n_abs = spec.abs_terms.len();
        let n_sqrt = spec.sqrt_terms.len();
        let t_start = base;
        let u_start = base + n_abs;
        let n = u_start + n_sqrt;

        let lift = |form: &crate::witness::LinearForm| -> Affine {
            let c = form.coeffs_f64();
            let mut coeffs = vec![0.0; n];
            let mut constant = form.constant_f64();
            for (k, ck) in c.iter().enumerate() {
                if *ck != 0.0 {
                    constant += ck * coords.offset[k];
                    for (v, r) in coeffs.iter_mut().zip(&coords.rows[k]) {
                        *v += ck * r;
                    }
                }
            }
            Affine { coeffs, constant }
        };

        let mut lp = LpProblem::new(n);
        lp.bounds[..base].copy_from_slice(base_bounds);
        let mut constant = 0.0;

        for (m, term) in spec.abs_terms.iter().enumerate() {
            let coef = crate::witness::to_f64(term.coefficient);
            let x = lift(&term.form);
            let t = t_start + m;
            let reach = term
                .form
                .coeffs_f64()
                .iter()
                .map(|c| c.abs())
                .sum::<f64>()
                + term.form.constant_f64().abs();
            lp.bounds[t] = (0.0, reach);
            lp.objective[t] = coef;
            // x - t <= -const  and  -x - t <= const
            let mut up = x.coeffs.clone();
            up[t] = -1.0;
            lp.inequalities.push(Row::new(up, -x.constant));
            let mut down: Vec<f64> = x.coeffs.iter().map(|v| -v).collect();
            down[t] = -1.0;
            lp.inequalities.push(Row::new(down, x.constant));
        }

        let mut sqrt_args = Vec::with_capacity(n_sqrt);
        let mut sqrt_coeffs = Vec::with_capacity(n_sqrt);
        for (k, term) in spec.sqrt_terms.iter().enumerate() {
            let u = u_start + k;
            lp.bounds[u] = (0.0, term.form.upper_bound().max(0.0).sqrt());
            let coef = crate::witness::to_f64(term.coefficient);
            lp.objective[u] = coef;
            sqrt_coeffs.push(coef);
            sqrt_args.push(lift(&term.form));
        }

        for term in &spec.linear_terms {
            let coef = crate::witness::to_f64(term.coefficient);
            let x = lift(&term.form);
            constant += coef * x.constant;
            for (o, v) in lp.objective.iter_mut().zip(&x.coeffs) {
                *o += coef * v;
            }
        }

        let mut out = Self {
            lp,
            constant,
            base,
            u_start,
            sqrt_args,
            sqrt_coeffs,
            cuts: vec![Vec::new(); n_sqrt],
        };
        for k in 0..n_sqrt {
            let list = cuts.get(k).map(Vec::as_slice).unwrap_or(&BASE_ABSCISSAS);
            for &y0 in list {
                out.add_cut(k, y0);
            }
        }
        Ok(out)
    }

    pub fn num_vars(&self) -> usize {
        self.lp.num_vars()
    }

    /// Dense row from sparse `(variable, coefficient)` entries.
    pub fn row(&self, entries: &[(usize, f64)], rhs: f64) -> Row {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, v) in entries {
            coeffs[j] += v;
        }
        Row::new(coeffs, rhs)
    }

    pub fn add_cut(&mut self, k: usize, y0: f64) {
        let y0 = y0.max(MIN_ABSCISSA);
        let (slope, intercept) = tangent(y0);
        let arg = &self.sqrt_args[k];
        // u - slope*y <= intercept, y = coeffs·x + constant
        let mut coeffs: Vec<f64> = arg.coeffs.iter().map(|c| -slope * c).collect();
        coeffs[self.u_start + k] += 1.0;
        self.lp
            .inequalities
            .push(Row::new(coeffs, intercept + slope * arg.constant));
        self.cuts[k].push(y0);
    }

    pub fn sqrt_arguments(&self, x: &[f64]) -> Vec<f64> {
        self.sqrt_args.iter().map(|a| a.eval(x)).collect()
    }

    /// Exact witness value at an LP point: surrogates replaced by true
    /// square roots of their arguments.
    pub fn true_value(&self, sol: &LpSolution) -> f64 {
        let mut v = sol.value + self.constant;
        for (k, y) in self.sqrt_arguments(&sol.x).into_iter().enumerate() {
            v += self.sqrt_coeffs[k] * (y.max(0.0).sqrt() - sol.x[self.u_start + k]);
        }
        v
    }

    /// Largest weighted gap `b_k (u_k - sqrt(y_k))` at an LP point.
    pub fn cut_gap(&self, x: &[f64]) -> Vec<f64> {
        self.sqrt_arguments(x)
            .into_iter()
            .enumerate()
            .map(|(k, y)| self.sqrt_coeffs[k] * (x[self.u_start + k] - y.max(0.0).sqrt()))
            .collect()
    }

    /// Kelley loop: solve, add a tangent at each loose `y_k`, re-solve, until
    /// every surrogate is within `tol` of its square root or `rounds` run out.
    pub fn solve_with_cuts(&mut self, rounds: usize, tol: f64, max_cuts: usize) -> Result<LpSolution> {
        let mut sol = solve_lp(&self.lp)?;
        for _ in 0..rounds {
            if sol.status != LpStatus::Optimal {
                break;
            }
            let ys = self.sqrt_arguments(&sol.x);
            let gaps = self.cut_gap(&sol.x);
            let mut added = false;
            for (k, (&gap, &y)) in gaps.iter().zip(&ys).enumerate() {
                if gap > tol && self.cuts[k].len() < max_cuts {
                    self.add_cut(k, y);
                    added = true;
                }
            }
            if !added {
                break;
            }
            sol = solve_lp(&self.lp)?;
        }
        if sol.status == LpStatus::Unbounded {
            return Err(Error::Lp("witness relaxation reported unbounded".into()));
        }
        Ok(sol)
    }
}
