//! Multi-start local ascent over classical models.
//!
//! Each start runs projected subgradient ascent on `(p(γ), p(α), p(b=0|γ,α))`
//! with central-difference gradients, then alternates exact block
//! maximizations: with one source fixed the witness is concave in the other
//! source and Bob's response jointly, so every block step is a small LP.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classical::{response, sample_simplex, ClassicalModel, HIDDEN_VALUES};
use crate::error::{Error, Result};
use crate::witness::{do_a_coord, do_c_coord, prob_coord, CompiledWitness, FunctionalSpec, COORDS};

use super::objective::{AffineCoords, WitnessLp};

pub const FD_STEP: f64 = 1e-7;
/// Share of starts whose sources are point masses.
pub const VERTEX_START_SHARE: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct LocalSearchConfig {
    pub ascent_iterations: usize,
    pub initial_step: f64,
    pub polish_rounds: usize,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            ascent_iterations: 300,
            initial_step: 0.05,
            polish_rounds: 6,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    pg: [f64; 4],
    pa: [f64; 4],
    b0: [f64; 16],
}

impl Point {
    fn of(m: &ClassicalModel) -> Self {
        Self {
            pg: *m.p_gamma(),
            pa: *m.p_alpha(),
            b0: *m.p_b0(),
        }
    }

    fn model(&self) -> ClassicalModel {
        ClassicalModel::new(self.pg, self.pa, self.b0).expect("iterates stay feasible")
    }

    fn get(&self, i: usize) -> f64 {
        match i {
            0..4 => self.pg[i],
            4..8 => self.pa[i - 4],
            _ => self.b0[i - 8],
        }
    }

    fn set(&mut self, i: usize, v: f64) {
        match i {
            0..4 => self.pg[i] = v,
            4..8 => self.pa[i - 4] = v,
            _ => self.b0[i - 8] = v,
        }
    }
}

/// Observational and interventional coordinates, multilinear in the blocks.
fn coordinates(pg: &[f64; 4], pa: &[f64; 4], b0: &[f64; 16]) -> [f64; COORDS] {
    let mut out = [0.0; COORDS];
    for g in 0..HIDDEN_VALUES {
        for a in 0..HIDDEN_VALUES {
            let w = pg[g] * pa[a];
            let pb0 = b0[4 * g + a];
            out[prob_coord(response(g, 0), 0, response(a, 0))] += w * pb0;
            out[prob_coord(response(g, 1), 1, response(a, 1))] += w * (1.0 - pb0);
        }
    }
    for b in 0..2 {
        for k in 0..HIDDEN_VALUES {
            out[do_a_coord(response(k, b), b)] += pg[k];
            out[do_c_coord(response(k, b), b)] += pa[k];
        }
    }
    out
}

fn value_at(w: &CompiledWitness, p: &Point) -> f64 {
    w.value(&coordinates(&p.pg, &p.pa, &p.b0))
}

/// Witness value of a model exactly as `evaluate` reports it.
pub fn model_value(spec: &FunctionalSpec, m: &ClassicalModel) -> Result<f64> {
    Ok(spec.evaluate(&m.behavior(), Some(&m.do_data()))?.value)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64; 4]) -> [f64; 4] {
    let mut sorted = *v;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (i, s) in sorted.iter().enumerate() {
        acc += s;
        let t = (acc - 1.0) / (i as f64 + 1.0);
        if s - t > 0.0 {
            tau = t;
        }
    }
    let mut out = v.map(|x| (x - tau).max(0.0));
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    out
}

fn project(p: &Point) -> Point {
    Point {
        pg: project_simplex(&p.pg),
        pa: project_simplex(&p.pa),
        b0: p.b0.map(|x| x.clamp(0.0, 1.0)),
    }
}

fn gradient(w: &CompiledWitness, p: &Point, block: std::ops::Range<usize>) -> [f64; 24] {
    let mut grad = [0.0; 24];
    for i in block {
        let g = &mut grad[i];
        let mut hi = *p;
        let mut lo = *p;
        hi.set(i, p.get(i) + FD_STEP);
        lo.set(i, p.get(i) - FD_STEP);
        *g = (value_at(w, &hi) - value_at(w, &lo)) / (2.0 * FD_STEP);
    }
    grad
}

/// Block-wise projected ascent with diminishing steps and backtracking.
fn ascend(w: &CompiledWitness, start: Point, cfg: &LocalSearchConfig) -> (Point, f64) {
    let mut p = project(&start);
    let mut value = value_at(w, &p);
    let blocks = [0..4, 4..8, 8..24];
    for it in 0..cfg.ascent_iterations {
        let base_step = cfg.initial_step / ((it + 1) as f64).sqrt();
        let mut improved = false;
        for block in blocks.iter().cloned() {
            let grad = gradient(w, &p, block.clone());
            let norm = grad[block.clone()].iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm < 1e-12 {
                continue;
            }
            let mut step = base_step;
            for _ in 0..20 {
                let mut trial = p;
                for i in block.clone() {
                    trial.set(i, p.get(i) + step * grad[i] / norm);
                }
                let trial = project(&trial);
                let v = value_at(w, &trial);
                if v > value {
                    p = trial;
                    value = v;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if !improved && base_step < 1e-6 {
            break;
        }
    }
    (p, value)
}

/// Which source stays fixed during an exact block step.
#[derive(Clone, Copy)]
enum Fixed {
    Gamma,
    Alpha,
}

/// Observational and interventional coordinates from the sources and the
/// joint weights `w0(γ,α) = p(γ) p(α) p(b=0|γ,α)`.
fn coordinates_lifted(pg: &[f64], pa: &[f64], w0: &[f64; 16]) -> [f64; COORDS] {
    let mut out = [0.0; COORDS];
    for g in 0..HIDDEN_VALUES {
        for a in 0..HIDDEN_VALUES {
            let w = w0[4 * g + a];
            out[prob_coord(response(g, 0), 0, response(a, 0))] += w;
            out[prob_coord(response(g, 1), 1, response(a, 1))] += pg[g] * pa[a] - w;
        }
    }
    for b in 0..2 {
        for k in 0..HIDDEN_VALUES {
            out[do_a_coord(response(k, b), b)] += pg[k];
            out[do_c_coord(response(k, b), b)] += pa[k];
        }
    }
    out
}

/// Exact maximization over the free source and Bob's response with the
/// other source fixed. With `z(γ,α) = p_free · p(b=0|γ,α)` every coordinate
/// is linear, so the step is a concave program solved by cutting planes.
fn block_step(spec: &FunctionalSpec, p: &Point, fixed: Fixed) -> Result<Option<Point>> {
    const N: usize = 20;
    let unpack = |x: &[f64]| -> ([f64; 4], [f64; 4], [f64; 16]) {
        let free: [f64; 4] = x[..4].try_into().unwrap();
        let z: [f64; 16] = x[4..].try_into().unwrap();
        let (pg, pa) = match fixed {
            Fixed::Gamma => (p.pg, free),
            Fixed::Alpha => (free, p.pa),
        };
        let fixed_side = |g: usize, a: usize| match fixed {
            Fixed::Gamma => pg[g],
            Fixed::Alpha => pa[a],
        };
        let w0 = std::array::from_fn(|i| fixed_side(i / 4, i % 4) * z[i]);
        (pg, pa, w0)
    };
    let eval = |x: &[f64]| {
        let (pg, pa, w0) = unpack(x);
        coordinates_lifted(&pg, &pa, &w0)
    };
    // Coordinates are affine in the block: read them off basis vectors.
    let zero = vec![0.0; N];
    let offset = eval(&zero);
    let mut coords = AffineCoords::zeros(N);
    coords.offset = offset;
    for j in 0..N {
        let mut e = zero.clone();
        e[j] = 1.0;
        let col = eval(&e);
        for k in 0..COORDS {
            coords.rows[k][j] = col[k] - offset[k];
        }
    }
    let mut wlp = WitnessLp::build(spec, &[(0.0, 1.0); N], &coords, &[])?;
    let simplex: Vec<_> = (0..4).map(|j| (j, 1.0)).collect();
    let row = wlp.row(&simplex, 1.0);
    wlp.lp.equalities.push(row);
    for i in 0..16 {
        let free = match fixed {
            Fixed::Gamma => i % 4,
            Fixed::Alpha => i / 4,
        };
        let row = wlp.row(&[(4 + i, 1.0), (free, -1.0)], 0.0);
        wlp.lp.inequalities.push(row);
    }
    let sol = wlp.solve_with_cuts(20, 1e-9, 30)?;
    if sol.x.is_empty() {
        return Ok(None);
    }
    let free = project_simplex(&std::array::from_fn(|j| sol.x[j].max(0.0)));
    let mut q = *p;
    match fixed {
        Fixed::Gamma => q.pa = free,
        Fixed::Alpha => q.pg = free,
    }
    for i in 0..16 {
        let mass = free[match fixed {
            Fixed::Gamma => i % 4,
            Fixed::Alpha => i / 4,
        }];
        if mass > 1e-14 {
            q.b0[i] = (sol.x[4 + i] / mass).clamp(0.0, 1.0);
        }
    }
    Ok(Some(q))
}

fn polish(spec: &FunctionalSpec, w: &CompiledWitness, mut p: Point, mut value: f64, rounds: usize) -> (Point, f64) {
    if spec.check_certifiable().is_err() {
        return (p, value);
    }
    for _ in 0..rounds {
        let before = value;
        for block in [Fixed::Gamma, Fixed::Alpha] {
            if let Ok(Some(q)) = block_step(spec, &p, block) {
                let v = value_at(w, &q);
                if v > value {
                    p = q;
                    value = v;
                }
            }
        }
        if value - before < 1e-12 {
            break;
        }
    }
    (p, value)
}

/// Ascent followed by block polishing from a given model.
pub fn improve(spec: &FunctionalSpec, start: &ClassicalModel, cfg: &LocalSearchConfig) -> Result<(ClassicalModel, f64)> {
    let w = CompiledWitness::new(spec);
    let (p, v) = ascend(&w, Point::of(start), cfg);
    let (p, _) = polish(spec, &w, p, v, cfg.polish_rounds);
    let mut best = p.model();
    let mut best_value = model_value(spec, &best)?;
    // Never return worse than the start.
    let start_value = model_value(spec, start)?;
    if start_value > best_value {
        best = start.clone();
        best_value = start_value;
    }
    Ok((best, best_value))
}

fn random_start(rng: &mut impl Rng, vertex: bool) -> ClassicalModel {
    let source = |rng: &mut ChaCha8Rng| -> [f64; 4] {
        if vertex {
            let mut p = [0.0; 4];
            p[rng.random_range(0..4)] = 1.0;
            p
        } else {
            sample_simplex(rng)
        }
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.random());
    let pg = source(&mut local);
    let pa = source(&mut local);
    let b0 = std::array::from_fn(|_| local.random::<f64>());
    ClassicalModel::new(pg, pa, b0).expect("sampled model is valid")
}

/// Starting models for a seed: Dirichlet sources, plus a share with point
/// mass sources. Deterministic per `(starts, seed)`.
pub fn starting_models(starts: usize, seed: u64) -> Vec<ClassicalModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertex_every = (1.0 / VERTEX_START_SHARE).round() as usize;
    (0..starts)
        .map(|i| random_start(&mut rng, i % vertex_every == vertex_every - 1))
        .collect()
}

/// Best model over `starts` independent runs.
pub fn local_search(spec: &FunctionalSpec, starts: usize, seed: u64) -> Result<(ClassicalModel, f64)> {
    local_search_with(spec, starts, seed, &LocalSearchConfig::default())
}

pub fn local_search_with(
    spec: &FunctionalSpec,
    starts: usize,
    seed: u64,
    cfg: &LocalSearchConfig,
) -> Result<(ClassicalModel, f64)> {
    if starts == 0 {
        return Err(Error::Config("local search needs at least one start".into()));
    }
    let results: Vec<_> = starting_models(starts, seed)
        .par_iter()
        .map(|m| improve(spec, m, cfg))
        .collect::<Result<_>>()?;
    // First best in start order keeps the choice independent of scheduling.
    let mut best = results[0].clone();
    for r in results.into_iter().skip(1) {
        if r.1 > best.1 {
            best = r;
        }
    }
    Ok(best)
}
