//! Classical hidden-variable models of the network.
//!
//! Each source carries a pair of bits: `γ = (γ0, γ1)` fixes Alice's answer to
//! each of Bob's outcomes and `α = (α0, α1)` does the same for Charlie. Bob
//! answers stochastically with `p(b|γ,α)`. Hidden values are indexed in the
//! order `[00, 10, 01, 11]`, i.e. index `k` has `γ_b = (k >> b) & 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::behavior::{index, Behavior, DoData};
use crate::error::{Error, Result};

pub const HIDDEN_VALUES: usize = 4;
const SIMPLEX_TOL: f64 = 1e-9;

/// Response bit of hidden value `k` to Bob's outcome `b`.
#[inline]
pub fn response(k: usize, b: usize) -> usize {
    (k >> b) & 1
}

/// Label of a hidden value as printed, e.g. `"10"` for `γ0 = 1, γ1 = 0`.
pub fn hidden_label(k: usize) -> String {
    format!("{}{}", response(k, 0), response(k, 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalModel {
    p_gamma: [f64; 4],
    p_alpha: [f64; 4],
    /// `p(b=0|γ,α)` at `4γ + α`.
    p_b0: [f64; 16],
}

fn check_simplex(label: &str, p: &[f64; 4]) -> Result<()> {
    if p.iter().any(|v| !v.is_finite() || *v < -SIMPLEX_TOL) {
        return Err(Error::InvalidInput(format!("{label} has a negative entry: {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidInput(format!("{label} sums to {total}")));
    }
    Ok(())
}

impl ClassicalModel {
    pub fn new(p_gamma: [f64; 4], p_alpha: [f64; 4], p_b0: [f64; 16]) -> Result<Self> {
        check_simplex("p_gamma", &p_gamma)?;
        check_simplex("p_alpha", &p_alpha)?;
        if let Some(bad) = p_b0.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInput(format!("p_b0 entry {bad} outside [0,1]")));
        }
        Ok(Self {
            p_gamma: p_gamma.map(|v| v.max(0.0)),
            p_alpha: p_alpha.map(|v| v.max(0.0)),
            p_b0,
        })
    }

    /// Point-mass sources with a deterministic Bob.
    pub fn deterministic(gamma: usize, alpha: usize, b0: [bool; 16]) -> Self {
        let mut p_gamma = [0.0; 4];
        let mut p_alpha = [0.0; 4];
        p_gamma[gamma] = 1.0;
        p_alpha[alpha] = 1.0;
        Self {
            p_gamma,
            p_alpha,
            p_b0: b0.map(|x| if x { 1.0 } else { 0.0 }),
        }
    }

    pub fn p_gamma(&self) -> &[f64; 4] {
        &self.p_gamma
    }

    pub fn p_alpha(&self) -> &[f64; 4] {
        &self.p_alpha
    }

    pub fn p_b0(&self) -> &[f64; 16] {
        &self.p_b0
    }

    #[inline]
    pub fn p_b(&self, b: usize, gamma: usize, alpha: usize) -> f64 {
        let p0 = self.p_b0[4 * gamma + alpha];
        if b == 0 {
            p0
        } else {
            1.0 - p0
        }
    }

    /// `p(a,b,c) = Σ p(γ) p(α) δ(a, γ_b) δ(c, α_b) p(b|γ,α)`.
    pub fn behavior(&self) -> Behavior {
        let mut p = [0.0; 8];
        for g in 0..HIDDEN_VALUES {
            for al in 0..HIDDEN_VALUES {
                let weight = self.p_gamma[g] * self.p_alpha[al];
                for b in 0..2 {
                    p[index(response(g, b), b, response(al, b))] += weight * self.p_b(b, g, al);
                }
            }
        }
        let total: f64 = p.iter().sum();
        Behavior::new(p.map(|v| v / total)).expect("classical behaviors are normalized")
    }

    /// `P(a|do(b)) = Σ_{γ: γ_b = a} p(γ)` and likewise for Charlie.
    pub fn do_data(&self) -> DoData {
        let mut a_do = [[0.0; 2]; 2];
        let mut c_do = [[0.0; 2]; 2];
        for b in 0..2 {
            for k in 0..HIDDEN_VALUES {
                a_do[b][response(k, b)] += self.p_gamma[k];
                c_do[b][response(k, b)] += self.p_alpha[k];
            }
        }
        DoData::new(a_do, c_do).expect("classical do-data is normalized")
    }

    /// Draws sources uniformly from the simplex and Bob's response uniformly
    /// from `[0,1]^16`.
    pub fn sample(rng: &mut impl Rng) -> Self {
        Self {
            p_gamma: sample_simplex(rng),
            p_alpha: sample_simplex(rng),
            p_b0: std::array::from_fn(|_| rng.random::<f64>()),
        }
    }
}

/// Uniform point on the 3-simplex (Dirichlet(1,1,1,1)).
pub fn sample_simplex(rng: &mut impl Rng) -> [f64; 4] {
    let draws: [f64; 4] = std::array::from_fn(|_| rng.sample::<f64, _>(Exp1));
    let total: f64 = draws.iter().sum();
    draws.map(|x| x / total)
}

pub fn sample_random_model(seed: u64) -> ClassicalModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ClassicalModel::sample(&mut rng)
}

/// How far the printed source weights were from summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixtureMetadata {
    pub gamma_residual: f64,
    pub alpha_residual: f64,
}

const FIXTURE_NAMES: [&str; 2] = ["I-optimal", "F-optimal"];

/// Optimal classical strategies as printed to five decimals.
pub fn fixture(name: &str) -> Result<ClassicalModel> {
    fixture_with_metadata(name).map(|(m, _)| m)
}

pub fn fixture_names() -> &'static [&'static str] {
    &FIXTURE_NAMES
}

pub fn fixture_with_metadata(name: &str) -> Result<(ClassicalModel, FixtureMetadata)> {
    // Index helpers for the printed labels.
    const H00: usize = 0;
    const H10: usize = 1;
    const H01: usize = 2;
    const H11: usize = 3;
    let at = |g: usize, a: usize| 4 * g + a;

    let (gamma, alpha, b0) = match name {
        "I-optimal" => {
            let mut b0 = [0.0; 16];
            b0[at(H00, H01)] = 1.0;
            b0[at(H10, H11)] = 1.0;
            b0[at(H11, H10)] = 0.82842;
            (
                [0.35428, 0.14571, 0.14571, 0.3543],
                [0.14717, 0.35282, 0.35282, 0.14719],
                b0,
            )
        }
        "F-optimal" => {
            let mut b0 = [0.0; 16];
            b0[at(H00, H01)] = 1.0;
            b0[at(H10, H11)] = 1.0;
            b0[at(H00, H11)] = 0.85161;
            b0[at(H10, H01)] = 0.85223;
            b0[at(H10, H10)] = 0.14812;
            b0[at(H11, H11)] = 0.14801;
            (
                [0.26845, 0.23154, 0.23154, 0.26847],
                [0.23163, 0.26836, 0.26836, 0.23165],
                b0,
            )
        }
        other => return Err(Error::UnknownName(other.to_string())),
    };
    let meta = FixtureMetadata {
        gamma_residual: gamma.iter().sum::<f64>() - 1.0,
        alpha_residual: alpha.iter().sum::<f64>() - 1.0,
    };
    let norm = |p: [f64; 4]| {
        let total: f64 = p.iter().sum();
        p.map(|x| x / total)
    };
    Ok((ClassicalModel::new(norm(gamma), norm(alpha), b0)?, meta))
}
