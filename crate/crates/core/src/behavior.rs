//! Observational and interventional data of the unrelated-confounders scenario.
//!
//! A [`Behavior`] is the joint distribution `P(a,b,c)` over three bits, stored
//! in lexicographic `(a,b,c)` order. [`CorrelatorView`] is the equivalent
//! parity-correlator description per value of `b`, kept unnormalized (every
//! correlator at `b` is weighted by `P(b)`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a behavior handed in from outside.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Entries this far below zero are clamped, anything further is rejected.
pub const CLAMP_TOL: f64 = 1e-12;

#[inline]
pub fn index(a: usize, b: usize, c: usize) -> usize {
    debug_assert!(a < 2 && b < 2 && c < 2);
    4 * a + 2 * b + c
}

#[inline]
fn parity(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Joint distribution `P(a,b,c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Behavior {
    p: [f64; 8],
}

impl Behavior {
    /// Validates and clamps. Entries in `[-1e-12, 0)` are set to zero.
    pub fn new(p: [f64; 8]) -> Result<Self> {
        let mut out = p;
        for (k, v) in out.iter_mut().enumerate() {
            if !v.is_finite() || *v < -CLAMP_TOL || *v > 1.0 + CLAMP_TOL {
                return Err(Error::InvalidInput(format!(
                    "behavior entry {k} = {v} outside [0,1]"
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let total: f64 = out.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!(
                "behavior sums to {total}, expected 1"
            )));
        }
        Ok(Self { p: out })
    }

    /// Builds a behavior from a function of `(a,b,c)`.
    pub fn from_fn(f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut p = [0.0; 8];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    p[index(a, b, c)] = f(a, b, c);
                }
            }
        }
        Self::new(p)
    }

    pub fn uniform() -> Self {
        Self { p: [0.125; 8] }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.p[index(a, b, c)]
    }

    pub fn as_array(&self) -> &[f64; 8] {
        &self.p
    }

    /// `P(b)`.
    pub fn marginal_b(&self, b: usize) -> f64 {
        (0..2)
            .flat_map(|a| (0..2).map(move |c| (a, c)))
            .map(|(a, c)| self.get(a, b, c))
            .sum()
    }

    /// Entrywise convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Behavior, lambda: f64) -> Behavior {
        let mut p = [0.0; 8];
        for (k, v) in p.iter_mut().enumerate() {
            *v = lambda * self.p[k] + (1.0 - lambda) * other.p[k];
        }
        Behavior { p }
    }

    pub fn to_correlators(&self) -> CorrelatorView {
        let mut values = [[0.0; 4]; 2];
        for (b, row) in values.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = 0.0;
                    for a in 0..2 {
                        for c in 0..2 {
                            acc += parity(a * i) * parity(c * j) * self.get(a, b, c);
                        }
                    }
                    row[2 * i + j] = acc;
                }
            }
        }
        CorrelatorView { values }
    }

    pub fn max_abs_diff(&self, other: &Behavior) -> f64 {
        self.p
            .iter()
            .zip(other.p.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct BehaviorJson {
    p: Vec<f64>,
    #[serde(default = "lex_order")]
    order: String,
}

fn lex_order() -> String {
    "abc-lex".into()
}

impl Serialize for Behavior {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BehaviorJson {
            p: self.p.to_vec(),
            order: "abc-lex".into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Behavior {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BehaviorJson::deserialize(deserializer)?;
        if raw.order != "abc-lex" {
            return Err(D::Error::custom(format!("unsupported order `{}`", raw.order)));
        }
        let p: [f64; 8] = raw
            .p
            .try_into()
            .map_err(|v: Vec<f64>| D::Error::custom(format!("expected 8 entries, got {}", v.len())))?;
        Behavior::new(p).map_err(D::Error::custom)
    }
}

/// Unnormalized correlators `<A^i C^j>_b`, indexed `[b][2*i + j]`.
///
/// `(0,0)` is `P(b)`, `(1,0)` is `<A>_b`, `(0,1)` is `<C>_b` and `(1,1)` is
/// `<AC>_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorView {
    pub values: [[f64; 4]; 2],
}

impl CorrelatorView {
    pub fn new(values: [[f64; 4]; 2]) -> Self {
        Self { values }
    }

    pub fn p_b(&self, b: usize) -> f64 {
        self.values[b][0]
    }

    pub fn a(&self, b: usize) -> f64 {
        self.values[b][2]
    }

    pub fn c(&self, b: usize) -> f64 {
        self.values[b][1]
    }

    pub fn ac(&self, b: usize) -> f64 {
        self.values[b][3]
    }

    /// Inverse map back to probabilities.
    pub fn to_behavior(&self) -> Result<Behavior> {
        let mut p = [0.0; 8];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let mut acc = 0.0;
                    for i in 0..2 {
                        for j in 0..2 {
                            acc += parity(a * i) * parity(c * j) * self.values[b][2 * i + j];
                        }
                    }
                    let v = acc / 4.0;
                    if v < -NORMALIZATION_TOL {
                        return Err(Error::InvalidCorrelator(format!(
                            "P({a},{b},{c}) = {v} is negative"
                        )));
                    }
                    p[index(a, b, c)] = v;
                }
            }
        }
        Behavior::new(p.map(|v| v.max(0.0)))
            .map_err(|e| Error::InvalidCorrelator(e.to_string()))
    }
}

/// Interventional conditionals `P(a|do(b))` and `P(c|do(b))`.
///
/// Stored as `a_do[b][a]` and `c_do[b][c]`: each inner array is one
/// conditional distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoData {
    pub a_do: [[f64; 2]; 2],
    pub c_do: [[f64; 2]; 2],
}

impl DoData {
    pub fn new(a_do: [[f64; 2]; 2], c_do: [[f64; 2]; 2]) -> Result<Self> {
        for (label, table) in [("a_do", &a_do), ("c_do", &c_do)] {
            for (b, column) in table.iter().enumerate() {
                if column.iter().any(|v| !v.is_finite() || *v < -CLAMP_TOL) {
                    return Err(Error::InvalidInput(format!("{label}[{b}] has a negative entry")));
                }
                let total: f64 = column.iter().sum();
                if (total - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidInput(format!(
                        "{label}[{b}] sums to {total}, expected 1"
                    )));
                }
            }
        }
        Ok(Self {
            a_do: a_do.map(|col| col.map(|v| v.max(0.0))),
            c_do: c_do.map(|col| col.map(|v| v.max(0.0))),
        })
    }

    /// Both parties unbiased under every intervention.
    pub fn unbiased() -> Self {
        Self {
            a_do: [[0.5; 2]; 2],
            c_do: [[0.5; 2]; 2],
        }
    }

    /// `<A>_do(b)`.
    pub fn a_mean(&self, b: usize) -> f64 {
        self.a_do[b][0] - self.a_do[b][1]
    }

    /// `<C>_do(b)`.
    pub fn c_mean(&self, b: usize) -> f64 {
        self.c_do[b][0] - self.c_do[b][1]
    }

    /// Flat coordinates in the order `PdoA(0|0), PdoA(1|0), PdoA(0|1),
    /// PdoA(1|1), PdoC(0|0), ...`.
    pub fn flat(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for b in 0..2 {
            for x in 0..2 {
                out[2 * b + x] = self.a_do[b][x];
                out[4 + 2 * b + x] = self.c_do[b][x];
            }
        }
        out
    }

    pub fn mix(&self, other: &DoData, lambda: f64) -> DoData {
        let blend = |x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]| {
            let mut out = [[0.0; 2]; 2];
            for b in 0..2 {
                for v in 0..2 {
                    out[b][v] = lambda * x[b][v] + (1.0 - lambda) * y[b][v];
                }
            }
            out
        };
        DoData {
            a_do: blend(&self.a_do, &other.a_do),
            c_do: blend(&self.c_do, &other.c_do),
        }
    }
}

/// A point of the two-parameter slice `(r, s)` of behaviors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspacePoint {
    r: f64,
    s: f64,
}

impl SubspacePoint {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        const LIMIT: f64 = 0.25 + 1e-15;
        if !(r.abs() <= LIMIT && s.abs() <= LIMIT) {
            return Err(Error::InvalidInput(format!(
                "subspace point ({r}, {s}) outside [-1/4, 1/4]^2"
            )));
        }
        Ok(Self { r, s })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Behavior of the `(r, s)` slice:
/// `P(a,0,c) = (1 + 4r(-1)^{a+c})/16`,
/// `P(a,1,c) = (3 + (-1)^{a+c} + 4s((-1)^c - (-1)^a))/16`.
pub fn subspace_behavior(pt: SubspacePoint) -> Behavior {
    slice_behavior(pt.r, pt.s, 1.0)
}

/// The slice with a general `<AC>_1 = ac1 / 4`; `ac1 = 1` is the noiseless slice.
pub(crate) fn slice_behavior(r: f64, s: f64, ac1: f64) -> Behavior {
    let mut p = [0.0; 8];
    for a in 0..2 {
        for c in 0..2 {
            let sign = parity(a) * parity(c);
            p[index(a, 0, c)] = (1.0 + 4.0 * r * sign) / 16.0;
            p[index(a, 1, c)] = (3.0 + ac1 * sign + 4.0 * s * (parity(c) - parity(a))) / 16.0;
        }
    }
    let p = p.map(|v| v.max(0.0));
    Behavior { p }
}
