//! Concave witnesses: positive square roots and negative absolute values of
//! linear forms in the observational probabilities and do-conditionals.

mod parse;

use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::behavior::{index, Behavior, DoData};
use crate::error::{Error, Result};
use crate::quantum::Which;

pub use parse::{parse, print};

pub type Rational = Rational64;

/// Number of coordinates: 8 observational probabilities followed by 8
/// do-conditional entries.
pub const COORDS: usize = 16;
pub const DO_OFFSET: usize = 8;

/// Coordinate of `P(a,b,c)`.
pub fn prob_coord(a: usize, b: usize, c: usize) -> usize {
    index(a, b, c)
}

/// Coordinate of `P(a|do(b))`.
pub fn do_a_coord(a: usize, b: usize) -> usize {
    DO_OFFSET + 2 * b + a
}

/// Coordinate of `P(c|do(b))`.
pub fn do_c_coord(c: usize, b: usize) -> usize {
    DO_OFFSET + 4 + 2 * b + c
}

pub const SQRT_CLAMP_TOL: f64 = 1e-12;

/// Affine function of the 16 coordinates with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: [Rational; COORDS],
    constant: Rational,
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn parity(bit: usize) -> i64 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

impl LinearForm {
    pub fn zero() -> Self {
        Self {
            coeffs: [Rational::zero(); COORDS],
            constant: Rational::zero(),
        }
    }

    pub fn constant(value: Rational) -> Self {
        Self {
            constant: value,
            ..Self::zero()
        }
    }

    pub fn coord(k: usize) -> Self {
        let mut f = Self::zero();
        f.coeffs[k] = r(1);
        f
    }

    pub fn prob(a: usize, b: usize, c: usize) -> Self {
        Self::coord(prob_coord(a, b, c))
    }

    pub fn do_a(a: usize, b: usize) -> Self {
        Self::coord(do_a_coord(a, b))
    }

    pub fn do_c(c: usize, b: usize) -> Self {
        Self::coord(do_c_coord(c, b))
    }

    /// `P(b) = Σ_{a,c} P(a,b,c)`.
    pub fn p_b(b: usize) -> Self {
        Self::correlator(0, 0, b)
    }

    /// `<A^i C^j>_b = Σ_{a,c} (-1)^{ai + cj} P(a,b,c)`, unnormalized.
    pub fn correlator(i: usize, j: usize, b: usize) -> Self {
        let mut f = Self::zero();
        for a in 0..2 {
            for c in 0..2 {
                f.coeffs[prob_coord(a, b, c)] = r(parity(a * i) * parity(c * j));
            }
        }
        f
    }

    /// `<A>_do(b) = P(0|do b) - P(1|do b)`.
    pub fn do_a_mean(b: usize) -> Self {
        Self::do_a(0, b) - Self::do_a(1, b)
    }

    pub fn do_c_mean(b: usize) -> Self {
        Self::do_c(0, b) - Self::do_c(1, b)
    }

    pub fn coeffs(&self) -> &[Rational; COORDS] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> Rational {
        self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.constant.is_zero()
    }

    pub fn uses_do(&self) -> bool {
        self.coeffs[DO_OFFSET..].iter().any(|c| !c.is_zero())
    }

    /// Nonnegative combination of probabilities plus a nonnegative constant.
    pub fn is_nonnegative_combination(&self) -> bool {
        !self.constant.is_negative() && self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn scale(&self, k: Rational) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| c * k),
            constant: self.constant * k,
        }
    }

    pub fn coeffs_f64(&self) -> [f64; COORDS] {
        self.coeffs.map(to_f64)
    }

    pub fn constant_f64(&self) -> f64 {
        to_f64(self.constant)
    }

    /// Evaluates on observational coordinates and, if present, do-data.
    pub fn eval(&self, obs: &[f64; 8], dod: Option<&[f64; 8]>) -> f64 {
        let mut acc = to_f64(self.constant);
        for (k, c) in self.coeffs[..DO_OFFSET].iter().enumerate() {
            if !c.is_zero() {
                acc += to_f64(*c) * obs[k];
            }
        }
        if let Some(d) = dod {
            for (k, c) in self.coeffs[DO_OFFSET..].iter().enumerate() {
                if !c.is_zero() {
                    acc += to_f64(*c) * d[k];
                }
            }
        }
        acc
    }

    /// Upper bound on the form over all valid inputs: each block of
    /// coordinates that sums to one contributes its largest coefficient.
    pub fn upper_bound(&self) -> f64 {
        let block_max = |ks: &[usize]| {
            ks.iter()
                .map(|&k| to_f64(self.coeffs[k]))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let obs: Vec<usize> = (0..8).collect();
        let mut total = to_f64(self.constant) + block_max(&obs);
        for b in 0..2 {
            total += block_max(&[do_a_coord(0, b), do_a_coord(1, b)]);
            total += block_max(&[do_c_coord(0, b), do_c_coord(1, b)]);
        }
        total
    }
}

pub(crate) fn to_f64(x: Rational) -> f64 {
    x.to_f64().expect("finite rational")
}

impl std::ops::Add for LinearForm {
    type Output = LinearForm;

    fn add(mut self, rhs: LinearForm) -> LinearForm {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self.constant += rhs.constant;
        self
    }
}

impl std::ops::Sub for LinearForm {
    type Output = LinearForm;

    fn sub(self, rhs: LinearForm) -> LinearForm {
        self + rhs.scale(r(-1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coefficient: Rational,
    pub form: LinearForm,
}

impl Term {
    pub fn new(coefficient: Rational, form: LinearForm) -> Self {
        Self { coefficient, form }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Sqrt,
    Abs,
    Linear,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermKind::Sqrt => "sqrt",
            TermKind::Abs => "abs",
            TermKind::Linear => "linear",
        })
    }
}

/// A witness `Σ b_i sqrt(y_i) + Σ c_m |x_m| + Σ l_j z_j`, to be maximized
/// over classical models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalSpec {
    pub name: String,
    pub sqrt_terms: Vec<Term>,
    pub abs_terms: Vec<Term>,
    pub linear_terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermValue {
    pub kind: TermKind,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessValue {
    pub value: f64,
    pub terms: Vec<TermValue>,
}

impl FunctionalSpec {
    pub fn new(
        name: impl Into<String>,
        sqrt_terms: Vec<Term>,
        abs_terms: Vec<Term>,
        linear_terms: Vec<Term>,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            sqrt_terms,
            abs_terms,
            linear_terms,
        };
        for (k, t) in spec.sqrt_terms.iter().enumerate() {
            if !t.coefficient.is_positive() {
                return Err(Error::Semantic(format!(
                    "square-root term {k} has non-positive coefficient {}",
                    t.coefficient
                )));
            }
            if !t.form.is_nonnegative_combination() {
                return Err(Error::Semantic(format!(
                    "square-root term {k} is not a nonnegative combination of probabilities"
                )));
            }
        }
        Ok(spec)
    }

    pub fn uses_do(&self) -> bool {
        self.terms().any(|(_, _, t)| t.form.uses_do())
    }

    pub fn terms(&self) -> impl Iterator<Item = (TermKind, usize, &Term)> {
        let tag = |kind: TermKind| move |(i, t)| (kind, i, t);
        self.sqrt_terms
            .iter()
            .enumerate()
            .map(tag(TermKind::Sqrt))
            .chain(self.abs_terms.iter().enumerate().map(tag(TermKind::Abs)))
            .chain(self.linear_terms.iter().enumerate().map(tag(TermKind::Linear)))
    }

    /// Certification relies on concavity, which positive absolute-value
    /// terms would break.
    pub fn check_certifiable(&self) -> Result<()> {
        if let Some((k, t)) = self
            .abs_terms
            .iter()
            .enumerate()
            .find(|(_, t)| t.coefficient.is_positive())
        {
            return Err(Error::Semantic(format!(
                "absolute-value term {k} has positive coefficient {}; only concave witnesses can be certified",
                t.coefficient
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, p: &Behavior, d: Option<&DoData>) -> Result<WitnessValue> {
        let dod = if self.uses_do() {
            let d = d.ok_or_else(|| {
                Error::Config(format!("witness `{}` needs interventional data", self.name))
            })?;
            Some(d.flat())
        } else {
            None
        };
        self.evaluate_raw(p.as_array(), dod.as_ref())
    }

    /// Same as [`evaluate`](Self::evaluate) on raw coordinates.
    pub fn evaluate_raw(&self, obs: &[f64; 8], dod: Option<&[f64; 8]>) -> Result<WitnessValue> {
        let mut terms = Vec::with_capacity(self.sqrt_terms.len() + self.abs_terms.len());
        for (kind, i, t) in self.terms() {
            let x = t.form.eval(obs, dod);
            let inner = match kind {
                TermKind::Sqrt => {
                    if x < -SQRT_CLAMP_TOL {
                        return Err(Error::InvalidInput(format!(
                            "square-root term {i} has negative argument {x}"
                        )));
                    }
                    x.max(0.0).sqrt()
                }
                TermKind::Abs => x.abs(),
                TermKind::Linear => x,
            };
            terms.push(TermValue {
                kind,
                index: i,
                value: to_f64(t.coefficient) * inner,
            });
        }
        Ok(WitnessValue {
            value: terms.iter().map(|t| t.value).sum(),
            terms,
        })
    }

    /// Fast path used by the optimizers; no error reporting, sqrt arguments
    /// clamped at zero.
    pub fn value_unchecked(&self, obs: &[f64; 8], dod: &[f64; 8]) -> f64 {
        let mut acc = 0.0;
        for t in &self.sqrt_terms {
            acc += to_f64(t.coefficient) * t.form.eval(obs, Some(dod)).max(0.0).sqrt();
        }
        for t in &self.abs_terms {
            acc += to_f64(t.coefficient) * t.form.eval(obs, Some(dod)).abs();
        }
        for t in &self.linear_terms {
            acc += to_f64(t.coefficient) * t.form.eval(obs, Some(dod));
        }
        acc
    }
}

/// Witness with coefficients converted to floats, for repeated evaluation on
/// the 16 stacked coordinates (observational then interventional).
#[derive(Debug, Clone)]
pub struct CompiledWitness {
    sqrt: Vec<(f64, [f64; COORDS], f64)>,
    abs: Vec<(f64, [f64; COORDS], f64)>,
    linear: Vec<(f64, [f64; COORDS], f64)>,
}

impl CompiledWitness {
    pub fn new(spec: &FunctionalSpec) -> Self {
        let lower = |terms: &[Term]| {
            terms
                .iter()
                .map(|t| (to_f64(t.coefficient), t.form.coeffs_f64(), t.form.constant_f64()))
                .collect()
        };
        Self {
            sqrt: lower(&spec.sqrt_terms),
            abs: lower(&spec.abs_terms),
            linear: lower(&spec.linear_terms),
        }
    }

    /// Square-root arguments are clamped at zero.
    pub fn value(&self, coords: &[f64; COORDS]) -> f64 {
        let dot = |c: &[f64; COORDS], k: f64| k + c.iter().zip(coords).map(|(a, b)| a * b).sum::<f64>();
        let mut acc = 0.0;
        for (coef, c, k) in &self.sqrt {
            acc += coef * dot(c, *k).max(0.0).sqrt();
        }
        for (coef, c, k) in &self.abs {
            acc += coef * dot(c, *k).abs();
        }
        for (coef, c, k) in &self.linear {
            acc += coef * dot(c, *k);
        }
        acc
    }
}

/// Observational witness `I`.
fn builtin_i() -> FunctionalSpec {
    let quarter = LinearForm::constant(Rational::new(1, 4));
    let sqrt_terms = vec![
        Term::new(r(2), LinearForm::prob(0, 0, 0)),
        Term::new(r(2), LinearForm::prob(1, 0, 1)),
        Term::new(r(3), LinearForm::prob(1, 1, 0)),
    ];
    let abs_terms = vec![
        Term::new(r(-18), LinearForm::p_b(0) - quarter.clone()),
        Term::new(
            r(-18),
            LinearForm::prob(0, 1, 1) + LinearForm::prob(1, 1, 0) - quarter.clone(),
        ),
        Term::new(r(-4), LinearForm::prob(0, 1, 0) - quarter.clone()),
        Term::new(r(-4), LinearForm::prob(1, 1, 1) - quarter.clone()),
        Term::new(r(-4), LinearForm::correlator(1, 1, 1) - quarter),
        Term::new(r(-1), LinearForm::correlator(1, 0, 1) + LinearForm::correlator(0, 1, 1)),
        Term::new(r(-1), LinearForm::correlator(1, 0, 0)),
        Term::new(r(-1), LinearForm::correlator(0, 1, 0)),
    ];
    FunctionalSpec::new("I", sqrt_terms, abs_terms, vec![]).expect("valid builtin")
}

/// Observational-interventional witness `F`.
fn builtin_f() -> FunctionalSpec {
    let quarter = LinearForm::constant(Rational::new(1, 4));
    let sqrt_terms = vec![
        Term::new(r(2), LinearForm::prob(0, 0, 0)),
        Term::new(r(2), LinearForm::prob(1, 0, 1)),
        Term::new(r(4), LinearForm::prob(1, 1, 0)),
    ];
    let mut abs_terms = vec![
        Term::new(r(-1), LinearForm::prob(0, 1, 0) - quarter.clone()),
        Term::new(r(-1), LinearForm::prob(1, 1, 1) - quarter.clone()),
        Term::new(r(-1), LinearForm::correlator(1, 1, 1) - quarter.clone()),
        Term::new(
            r(-1),
            LinearForm::prob(0, 1, 1) + LinearForm::prob(1, 1, 0) - quarter.clone(),
        ),
        Term::new(r(-1), LinearForm::correlator(1, 0, 1) + LinearForm::correlator(0, 1, 1)),
        Term::new(r(-1), LinearForm::correlator(1, 0, 0)),
        Term::new(r(-1), LinearForm::correlator(0, 1, 0)),
        Term::new(r(-18), LinearForm::p_b(0) - quarter),
    ];
    for b in 0..2 {
        abs_terms.push(Term::new(r(-1), LinearForm::do_a_mean(b)));
        abs_terms.push(Term::new(r(-1), LinearForm::do_c_mean(b)));
    }
    FunctionalSpec::new("F", sqrt_terms, abs_terms, vec![]).expect("valid builtin")
}

pub fn builtin(name: &str) -> Result<FunctionalSpec> {
    match name {
        "I" => Ok(builtin_i()),
        "F" => Ok(builtin_f()),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

pub fn builtin_for(which: Which) -> FunctionalSpec {
    match which {
        Which::I => builtin_i(),
        Which::F => builtin_f(),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_8;

    use super::*;
    use crate::classical::fixture;
    use crate::quantum::family_behavior;

    #[test]
    fn builtin_shapes() {
        let i = builtin("I").unwrap();
        assert_eq!(i.sqrt_terms.len(), 3);
        let coeffs: Vec<_> = i.sqrt_terms.iter().map(|t| t.coefficient).collect();
        assert_eq!(coeffs, [r(2), r(2), r(3)]);
        assert_eq!(i.sqrt_terms[2].form, LinearForm::prob(1, 1, 0));
        assert_eq!(i.abs_terms.len(), 8);
        assert!(!i.uses_do());

        let f = builtin("F").unwrap();
        assert_eq!(f.sqrt_terms[2].coefficient, r(4));
        assert_eq!(f.sqrt_terms[2].form, LinearForm::prob(1, 1, 0));
        assert_eq!(f.abs_terms.iter().filter(|t| t.form.uses_do()).count(), 4);
        assert!(f.uses_do());
        assert!(matches!(builtin("G"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn family_values() {
        let p = family_behavior(FRAC_PI_8, 1.0);
        let i = builtin("I").unwrap().evaluate(&p, None).unwrap();
        assert!((i.value - 2.69238).abs() < 1e-5);
        let f = builtin("F")
            .unwrap()
            .evaluate(&p, Some(&DoData::unbiased()))
            .unwrap();
        assert!((f.value - 3.15432).abs() < 1e-5);
    }

    #[test]
    fn missing_do_data_is_a_config_error() {
        let p = family_behavior(FRAC_PI_8, 1.0);
        assert!(matches!(builtin("F").unwrap().evaluate(&p, None), Err(Error::Config(_))));
    }

    #[test]
    fn negative_sqrt_argument() {
        let spec = FunctionalSpec::new(
            "shifted",
            vec![Term::new(r(1), LinearForm::prob(0, 0, 0))],
            vec![],
            vec![],
        )
        .unwrap();
        // Nonnegative by construction on valid inputs; force a bad raw input.
        let mut obs = [0.125; 8];
        obs[0] = -1e-6;
        assert!(spec.evaluate_raw(&obs, None).is_err());
        obs[0] = -1e-13;
        assert_eq!(spec.evaluate_raw(&obs, None).unwrap().value, 0.0);
    }

    #[test]
    fn breakdown_sums_to_value() {
        let m = fixture("F-optimal").unwrap();
        let w = builtin("F").unwrap().evaluate(&m.behavior(), Some(&m.do_data())).unwrap();
        let total: f64 = w.terms.iter().map(|t| t.value).sum();
        assert!((total - w.value).abs() < 1e-12);
        assert_eq!(w.terms.len(), 3 + 12);
    }

    #[test]
    fn certifiability() {
        assert!(builtin("I").unwrap().check_certifiable().is_ok());
        let spec = FunctionalSpec::new(
            "convex",
            vec![],
            vec![Term::new(r(1), LinearForm::prob(0, 0, 0))],
            vec![],
        )
        .unwrap();
        assert!(spec.check_certifiable().is_err());
    }

    #[test]
    fn upper_bound_of_forms() {
        assert_eq!(LinearForm::prob(0, 0, 0).upper_bound(), 1.0);
        let f = LinearForm::prob(0, 0, 0).scale(r(2)) + LinearForm::do_a(0, 1);
        assert_eq!(f.upper_bound(), 3.0);
    }
}
