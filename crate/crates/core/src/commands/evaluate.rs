//! `evaluate`: a witness on a supplied or named behavior.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, DoData};
use crate::bounds::{resolve_bound, StoredBound};
use crate::classical::fixture;
use crate::error::{Error, Result};
use crate::quantum::QuantumStrategy;
use crate::witness::{FunctionalSpec, TermValue};

use super::table::{sig6, TableRow};

/// JSON input: a behavior and, for interventional witnesses, do-data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationInput {
    pub behavior: Behavior,
    #[serde(default, rename = "do")]
    pub do_data: Option<DoData>,
}

/// Where the evaluated data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    File(PathBuf),
    /// Quantum family at `(θ, v)` via the Born rule.
    Family { theta: f64, visibility: f64 },
    Fixture(String),
    Uniform,
}

impl FromStr for InputSource {
    type Err = Error;

    /// `family:THETA[:V]`, `fixture:NAME`, `uniform`, or a path.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("family:") {
            let mut parts = rest.split(':');
            let theta = super::parse_angle(parts.next().unwrap_or(""))?;
            let visibility = match parts.next() {
                Some(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad visibility in `{s}`")))?,
                None => 1.0,
            };
            return Ok(InputSource::Family { theta, visibility });
        }
        if let Some(name) = s.strip_prefix("fixture:") {
            return Ok(InputSource::Fixture(name.to_string()));
        }
        if s == "uniform" {
            return Ok(InputSource::Uniform);
        }
        Ok(InputSource::File(PathBuf::from(s)))
    }
}

impl InputSource {
    pub fn load(&self) -> Result<EvaluationInput> {
        let (behavior, do_data) = match self {
            InputSource::File(path) => {
                let text = std::fs::read_to_string(path)?;
                return serde_json::from_str(&text).map_err(|e| {
                    Error::InvalidInput(format!("{}: {e}", path.display()))
                });
            }
            InputSource::Family { theta, visibility } => {
                let q = QuantumStrategy::family(*theta, *visibility)?;
                (q.born_behavior()?, q.born_do_data()?)
            }
            InputSource::Fixture(name) => {
                let m = fixture(name)?;
                (m.behavior(), m.do_data())
            }
            InputSource::Uniform => (Behavior::uniform(), DoData::unbiased()),
        };
        Ok(EvaluationInput {
            behavior,
            do_data: Some(do_data),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluateReport {
    pub witness: String,
    pub value: f64,
    pub terms: Vec<TermValue>,
    pub bound: Option<StoredBound>,
    pub violation: Option<bool>,
}

impl EvaluateReport {
    /// One-line verdict, e.g. `2.69238 > 2.562279 (VIOLATION)`.
    pub fn verdict(&self) -> String {
        match (&self.bound, self.violation) {
            (Some(b), Some(true)) => format!("{} > {:.6} (VIOLATION)", sig6(self.value), b.value),
            (Some(b), _) => format!("{} <= {:.6} (no violation)", sig6(self.value), b.value),
            (None, _) => format!("{} (no stored bound)", sig6(self.value)),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} = {}\n", self.witness, sig6(self.value));
        for t in &self.terms {
            out.push_str(&format!("  {:<6} {:>2}  {:>10}\n", t.kind.to_string(), t.index, sig6(t.value)));
        }
        if let Some(b) = &self.bound {
            out.push_str(&format!("compared against {b}\n"));
        }
        out.push_str(&self.verdict());
        out.push('\n');
        out
    }
}

impl TableRow for TermValue {
    fn header() -> Vec<&'static str> {
        vec!["kind", "index", "value"]
    }

    fn cells(&self) -> Vec<String> {
        vec![self.kind.to_string(), self.index.to_string(), sig6(self.value)]
    }
}

/// Evaluates against `bound`, or the resolved stored bound when `None`.
pub fn evaluate(spec: &FunctionalSpec, input: &EvaluationInput, bound: Option<StoredBound>) -> Result<EvaluateReport> {
    let w = spec.evaluate(&input.behavior, input.do_data.as_ref())?;
    let bound = match bound {
        Some(b) => Some(b),
        None => resolve_bound(&spec.name)?,
    };
    let violation = bound.as_ref().map(|b| w.value > b.value);
    Ok(EvaluateReport {
        witness: spec.name.clone(),
        value: w.value,
        terms: w.terms,
        bound,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::reference_bound;
    use crate::witness::builtin;

    fn run(witness: &str, src: &str) -> EvaluateReport {
        let input = src.parse::<InputSource>().unwrap().load().unwrap();
        let bound = reference_bound(witness).unwrap();
        evaluate(&builtin(witness).unwrap(), &input, Some(bound)).unwrap()
    }

    #[test]
    fn family_violates_i() {
        let r = run("I", "family:pi/8:1");
        assert_eq!(r.verdict(), "2.69238 > 2.562279 (VIOLATION)");
    }

    #[test]
    fn uniform_does_not_violate() {
        let r = run("I", "uniform");
        assert_eq!(r.violation, Some(false));
        assert!(r.verdict().ends_with("(no violation)"));
    }

    #[test]
    fn fixture_for_f() {
        let r = run("F", "fixture:F-optimal");
        assert_eq!(r.violation, Some(false));
        assert!((r.value - 3.0).abs() < 1e-3);
    }

    #[test]
    fn json_input_roundtrip() {
        let input = InputSource::Uniform.load().unwrap();
        let text = serde_json::to_string(&input).unwrap();
        let back: EvaluationInput = serde_json::from_str(&text).unwrap();
        assert_eq!(back.behavior, input.behavior);
        let no_do: EvaluationInput =
            serde_json::from_str(r#"{"behavior":{"p":[0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125]}}"#).unwrap();
        assert!(no_do.do_data.is_none());
        assert!(evaluate(&builtin("F").unwrap(), &no_do, None).is_err());
    }

    #[test]
    fn sources_parse() {
        assert_eq!("uniform".parse::<InputSource>().unwrap(), InputSource::Uniform);
        assert!(matches!(
            "family:0.3".parse::<InputSource>().unwrap(),
            InputSource::Family { visibility, .. } if visibility == 1.0
        ));
        assert!("family:x".parse::<InputSource>().is_err());
    }
}
