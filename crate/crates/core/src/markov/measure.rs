use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{Map, Value};

use super::ChainError;
use crate::poly::{gcd_all, MultiPoly, PolyError, Ring};

/// An unnormalized measure: one polynomial per state, not all zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    states: Vec<String>,
    values: Vec<MultiPoly>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub manifestly_positive: bool,
    pub compact: bool,
}

impl Measure {
    pub fn new(states: Vec<String>, values: Vec<MultiPoly>) -> Result<Measure, ChainError> {
        if states.len() != values.len() {
            return Err(ChainError::IndexMismatch {
                expected: states.len(),
                got: values.len(),
            });
        }
        if values.iter().all(MultiPoly::is_zero) {
            return Err(ChainError::ZeroMeasure);
        }
        Ok(Measure { states, values })
    }

    /// Parses `(state, polynomial text)` pairs over `ring`.
    pub fn parse<'a, I>(ring: &Arc<Ring>, entries: I) -> Result<Measure, ChainError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut states = Vec::new();
        let mut values = Vec::new();
        for (s, p) in entries {
            states.push(s.to_string());
            values.push(MultiPoly::parse(ring, p)?);
        }
        Measure::new(states, values)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn values(&self) -> &[MultiPoly] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.values[0].ring()
    }

    pub fn get(&self, state: &str) -> Option<&MultiPoly> {
        self.states
            .iter()
            .position(|s| s == state)
            .map(|i| &self.values[i])
    }

    /// Partition function: the sum of all entries.
    pub fn total(&self) -> MultiPoly {
        self.values
            .iter()
            .fold(MultiPoly::zero(self.ring()), |acc, v| &acc + v)
    }

    /// Flips every sign if the first nonzero entry has a negative leading
    /// coefficient.
    pub fn sign_normalized(self) -> Measure {
        let negative = self
            .values
            .iter()
            .find(|v| !v.is_zero())
            .and_then(|v| v.leading_term())
            .is_some_and(|(_, c)| num_traits::Signed::is_negative(c));
        if !negative {
            return self;
        }
        Measure {
            states: self.states,
            values: self.values.into_iter().map(|v| -v).collect(),
        }
    }

    /// Proportionality by cross-multiplication: `a_i b_j = a_j b_i` for all
    /// pairs. Only pairs against one nonzero anchor are needed once the
    /// zero patterns agree.
    pub fn is_proportional_to(&self, other: &Measure) -> Result<bool, ChainError> {
        if self.len() != other.len() {
            return Err(ChainError::IndexMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let a: Vec<MultiPoly> = self.values.clone();
        let b: Vec<MultiPoly> = other
            .values
            .iter()
            .map(|v| v.to_ring(self.ring()))
            .collect::<Result<_, PolyError>>()?;
        if a.iter().zip(&b).any(|(x, y)| x.is_zero() != y.is_zero()) {
            return Ok(false);
        }
        let k = a.iter().position(|v| !v.is_zero()).expect("nonzero measure");
        Ok((0..a.len()).all(|i| &a[i] * &b[k] == &a[k] * &b[i]))
    }

    /// Gcd of all entries with integer content removed.
    pub fn common_factor(&self) -> MultiPoly {
        gcd_all(self.values.iter()).expect("nonzero measure")
    }

    /// Divides every entry by `d`, which must divide each one exactly.
    pub fn divide_by(&self, d: &MultiPoly) -> Result<Measure, ChainError> {
        let values = self
            .values
            .iter()
            .map(|v| v.exact_div(d))
            .collect::<Result<Vec<_>, _>>()?;
        Measure::new(self.states.clone(), values)
    }

    /// Manifest positivity of every coefficient and compactness (no
    /// nonconstant common factor).
    pub fn classify(&self) -> Classification {
        let manifestly_positive = self
            .values
            .iter()
            .all(|v| v.terms().iter().all(|(_, c)| num_traits::Signed::is_positive(c)));
        Classification {
            manifestly_positive,
            compact: self.common_factor().is_one(),
        }
    }

    pub fn substitute(&self, values: &[(&str, i64)]) -> Result<Measure, ChainError> {
        let vals = self
            .values
            .iter()
            .map(|v| v.substitute(values))
            .collect::<Result<Vec<_>, _>>()?;
        Measure::new(self.states.clone(), vals)
    }

    /// Entrywise rational values at `assignment`.
    pub fn evaluate(&self, assignment: &BTreeMap<String, BigRational>) -> Result<Vec<BigRational>, ChainError> {
        self.values
            .iter()
            .map(|v| v.evaluate(assignment).map_err(ChainError::from))
            .collect()
    }

    /// Sub-measure on the listed states, in the listed order.
    pub fn restrict(&self, states: &[&str]) -> Result<Measure, ChainError> {
        let mut vals = Vec::with_capacity(states.len());
        for s in states {
            let v = self
                .get(s)
                .ok_or_else(|| ChainError::UnknownState(s.to_string()))?;
            vals.push(v.clone());
        }
        Measure::new(states.iter().map(|s| s.to_string()).collect(), vals)
    }

    /// JSON object from state label to canonical polynomial text, in state
    /// order.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (s, v) in self.states.iter().zip(&self.values) {
            map.insert(s.clone(), Value::String(v.to_string()));
        }
        Value::Object(map)
    }

    pub fn from_json(ring: &Arc<Ring>, value: &Value) -> Result<Measure, ChainError> {
        let obj = value
            .as_object()
            .ok_or_else(|| ChainError::Format("measure must be a JSON object".into()))?;
        let mut entries = Vec::with_capacity(obj.len());
        for (k, v) in obj {
            let text = v
                .as_str()
                .ok_or_else(|| ChainError::Format(format!("value for `{k}` is not a string")))?;
            entries.push((k.as_str(), text));
        }
        Measure::parse(ring, entries)
    }
}
