//! Machine-readable outcome of one numerical check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How a certificate's value is judged against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// `value ≥ −tolerance`
    AtLeastNegTol,
    /// `value < −tolerance`
    BelowNegTol,
    /// `|value| ≤ tolerance`
    AbsAtMost,
    /// `value > tolerance`
    AboveTol,
}

impl Bound {
    pub fn holds(self, value: f64, tolerance: f64) -> bool {
        match self {
            Bound::AtLeastNegTol => value >= -tolerance,
            Bound::BelowNegTol => value < -tolerance,
            Bound::AbsAtMost => value.abs() <= tolerance,
            Bound::AboveTol => value > tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub convention: String,
    pub seed: Option<u64>,
    pub details: BTreeMap<String, Value>,
}

impl Certificate {
    /// A certificate whose verdict is `bound.holds(value, tolerance)`.
    pub fn judged(
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        bound: Bound,
        convention: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: bound.holds(value, tolerance),
            value: Some(value),
            tolerance,
            bound,
            convention: convention.into(),
            seed: None,
            details: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Adds a further pass condition on top of the value bound.
    pub fn require(mut self, condition: bool) -> Self {
        self.passed &= condition;
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    /// `passed` never contradicts the value bound.
    pub fn is_consistent(&self) -> bool {
        match self.value {
            Some(v) if self.passed => self.bound.holds(v, self.tolerance),
            _ => true,
        }
    }
}

/// Combines several certificates into one named verdict that passes only
/// when all parts pass. The first part supplies value and tolerance.
pub fn conjunction(name: &str, parts: Vec<Certificate>) -> Certificate {
    let head = parts.first().expect("at least one certificate");
    let mut out = Certificate {
        name: name.to_string(),
        passed: parts.iter().all(|c| c.passed),
        value: head.value,
        tolerance: head.tolerance,
        bound: head.bound,
        convention: head.convention.clone(),
        seed: head.seed,
        details: BTreeMap::new(),
    };
    for part in parts {
        out.details.insert(
            part.name.clone(),
            serde_json::to_value(&part).expect("certificate serializes"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::AtLeastNegTol.holds(-1e-12, 1e-10));
        assert!(!Bound::AtLeastNegTol.holds(-1e-9, 1e-10));
        assert!(Bound::BelowNegTol.holds(-1.0, 1e-10));
        assert!(!Bound::BelowNegTol.holds(-1e-11, 1e-10));
        assert!(Bound::AbsAtMost.holds(-1e-11, 1e-10));
    }

    #[test]
    fn require_only_tightens() {
        let c = Certificate::judged("x", 0.0, 1e-10, Bound::AbsAtMost, "none").require(false);
        assert!(!c.passed);
        assert!(c.is_consistent());
    }

    #[test]
    fn serializes_with_sorted_details() {
        let c = Certificate::judged("x", 1.5, 0.0, Bound::AtLeastNegTol, "projector")
            .with_seed(3)
            .detail("zeta", 1)
            .detail("alpha", "a");
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
