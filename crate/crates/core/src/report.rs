//! JSON report envelope shared by the theorem checkers and the closed-solution search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

/// One hypothesis with its worst sampled margin (negative means violated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub label: String,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_u: Option<f64>,
    pub note: String,
    pub status: Verdict,
}

impl ConditionResult {
    pub fn passed(&self) -> bool {
        self.status == Verdict::Satisfied
    }
}

/// What the theorem asserts once its hypotheses hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Conclusion {
    pub statement: String,
    /// Admissible initial values `y(t0)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_bracket: Option<(f64, f64)>,
    /// Bracket for the closed-solution search (`ζ(t0) ≤ ζ(T)`, `η(t0) ≥ η(T)`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_bracket: Option<(f64, f64)>,
    pub isolation_available: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub schema_version: u32,
    pub theorem: String,
    pub verdict: Verdict,
    pub conditions: Vec<ConditionResult>,
    pub params: BTreeMap<String, serde_json::Value>,
    pub grid: usize,
    pub interval: (f64, f64),
    pub conclusion: Conclusion,
    pub notes: Vec<String>,
}

impl CriterionReport {
    /// Violated if any condition failed, else Inconclusive if any could not be
    /// evaluated, else Satisfied.
    pub fn aggregate(conditions: &[ConditionResult]) -> Verdict {
        if conditions.iter().any(|c| c.status == Verdict::Violated) {
            Verdict::Violated
        } else if conditions.is_empty() || conditions.iter().any(|c| c.status == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Satisfied
        }
    }

    pub fn condition(&self, label: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond(status: Verdict) -> ConditionResult {
        ConditionResult {
            label: "x".into(),
            margin: 0.0,
            witness_t: None,
            witness_u: None,
            note: String::new(),
            status,
        }
    }

    #[test]
    fn aggregation() {
        use Verdict::*;
        assert_eq!(CriterionReport::aggregate(&[cond(Satisfied)]), Satisfied);
        assert_eq!(
            CriterionReport::aggregate(&[cond(Satisfied), cond(Inconclusive)]),
            Inconclusive
        );
        assert_eq!(
            CriterionReport::aggregate(&[cond(Inconclusive), cond(Violated)]),
            Violated
        );
        assert_eq!(CriterionReport::aggregate(&[]), Inconclusive);
    }
}
