//! Equation spec files: JSON with coefficient expressions keyed by power.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::Params;
use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::ode::PolyOde;
use crate::subsup::Split;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitTerm {
    pub c: String,
    pub d: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<f64>>,
    /// Gluing point `T` of the `η*_T`, `ζ*_T`, `M*_{T,j}` constructions; defaults to the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_split: Option<f64>,
}

/// Comparison data: coefficient maps of the auxiliary equations and
/// user-supplied reference functions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSpec {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub b: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub e: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n: usize,
    pub t0: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub coefficients: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub split: BTreeMap<String, SplitTerm>,
    #[serde(default)]
    pub params: ParamSpec,
    #[serde(default)]
    pub comparison: ComparisonSpec,
}

fn power_key(key: &str, n: usize, what: &str) -> Result<usize> {
    let k: usize = key
        .trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("{what} key {key:?} is not a power index")))?;
    if k > n {
        return Err(Error::Invalid(format!("{what} key {k} exceeds n = {n}")));
    }
    Ok(k)
}

fn coeff_list(map: &BTreeMap<String, String>, n: usize, what: &str) -> Result<Vec<Expr>> {
    let mut out = vec![Expr::zero(); n + 1];
    for (key, text) in map {
        let k = power_key(key, n, what)?;
        out[k] = expr::parse(text)?;
    }
    Ok(out)
}

fn opt_expr(s: &Option<String>) -> Result<Option<Expr>> {
    s.as_deref().map(expr::parse).transpose().map_err(Error::from)
}

impl EquationSpec {
    pub fn from_json(text: &str) -> Result<EquationSpec> {
        let spec: EquationSpec = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("spec: {e}")))?;
        spec.ode()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn ode(&self) -> Result<PolyOde> {
        PolyOde::new(
            coeff_list(&self.coefficients, self.n, "coefficient")?,
            self.t0,
            self.horizon,
        )
    }

    pub fn split(&self) -> Result<Option<Split>> {
        if self.split.is_empty() {
            return Ok(None);
        }
        let mut s = Split::new();
        for (key, term) in &self.split {
            let k = power_key(key, self.n, "split")?;
            s = s.with(k, expr::parse(&term.c)?, expr::parse(&term.d)?);
        }
        Ok(Some(s))
    }

    pub fn params(&self) -> Result<Params> {
        let p = &self.params;
        let cmp = &self.comparison;
        let list = |m: &BTreeMap<String, String>, what| -> Result<Option<Vec<Expr>>> {
            if m.is_empty() {
                Ok(None)
            } else {
                coeff_list(m, self.n, what).map(Some)
            }
        };
        Ok(Params {
            gamma: p.gamma,
            nu: p.nu,
            c: p.c,
            c_plus: p.c_plus,
            c_minus: p.c_minus,
            j: p.j,
            partition: p.partition.clone(),
            t_split: p.t_split,
            split: self.split()?,
            b: list(&cmp.b, "b")?,
            e: list(&cmp.e, "e")?,
            y1: opt_expr(&cmp.y1)?,
            y2: opt_expr(&cmp.y2)?,
            eta: opt_expr(&cmp.eta)?,
            zeta: opt_expr(&cmp.zeta)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_spec() {
        let s = EquationSpec::from_json(r#"{"n": 2, "t0": 0, "T": 1, "coefficients": {"0": "-1", "2": "1"}}"#).unwrap();
        let ode = s.ode().unwrap();
        assert_eq!(ode.degree(), 2);
        assert_eq!(ode.coeff(1, 0.5).unwrap(), 0.0);
        assert!(s.split().unwrap().is_none());
    }

    #[test]
    fn rejects_bad_keys_and_fields() {
        let bad = r#"{"n": 2, "t0": 0, "T": 1, "coefficients": {"3": "1"}}"#;
        assert!(EquationSpec::from_json(bad).is_err());
        let bad = r#"{"n": 2, "t0": 0, "T": 1, "coefficients": {}, "extra": 1}"#;
        assert!(EquationSpec::from_json(bad).is_err());
        let bad = r#"{"n": 2, "t0": 0, "T": 1, "coefficients": {"0": "2t"}}"#;
        assert!(EquationSpec::from_json(bad).is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"{"n": 3, "t0": 0, "T": 2, "coefficients": {"0": "sin(t)", "3": "1"},
            "split": {"2": {"c": "0", "d": "0"}}, "params": {"gamma": 0.5, "partition": [0, 1, 2]},
            "comparison": {"y1": "-1", "b": {"0": "1"}}}"#;
        let s = EquationSpec::from_json(text).unwrap();
        let again = EquationSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(s, again);
        let p = s.params().unwrap();
        assert_eq!(p.gamma, Some(0.5));
        assert_eq!(p.b.unwrap().len(), 4);
    }
}
