//! Named numerical tolerances, overridable from the command line.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Every tolerance used by checks and reports, with its default.
pub const DEFAULTS: &[(&str, f64, &str)] = &[
    ("wulff_h", 1e-6, "sup |H_K + 1| on the Wulff shape"),
    ("trace_gap", 1e-8, "sup of tr(B_K²) - n H_K² on the Wulff shape"),
    ("area_rel", 1e-6, "relative error of A_K(∂K) against (n+1) V(K)"),
    ("fd_rel", 1e-4, "relative gap between analytic and finite-difference variations"),
    ("fd_order", 2.0, "minimum observed finite-difference order"),
    ("index_rel", 1e-3, "relative gap between the index form and (A + nHV)''"),
    ("cone_exact", 1e-10, "exact planar cone identities"),
    ("mc_sigma_rel", 1e-3, "relative Monte Carlo standard error"),
    ("mc_sigmas", 3.0, "Monte Carlo agreement in standard errors"),
    ("profile_value", 1e-3, "absolute error of reference profile values"),
    ("symmetry", 1e-3, "|I(v) - I(V - v)|"),
    ("concavity_rel", 1e-3, "second-difference allowance relative to ψ(V/2)"),
    ("comparison", 1e-4, "slack allowed in comparison bounds"),
    ("tightness", 1e-3, "gap below which a comparison bound counts as attained"),
    ("monotone", 1e-6, "decrease allowed on the first half of a symmetric profile"),
    ("slope", 1e-6, "slack in the one-sided slope bracket"),
    ("stability", 1e-6, "negative second variation allowed on the Wulff shape"),
    ("ratio", 1e-8, "deficit allowed in the isoperimetric ratio"),
];

/// Tolerance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    values: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            values: DEFAULTS
                .iter()
                .map(|(k, v, _)| (k.to_string(), *v))
                .collect(),
        }
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self
            .values
            .get(name)
            .unwrap_or_else(|| panic!("unknown tolerance {name}"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.values.contains_key(name) {
            return Err(Error::InvalidArgument(format!("unknown tolerance '{name}'")));
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance '{name}' must be finite and non-negative"
            )));
        }
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    /// Apply an override written as `NAME=VALUE`.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("expected NAME=VALUE, got '{assignment}'"))
        })?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad number in '{assignment}'")))?;
        self.set(k.trim(), v)
    }

    /// Source label: `default` or `override`.
    pub fn source(&self, name: &str) -> &'static str {
        let d = DEFAULTS.iter().find(|(k, _, _)| *k == name).map(|x| x.1);
        if d == Some(self.get(name)) {
            "default"
        } else {
            "override"
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let mut t = Tolerances::default();
        assert_eq!(t.source("symmetry"), "default");
        t.apply("symmetry=0.01").unwrap();
        assert_eq!(t.get("symmetry"), 0.01);
        assert_eq!(t.source("symmetry"), "override");
        assert!(t.apply("nope=1").is_err());
        assert!(t.apply("symmetry").is_err());
        assert!(t.apply("symmetry=-1").is_err());
    }
}
