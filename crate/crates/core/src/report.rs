use serde::{Deserialize, Serialize};

use crate::tol::ToleranceContext;

/// Outcome of one verified law.  `residual` is the measured defect (NaN when
/// the check is purely structural; serialized as null).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub check_id: String,
    pub law: String,
    pub pass: bool,
    #[serde(with = "nan_as_null")]
    pub residual: f64,
    pub detail: String,
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

impl Verdict {
    pub fn measured(
        check_id: &str,
        law: &str,
        residual: f64,
        bound: f64,
        detail: impl Into<String>,
    ) -> Self {
        Verdict {
            check_id: check_id.into(),
            law: law.into(),
            pass: residual.is_finite() && residual <= bound,
            residual,
            detail: detail.into(),
        }
    }

    pub fn structural(check_id: &str, law: &str, pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            check_id: check_id.into(),
            law: law.into(),
            pass,
            residual: f64::NAN,
            detail: detail.into(),
        }
    }
}

/// A named bundle of verdicts for one scenario run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub tolerance: ToleranceContext,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(scenario: &str, tolerance: ToleranceContext) -> Self {
        Report {
            scenario: scenario.into(),
            tolerance,
            verdicts: Vec::new(),
        }
    }

    pub fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn extend(&mut self, vs: Vec<Verdict>) {
        self.verdicts.extend(vs);
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| !v.pass).collect()
    }

    /// Deterministic serialization: field order is fixed by the struct and
    /// verdicts appear in insertion order.
    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serialization cannot fail")
        } else {
            serde_json::to_string(self).expect("report serialization cannot fail")
        }
    }

    /// One line per verdict, for terminal output.
    pub fn human_summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let state = if v.pass { "pass" } else { "FAIL" };
            let residual = if v.residual.is_nan() {
                "-".to_string()
            } else {
                format!("{:.3e}", v.residual)
            };
            out.push_str(&format!(
                "[{state}] {:<38} residual {residual:<10} {}\n",
                v.check_id, v.law
            ));
        }
        let (npass, total) = (
            self.verdicts.iter().filter(|v| v.pass).count(),
            self.verdicts.len(),
        );
        out.push_str(&format!(
            "{}: {npass}/{total} checks passed\n",
            self.scenario
        ));
        out
    }
}
