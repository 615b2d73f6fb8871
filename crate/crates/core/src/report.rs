//! The common report schema. Every check in the crate funnels into
//! [`CheckReport`]; the CLI writes these as JSON and merges them with a
//! stable sort so identical inputs produce byte-identical files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped(String),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub params: BTreeMap<String, String>,
    pub verdict: Verdict,
    /// Measured constants: name -> radius (or other key) -> rendered value.
    pub constants: BTreeMap<String, BTreeMap<String, String>>,
    pub witness: Option<Vec<(String, String)>>,
    /// Deviation flags (e.g. cone scope, bounded-support proxies).
    pub flags: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, model: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            model: model.into(),
            params: BTreeMap::new(),
            verdict: Verdict::Pass,
            constants: BTreeMap::new(),
            witness: None,
            flags: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn record(&mut self, name: &str, key: impl ToString, value: impl ToString) {
        self.constants
            .entry(name.to_string())
            .or_default()
            .insert(key.to_string(), value.to_string());
    }

    pub fn fail_with(&mut self, witness: Vec<(String, String)>) {
        self.verdict = Verdict::Fail;
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    pub fn flag(&mut self, f: impl Into<String>) {
        let f = f.into();
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    pub fn sort_key(&self) -> (String, String) {
        (self.check.clone(), self.model.clone())
    }
}

/// Stable merge used by `report merge` and the verify pipelines.
pub fn merge_reports(mut reports: Vec<CheckReport>) -> Vec<CheckReport> {
    reports.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    reports
}

pub fn render_reports(reports: &[CheckReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("report serialization");
    s.push('\n');
    s
}

pub fn parse_reports(s: &str) -> Result<Vec<CheckReport>, serde_json::Error> {
    serde_json::from_str(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_stable() {
        let mut r = CheckReport::new("axiom-1", "grid-Z2 r=4").param("E", 3);
        r.record("kappa", "4", "2");
        r.record("kappa", "6", "2");
        r.flag("cone-scope:all-parallel-copies");
        let reports = vec![r];
        let s1 = render_reports(&reports);
        let parsed = parse_reports(&s1).unwrap();
        let s2 = render_reports(&parsed);
        assert_eq!(s1, s2);
    }

    #[test]
    fn merge_is_stable_sort() {
        let a = CheckReport::new("b-check", "m");
        let b = CheckReport::new("a-check", "m");
        let merged = merge_reports(vec![a.clone(), b.clone()]);
        assert_eq!(merged[0].check, "a-check");
        let again = merge_reports(merged.clone());
        assert_eq!(again, merged);
    }
}
