//! Per-check verdicts with first counterexamples.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::linalg::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Position of the failing case in the check's deterministic order.
    pub index: u64,
    pub inputs: BTreeMap<String, Vec<String>>,
    pub detail: String,
}

impl Counterexample {
    pub fn new(index: u64, inputs: &[(&str, &Vector)], detail: impl Into<String>) -> Self {
        Counterexample {
            index,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.to_strings())).collect(),
            detail: detail.into(),
        }
    }

    pub fn monomial(index: u64, vars: &[usize], detail: impl Into<String>) -> Self {
        let mut inputs = BTreeMap::new();
        inputs.insert("monomial".to_string(), vars.iter().map(|v| v.to_string()).collect());
        Counterexample { index, inputs, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub passed: u64,
    pub failed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn skip(name: impl Into<String>, note: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Skip, passed: 0, failed: 0, counterexample: None, note: Some(note.into()) }
    }

    pub fn pass(name: impl Into<String>, passed: u64) -> Self {
        Check { name: name.into(), status: Status::Pass, passed, failed: 0, counterexample: None, note: None }
    }

    pub fn fail(name: impl Into<String>, witness: Counterexample) -> Self {
        Check {
            name: name.into(),
            status: Status::Fail,
            passed: 0,
            failed: 1,
            counterexample: Some(witness),
            note: None,
        }
    }

    /// A failed check carrying only a message, for computations that
    /// could not be carried out at all.
    pub fn error(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check::fail(name, Counterexample { index: 0, inputs: BTreeMap::new(), detail: detail.into() })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}.{}", self.name);
        self
    }
}

/// Counts outcomes of one named check and keeps the first failure.
pub struct Tally {
    name: String,
    passed: u64,
    failed: u64,
    next: u64,
    witness: Option<Counterexample>,
}

impl Tally {
    pub fn new(name: impl Into<String>) -> Self {
        Tally { name: name.into(), passed: 0, failed: 0, next: 0, witness: None }
    }

    /// Records one case; `witness` is only evaluated for the first failure.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce(u64) -> Counterexample) {
        let index = self.next;
        self.next += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.witness.is_none() {
                self.witness = Some(witness(index));
            }
        }
    }

    pub fn finish(self) -> Check {
        Check {
            name: self.name,
            status: if self.failed == 0 { Status::Pass } else { Status::Fail },
            passed: self.passed,
            failed: self.failed,
            counterexample: self.witness,
            note: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Describes the first failure, for validation errors.
    pub fn failure_message(&self) -> Option<String> {
        self.first_failure().map(|c| match &c.counterexample {
            Some(w) => format!("{}: {}", c.name, w.detail),
            None => c.name.clone(),
        })
    }

    pub(crate) fn into_validation(self, what: &str) -> crate::Result<()> {
        match self.failure_message() {
            None => Ok(()),
            Some(m) => Err(crate::Error::Validation(format!("{what}: {m}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_keeps_first_failure() {
        let mut t = Tally::new("x");
        t.record(true, |i| Counterexample::monomial(i, &[], "never"));
        t.record(false, |i| Counterexample::monomial(i, &[1], "first"));
        t.record(false, |i| Counterexample::monomial(i, &[2], "second"));
        let c = t.finish();
        assert_eq!(c.status, Status::Fail);
        assert_eq!((c.passed, c.failed), (1, 2));
        let w = c.counterexample.unwrap();
        assert_eq!(w.index, 1);
        assert_eq!(w.detail, "first");
    }

    #[test]
    fn skips_do_not_fail_reports() {
        let mut r = Report::new();
        r.push(Check::skip("s", "not applicable"));
        r.push(Check::pass("p", 3));
        assert!(r.all_passed());
        r.push(Check::error("e", "boom"));
        assert_eq!(r.failure_message().unwrap(), "e: boom");
    }
}
