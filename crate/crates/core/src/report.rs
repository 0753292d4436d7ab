//! Pass/fail records shared by every verification suite.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational flag; never counts as a failure.
    Note,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn record(&mut self, id: impl Into<String>, anchor: impl Into<String>, result: Result<(), String>) {
        let (status, detail) = match result {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(w)),
        };
        self.checks.push(Check { id: id.into(), anchor: anchor.into(), status, detail });
    }

    /// A passing check that carries a value (e.g. a computed scalar).
    pub fn pass_with(&mut self, id: impl Into<String>, anchor: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check { id: id.into(), anchor: anchor.into(), status: Status::Pass, detail: Some(detail.into()) });
    }

    pub fn note(&mut self, id: impl Into<String>, anchor: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check { id: id.into(), anchor: anchor.into(), status: Status::Note, detail: Some(detail.into()) });
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Merges another report, prefixing its ids.
    pub fn merge_prefixed(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.id = format!("{prefix}.{}", c.id);
            self.checks.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn passed(&self, id: &str) -> bool {
        self.get(id).is_some_and(|c| c.status == Status::Pass)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn summary(&self) -> String {
        let fails = self.failures().count();
        let notes = self.checks.iter().filter(|c| c.status == Status::Note).count();
        format!("{} checks, {} failed, {} notes", self.checks.len(), fails, notes)
    }
}
