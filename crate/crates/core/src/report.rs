use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of one named identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub identity: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

/// Itemized result of a validator. Validators never fail; they report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, identity: impl Into<String>, passed: bool) -> &mut Self {
        self.checks.push(Check {
            identity: identity.into(),
            passed,
            detail: None,
        });
        self
    }

    pub fn check_with(
        &mut self,
        identity: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> &mut Self {
        self.checks.push(Check {
            identity: identity.into(),
            passed,
            detail: Some(detail.into()),
        });
        self
    }

    /// Appends every check of `other`, prefixing identities with `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.identity = format!("{prefix}.{}", c.identity);
            }
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Passed flag of the first check named `identity`, if present.
    pub fn status(&self, identity: &str) -> Option<bool> {
        self.checks
            .iter()
            .find(|c| c.identity == identity)
            .map(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}",
            self.subject,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for c in &self.checks {
            write!(f, "  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.identity)?;
            if let Some(d) = &c.detail {
                write!(f, " ({d})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
