use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    /// A structural invariant is broken; generation results are not trustworthy.
    Error,
    /// Advisory curation rule; the data still loads and generates.
    Warning,
}

/// One finding from validating or linting knowledge-base data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    /// The lexeme or pair the finding is about.
    pub subject: String,
    /// Short stable rule name, e.g. `slot-category`.
    pub rule: &'static str,
    pub message: String,
}

impl Violation {
    pub fn error(
        subject: impl Into<String>,
        rule: &'static str,
        message: impl Into<String>,
    ) -> Self {
        Violation {
            severity: Severity::Error,
            subject: subject.into(),
            rule,
            message: message.into(),
        }
    }

    pub fn warning(
        subject: impl Into<String>,
        rule: &'static str,
        message: impl Into<String>,
    ) -> Self {
        Violation {
            severity: Severity::Warning,
            subject: subject.into(),
            rule,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{level}[{}] {}: {}",
            self.rule, self.subject, self.message
        )
    }
}
