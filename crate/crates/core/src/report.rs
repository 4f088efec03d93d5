//! Verification reports: flat lists of violations with printable witnesses.
//!
//! Every checker in this crate returns a [`ValidationReport`] instead of
//! panicking. A report is a list of violations, each carrying a short stable
//! code (for machine consumption) and a human readable message naming the
//! objects involved.

use std::fmt;

/// One failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Short stable identifier of the check that failed, e.g. `face-count`.
    pub code: String,
    /// Human readable description including the witness data.
    pub message: String,
}

impl Violation {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Violation { code: code.to_string(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

/// Outcome of a verification pass.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport::default()
    }

    pub fn push(&mut self, code: &str, message: impl Into<String>) {
        self.violations.push(Violation::new(code, message));
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Panics with the full report when any violation is present.
    /// Intended for tests.
    pub fn expect_valid(&self, context: &str) {
        if !self.is_valid() {
            panic!("{context}: {self}");
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}
