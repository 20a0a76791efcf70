use std::fmt;

use serde::Serialize;

/// A failed well-formedness check together with the ids that witness it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub check: String,
    pub witness: Vec<String>,
    pub detail: String,
}

/// An informational property that never affects `ok`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub name: String,
    pub value: bool,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub flags: Vec<Flag>,
}

impl ValidationReport {
    pub(crate) fn new() -> Self {
        ValidationReport { ok: true, violations: Vec::new(), flags: Vec::new() }
    }

    pub(crate) fn violation(&mut self, check: &str, witness: Vec<String>, detail: impl Into<String>) {
        self.violations.push(Violation { check: check.to_string(), witness, detail: detail.into() });
    }

    pub(crate) fn flag(&mut self, name: impl Into<String>, value: bool, witness: Vec<String>) {
        self.flags.push(Flag { name: name.into(), value, witness });
    }

    /// Sorts violations and recomputes `ok`.
    pub(crate) fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self.ok = self.violations.is_empty();
        self
    }

    pub fn has(&self, check: &str) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }

    pub fn find(&self, check: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.check == check)
    }

    pub fn flag_value(&self, name: &str) -> Option<bool> {
        self.flags.iter().find(|f| f.name == name).map(|f| f.value)
    }

    pub fn get_flag(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ok: {}", self.ok)?;
        for fl in &self.flags {
            write!(f, "{}: {}", fl.name, fl.value)?;
            if !fl.witness.is_empty() {
                write!(f, " (witness: {})", fl.witness.join(", "))?;
            }
            writeln!(f)?;
        }
        for v in &self.violations {
            writeln!(f, "violation {} ({}): {}", v.check, v.witness.join(", "), v.detail)?;
        }
        Ok(())
    }
}
