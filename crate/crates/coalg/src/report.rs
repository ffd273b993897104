//! Structured validation reports: every axiom checker returns one of these
//! instead of a bare boolean, so failures carry a witness.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub ok: bool,
    /// A witness of failure, usually a basis element on which the two sides
    /// of an identity differ.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report { checks: Vec::new() }
    }

    pub fn push_ok(&mut self, label: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            ok: true,
            witness: None,
        });
    }

    pub fn push_fail(&mut self, label: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            ok: false,
            witness: Some(witness.into()),
        });
    }

    pub fn push(&mut self, label: impl Into<String>, ok: bool, witness: Option<String>) {
        self.checks.push(Check {
            label: label.into(),
            ok,
            witness,
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match (&c.ok, &c.witness) {
                (true, _) => writeln!(f, "  ok   {}", c.label)?,
                (false, Some(w)) => writeln!(f, "  FAIL {} (witness: {w})", c.label)?,
                (false, None) => writeln!(f, "  FAIL {}", c.label)?,
            }
        }
        Ok(())
    }
}
