use std::fmt;

/// Outcome of one named check. A failed check carries its witness, a
/// passed one an informational summary (possibly empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Ordered list of check outcomes; passes iff no check failed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn pass(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed: true,
            detail: detail.into(),
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed: false,
            detail: witness.into(),
        });
    }

    /// Records one pass line named `name` when `witnesses` is empty,
    /// otherwise one failure per `(suffix, witness)` pair.
    pub fn group(&mut self, name: &str, pass_detail: impl Into<String>, witnesses: Vec<(String, String)>) {
        if witnesses.is_empty() {
            self.pass(name, pass_detail);
        } else {
            for (suffix, w) in witnesses {
                self.fail(format!("{name}{suffix}"), w);
            }
        }
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{tag} {}", c.name)?;
            } else if c.passed {
                writeln!(f, "{tag} {} ({})", c.name, c.detail)?;
            } else {
                writeln!(f, "{tag} {}: witness {}", c.name, c.detail)?;
            }
        }
        Ok(())
    }
}
