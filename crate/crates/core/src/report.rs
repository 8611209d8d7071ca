//! Pass/fail records shared by the verification helpers.

/// One named check with a human-readable detail line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl NamedCheck {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// True when every check passed.
pub fn all_passed(checks: &[NamedCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}
