use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Mi,
    Vii,
    Mii,
    Lattices,
    Plane,
    Fibrations,
}

impl FromStr for Scope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "all" => Scope::All,
            "mi" => Scope::Mi,
            "vii" => Scope::Vii,
            "mii" => Scope::Mii,
            "lattices" => Scope::Lattices,
            "plane" => Scope::Plane,
            "fibrations" => Scope::Fibrations,
            _ => return Err(format!("unknown scope {s:?}")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub group: String,
    pub description: String,
    /// The statement being reproduced, in a few words.
    pub anchor: String,
    pub status: Status,
    pub witness: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub scope: Scope,
    pub version: String,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(scope: Scope, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().filter(|c| c.status == Status::Pass).count();
        VerificationReport {
            scope,
            version: format!("enriques {}", env!("CARGO_PKG_VERSION")),
            summary: Summary {
                total: checks.len(),
                passed,
                failed: checks.len() - passed,
            },
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Checks grouped by topic, failures followed by their witness.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} verification, scope {:?}", self.version, self.scope);
        let mut groups: Vec<&str> = Vec::new();
        for c in &self.checks {
            if !groups.contains(&c.group.as_str()) {
                groups.push(&c.group);
            }
        }
        for g in groups {
            let _ = writeln!(s, "\n[{g}]");
            for c in self.checks.iter().filter(|c| c.group == g) {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                };
                let _ = writeln!(s, "  {tag} {:<28} {} ({})", c.id, c.description, c.anchor);
                if c.status == Status::Fail {
                    let _ = writeln!(s, "       witness: {}", c.witness);
                }
            }
        }
        let _ = writeln!(s, "\n{} checks, {} passed, {} failed", self.summary.total, self.summary.passed, self.summary.failed);
        s
    }
}
