//! Verification driver and exports.

pub mod checks;
pub mod report;

pub use checks::Context;
pub use report::{CheckResult, Scope, Status, VerificationReport};

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

impl Format {
    pub fn render(self, report: &VerificationReport) -> String {
        match self {
            Format::Json => report.to_json(),
            Format::Text => report.to_text(),
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

pub fn run_verification_suite(scope: Scope) -> VerificationReport {
    run_with(scope, &Context::new())
}

pub fn run_with(scope: Scope, ctx: &Context) -> VerificationReport {
    VerificationReport::new(scope, checks::run_checks(scope, ctx))
}

/// Writes `verification.<ext>` into `dir`, creating it if needed.
pub fn write_report(report: &VerificationReport, dir: &Path, format: Format) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("verification.{}", format.extension()));
    fs::write(&path, format.render(report))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn criteria_have_one_check_each() {
        let ids: Vec<&str> = checks::check_ids().into_iter().map(|c| c.0).collect();
        let unique: BTreeSet<&str> = ids.iter().copied().collect();
        assert_eq!(unique.len(), ids.len());
        for n in 1..=13 {
            assert_eq!(ids.iter().filter(|&&i| i == format!("ac{n:02}")).count(), 1);
        }
    }

    #[test]
    fn scopes_parse() {
        for s in ["all", "mi", "vii", "mii", "lattices", "plane", "fibrations"] {
            assert!(s.parse::<Scope>().is_ok());
        }
        assert!("everything".parse::<Scope>().is_err());
    }

    #[test]
    fn every_scope_selects_something() {
        for scope in [Scope::Mi, Scope::Vii, Scope::Mii, Scope::Lattices, Scope::Plane, Scope::Fibrations] {
            assert!(checks::check_ids().iter().any(|c| c.1.contains(&scope)));
        }
    }

    #[test]
    fn plane_scope_passes_and_is_deterministic() {
        let a = run_verification_suite(Scope::Plane);
        let b = run_verification_suite(Scope::Plane);
        assert!(a.all_passed());
        assert_eq!(a.exit_code(), 0);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn fault_injection_fails_lattice_checks() {
        let r = run_with(Scope::Lattices, &Context::with_corrupted_gram());
        assert_eq!(r.exit_code(), 1);
        let ac03 = r.check("ac03").unwrap();
        assert_eq!(ac03.status, Status::Fail);
        assert!(!ac03.witness.is_null());
        assert!(r.to_text().contains("witness"));
    }
}
