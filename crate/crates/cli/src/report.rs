//! Report schema and atomic file emission.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub version: u32,
    pub checks: Vec<CheckEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    pub name: String,
    pub field: String,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub tolerance: f64,
    pub max_violation: f64,
    pub pass: bool,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves_file: Option<String>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Structural rules beyond what deserialization enforces.
    pub fn validate(&self) -> Result<(), String> {
        if self.version != REPORT_VERSION {
            return Err(format!("unsupported report version {}", self.version));
        }
        for c in &self.checks {
            if c.name.is_empty() || c.field.is_empty() {
                return Err("check entries need a name and a field".into());
            }
            if !(1..=3).contains(&c.dim) || c.n < 2 {
                return Err(format!(
                    "check `{}` has dim {} and N {}",
                    c.name, c.dim, c.n
                ));
            }
            if !c.tolerance.is_finite() || !c.max_violation.is_finite() {
                return Err(format!("check `{}` has a non-finite number", c.name));
            }
            if c.pass != (c.max_violation <= c.tolerance) {
                return Err(format!("check `{}` has an inconsistent verdict", c.name));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let report: Report = serde_json::from_str(text).map_err(|e| e.to_string())?;
        report.validate()?;
        Ok(report)
    }
}

/// `s,lhs,rhs` rows, 17 significant digits.
pub fn curves_csv(abscissa: &[f64], lhs: &[f64], rhs: &[f64]) -> String {
    let mut out = String::from("s,lhs,rhs\n");
    for ((s, l), r) in abscissa.iter().zip(lhs).zip(rhs) {
        writeln!(out, "{s:.16e},{l:.16e},{r:.16e}").expect("writing to a String");
    }
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        CliError::Runtime(format!("cannot create a file in {}: {e}", dir.display()))
    })?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// File-name-safe form of a check name: `norm[lp:2]` becomes `norm_lp_2`.
pub fn file_stem(name: &str) -> String {
    let mut stem: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect();
    while stem.ends_with('_') {
        stem.pop();
    }
    stem
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(max_violation: f64, tolerance: f64) -> CheckEntry {
        CheckEntry {
            name: "uno".into(),
            field: "gaussian_bump".into(),
            dim: 1,
            n: 1024,
            m: 4096,
            tolerance,
            max_violation,
            pass: max_violation <= tolerance,
            runtime_ms: 12,
            curves_file: None,
        }
    }

    #[test]
    fn json_round_trip() {
        let mut with_curves = entry(0.1 + 0.2, 1.0 / 3.0);
        with_curves.curves_file = Some("out/00_uno.csv".into());
        let r = Report {
            version: REPORT_VERSION,
            checks: vec![entry(-6.98e-5, 0.048_765_432_1), with_curves],
        };
        let text = r.to_json();
        assert!(!text.contains("curves_file\": null"));
        assert_eq!(Report::from_json(&text).unwrap(), r);
    }

    #[test]
    fn schema_violations_are_rejected() {
        let bad_version = r#"{"version":2,"checks":[]}"#;
        assert!(Report::from_json(bad_version).is_err());
        let extra = r#"{"version":1,"checks":[],"extra":0}"#;
        assert!(Report::from_json(extra).is_err());
        let mut r = Report {
            version: 1,
            checks: vec![entry(0.5, 0.1)],
        };
        r.checks[0].pass = true;
        assert!(Report::from_json(&r.to_json()).is_err());
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let csv = curves_csv(&[0.5], &[1.0 / 3.0], &[2.0]);
        let row = csv.lines().nth(1).unwrap();
        let fields: Vec<f64> = row.split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(fields, vec![0.5, 1.0 / 3.0, 2.0]);
        assert!(row.starts_with("5.0000000000000000e-1,"));
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("norm[lp:2]"), "norm_lp_2");
        assert_eq!(file_stem("norm[orlicz:expsq]"), "norm_orlicz_expsq");
        assert_eq!(file_stem("uno"), "uno");
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
