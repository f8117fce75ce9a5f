//! Report types and their renderings.
//!
//! The JSON rendering is the source of truth and is byte-stable for a fixed
//! config: field order follows struct order, maps are ordered, and no
//! timestamps or absolute paths are recorded. The CSV rendering flattens to
//! one row per (check, point).

use crate::dto::{EffectiveConfig, LabelDto};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// One verification check. `pass` is recomputable: pass == (max_residual <=
/// tolerance). Expected-negative checks (a defect that must be visible)
/// store threshold-minus-observed as the residual against tolerance 0, so
/// the invariant holds for them too; `values` always carries the raw
/// per-point measurements.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub points_tested: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, tolerance: f64, values: Vec<f64>) -> CheckRecord {
        let max_residual = values.iter().fold(0.0f64, |a, v| a.max(*v));
        CheckRecord {
            name: String::from(name),
            points_tested: values.len(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            values,
            note: None,
        }
    }

    /// An expected-negative check: the measurements must exceed `floor`.
    /// The recorded residual is floor - aggregate, against tolerance 0.
    pub fn must_exceed(name: &str, floor: f64, aggregate: f64, values: Vec<f64>) -> CheckRecord {
        let residual = floor - aggregate;
        CheckRecord {
            name: String::from(name),
            points_tested: values.len(),
            max_residual: residual,
            tolerance: 0.0,
            pass: residual <= 0.0,
            values,
            note: Some(String::from("expected-visible defect: residual is floor minus observed")),
        }
    }

    /// A check that could not be evaluated; never passes.
    pub fn failed(name: &str, tolerance: f64, reason: &str) -> CheckRecord {
        CheckRecord {
            name: String::from(name),
            points_tested: 0,
            max_residual: f64::INFINITY,
            tolerance,
            pass: false,
            values: Vec::new(),
            note: Some(String::from(reason)),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Environment {
    pub seed: u64,
    pub version: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Summary {
    pub ricci_type: bool,
    pub locally_symmetric: bool,
    /// Absent when the generator is outside the classification catalog.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<LabelDto>,
    /// Mean fitted proportionality constant across sampled points.
    pub kappa_mean: f64,
    pub all_passed: bool,
    pub failed_checks: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerificationReport {
    pub environment: Environment,
    pub config: EffectiveConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.all_passed
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }

    /// One row per (check, point); check-level aggregates are repeated on
    /// each row so every row is self-contained.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,point,value,max_residual,tolerance,pass\n");
        for check in &self.checks {
            if check.values.is_empty() {
                let _ = writeln!(
                    out,
                    "{},,,{:e},{:e},{}",
                    check.name, check.max_residual, check.tolerance, check.pass
                );
            }
            for (i, v) in check.values.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{:e},{:e},{:e},{}",
                    check.name, i, v, check.max_residual, check.tolerance, check.pass
                );
            }
        }
        out
    }

    /// Terminal rendering: one pass/fail line per check, then the verdicts.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} at level {} | samples={} seed={}",
            self.config.generator.describe(),
            self.config.mu0,
            self.config.samples,
            self.environment.seed
        );
        for check in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {:<28} points={:<4} max_residual={:<12.3e} tolerance={:.3e}",
                if check.pass { "PASS" } else { "FAIL" },
                check.name,
                check.points_tested,
                check.max_residual,
                check.tolerance
            );
        }
        let _ = writeln!(
            out,
            "ricci_type={} locally_symmetric={} kappa_mean={:.6} classification={}",
            self.summary.ricci_type,
            self.summary.locally_symmetric,
            self.summary.kappa_mean,
            self.summary
                .classification
                .as_ref()
                .map(|l| l.quotient.clone())
                .unwrap_or_else(|| String::from("(outside catalog)"))
        );
        let _ = writeln!(
            out,
            "{}",
            if self.summary.all_passed {
                format!("verdict: all {} checks passed", self.checks.len())
            } else {
                format!("verdict: FAILED ({})", self.summary.failed_checks.join(", "))
            }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dto::GeneratorSpec;
    use std::collections::BTreeMap;

    fn sample_report() -> VerificationReport {
        let checks = vec![
            CheckRecord::new("alpha", 1e-10, vec![1e-12, 3e-11]),
            CheckRecord::must_exceed("beta", 1e-3, 2e-2, vec![2e-2]),
        ];
        let all = checks.iter().all(|c| c.pass);
        VerificationReport {
            environment: Environment {
                seed: 42,
                version: String::from("0.1.0"),
            },
            config: EffectiveConfig {
                generator: GeneratorSpec::Case2 { n: 1 },
                mu0: -2.0,
                samples: 2,
                seed: 42,
                tolerances: BTreeMap::new(),
                h: 1e-3,
                workers: 1,
                expect_locally_symmetric: None,
            },
            checks,
            summary: Summary {
                ricci_type: true,
                locally_symmetric: true,
                classification: None,
                kappa_mean: -3.0,
                all_passed: all,
                failed_checks: vec![],
            },
        }
    }

    #[test]
    fn pass_flag_is_recomputable() {
        for check in &sample_report().checks {
            assert_eq!(check.pass, check.max_residual <= check.tolerance);
        }
    }

    #[test]
    fn csv_has_one_row_per_check_point() {
        let report = sample_report();
        let csv = report.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "check,point,value,max_residual,tolerance,pass");
        let expected: usize = report.checks.iter().map(|c| c.values.len().max(1)).sum();
        assert_eq!(rows.len(), 1 + expected);
        assert!(rows[1].starts_with("alpha,0,"));
        assert!(rows[3].starts_with("beta,0,"));
    }

    #[test]
    fn json_round_trips() {
        let report = sample_report();
        let text = report.to_json();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.checks.len(), report.checks.len());
        assert_eq!(back.summary.all_passed, report.summary.all_passed);
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&report).unwrap());
    }

    #[test]
    fn failed_records_never_pass() {
        let rec = CheckRecord::failed("gamma", 1e-9, "unreachable");
        assert!(!rec.pass);
        assert!(rec.max_residual.is_infinite());
    }
}
