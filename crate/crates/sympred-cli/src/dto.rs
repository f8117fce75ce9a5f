//! Serde-facing types: the generator specification, the run configuration,
//! and the JSON projection of classification labels.
//!
//! Config parsing is strict (`deny_unknown_fields`) so a typo fails loudly
//! instead of silently leaving a default in place — the same policy the
//! tolerance table applies to override names.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use sympred_core::classify::ClassificationLabel;
use sympred_core::generator::Generator;
use sympred_core::linalg::Matrix;
use sympred_core::tol::Tolerances;
use sympred_core::Error as CoreError;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// A^2 = -Id with p positive signs among the n+1 invariant planes.
    Case1 { n: usize, p: usize },
    /// A^2 = +Id with split eigenspaces.
    Case2 { n: usize },
    /// A^2 = 0 of rank p with q positive pairing signs.
    Case3 { n: usize, p: usize, q: usize },
    /// The 4-dimensional generator with eigenvalues +-a +- ib.
    Remark { a: f64, b: f64 },
    /// A raw matrix, validated for algebra membership at build time.
    Explicit { matrix: Vec<Vec<f64>> },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generator, CoreError> {
        match self {
            GeneratorSpec::Case1 { n, p } => Generator::make_case_minus_id(*n, *p),
            GeneratorSpec::Case2 { n } => Generator::make_case_plus_id(*n),
            GeneratorSpec::Case3 { n, p, q } => Generator::make_case_nilpotent(*n, *p, *q),
            GeneratorSpec::Remark { a, b } => Generator::make_remark(*a, *b),
            GeneratorSpec::Explicit { matrix } => {
                let rows = matrix.len();
                if rows == 0 || matrix.iter().any(|r| r.len() != rows) {
                    return Err(CoreError::InvalidInput(String::from(
                        "explicit generator matrix must be square",
                    )));
                }
                let m = Matrix::from_fn(rows, rows, |i, j| matrix[i][j]);
                Generator::from_explicit(m)
            }
        }
    }

    /// Short human-readable descriptor for report headers.
    pub fn describe(&self) -> String {
        match self {
            GeneratorSpec::Case1 { n, p } => format!("case1(n={n}, p={p})"),
            GeneratorSpec::Case2 { n } => format!("case2(n={n})"),
            GeneratorSpec::Case3 { n, p, q } => format!("case3(n={n}, p={p}, q={q})"),
            GeneratorSpec::Remark { a, b } => format!("remark(a={a}, b={b})"),
            GeneratorSpec::Explicit { matrix } => format!("explicit({}x{})", matrix.len(), matrix.len()),
        }
    }
}

/// The verification commands a config file may request.
pub const KNOWN_COMMANDS: &[&str] = &["classify", "verify", "report", "curvature", "oracle"];

/// On-disk run configuration. Every field except the generator is optional;
/// resolution against CLI flags and defaults happens in `EffectiveConfig`.
#[derive(Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub generator: Option<GeneratorSpec>,
    pub mu0: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub commands: Option<Vec<String>>,
    pub h: Option<f64>,
    pub workers: Option<usize>,
    pub expect_locally_symmetric: Option<bool>,
}

/// Fully resolved configuration: what a run actually used. Serialized into
/// every report so the output is self-describing and re-runnable.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct EffectiveConfig {
    pub generator: GeneratorSpec,
    pub mu0: f64,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub h: f64,
    pub workers: usize,
    pub expect_locally_symmetric: Option<bool>,
}

impl EffectiveConfig {
    /// Validate and build the core objects. Invalid values are reported as
    /// configuration errors (exit code 2), not check failures.
    pub fn validate(&self) -> Result<(Generator, Tolerances), String> {
        if self.mu0 == 0.0 || !self.mu0.is_finite() {
            return Err(format!("mu0 must be finite and nonzero, got {}", self.mu0));
        }
        if self.samples < 1 {
            return Err(String::from("samples must be at least 1"));
        }
        if self.workers < 1 {
            return Err(String::from("workers must be at least 1"));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(format!("step h must be positive, got {}", self.h));
        }
        let mut tols = Tolerances::default();
        for (name, value) in &self.tolerances {
            tols.set(name, *value).map_err(|e| e.to_string())?;
        }
        let gen = self.generator.build().map_err(|e| e.to_string())?;
        Ok((gen, tols))
    }
}

/// JSON projection of a classification label.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct LabelDto {
    pub quadric: String,
    pub quotient: String,
    pub group: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl From<ClassificationLabel> for LabelDto {
    fn from(label: ClassificationLabel) -> Self {
        LabelDto {
            quadric: label.quadric,
            quotient: label.quotient,
            group: label.group.to_string(),
            note: label.note,
        }
    }
}
