//! JSON run configuration.
//!
//! ```json
//! {
//!   "a": 1.0, "b": 2.0, "alpha": 0.5, "N": 3, "k": 100,
//!   "x_a": 0.0, "x_b": 0.6931471805599453,
//!   "lagrangian": "(Dx - sqrt(ln(t))/gamma(1.5))^2",
//!   "exact_solution": "ln(t)",
//!   "grad_tol": 1e-10, "max_iterations": 20000,
//!   "output_path": "solution.csv"
//! }
//! ```
//!
//! `exact_solution`, `grad_tol`, `max_iterations` and `output_path` are
//! optional. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lagrangian::{Expr, Variable};
use crate::solver::SolverOptions;
use crate::transcription::{ProblemSpec, BOUNDARY_TOL};

pub const DEFAULT_OUTPUT: &str = "solution.csv";

/// The on-disk schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub order: usize,
    pub k: usize,
    pub x_a: f64,
    pub x_b: f64,
    pub lagrangian: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_solution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub problem: ProblemSpec,
    pub k: usize,
    pub solver: SolverOptions,
    pub output_path: PathBuf,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // serde names the offending field between backticks
        let key = msg.split('`').nth(1).unwrap_or("<document>").to_string();
        Error::config(key, msg)
    })?;
    RunConfig::from_raw(raw)
}

fn check(ok: bool, key: &str, constraint: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(key, constraint))
    }
}

impl RunConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        check(raw.a.is_finite() && raw.a > 0.0, "a", "must be a positive number")?;
        check(raw.b.is_finite() && raw.b > raw.a, "b", "must be greater than a")?;
        check(raw.alpha > 0.0 && raw.alpha < 1.0, "alpha", "must lie in (0, 1)")?;
        check(raw.order >= 2, "N", "must be at least 2")?;
        check(raw.k >= 3, "k", "must be at least 3")?;
        check(raw.x_a.is_finite(), "x_a", "must be finite")?;
        check(raw.x_b.is_finite(), "x_b", "must be finite")?;

        let defaults = SolverOptions::default();
        let solver = SolverOptions {
            grad_tol: raw.grad_tol.unwrap_or(defaults.grad_tol),
            max_iterations: raw.max_iterations.unwrap_or(defaults.max_iterations),
            ..defaults
        };
        check(solver.grad_tol > 0.0 && solver.grad_tol.is_finite(), "grad_tol", "must be positive")?;
        check(solver.max_iterations > 0, "max_iterations", "must be positive")?;

        let lagrangian = Expr::parse(&raw.lagrangian, &Variable::ALL)
            .map_err(|e| Error::config("lagrangian", e.to_string()))?;
        let exact = raw
            .exact_solution
            .as_deref()
            .map(|src| Expr::parse(src, &[Variable::T]).map_err(|e| Error::config("exact_solution", e.to_string())))
            .transpose()?;
        let problem = ProblemSpec::new(raw.a, raw.b, raw.alpha, raw.order, raw.x_a, raw.x_b, lagrangian, exact)
            .map_err(|e| {
                Error::config(
                    "exact_solution",
                    format!("{e} (boundary values must match within {BOUNDARY_TOL:e})"),
                )
            })?;
        let output_path = PathBuf::from(raw.output_path.as_deref().unwrap_or(DEFAULT_OUTPUT));
        Ok(Self {
            k: raw.k,
            raw,
            problem,
            solver,
            output_path,
        })
    }

    /// Applies command-line overrides and re-validates.
    pub fn with_overrides(&self, k: Option<usize>, order: Option<usize>, out: Option<&Path>) -> Result<Self> {
        let mut raw = self.raw.clone();
        if let Some(k) = k {
            raw.k = k;
        }
        if let Some(n) = order {
            raw.order = n;
        }
        if let Some(out) = out {
            raw.output_path = Some(out.display().to_string());
        }
        Self::from_raw(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "a": 1, "b": 2, "alpha": 0.5, "N": 3, "k": 100,
        "x_a": 0, "x_b": 0.6931471806,
        "lagrangian": "(Dx - sqrt(ln(t))/gamma(1.5))^2",
        "exact_solution": "ln(t)"
    }"#;

    fn with(key: &str, value: &str) -> String {
        let mut v: serde_json::Value = serde_json::from_str(EXAMPLE).unwrap();
        v[key] = serde_json::from_str(value).unwrap();
        v.to_string()
    }

    fn error_key(text: &str) -> String {
        match parse_config(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn example_is_valid() {
        let c = parse_config(EXAMPLE).unwrap();
        assert_eq!(c.k, 100);
        assert_eq!(c.problem.order, 3);
        assert_eq!(c.solver, SolverOptions::default());
        assert_eq!(c.output_path, PathBuf::from(DEFAULT_OUTPUT));
    }

    #[test]
    fn range_errors_name_the_key() {
        assert_eq!(error_key(&with("alpha", "1.5")), "alpha");
        assert_eq!(error_key(&with("k", "2")), "k");
        assert_eq!(error_key(&with("N", "1")), "N");
        assert_eq!(error_key(&with("a", "-1")), "a");
        assert_eq!(error_key(&with("b", "0.5")), "b");
        assert_eq!(error_key(&with("grad_tol", "0")), "grad_tol");
        assert_eq!(error_key(&with("lagrangian", "\"Dx +\"")), "lagrangian");
        assert_eq!(error_key(&with("exact_solution", "\"ln(t) + x\"")), "exact_solution");
        assert_eq!(error_key(&with("exact_solution", "\"ln(t) + 1\"")), "exact_solution");
    }

    #[test]
    fn schema_errors() {
        assert_eq!(error_key(&with("alhpa", "0.5")), "alhpa");
        assert_eq!(error_key(&with("k", "\"ten\"")), "<document>");
        let missing = EXAMPLE.replace("\"a\": 1,", "");
        assert_eq!(error_key(&missing), "a");
        assert!(matches!(parse_config("not json"), Err(Error::Config { .. })));
    }

    #[test]
    fn overrides_revalidate() {
        let c = parse_config(EXAMPLE).unwrap();
        let o = c.with_overrides(Some(250), Some(4), Some(Path::new("x.csv"))).unwrap();
        assert_eq!((o.k, o.problem.order), (250, 4));
        assert_eq!(o.output_path, PathBuf::from("x.csv"));
        assert!(c.with_overrides(Some(2), None, None).is_err());
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_config("/nonexistent/cfg.json"), Err(Error::Config { .. })));
    }
}
