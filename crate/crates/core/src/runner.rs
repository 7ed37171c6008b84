//! End-to-end solves, error metrics and CSV output.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::hadamard::functional_error_bound;
use crate::lagrangian::Env;
use crate::solver::{initial_guess, minimize, Termination};
use crate::transcription::{derivative_samples, Transcription};

pub const SOLUTION_HEADER: &str = "t,x_numeric,x_exact,abs_err";
pub const STUDY_HEADER: &str = "k,N,E_k,J_approx,iterations,converged";

/// Exit statuses of the command-line tool.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const EVALUATION: i32 = 4;
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err.root() {
        Error::Config { .. } | Error::Argument(_) | Error::Lex { .. } | Error::Parse { .. } => exit_code::CONFIG,
        Error::Io(_) => exit_code::IO,
        _ => exit_code::EVALUATION,
    }
}

/// 17 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub t: f64,
    pub x_numeric: f64,
    pub x_exact: Option<f64>,
    pub abs_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub config: RunConfig,
    /// J_approx at the numerical solution.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    pub gradient_norm: f64,
    /// Accepted objective values, first entry at the initial guess.
    pub history: Vec<f64>,
    pub rows: Vec<ReportRow>,
    /// Max node-wise |x_numeric - x_exact|.
    pub e_k: Option<f64>,
    /// M ∫ Ẽ dt at the numerical solution.
    pub bound_diagnostic: Option<f64>,
    pub elapsed_seconds: f64,
}

impl SolveReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 96);
        out.push_str(SOLUTION_HEADER);
        out.push('\n');
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_number(r.t),
                format_number(r.x_numeric),
                opt(r.x_exact),
                opt(r.abs_err)
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let p = &self.config.problem;
        let mut s = String::new();
        let _ = writeln!(s, "alpha          {}", p.alpha.value());
        let _ = writeln!(s, "N              {}", p.order);
        let _ = writeln!(s, "k              {}", self.config.k);
        let _ = writeln!(s, "J_approx       {:e}", self.value);
        let _ = writeln!(s, "iterations     {}", self.iterations);
        let _ = writeln!(s, "converged      {} ({:?})", self.converged, self.termination);
        let _ = writeln!(s, "gradient norm  {:e}", self.gradient_norm);
        if let Some(e) = self.e_k {
            let _ = writeln!(s, "E_k            {e:.9}");
        }
        if let Some(b) = self.bound_diagnostic {
            let _ = writeln!(s, "bound M*int(E) {b:e}");
        }
        let _ = writeln!(s, "elapsed        {:.3} s", self.elapsed_seconds);
        s
    }
}

/// Discretises, minimises from the linear guess and evaluates the result.
/// Writes nothing.
pub fn solve(config: &RunConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let spec = &config.problem;
    let grid = spec.grid(config.k)?;
    let tr = Transcription::new(spec.clone(), grid.clone())?;
    let x0 = initial_guess(spec, &grid);
    let sol = minimize(
        |x| tr.objective(x),
        |x| tr.objective_gradient(x),
        &x0,
        &config.solver,
    )?;

    let x = tr.full_state(&sol.point)?;
    let mut rows = Vec::with_capacity(x.len());
    for (i, (&t, &xn)) in grid.nodes().iter().zip(&x).enumerate() {
        let exact = spec
            .exact_solution
            .as_ref()
            .map(|e| e.evaluate(&Env { t, ..Env::default() }).map_err(|err| err.at_node(i, t)))
            .transpose()?;
        rows.push(ReportRow {
            t,
            x_numeric: xn,
            x_exact: exact,
            abs_err: exact.map(|v| (xn - v).abs()),
        });
    }
    let e_k = spec
        .exact_solution
        .as_ref()
        .map(|_| rows.iter().filter_map(|r| r.abs_err).fold(0.0, f64::max));

    let u = derivative_samples(&x, &grid)?;
    let d2x = derivative_samples(&u, &grid)?;
    let bound_diagnostic = functional_error_bound(&x, &u, &d2x, spec, &grid).ok();

    Ok(SolveReport {
        config: config.clone(),
        value: sol.value,
        iterations: sol.iterations,
        converged: sol.converged,
        termination: sol.termination,
        gradient_norm: sol.gradient_norm,
        history: sol.history,
        rows,
        e_k,
        bound_diagnostic,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// [`solve`], then write the solution CSV to the configured output path.
pub fn run_solve(config: &RunConfig) -> Result<SolveReport> {
    let report = solve(config)?;
    report.write_csv(&config.output_path)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub k: usize,
    pub order: usize,
    pub e_k: Option<f64>,
    pub value: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the run failed outright.
    pub error: Option<String>,
}

/// Solves every `(k, N)` pair, k-major. Failed runs are kept as rows with
/// `converged = false`.
pub fn convergence_study(config: &RunConfig, k_list: &[usize], n_list: &[usize]) -> Result<Vec<StudyRow>> {
    if k_list.is_empty() {
        return Err(Error::config("k-list", "must not be empty"));
    }
    if n_list.is_empty() {
        return Err(Error::config("n-list", "must not be empty"));
    }
    if config.problem.exact_solution.is_none() {
        return Err(Error::config("exact_solution", "required for a convergence study"));
    }
    let mut rows = Vec::with_capacity(k_list.len() * n_list.len());
    for &k in k_list {
        for &n in n_list {
            let cell = config.with_overrides(Some(k), Some(n), None)?;
            let row = match solve(&cell) {
                Ok(rep) => StudyRow {
                    k,
                    order: n,
                    e_k: rep.e_k,
                    value: Some(rep.value),
                    iterations: rep.iterations,
                    converged: rep.converged,
                    error: None,
                },
                Err(e) => StudyRow {
                    k,
                    order: n,
                    e_k: None,
                    value: None,
                    iterations: 0,
                    converged: false,
                    error: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from(STUDY_HEADER);
    out.push('\n');
    for r in rows {
        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k,
            r.order,
            opt(r.e_k),
            opt(r.value),
            r.iterations,
            r.converged
        );
    }
    out
}
