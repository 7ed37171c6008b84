//! Limited-memory BFGS with Armijo backtracking.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::transcription::ProblemSpec;

const ARMIJO: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MIN_STEP: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop once the gradient max-norm is at or below this.
    pub grad_tol: f64,
    pub max_iterations: usize,
    /// Number of correction pairs kept.
    pub memory: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            max_iterations: 5000,
            memory: 10,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return Err(Error::argument(format!("grad_tol must be positive, got {}", self.grad_tol)));
        }
        if self.max_iterations == 0 || self.memory == 0 {
            return Err(Error::argument("max_iterations and memory must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    /// Backtracking shrank the step below 1e-16 along steepest descent.
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub point: Vec<f64>,
    pub value: f64,
    /// Max-norm of the gradient at `point`.
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Objective value at every accepted iterate, starting with `x0`.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Two-loop recursion: returns `-H g`.
fn search_direction(history: &VecDeque<Pair>, grad: &[f64]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for pair in history.iter().rev() {
        let a = pair.rho * dot(&pair.s, &q);
        for (qi, yi) in q.iter_mut().zip(&pair.y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some(last) = history.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (pair, a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = pair.rho * dot(&pair.y, &q);
        for (qi, si) in q.iter_mut().zip(&pair.s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimises `f` from `x0`. `g` must be the gradient of `f`.
///
/// A trial point where `f` or `g` fails is rejected like an Armijo failure,
/// so domain boundaries of the objective act as barriers. Errors at `x0`
/// itself are returned.
pub fn minimize<F, G>(mut f: F, mut g: G, x0: &[f64], opts: &SolverOptions) -> Result<Solution>
where
    F: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    opts.validate()?;
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut gx = g(&x)?;
    let mut history: VecDeque<Pair> = VecDeque::with_capacity(opts.memory);
    let mut values = vec![fx];
    let mut iterations = 0;

    let finish = |x: Vec<f64>, fx: f64, gx: &[f64], iterations, termination, values| {
        let gradient_norm = max_norm(gx);
        Solution {
            point: x,
            value: fx,
            gradient_norm,
            iterations,
            converged: termination == Termination::GradientTolerance,
            termination,
            history: values,
        }
    };

    loop {
        if max_norm(&gx) <= opts.grad_tol {
            return Ok(finish(x, fx, &gx, iterations, Termination::GradientTolerance, values));
        }
        if iterations >= opts.max_iterations {
            return Ok(finish(x, fx, &gx, iterations, Termination::MaxIterations, values));
        }

        let mut direction = search_direction(&history, &gx);
        let mut slope = dot(&direction, &gx);
        if !(slope < 0.0) {
            history.clear();
            direction = gx.iter().map(|v| -v).collect();
            slope = dot(&direction, &gx);
        }

        let accepted = loop {
            match line_search(&mut f, &mut g, &x, fx, &direction, slope) {
                Some(step) => break Some(step),
                None if !history.is_empty() => {
                    // Retry once along steepest descent with a fresh memory.
                    history.clear();
                    direction = gx.iter().map(|v| -v).collect();
                    slope = dot(&direction, &gx);
                }
                None => break None,
            }
        };
        let Some((x_new, f_new, g_new)) = accepted else {
            return Ok(finish(x, fx, &gx, iterations, Termination::StepUnderflow, values));
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back(Pair { s, y, rho: 1.0 / sy });
        }
        x = x_new;
        fx = f_new;
        gx = g_new;
        values.push(fx);
        iterations += 1;
    }
}

fn line_search<F, G>(
    f: &mut F,
    g: &mut G,
    x: &[f64],
    fx: f64,
    direction: &[f64],
    slope: f64,
) -> Option<(Vec<f64>, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut step = 1.0;
    let mut trial = vec![0.0; x.len()];
    while step >= MIN_STEP {
        for ((t, xi), di) in trial.iter_mut().zip(x).zip(direction) {
            *t = xi + step * di;
        }
        if let Ok(ft) = f(&trial) {
            if ft.is_finite() && ft <= fx + ARMIJO * step * slope {
                if let Ok(gt) = g(&trial) {
                    if gt.iter().all(|v| v.is_finite()) {
                        return Some((trial, ft, gt));
                    }
                }
            }
        }
        step *= BACKTRACK;
    }
    None
}

/// Straight line from `(a, x_a)` to `(b, x_b)` sampled at the interior nodes.
pub fn initial_guess(spec: &ProblemSpec, grid: &Grid) -> Vec<f64> {
    let nodes = grid.nodes();
    let slope = (spec.x_b - spec.x_a) / (spec.b - spec.a);
    nodes[1..nodes.len() - 1]
        .iter()
        .map(|&t| spec.x_a + slope * (t - spec.a))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{Expr, Variable};

    fn quadratic(x: &[f64]) -> Result<f64> {
        Ok(x.iter().map(|v| (v - 1.0).powi(2)).sum())
    }

    fn quadratic_grad(x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter().map(|v| 2.0 * (v - 1.0)).collect())
    }

    fn rosenbrock(p: &[f64]) -> Result<f64> {
        Ok(100.0 * (p[1] - p[0] * p[0]).powi(2) + (1.0 - p[0]).powi(2))
    }

    fn rosenbrock_grad(p: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![
            -400.0 * p[0] * (p[1] - p[0] * p[0]) - 2.0 * (1.0 - p[0]),
            200.0 * (p[1] - p[0] * p[0]),
        ])
    }

    fn non_increasing(values: &[f64]) -> bool {
        values.windows(2).all(|w| w[1] <= w[0])
    }

    #[test]
    fn convex_quadratic() {
        let opts = SolverOptions { grad_tol: 1e-10, ..Default::default() };
        let sol = minimize(quadratic, quadratic_grad, &[0.0; 20], &opts).unwrap();
        assert!(sol.converged);
        assert!(sol.point.iter().all(|v| (v - 1.0).abs() <= 1e-8));
        assert!(non_increasing(&sol.history));
    }

    #[test]
    fn rosenbrock_valley() {
        let sol = minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &SolverOptions::default()).unwrap();
        assert!(sol.converged, "{sol:?}");
        assert!((sol.point[0] - 1.0).abs() <= 1e-4 && (sol.point[1] - 1.0).abs() <= 1e-4);
        assert!(non_increasing(&sol.history));
    }

    #[test]
    fn one_dimensional() {
        let opts = SolverOptions { grad_tol: 1e-12, ..Default::default() };
        let sol = minimize(
            |x| Ok((x[0] - 3.0).powi(2)),
            |x| Ok(vec![2.0 * (x[0] - 3.0)]),
            &[0.0],
            &opts,
        )
        .unwrap();
        assert!((sol.point[0] - 3.0).abs() <= 1e-10);
        assert!(sol.value <= 1e-16);
    }

    #[test]
    fn value_matches_reevaluation() {
        let sol = minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &SolverOptions::default()).unwrap();
        let again = rosenbrock(&sol.point).unwrap();
        assert!((sol.value - again).abs() <= 1e-12 * again.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn scale_invariant_minimiser() {
        let base = SolverOptions { grad_tol: 1e-9, ..Default::default() };
        let points: Vec<Vec<f64>> = [1e-3, 1.0, 1e3]
            .iter()
            .map(|&c| {
                let opts = SolverOptions { grad_tol: base.grad_tol * c, ..base.clone() };
                let x0: Vec<f64> = (0..8).map(|i| i as f64 * 0.3 - 1.0).collect();
                minimize(
                    |x| Ok(c * quadratic(x)?),
                    |x| Ok(quadratic_grad(x)?.into_iter().map(|v| c * v).collect()),
                    &x0,
                    &opts,
                )
                .unwrap()
                .point
            })
            .collect();
        for p in &points[1..] {
            for (a, b) in p.iter().zip(&points[0]) {
                assert!((a - b).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn deterministic() {
        let run = || minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &SolverOptions::default()).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert!(a.point.iter().zip(&b.point).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn domain_errors_shrink_step() {
        // -ln(x) + x has its minimum at x = 1 and is undefined for x <= 0.
        let f = |x: &[f64]| -> Result<f64> {
            if x[0] <= 0.0 {
                return Err(Error::Domain("ln".into()));
            }
            Ok(x[0] - x[0].ln())
        };
        let g = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![1.0 - 1.0 / x[0]]) };
        let sol = minimize(f, g, &[0.05], &SolverOptions::default()).unwrap();
        assert!(sol.converged);
        assert!((sol.point[0] - 1.0).abs() < 1e-5);
        assert!(non_increasing(&sol.history));
    }

    #[test]
    fn underflow_reports_non_convergence() {
        // Gradient that lies: the "descent" direction always increases f.
        let sol = minimize(
            |x| Ok(x[0] * x[0]),
            |x| Ok(vec![-2.0 * x[0] - 1.0]),
            &[1.0],
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.termination, Termination::StepUnderflow);
    }

    #[test]
    fn iteration_budget() {
        let opts = SolverOptions { max_iterations: 3, grad_tol: 1e-14, ..Default::default() };
        let sol = minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(sol.iterations, 3);
        assert_eq!(sol.termination, Termination::MaxIterations);
        assert!(!sol.converged);
    }

    #[test]
    fn linear_initial_guess() {
        let l = Expr::parse("x", &Variable::ALL).unwrap();
        let ln2 = 2f64.ln();
        let spec = ProblemSpec::new(1.0, 2.0, 0.5, 3, 0.0, ln2, l.clone(), None).unwrap();
        let g = Grid::new(1.0, 2.0, 5).unwrap();
        let guess = initial_guess(&spec, &g);
        let want = [ln2 / 4.0, ln2 / 2.0, 3.0 * ln2 / 4.0];
        for (a, b) in guess.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let spec = ProblemSpec::new(1.0, 2.0, 0.5, 3, 1.7, 1.7, l.clone(), None).unwrap();
        assert!(initial_guess(&spec, &g).iter().all(|&v| (v - 1.7).abs() < 1e-15));
        let spec = ProblemSpec::new(1.0, 2.0, 0.5, 3, 0.2, 0.8, l, None).unwrap();
        let g3 = Grid::new(1.0, 2.0, 3).unwrap();
        assert_eq!(initial_guess(&spec, &g3), vec![0.5]);
    }
}
