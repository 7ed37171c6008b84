//! Reduction of the fractional variational problem to an unconstrained
//! finite-dimensional objective.
//!
//! The fractional derivative is replaced by the expansion D̃, turning the
//! problem into an optimal control problem with states `x`, `V_2..V_N` and
//! control `u = x'`. The dynamics are eliminated: `u` comes from finite
//! differences of the sampled `x`, each `V_p` from its cumulative moment rule,
//! so the only unknowns are the interior samples of `x`.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hadamard::{ExpansionCoefficients, ExpansionOperator, FractionalOrder, MomentTrajectory};
use crate::lagrangian::{partial_derivative, Env, Expr, Variable};

pub const BOUNDARY_TOL: f64 = 1e-9;

/// Minimise `∫_a^b L(t, x, D^α x) dt` subject to `x(a) = x_a`, `x(b) = x_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: FractionalOrder,
    /// Expansion order N.
    pub order: usize,
    pub x_a: f64,
    pub x_b: f64,
    /// Expression over `t`, `x`, `Dx`.
    pub lagrangian: Expr,
    /// Expression over `t` only.
    pub exact_solution: Option<Expr>,
}

impl ProblemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        alpha: f64,
        order: usize,
        x_a: f64,
        x_b: f64,
        lagrangian: Expr,
        exact_solution: Option<Expr>,
    ) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::argument(format!("a must be positive, got {a}")));
        }
        if !(b.is_finite() && b > a) {
            return Err(Error::argument(format!("b must exceed a, got a = {a}, b = {b}")));
        }
        if order < 2 {
            return Err(Error::argument(format!("N must be at least 2, got {order}")));
        }
        if !(x_a.is_finite() && x_b.is_finite()) {
            return Err(Error::argument("boundary values must be finite"));
        }
        let alpha = FractionalOrder::new(alpha)?;
        if let Some(exact) = &exact_solution {
            if exact.uses(Variable::X) || exact.uses(Variable::Dx) {
                return Err(Error::argument("exact solution may only depend on t"));
            }
            for (t, target) in [(a, x_a), (b, x_b)] {
                let v = exact.evaluate(&Env { t, ..Env::default() })?;
                if (v - target).abs() > BOUNDARY_TOL {
                    return Err(Error::argument(format!(
                        "exact solution gives {v} at t = {t}, boundary value is {target}"
                    )));
                }
            }
        }
        Ok(Self {
            a,
            b,
            alpha,
            order,
            x_a,
            x_b,
            lagrangian,
            exact_solution,
        })
    }

    pub fn coefficients(&self) -> Result<ExpansionCoefficients> {
        ExpansionCoefficients::new(self.alpha, self.order)
    }

    pub fn grid(&self, k: usize) -> Result<Grid> {
        Grid::new(self.a, self.b, k)
    }
}

/// Sampled state, control, approximate derivative and moments.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTrajectory {
    pub grid: Grid,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub d: Vec<f64>,
    pub moments: Vec<MomentTrajectory>,
}

/// Second-order finite differences: central inside, one-sided at both ends.
pub fn derivative_samples(x: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len("x", x.len())?;
    let k = x.len();
    let inv = 1.0 / (2.0 * grid.h());
    let mut u = Vec::with_capacity(k);
    u.push((-3.0 * x[0] + 4.0 * x[1] - x[2]) * inv);
    for i in 1..k - 1 {
        u.push((x[i + 1] - x[i - 1]) * inv);
    }
    u.push((3.0 * x[k - 1] - 4.0 * x[k - 2] + x[k - 3]) * inv);
    Ok(u)
}

/// Adds `Dᵀ ū` to `out`, `D` being the stencil of [`derivative_samples`].
fn derivative_transpose_add(u_bar: &[f64], h: f64, out: &mut [f64]) {
    let k = u_bar.len();
    let inv = 1.0 / (2.0 * h);
    out[0] -= 3.0 * u_bar[0] * inv;
    out[1] += 4.0 * u_bar[0] * inv;
    out[2] -= u_bar[0] * inv;
    for i in 1..k - 1 {
        out[i + 1] += u_bar[i] * inv;
        out[i - 1] -= u_bar[i] * inv;
    }
    out[k - 1] += 3.0 * u_bar[k - 1] * inv;
    out[k - 2] -= 4.0 * u_bar[k - 1] * inv;
    out[k - 3] += u_bar[k - 1] * inv;
}

/// A problem bound to a grid, with the expansion factors precomputed.
#[derive(Debug, Clone)]
pub struct Transcription {
    spec: ProblemSpec,
    grid: Grid,
    op: ExpansionOperator,
    weights: Vec<f64>,
}

impl Transcription {
    pub fn new(spec: ProblemSpec, grid: Grid) -> Result<Self> {
        let coeffs = spec.coefficients()?;
        Self::with_coefficients(spec, grid, &coeffs)
    }

    pub fn with_coefficients(spec: ProblemSpec, grid: Grid, coeffs: &ExpansionCoefficients) -> Result<Self> {
        if coeffs.alpha() != spec.alpha || coeffs.order() != spec.order {
            return Err(Error::argument(format!(
                "coefficients are for (alpha = {}, N = {}), problem has (alpha = {}, N = {})",
                coeffs.alpha().value(),
                coeffs.order(),
                spec.alpha.value(),
                spec.order
            )));
        }
        if grid.a() != spec.a || grid.b() != spec.b {
            return Err(Error::argument("grid interval does not match the problem interval"));
        }
        let op = ExpansionOperator::new(coeffs, &grid);
        let weights = grid.objective_weights();
        Ok(Self { spec, grid, op, weights })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn operator(&self) -> &ExpansionOperator {
        &self.op
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of unknowns, `k - 2`.
    pub fn dimension(&self) -> usize {
        self.grid.len() - 2
    }

    /// Interior samples with the boundary values pinned at both ends.
    pub fn full_state(&self, interior: &[f64]) -> Result<Vec<f64>> {
        if interior.len() != self.dimension() {
            return Err(Error::argument(format!(
                "expected {} interior values, got {}",
                self.dimension(),
                interior.len()
            )));
        }
        let mut x = Vec::with_capacity(self.grid.len());
        x.push(self.spec.x_a);
        x.extend_from_slice(interior);
        x.push(self.spec.x_b);
        Ok(x)
    }

    pub fn assemble(&self, interior: &[f64]) -> Result<DiscreteTrajectory> {
        let x = self.full_state(interior)?;
        self.assemble_full(x)
    }

    pub(crate) fn assemble_full(&self, x: Vec<f64>) -> Result<DiscreteTrajectory> {
        let u = derivative_samples(&x, &self.grid)?;
        let moments = self.op.moments(&x);
        let d = self.op.apply(&x, &u, &moments);
        Ok(DiscreteTrajectory {
            grid: self.grid.clone(),
            x,
            u,
            d,
            moments,
        })
    }

    fn env(&self, traj: &DiscreteTrajectory, i: usize) -> Env {
        Env {
            t: self.grid.nodes()[i],
            x: traj.x[i],
            dx: traj.d[i],
        }
    }

    /// Trapezoid sum of `L(t_i, x_i, D̃_i)`, node 0 weighted zero.
    pub fn objective(&self, interior: &[f64]) -> Result<f64> {
        let traj = self.assemble(interior)?;
        self.objective_of(&traj)
    }

    pub fn objective_of(&self, traj: &DiscreteTrajectory) -> Result<f64> {
        let mut sum = 0.0;
        for i in 1..self.grid.len() {
            let l = self
                .spec
                .lagrangian
                .evaluate(&self.env(traj, i))
                .map_err(|e| e.at_node(i, self.grid.nodes()[i]))?;
            sum += self.weights[i] * l;
        }
        Ok(sum)
    }

    /// Gradient of [`Self::objective`] in the interior samples.
    ///
    /// `x ↦ D̃` is linear, so the gradient is `w ⊙ ∂L/∂x + Jᵀ (w ⊙ ∂L/∂Dx)`
    /// with `J` the chain stencil → moment rules → expansion factors. The
    /// partials of `L` are central differences on the expression.
    pub fn objective_gradient(&self, interior: &[f64]) -> Result<Vec<f64>> {
        let traj = self.assemble(interior)?;
        let k = self.grid.len();
        let lagrangian = &self.spec.lagrangian;
        let mut x_bar = vec![0.0; k];
        let mut d_bar = vec![0.0; k];
        for i in 1..k {
            let env = self.env(&traj, i);
            let t = self.grid.nodes()[i];
            let lx = partial_derivative(lagrangian, &env, Variable::X).map_err(|e| e.at_node(i, t))?;
            let ld = partial_derivative(lagrangian, &env, Variable::Dx).map_err(|e| e.at_node(i, t))?;
            x_bar[i] = self.weights[i] * lx;
            d_bar[i] = self.weights[i] * ld;
        }
        let (xb, ub) = self.op.pullback(&d_bar);
        for (acc, v) in x_bar.iter_mut().zip(&xb) {
            *acc += v;
        }
        derivative_transpose_add(&ub, self.grid.h(), &mut x_bar);
        Ok(x_bar[1..k - 1].to_vec())
    }

    /// Per-coordinate central differences of the objective, step
    /// `1e-6 (1 + |x_i|)`. O(k) objective evaluations.
    pub fn finite_difference_gradient(&self, interior: &[f64]) -> Result<Vec<f64>> {
        let mut probe = interior.to_vec();
        let mut grad = Vec::with_capacity(interior.len());
        for i in 0..interior.len() {
            let step = 1e-6 * (1.0 + interior[i].abs());
            probe[i] = interior[i] + step;
            let hi = self.objective(&probe)?;
            probe[i] = interior[i] - step;
            let lo = self.objective(&probe)?;
            probe[i] = interior[i];
            grad.push((hi - lo) / (2.0 * step));
        }
        Ok(grad)
    }
}

pub fn assemble(
    interior: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    coeffs: &ExpansionCoefficients,
) -> Result<DiscreteTrajectory> {
    Transcription::with_coefficients(spec.clone(), grid.clone(), coeffs)?.assemble(interior)
}

pub fn objective(interior: &[f64], spec: &ProblemSpec, grid: &Grid, coeffs: &ExpansionCoefficients) -> Result<f64> {
    Transcription::with_coefficients(spec.clone(), grid.clone(), coeffs)?.objective(interior)
}

pub fn objective_gradient(
    interior: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    coeffs: &ExpansionCoefficients,
) -> Result<Vec<f64>> {
    Transcription::with_coefficients(spec.clone(), grid.clone(), coeffs)?.objective_gradient(interior)
}
