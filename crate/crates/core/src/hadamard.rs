//! Left Hadamard fractional derivatives of order `0 < α < 1`.
//!
//! Exact values come from two independent routes: the closed form for
//! log-powers `(ln(t/a))^β`, and adaptive quadrature of the integrated-by-parts
//! definition. The approximate operator replaces the fractional derivative by
//!
//! ```text
//! D̃x(t) = A L^{-α} x(t) + B L^{1-α} t x'(t) + Σ_{p=2..N} C_p L^{1-α-p} V_p(t),   L = ln(t/a)
//! V_p(t) = ∫_a^t (p-1) (ln(τ/a))^{p-2} x(τ)/τ dτ
//! ```
//!
//! with a truncation error majorised by
//!
//! ```text
//! Ẽ(x,t) = max_{τ∈[a,t]} |x'(τ) + τ x''(τ)| · exp((1-α)² + 1 - α) / (Γ(2-α)(1-α) N^{1-α}) · L^{1-α} (t - a).
//! ```

use crate::error::{Error, Result};
use crate::grid::{trapezoid, Grid};
use crate::lagrangian::{partial_derivative, Env, Variable};
use crate::quadrature;
use crate::special::{gamma, log_gamma_abs};
use crate::transcription::ProblemSpec;

/// Above this order the coefficient sums switch to log-domain Gamma ratios.
const LOG_DOMAIN_ORDER: usize = 20;

/// Segment budget for the quadrature oracle.
const QUADRATURE_SEGMENTS: usize = 4000;

/// Fractional order restricted to the open unit interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::argument(format!("fractional order must lie in (0, 1), got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The constants `A`, `B` and `C_2..C_N` of the expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    alpha: FractionalOrder,
    order: usize,
    a: f64,
    b: f64,
    c: Vec<f64>,
}

impl ExpansionCoefficients {
    pub fn new(alpha: FractionalOrder, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::argument(format!("expansion order must be at least 2, got {order}")));
        }
        let al = alpha.value();
        // ratio(p) = Γ(p + α - 1) / (p - 1)!
        let ratio = |p: usize| -> Result<f64> {
            if order > LOG_DOMAIN_ORDER {
                let (num, sign) = log_gamma_abs(p as f64 + al - 1.0)?;
                let (den, _) = log_gamma_abs(p as f64)?;
                Ok(sign * (num - den).exp())
            } else {
                Ok(gamma(p as f64 + al - 1.0)? / gamma(p as f64)?)
            }
        };

        let gamma_alpha = gamma(al)?;
        let gamma_alpha_m1 = gamma(al - 1.0)?;
        let c_den = gamma(-al)? * gamma(1.0 + al)?;

        let mut sum_a = 1.0;
        let mut sum_b = 1.0 + ratio(1)? / gamma_alpha_m1;
        let mut c = Vec::with_capacity(order - 1);
        for p in 2..=order {
            let r = ratio(p)?;
            sum_a += r / gamma_alpha;
            sum_b += r / (gamma_alpha_m1 * p as f64);
            c.push(r / c_den);
        }
        Ok(Self {
            alpha,
            order,
            a: sum_a / gamma(1.0 - al)?,
            b: sum_b / gamma(2.0 - al)?,
            c,
        })
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    /// Expansion order `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `C_p` for `p` in `2..=N`.
    pub fn c(&self, p: usize) -> f64 {
        self.c[p - 2]
    }

    pub fn c_all(&self) -> &[f64] {
        &self.c
    }
}

/// Hadamard derivative of `x(τ) = (ln(τ/a))^β` at `t`:
/// `Γ(β+1) / Γ(β+1-α) · (ln(t/a))^{β-α}`.
pub fn exact_derivative_logpower(beta: f64, alpha: FractionalOrder, a: f64, t: f64) -> Result<f64> {
    if !(a > 0.0 && t > a) {
        return Err(Error::Domain(format!("need t > a > 0, got a = {a}, t = {t}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("log-power exponent must be positive, got {beta}")));
    }
    let al = alpha.value();
    let l = ((t - a) / a).ln_1p();
    Ok(gamma(beta + 1.0)? / gamma(beta + 1.0 - al)? * l.powf(beta - al))
}

/// Hadamard derivative of a C¹ function by quadrature of
///
/// ```text
/// x(a) L^{-α} / Γ(1-α) + 1/Γ(1-α) ∫_a^t (ln(t/τ))^{-α} x'(τ) dτ.
/// ```
///
/// With `w = (ln(t/τ))^{1-α}` the weakly singular kernel is absorbed and the
/// integral becomes `1/(1-α) ∫_0^{L^{1-α}} τ x'(τ) dw`, `τ = t exp(-w^{1/(1-α)})`.
pub fn exact_derivative_quadrature<X, DX>(
    x: X,
    dx: DX,
    alpha: FractionalOrder,
    a: f64,
    t: f64,
    tol: f64,
) -> Result<f64>
where
    X: Fn(f64) -> f64,
    DX: Fn(f64) -> f64,
{
    if !(a > 0.0 && t > a) {
        return Err(Error::Domain(format!("need t > a > 0, got a = {a}, t = {t}")));
    }
    if !(tol >= 1e-10) {
        return Err(Error::argument(format!("quadrature tolerance must be at least 1e-10, got {tol}")));
    }
    let al = alpha.value();
    let g = gamma(1.0 - al)?;
    let l = ((t - a) / a).ln_1p();
    let exponent = 1.0 / (1.0 - al);
    let integrand = |w: f64| {
        let tau = t * (-w.powf(exponent)).exp();
        tau * dx(tau)
    };
    let upper = l.powf(1.0 - al);
    // The outer factor 1/((1-α)Γ(1-α)) scales the quadrature error too.
    let scale = 1.0 / ((1.0 - al) * g);
    let integral = quadrature::integrate(integrand, 0.0, upper, tol / scale, QUADRATURE_SEGMENTS)
        .map_err(|e| match e {
            Error::Accuracy { tol, estimate, value } => Error::Accuracy {
                tol: tol * scale,
                estimate: estimate * scale,
                value: value * scale,
            },
            other => other,
        })?;
    Ok(x(a) * l.powf(-al) / g + scale * integral)
}

/// `V_p` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrajectory {
    pub p: usize,
    pub values: Vec<f64>,
}

/// Per-cell weights of the cumulative moment rule:
/// `V_p[i+1] = V_p[i] + left[i] x[i] + right[i] x[i+1]`.
///
/// Each increment integrates `(p-1) s^{p-2} x̂(s)` exactly over
/// `[s_i, s_{i+1}]`, `s = ln(τ/a)`, where `x̂` is the interpolant of `x`
/// linear in `s`. The rule is exact when `x` is affine in `ln t` and keeps
/// its accuracy at the cells next to `t = a`, where the expansion multiplies
/// `V_p` by `L^{1-α-p}`.
#[derive(Debug, Clone)]
pub struct MomentRule {
    pub p: usize,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl MomentRule {
    pub fn new(grid: &Grid, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::argument(format!("moment order must be at least 2, got {p}")));
        }
        Ok(Self::from_log_ratios(&grid.log_ratios(), p))
    }

    pub(crate) fn from_log_ratios(s: &[f64], p: usize) -> Self {
        let n = s.len() - 1;
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        let pm1 = (p - 1) as i32;
        for w in s.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            let delta = s1 - s0;
            // ∫ (p-1) s^{p-2} ds and ∫ (p-1) s^{p-1} ds over the cell
            let i0 = s1.powi(pm1) - s0.powi(pm1);
            let i1 = (p - 1) as f64 / p as f64 * (s1.powi(pm1 + 1) - s0.powi(pm1 + 1));
            right.push((i1 - s0 * i0) / delta);
            left.push((s1 * i0 - i1) / delta);
        }
        Self { p, left, right }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(x.len());
        let mut acc = 0.0;
        v.push(acc);
        for i in 0..self.left.len() {
            acc += self.left[i] * x[i] + self.right[i] * x[i + 1];
            v.push(acc);
        }
        v
    }

    /// Adds `Rᵀ v̄` to `out`, where `R` is the linear map `x ↦ V_p`.
    pub(crate) fn apply_transpose_add(&self, v_bar: &[f64], out: &mut [f64]) {
        // V_p[m] depends on cell i for all m > i, so cell i sees the suffix sum.
        let mut suffix = 0.0;
        for i in (0..self.left.len()).rev() {
            suffix += v_bar[i + 1];
            out[i] += self.left[i] * suffix;
            out[i + 1] += self.right[i] * suffix;
        }
    }
}

/// `V_p` at every node from samples of `x`; the first value is exactly 0.
pub fn moment_values(x: &[f64], grid: &Grid, p: usize) -> Result<MomentTrajectory> {
    grid.check_len("x", x.len())?;
    let rule = MomentRule::new(grid, p)?;
    Ok(MomentTrajectory {
        p,
        values: rule.apply(x),
    })
}

/// Node-wise factors of the approximate derivative, precomputed for a grid.
#[derive(Debug, Clone)]
pub struct ExpansionOperator {
    coeffs: ExpansionCoefficients,
    /// A L^{-α}
    x_factor: Vec<f64>,
    /// B L^{1-α} t
    u_factor: Vec<f64>,
    /// C_p L^{1-α-p}, indexed [p-2][node]
    moment_factor: Vec<Vec<f64>>,
    rules: Vec<MomentRule>,
}

impl ExpansionOperator {
    pub fn new(coeffs: &ExpansionCoefficients, grid: &Grid) -> Self {
        let al = coeffs.alpha().value();
        let s = grid.log_ratios();
        let t = grid.nodes();
        let zero_first = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
            (0..s.len()).map(|i| if i == 0 { 0.0 } else { f(i) }).collect()
        };
        let x_factor = zero_first(&|i| coeffs.a() * s[i].powf(-al));
        let u_factor = zero_first(&|i| coeffs.b() * s[i].powf(1.0 - al) * t[i]);
        let moment_factor = (2..=coeffs.order())
            .map(|p| zero_first(&|i| coeffs.c(p) * s[i].powf(1.0 - al - p as f64)))
            .collect();
        let rules = (2..=coeffs.order())
            .map(|p| MomentRule::from_log_ratios(&s, p))
            .collect();
        Self {
            coeffs: coeffs.clone(),
            x_factor,
            u_factor,
            moment_factor,
            rules,
        }
    }

    pub fn coefficients(&self) -> &ExpansionCoefficients {
        &self.coeffs
    }

    pub fn rules(&self) -> &[MomentRule] {
        &self.rules
    }

    pub fn moments(&self, x: &[f64]) -> Vec<MomentTrajectory> {
        self.rules
            .iter()
            .map(|r| MomentTrajectory {
                p: r.p,
                values: r.apply(x),
            })
            .collect()
    }

    /// D̃ at every node; node 0 is set to 0.
    pub fn apply(&self, x: &[f64], u: &[f64], moments: &[MomentTrajectory]) -> Vec<f64> {
        let mut d: Vec<f64> = (0..x.len())
            .map(|i| self.x_factor[i] * x[i] + self.u_factor[i] * u[i])
            .collect();
        for (factor, m) in self.moment_factor.iter().zip(moments) {
            for i in 1..d.len() {
                d[i] += factor[i] * m.values[i];
            }
        }
        d[0] = 0.0;
        d
    }

    /// Pulls a sensitivity `d̄` on D̃ back onto `x` and `u` separately.
    /// Returns `(x̄, ū)`; the moment contribution is folded into `x̄`.
    pub(crate) fn pullback(&self, d_bar: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = d_bar.len();
        let mut x_bar: Vec<f64> = (0..n).map(|i| self.x_factor[i] * d_bar[i]).collect();
        let u_bar: Vec<f64> = (0..n).map(|i| self.u_factor[i] * d_bar[i]).collect();
        let mut v_bar = vec![0.0; n];
        for (factor, rule) in self.moment_factor.iter().zip(&self.rules) {
            for i in 0..n {
                v_bar[i] = factor[i] * d_bar[i];
            }
            rule.apply_transpose_add(&v_bar, &mut x_bar);
        }
        (x_bar, u_bar)
    }
}

/// D̃ at every grid node from samples of `x`, `x'` and the moments `V_2..V_N`.
///
/// The expansion is singular at `t = a`; node 0 is set to 0 and carries zero
/// quadrature weight downstream.
pub fn approximate_derivative(
    x: &[f64],
    u: &[f64],
    moments: &[MomentTrajectory],
    coeffs: &ExpansionCoefficients,
    grid: &Grid,
) -> Result<Vec<f64>> {
    grid.check_len("x", x.len())?;
    grid.check_len("u", u.len())?;
    let mut ordered = Vec::with_capacity(coeffs.order() - 1);
    for p in 2..=coeffs.order() {
        let m = moments
            .iter()
            .find(|m| m.p == p)
            .ok_or_else(|| Error::argument(format!("missing moment V_{p}")))?;
        grid.check_len("moment", m.values.len())?;
        ordered.push(m.clone());
    }
    Ok(ExpansionOperator::new(coeffs, grid).apply(x, u, &ordered))
}

/// Ẽ sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseErrorBound {
    pub values: Vec<f64>,
    /// Largest sampled |x'(τ) + τ x''(τ)| over the whole grid.
    pub curvature_max: f64,
}

/// The constant `exp((1-α)² + 1 - α) / (Γ(2-α)(1-α) N^{1-α})`.
pub fn bound_constant(alpha: FractionalOrder, order: usize) -> Result<f64> {
    let one_m = 1.0 - alpha.value();
    Ok((one_m * one_m + one_m).exp() / (gamma(2.0 - alpha.value())? * one_m * (order as f64).powf(one_m)))
}

/// Ẽ at each node, with the max over `τ ≤ t_i` taken over sampled nodes.
pub fn pointwise_error_bound(
    dx: &[f64],
    d2x: &[f64],
    alpha: FractionalOrder,
    order: usize,
    grid: &Grid,
) -> Result<PointwiseErrorBound> {
    grid.check_len("dx", dx.len())?;
    grid.check_len("d2x", d2x.len())?;
    let constant = bound_constant(alpha, order)?;
    let one_m = 1.0 - alpha.value();
    let a = grid.a();
    let s = grid.log_ratios();
    let mut running = 0.0_f64;
    let mut values = Vec::with_capacity(grid.len());
    for (i, &t) in grid.nodes().iter().enumerate() {
        running = running.max((dx[i] + t * d2x[i]).abs());
        values.push(if i == 0 {
            0.0
        } else {
            running * constant * s[i].powf(one_m) * (t - a)
        });
    }
    Ok(PointwiseErrorBound {
        values,
        curvature_max: running,
    })
}

/// Diagnostic estimate of `M ∫_a^b Ẽ(x,t) dt`, with
/// `M = max_i |∂L/∂Dx (t_i, x_i, D̃_i)|` over nodes past `a`.
pub fn functional_error_bound(
    x: &[f64],
    dx: &[f64],
    d2x: &[f64],
    problem: &ProblemSpec,
    grid: &Grid,
) -> Result<f64> {
    grid.check_len("x", x.len())?;
    let coeffs = ExpansionCoefficients::new(problem.alpha, problem.order)?;
    let op = ExpansionOperator::new(&coeffs, grid);
    grid.check_len("dx", dx.len())?;
    let d = op.apply(x, dx, &op.moments(x));

    let mut m = 0.0_f64;
    for (i, &t) in grid.nodes().iter().enumerate().skip(1) {
        let env = Env { t, x: x[i], dx: d[i] };
        let slope = partial_derivative(&problem.lagrangian, &env, Variable::Dx).map_err(|e| e.at_node(i, t))?;
        m = m.max(slope.abs());
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let bound = pointwise_error_bound(dx, d2x, problem.alpha, problem.order, grid)?;
    Ok(m * trapezoid(&bound.values, grid)?)
}
