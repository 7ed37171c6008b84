mod common;

use hadamard_fvp::hadamard::{moment_values, MomentRule};
use hadamard_fvp::transcription::derivative_samples;
use hadamard_fvp::{Expr, Grid, ProblemSpec, Transcription, Variable};

use common::Rng;

fn problem(lagrangian: &str) -> ProblemSpec {
    let l = Expr::parse(lagrangian, &Variable::ALL).unwrap();
    ProblemSpec::new(1.0, 2.0, 0.5, 3, 0.0, 2f64.ln(), l, None).unwrap()
}

fn log_interior(g: &Grid) -> Vec<f64> {
    let n = g.nodes();
    n[1..n.len() - 1].iter().map(|t| t.ln()).collect()
}

#[test]
fn moments_follow_their_cumulative_rule() {
    let g = Grid::new(1.0, 2.0, 64).unwrap();
    let tr = Transcription::new(problem("Dx^2"), g.clone()).unwrap();
    let mut rng = Rng::new(7);
    let interior: Vec<f64> = (0..62).map(|_| rng.uniform(-2.0, 2.0)).collect();
    let traj = tr.assemble(&interior).unwrap();
    assert_eq!(traj.x[0], 0.0);
    assert_eq!(traj.x[63], 2f64.ln());
    for (rule, m) in tr.operator().rules().iter().zip(&traj.moments) {
        assert_eq!(rule.p, m.p);
        assert_eq!(m.values[0], 0.0);
        for i in 0..63 {
            let inc = rule.left[i] * traj.x[i] + rule.right[i] * traj.x[i + 1];
            assert_eq!(m.values[i + 1], m.values[i] + inc);
        }
    }
}

#[test]
fn moment_increments_agree_with_trapezoid_to_third_order() {
    // For smooth x the per-cell increment differs from h/2 (f_i + f_{i+1}),
    // f the moment right-hand side, by O(h³).
    let worst = |k: usize, p: usize| {
        let g = Grid::new(1.0, 2.0, k).unwrap();
        let x: Vec<f64> = g.nodes().iter().map(|t| t * t - 0.5 * t).collect();
        let rule = MomentRule::new(&g, p).unwrap();
        let f: Vec<f64> = g
            .nodes()
            .iter()
            .zip(&x)
            .map(|(t, xv)| (p - 1) as f64 * t.ln().powi(p as i32 - 2) * xv / t)
            .collect();
        (0..k - 1)
            .map(|i| {
                let prod = rule.left[i] * x[i] + rule.right[i] * x[i + 1];
                let trap = 0.5 * g.h() * (f[i] + f[i + 1]);
                (prod - trap).abs()
            })
            .fold(0.0, f64::max)
    };
    for p in [2, 3, 4] {
        let ratio = worst(41, p) / worst(81, p);
        assert!(ratio > 6.0, "p = {p}: ratio {ratio}");
    }
}

#[test]
fn moment_rule_exact_on_log_affine_states() {
    let g = Grid::new(1.5, 4.0, 37).unwrap();
    let x: Vec<f64> = g.nodes().iter().map(|t| 2.0 - 3.0 * (t / 1.5).ln()).collect();
    for p in 2..=9 {
        let m = moment_values(&x, &g, p).unwrap();
        for (v, t) in m.values.iter().zip(g.nodes()) {
            let s = (t / 1.5).ln();
            let exact = 2.0 * s.powi(p as i32 - 1) - 3.0 * (p - 1) as f64 / p as f64 * s.powi(p as i32);
            assert!((v - exact).abs() < 1e-13, "p = {p}");
        }
    }
}

#[test]
fn boundary_conditions_hold_for_random_interiors() {
    let g = Grid::new(1.0, 2.0, 25).unwrap();
    let tr = Transcription::new(problem("x^2 + Dx^2"), g).unwrap();
    let mut rng = Rng::new(11);
    for _ in 0..20 {
        let interior: Vec<f64> = (0..23).map(|_| rng.uniform(-5.0, 5.0)).collect();
        let traj = tr.assemble(&interior).unwrap();
        assert_eq!(traj.x[0], 0.0);
        assert_eq!(traj.x[24], 2f64.ln());
        assert_eq!(&traj.x[1..24], interior.as_slice());
        assert_eq!(traj.u, derivative_samples(&traj.x, tr.grid()).unwrap());
    }
}

#[test]
fn objective_quadrature_order() {
    // L = Dx² at x = ln t: D̃ = √(ln t)/Γ(1.5), so the k → ∞ limit is
    // (2 ln 2 - 1) / Γ(1.5)².
    let g15 = hadamard_fvp::special::gamma(1.5).unwrap();
    let limit = (2.0 * 2f64.ln() - 1.0) / (g15 * g15);
    let err = |k: usize| {
        let g = Grid::new(1.0, 2.0, k).unwrap();
        let tr = Transcription::new(problem("Dx^2"), g.clone()).unwrap();
        (tr.objective(&log_interior(&g)).unwrap() - limit).abs()
    };
    let (e100, e400) = (err(100), err(400));
    let order = (e100 / e400).ln() / (399.0f64 / 99.0).ln();
    assert!(order >= 1.8, "observed order {order} ({e100:e}, {e400:e})");
}

#[test]
fn gradient_is_order_independent() {
    let g = Grid::new(1.0, 2.0, 30).unwrap();
    let tr = Transcription::new(problem("(Dx - sqrt(ln(t))/gamma(1.5))^2 + 0.1 * x^2"), g).unwrap();
    let interior: Vec<f64> = (0..28).map(|i| 0.02 * i as f64).collect();
    let a = tr.objective_gradient(&interior).unwrap();
    let b = tr.objective_gradient(&interior).unwrap();
    assert_eq!(a, b);
}
