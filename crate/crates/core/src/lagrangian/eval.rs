use super::{BinaryOp, Expr, ExprKind, Function, Variable};
use crate::error::{Error, Result};
use crate::special;

/// Variable bindings. Unused variables may be left at zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub t: f64,
    pub x: f64,
    pub dx: f64,
}

impl Env {
    fn get(&self, v: Variable) -> f64 {
        match v {
            Variable::T => self.t,
            Variable::X => self.x,
            Variable::Dx => self.dx,
        }
    }

    fn with(mut self, v: Variable, value: f64) -> Self {
        match v {
            Variable::T => self.t = value,
            Variable::X => self.x = value,
            Variable::Dx => self.dx = value,
        }
        self
    }
}

fn eval_error(position: usize, message: impl Into<String>) -> Error {
    Error::Eval {
        position,
        message: message.into(),
    }
}

pub(super) fn evaluate(e: &Expr, env: &Env) -> Result<f64> {
    let pos = e.position;
    let value = match &e.kind {
        ExprKind::Number(v) => *v,
        ExprKind::Var(v) => env.get(*v),
        ExprKind::Pi => std::f64::consts::PI,
        ExprKind::Neg(inner) => -evaluate(inner, env)?,
        ExprKind::Binary(op, l, r) => {
            let a = evaluate(l, env)?;
            let b = evaluate(r, env)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b == 0.0 {
                        return Err(eval_error(pos, "division by zero"));
                    }
                    a / b
                }
                BinaryOp::Pow => {
                    if a < 0.0 && b.fract() != 0.0 {
                        return Err(eval_error(pos, format!("negative base {a} with non-integer exponent {b}")));
                    }
                    a.powf(b)
                }
            }
        }
        ExprKind::Call(func, arg) => {
            let v = evaluate(arg, env)?;
            match func {
                Function::Ln => {
                    if v <= 0.0 {
                        return Err(eval_error(pos, format!("ln of non-positive value {v}")));
                    }
                    v.ln()
                }
                Function::Sqrt => {
                    if v < 0.0 {
                        return Err(eval_error(pos, format!("sqrt of negative value {v}")));
                    }
                    v.sqrt()
                }
                Function::Exp => v.exp(),
                Function::Sin => v.sin(),
                Function::Cos => v.cos(),
                Function::Abs => v.abs(),
                Function::Gamma => special::gamma(v).map_err(|err| eval_error(pos, err.to_string()))?,
            }
        }
    };
    if !value.is_finite() {
        return Err(eval_error(pos, format!("non-finite result {value}")));
    }
    Ok(value)
}

/// Central-difference partial derivative of `e` in `var`, step `1e-6 (1 + |v|)`.
pub fn partial_derivative(e: &Expr, env: &Env, var: Variable) -> Result<f64> {
    if !e.uses(var) {
        return Ok(0.0);
    }
    let v = env.get(var);
    let step = 1e-6 * (1.0 + v.abs());
    let hi = evaluate(e, &env.with(var, v + step))?;
    let lo = evaluate(e, &env.with(var, v - step))?;
    Ok((hi - lo) / (2.0 * step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn lagrangian() -> Expr {
        Expr::parse("(Dx - sqrt(ln(t))/gamma(1.5))^2", &Variable::ALL).unwrap()
    }

    #[test]
    fn integrand_vanishes_on_solution() {
        let l = lagrangian();
        for t in [1.1f64, 1.5, 2.0] {
            let dx = t.ln().sqrt() / gamma(1.5).unwrap();
            let v = l.evaluate(&Env { t, x: t.ln(), dx }).unwrap();
            assert!(v.abs() < 1e-28);
        }
    }

    #[test]
    fn variable_lookup() {
        let e = Expr::parse("x", &Variable::ALL).unwrap();
        assert_eq!(e.evaluate(&Env { t: 0.0, x: 3.0, dx: 0.0 }).unwrap(), 3.0);
    }

    #[test]
    fn domain_errors_carry_positions() {
        let e = Expr::parse("1 + ln(t)", &Variable::ALL).unwrap();
        match e.evaluate(&Env::default()) {
            Err(Error::Eval { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        let cases = [("sqrt(x)", -1.0), ("1/x", 0.0), ("gamma(x)", -2.0), ("x^0.5", -4.0), ("exp(x)", 1e6)];
        for (src, x) in cases {
            let e = Expr::parse(src, &Variable::ALL).unwrap();
            assert!(e.evaluate(&Env { t: 1.0, x, dx: 0.0 }).is_err(), "{src}");
        }
    }

    #[test]
    fn repeated_evaluation_is_bit_identical() {
        let l = lagrangian();
        let env = Env { t: 1.37, x: 0.2, dx: 0.61 };
        let first = l.evaluate(&env).unwrap();
        for _ in 0..10 {
            assert_eq!(l.evaluate(&env).unwrap().to_bits(), first.to_bits());
        }
    }

    #[test]
    fn partials_of_quadratic() {
        let l = lagrangian();
        let env = Env { t: 1.5, x: 0.0, dx: 0.9 };
        let g = 1.5f64.ln().sqrt() / gamma(1.5).unwrap();
        let d = partial_derivative(&l, &env, Variable::Dx).unwrap();
        assert!((d - 2.0 * (0.9 - g)).abs() < 1e-9);
        assert_eq!(partial_derivative(&l, &env, Variable::X).unwrap(), 0.0);
    }
}
