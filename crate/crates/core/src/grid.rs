use crate::error::{Error, Result};

/// Uniform grid `t_i = a + i h` with `k` nodes; the last node is exactly `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(a: f64, b: f64, k: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::argument(format!("left endpoint must be positive, got a = {a}")));
        }
        if !(b.is_finite() && b > a) {
            return Err(Error::argument(format!("need b > a, got a = {a}, b = {b}")));
        }
        if k < 3 {
            return Err(Error::argument(format!("need at least 3 nodes, got k = {k}")));
        }
        let h = (b - a) / (k - 1) as f64;
        let mut nodes: Vec<f64> = (0..k).map(|i| a + i as f64 * h).collect();
        nodes[k - 1] = b;
        Ok(Self { a, b, h, nodes })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `ln(t_i / a)` at every node, exactly zero at the first.
    pub fn log_ratios(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&t| ((t - self.a) / self.a).ln_1p())
            .collect()
    }

    /// Trapezoid weights with the first node zeroed.
    pub fn objective_weights(&self) -> Vec<f64> {
        let k = self.len();
        let mut w = vec![self.h; k];
        w[0] = 0.0;
        w[k - 1] = 0.5 * self.h;
        w
    }

    pub(crate) fn check_len(&self, name: &str, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::argument(format!(
                "{name} has {len} samples but the grid has {} nodes",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Composite trapezoid rule over the full grid.
pub fn trapezoid(values: &[f64], grid: &Grid) -> Result<f64> {
    grid.check_len("integrand", values.len())?;
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    Ok(grid.h() * (inner + 0.5 * (values[0] + values[values.len() - 1])))
}
