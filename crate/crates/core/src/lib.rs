//! Direct numerical solution of variational problems whose Lagrangian depends
//! on a left Hadamard fractional derivative of order `0 < α < 1`.
//!
//! The fractional derivative is replaced by an integer-order expansion with
//! auxiliary moment states; the resulting optimal control problem is sampled
//! on a uniform grid, its dynamics are eliminated, and the interior samples of
//! the state are found with L-BFGS.
//!
//! - [`special`]: real Gamma function.
//! - [`hadamard`]: exact derivative oracles, expansion coefficients, the
//!   approximate derivative and its error bounds.
//! - [`lagrangian`]: expression language for `L(t, x, Dx)`.
//! - [`transcription`]: objective and gradient in the interior samples.
//! - [`solver`]: L-BFGS minimiser.
//! - [`config`], [`runner`]: JSON configs, solves, studies and CSV output.

pub mod config;
pub mod error;
pub mod grid;
pub mod hadamard;
pub mod lagrangian;
pub mod quadrature;
pub mod runner;
pub mod solver;
pub mod special;
pub mod transcription;

pub use config::{load_config, RunConfig};
pub use error::{Error, Result};
pub use grid::Grid;
pub use hadamard::{ExpansionCoefficients, FractionalOrder};
pub use lagrangian::{Env, Expr, Variable};
pub use runner::{convergence_study, run_solve, solve, SolveReport};
pub use solver::{minimize, Solution, SolverOptions};
pub use transcription::{ProblemSpec, Transcription};
