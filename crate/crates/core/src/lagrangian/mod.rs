//! Expression language for Lagrangians `L(t, x, Dx)` and exact solutions `x(t)`.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?            right-associative
//! atom  := number | 'pi' | variable | function '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `t`, `x` and `Dx`; functions are `ln`, `exp`, `sqrt`, `sin`,
//! `cos`, `abs` and `gamma`. Unary minus binds looser than `^`, so `-2^2`
//! is `-4`. There is no implicit multiplication.

mod eval;
mod lexer;
mod parser;

use std::fmt;

pub use eval::{partial_derivative, Env};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    T,
    X,
    Dx,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::T, Variable::X, Variable::Dx];

    pub fn name(self) -> &'static str {
        match self {
            Variable::T => "t",
            Variable::X => "x",
            Variable::Dx => "Dx",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Ln,
    Exp,
    Sqrt,
    Sin,
    Cos,
    Abs,
    Gamma,
}

impl Function {
    const ALL: [Function; 7] = [
        Function::Ln,
        Function::Exp,
        Function::Sqrt,
        Function::Sin,
        Function::Cos,
        Function::Abs,
        Function::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Ln => "ln",
            Function::Exp => "exp",
            Function::Sqrt => "sqrt",
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Abs => "abs",
            Function::Gamma => "gamma",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
            BinaryOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Var(Variable),
    Pi,
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Function, Box<Expr>),
}

/// Expression tree node. Equality is structural and ignores source positions.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub position: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

impl Expr {
    /// Tokenizes and parses `source`, accepting only the listed variables.
    pub fn parse(source: &str, allowed: &[Variable]) -> Result<Self> {
        parse(&tokenize(source)?, allowed)
    }

    pub fn evaluate(&self, env: &Env) -> Result<f64> {
        eval::evaluate(self, env)
    }

    pub fn uses(&self, var: Variable) -> bool {
        match &self.kind {
            ExprKind::Var(v) => *v == var,
            ExprKind::Number(_) | ExprKind::Pi => false,
            ExprKind::Neg(e) | ExprKind::Call(_, e) => e.uses(var),
            ExprKind::Binary(_, l, r) => l.uses(var) || r.uses(var),
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Neg(_) => NEG_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(v) => write!(f, "{v}"),
            ExprKind::Var(v) => f.write_str(v.name()),
            ExprKind::Pi => f.write_str("pi"),
            ExprKind::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, e.precedence() < NEG_PRECEDENCE)
            }
            ExprKind::Call(func, e) => write!(f, "{}({e})", func.name()),
            ExprKind::Binary(BinaryOp::Pow, l, r) => {
                write_operand(f, l, l.precedence() <= BinaryOp::Pow.precedence())?;
                f.write_str("^")?;
                write_operand(f, r, r.precedence() < NEG_PRECEDENCE)
            }
            ExprKind::Binary(op, l, r) => {
                write_operand(f, l, l.precedence() < op.precedence())?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r, r.precedence() <= op.precedence())
            }
        }
    }
}
