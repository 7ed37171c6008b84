use super::lexer::{Token, TokenKind};
use super::{BinaryOp, Expr, ExprKind, Function, Variable};
use crate::error::{Error, Result};

/// Recursive-descent parser over a token list.
pub fn parse(tokens: &[Token], allowed: &[Variable]) -> Result<Expr> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        allowed,
    };
    let expr = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(parse_error(tok.position, format!("unexpected token {:?}", tok.lexeme)));
    }
    Ok(expr)
}

fn parse_error(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    allowed: &'a [Variable],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn end_position(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.position + t.lexeme.chars().count())
            .unwrap_or(0)
    }

    fn next(&mut self) -> Result<&'a Token> {
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| parse_error(self.end_position(), "unexpected end of expression"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn peek_operator(&self, ops: &[&str]) -> Option<&'a Token> {
        self.peek()
            .filter(|t| t.kind == TokenKind::Operator && ops.contains(&t.lexeme.as_str()))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(tok) = self.peek_operator(&["+", "-"]) {
            self.pos += 1;
            let op = if tok.lexeme == "+" { BinaryOp::Add } else { BinaryOp::Sub };
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs, tok.position);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(tok) = self.peek_operator(&["*", "/"]) {
            self.pos += 1;
            let op = if tok.lexeme == "*" { BinaryOp::Mul } else { BinaryOp::Div };
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs, tok.position);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(tok) = self.peek_operator(&["-"]) {
            self.pos += 1;
            let operand = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(operand)),
                position: tok.position,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(tok) = self.peek_operator(&["^"]) {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(binary(BinaryOp::Pow, base, exponent, tok.position));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.next()?;
        let position = tok.position;
        let kind = match tok.kind {
            TokenKind::Number => {
                let v: f64 = tok
                    .lexeme
                    .parse()
                    .map_err(|_| parse_error(position, format!("bad number {:?}", tok.lexeme)))?;
                if !v.is_finite() {
                    return Err(parse_error(position, format!("number {:?} is not finite", tok.lexeme)));
                }
                ExprKind::Number(v)
            }
            TokenKind::LeftParen => {
                let inner = self.expr()?;
                self.expect_right_paren(position)?;
                return Ok(inner);
            }
            TokenKind::Identifier => self.identifier(tok)?,
            _ => return Err(parse_error(position, format!("unexpected token {:?}", tok.lexeme))),
        };
        Ok(Expr { kind, position })
    }

    fn identifier(&mut self, tok: &Token) -> Result<ExprKind> {
        let name = tok.lexeme.as_str();
        if let Some(func) = Function::from_name(name) {
            match self.next() {
                Ok(t) if t.kind == TokenKind::LeftParen => {}
                Ok(t) => return Err(parse_error(t.position, format!("expected '(' after {name}"))),
                Err(_) => return Err(parse_error(self.end_position(), format!("expected '(' after {name}"))),
            }
            let arg = self.expr()?;
            self.expect_right_paren(tok.position)?;
            return Ok(ExprKind::Call(func, Box::new(arg)));
        }
        if name == "pi" {
            return Ok(ExprKind::Pi);
        }
        match Variable::from_name(name) {
            Some(v) if self.allowed.contains(&v) => Ok(ExprKind::Var(v)),
            Some(v) => Err(parse_error(
                tok.position,
                format!("variable {} is not allowed here", v.name()),
            )),
            None => Err(parse_error(tok.position, format!("unknown identifier {name:?}"))),
        }
    }

    fn expect_right_paren(&mut self, open: usize) -> Result<()> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::RightParen => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(parse_error(t.position, format!("expected ')' to close '(' at {open}"))),
            None => Err(parse_error(self.end_position(), format!("unclosed '(' at {open}"))),
        }
    }
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr, position: usize) -> Expr {
    Expr {
        kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
        position,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{tokenize, Env};
    use super::*;

    fn eval_const(src: &str) -> f64 {
        let e = parse(&tokenize(src).unwrap(), &Variable::ALL).unwrap();
        e.evaluate(&Env::default()).unwrap()
    }

    fn parse_err_pos(src: &str, allowed: &[Variable]) -> usize {
        match parse(&tokenize(src).unwrap(), allowed) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("expected parse error for {src:?}, got {other:?}"),
        }
    }

    #[test]
    fn precedence_corpus() {
        assert_eq!(eval_const("1+2*3"), 7.0);
        assert_eq!(eval_const("-2^2"), -4.0);
        assert_eq!(eval_const("(1+2)*3"), 9.0);
        assert_eq!(eval_const("2^3^2"), 512.0);
        assert_eq!(eval_const("8/4/2"), 1.0);
        assert_eq!(eval_const("10-4-3"), 3.0);
        assert_eq!(eval_const("2^-1"), 0.5);
        assert_eq!(eval_const("-3*-2"), 6.0);
    }

    #[test]
    fn lagrangian_parses() {
        let e = parse(
            &tokenize("(Dx - sqrt(ln(t))/gamma(1.5))^2").unwrap(),
            &[Variable::T, Variable::X, Variable::Dx],
        )
        .unwrap();
        assert!(e.uses(Variable::Dx) && e.uses(Variable::T));
    }

    #[test]
    fn error_positions() {
        let all = &Variable::ALL;
        assert_eq!(parse_err_pos("x + ", all), 3);
        assert_eq!(parse_err_pos("foo(1)", all), 0);
        assert_eq!(parse_err_pos("1 + y", all), 4);
        assert_eq!(parse_err_pos("(1 + 2", all), 6);
        assert_eq!(parse_err_pos("1 2", all), 2);
        assert_eq!(parse_err_pos("2x", all), 1);
        assert_eq!(parse_err_pos("ln 2", all), 3);
        assert_eq!(parse_err_pos("gamma(1, 2)", all), 7);
        assert_eq!(parse_err_pos("*2", all), 0);
        // exact solutions may only mention t
        assert_eq!(parse_err_pos("ln(t) + x", &[Variable::T]), 8);
    }
}
