use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Identifier,
    Operator,
    LeftParen,
    RightParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 0-based character offset into the source.
    pub position: usize,
}

impl Token {
    fn new(kind: TokenKind, lexeme: &str, position: usize) -> Self {
        Self {
            kind,
            lexeme: lexeme.to_string(),
            position,
        }
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = source.chars().collect();
    if chars.iter().all(|c| c.is_whitespace()) {
        return Err(Error::Lex {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                tokens.push(Token::new(TokenKind::Operator, &c.to_string(), start));
                i += 1;
            }
            '(' => {
                tokens.push(Token::new(TokenKind::LeftParen, "(", start));
                i += 1;
            }
            ')' => {
                tokens.push(Token::new(TokenKind::RightParen, ")", start));
                i += 1;
            }
            ',' => {
                tokens.push(Token::new(TokenKind::Comma, ",", start));
                i += 1;
            }
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                i = scan_number(&chars, i)?;
                let lexeme: String = chars[start..i].iter().collect();
                tokens.push(Token::new(TokenKind::Number, &lexeme, start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let lexeme: String = chars[start..i].iter().collect();
                tokens.push(Token::new(TokenKind::Identifier, &lexeme, start));
            }
            other => {
                return Err(Error::Lex {
                    position: start,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(tokens)
}

/// Longest decimal literal starting at `i`: digits, optional fraction,
/// optional exponent. Returns the end offset.
fn scan_number(chars: &[char], mut i: usize) -> Result<usize> {
    let digits = |chars: &[char], mut j: usize| {
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    i = digits(chars, i);
    if i < chars.len() && chars[i] == '.' {
        i = digits(chars, i + 1);
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        if j < chars.len() && chars[j].is_ascii_digit() {
            i = digits(chars, j);
        } else {
            return Err(Error::Lex {
                position: i,
                message: "malformed exponent".into(),
            });
        }
    }
    Ok(i)
}
