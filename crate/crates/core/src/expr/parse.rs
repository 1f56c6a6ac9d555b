//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' unsigned-int)? | '-' factor
//! atom   := 'z' | 'i' | number | ident '(' expr ')' | '(' expr ')'
//! ident  := exp | sin | cos
//! ```
//!
//! `^` binds tighter than unary minus, so `-z^2` is `-(z^2)`.

use thiserror::Error;

use super::{ComplexValue, ExprTree, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("numeric literal out of range at byte {offset}")]
    NumberOutOfRange { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NumberOutOfRange { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Integer(u32),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(x) => format!("number `{x}`"),
            Token::Integer(n) => format!("number `{n}`"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_whitespace(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Returns the next token and its starting byte offset.
    fn next(&mut self) -> Result<(Token, usize), ParseError> {
        self.skip_whitespace();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(ch) = rest.chars().next() else {
            return Ok((Token::End, start));
        };
        let single = match ch {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((tok, start));
        }
        if ch.is_ascii_digit() || ch == '.' {
            return self.number(start);
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let len = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok((Token::Ident(rest[..len].to_string()), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            expected: vec!["an expression or operator".into()],
            found: format!("character `{ch}`"),
        })
    }

    fn number(&mut self, start: usize) -> Result<(Token, usize), ParseError> {
        let bytes = self.src.as_bytes();
        let mut end = start;
        let digits = |from: usize| {
            let mut i = from;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        end = digits(end);
        let int_digits = end - start;
        let mut integral = true;
        if end < bytes.len() && bytes[end] == b'.' {
            integral = false;
            let frac_end = digits(end + 1);
            if int_digits == 0 && frac_end == end + 1 {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["digit".into()],
                    found: "`.`".into(),
                });
            }
            end = frac_end;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            let exp_end = digits(k);
            if exp_end > k {
                integral = false;
                end = exp_end;
            }
        }
        let text = &self.src[start..end];
        self.pos = end;
        if integral {
            if let Ok(n) = text.parse::<u32>() {
                return Ok((Token::Integer(n), start));
            }
        }
        let value: f64 = text
            .parse()
            .map_err(|_| ParseError::NumberOutOfRange { offset: start })?;
        if !value.is_finite() {
            return Err(ParseError::NumberOutOfRange { offset: start });
        }
        Ok((Token::Number(value), start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: Token,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (current, offset) = lexer.next()?;
        Ok(Self {
            lexer,
            current,
            offset,
        })
    }

    fn bump(&mut self) -> Result<Token, ParseError> {
        let (next, offset) = self.lexer.next()?;
        self.offset = offset;
        Ok(std::mem::replace(&mut self.current, next))
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.current.describe(),
        }
    }

    fn expect(&mut self, tok: Token, name: &str) -> Result<(), ParseError> {
        if self.current == tok {
            self.bump()?;
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> Result<ExprTree, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.current {
                Token::Plus => {
                    self.bump()?;
                    lhs = ExprTree::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump()?;
                    lhs = ExprTree::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprTree, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.current {
                Token::Star => {
                    self.bump()?;
                    lhs = ExprTree::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.bump()?;
                    lhs = ExprTree::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprTree, ParseError> {
        if self.current == Token::Minus {
            self.bump()?;
            return Ok(ExprTree::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.current != Token::Caret {
            return Ok(base);
        }
        self.bump()?;
        match self.current {
            Token::Integer(n) => {
                self.bump()?;
                Ok(ExprTree::Pow(Box::new(base), n))
            }
            _ => Err(self.unexpected(&["unsigned integer exponent"])),
        }
    }

    fn atom(&mut self) -> Result<ExprTree, ParseError> {
        let offset = self.offset;
        match self.current.clone() {
            Token::Number(x) => {
                self.bump()?;
                Ok(ExprTree::real(x))
            }
            Token::Integer(n) => {
                self.bump()?;
                Ok(ExprTree::real(f64::from(n)))
            }
            Token::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "z" => {
                    self.bump()?;
                    Ok(ExprTree::Var)
                }
                "i" => {
                    self.bump()?;
                    Ok(ExprTree::Literal(ComplexValue::i()))
                }
                other => {
                    let Some(func) = Func::from_name(other) else {
                        return Err(ParseError::UnknownIdentifier {
                            name: name.clone(),
                            offset,
                        });
                    };
                    self.bump()?;
                    self.expect(Token::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    Ok(ExprTree::Call(func, Box::new(arg)))
                }
            },
            _ => Err(self.unexpected(&["`z`", "`i`", "number", "function", "`(`", "`-`"])),
        }
    }
}

/// Parses `source` into an expression tree. Whitespace is insignificant.
pub fn parse(source: &str) -> Result<ExprTree, ParseError> {
    let mut parser = Parser::new(source)?;
    let tree = parser.expr()?;
    if parser.current != Token::End {
        return Err(parser.unexpected(&["operator", "end of input"]));
    }
    Ok(tree)
}
