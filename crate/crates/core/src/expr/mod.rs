//! Analytic functions of one complex variable.
//!
//! Expressions are built from `z`, complex literals, the four field
//! operations, non-negative integer powers, negation and the entire
//! functions `exp`, `sin`, `cos`. A tree without a quotient node is entire.

mod diff;
mod parse;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub use parse::{parse, ParseError};

/// The scalar of all analytic computation.
pub type ComplexValue = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    pub fn apply(self, w: ComplexValue) -> ComplexValue {
        match self {
            Func::Exp => w.exp(),
            Func::Sin => w.sin(),
            Func::Cos => w.cos(),
        }
    }
}

/// Abstract syntax tree of an analytic function `f(z)`.
///
/// Trees are immutable once built; evaluation is pure and may be shared
/// across threads.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprTree {
    Var,
    Literal(ComplexValue),
    Add(Box<ExprTree>, Box<ExprTree>),
    Sub(Box<ExprTree>, Box<ExprTree>),
    Mul(Box<ExprTree>, Box<ExprTree>),
    Div(Box<ExprTree>, Box<ExprTree>),
    /// Integer power; negative exponents are written as quotients.
    Pow(Box<ExprTree>, u32),
    Neg(Box<ExprTree>),
    Call(Func, Box<ExprTree>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in `{subtree}`")]
    DivisionByZero { subtree: String },
    #[error("non-finite value produced by `{subtree}`")]
    NonFinite { subtree: String },
}

impl ExprTree {
    pub fn real(x: f64) -> Self {
        ExprTree::Literal(ComplexValue::new(x, 0.0))
    }

    pub fn imag_unit() -> Self {
        ExprTree::Literal(ComplexValue::i())
    }

    /// True when the tree contains no quotient, i.e. defines an entire function.
    pub fn is_entire(&self) -> bool {
        match self {
            ExprTree::Var | ExprTree::Literal(_) => true,
            ExprTree::Div(..) => false,
            ExprTree::Add(a, b) | ExprTree::Sub(a, b) | ExprTree::Mul(a, b) => {
                a.is_entire() && b.is_entire()
            }
            ExprTree::Pow(a, _) | ExprTree::Neg(a) | ExprTree::Call(_, a) => a.is_entire(),
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, ExprTree::Literal(_))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            ExprTree::Var | ExprTree::Literal(_) => 1,
            ExprTree::Add(a, b)
            | ExprTree::Sub(a, b)
            | ExprTree::Mul(a, b)
            | ExprTree::Div(a, b) => 1 + a.size() + b.size(),
            ExprTree::Pow(a, _) | ExprTree::Neg(a) | ExprTree::Call(_, a) => 1 + a.size(),
        }
    }

    /// Evaluates the tree at `z` with complex arithmetic.
    pub fn evaluate(&self, z: ComplexValue) -> Result<ComplexValue, EvalError> {
        let value = match self {
            ExprTree::Var => z,
            ExprTree::Literal(c) => *c,
            ExprTree::Add(a, b) => a.evaluate(z)? + b.evaluate(z)?,
            ExprTree::Sub(a, b) => a.evaluate(z)? - b.evaluate(z)?,
            ExprTree::Mul(a, b) => a.evaluate(z)? * b.evaluate(z)?,
            ExprTree::Div(a, b) => {
                let num = a.evaluate(z)?;
                let den = b.evaluate(z)?;
                if den.re == 0.0 && den.im == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        subtree: self.to_string(),
                    });
                }
                num / den
            }
            ExprTree::Pow(a, n) => a.evaluate(z)?.powu(*n),
            ExprTree::Neg(a) => -a.evaluate(z)?,
            ExprTree::Call(func, a) => func.apply(a.evaluate(z)?),
        };
        if value.re.is_finite() && value.im.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite {
                subtree: self.to_string(),
            })
        }
    }

    /// `Re f(x + iy)`, the conformal exponent of the metric `e^{2 Re f} g0`.
    pub fn real_part_field(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        Ok(self.evaluate(ComplexValue::new(x, y))?.re)
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprTree::Add(..) | ExprTree::Sub(..) => 1,
            ExprTree::Mul(..) | ExprTree::Div(..) => 2,
            ExprTree::Neg(_) => 3,
            ExprTree::Pow(..) => 4,
            // non-atomic literals print with their own parentheses
            ExprTree::Literal(_) | ExprTree::Var | ExprTree::Call(..) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            ExprTree::Var => write!(f, "z"),
            ExprTree::Literal(c) => fmt_literal(f, *c),
            ExprTree::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " + ")?;
                b.fmt_at(f, 2)
            }
            ExprTree::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " - ")?;
                b.fmt_at(f, 2)
            }
            ExprTree::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "*")?;
                b.fmt_at(f, 3)
            }
            ExprTree::Div(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "/")?;
                b.fmt_at(f, 3)
            }
            ExprTree::Pow(a, n) => {
                a.fmt_at(f, 5)?;
                write!(f, "^{n}")
            }
            ExprTree::Neg(a) => {
                write!(f, "-")?;
                a.fmt_at(f, 3)
            }
            ExprTree::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

fn fmt_literal(f: &mut fmt::Formatter<'_>, c: ComplexValue) -> fmt::Result {
    if c.im == 0.0 && c.re.is_sign_positive() {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 && c.im == 1.0 && c.re.is_sign_positive() {
        write!(f, "i")
    } else if c.im == 0.0 {
        write!(f, "(-{})", -c.re)
    } else {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        if c.re.is_sign_negative() {
            write!(f, "(-{} {sign} {}*i)", -c.re, c.im.abs())
        } else {
            write!(f, "({} {sign} {}*i)", c.re, c.im.abs())
        }
    }
}

/// Prints in the input grammar. Trees produced by [`parse`] print back to
/// text that parses to a structurally equal tree.
impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
