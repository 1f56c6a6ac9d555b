use super::{ComplexValue, ExprTree, Func};

fn lit(c: ComplexValue) -> ExprTree {
    ExprTree::Literal(c)
}

fn literal_of(t: &ExprTree) -> Option<ComplexValue> {
    match t {
        ExprTree::Literal(c) => Some(*c),
        _ => None,
    }
}

// Node constructors that fold when every operand is a literal. Folding is
// skipped if it would produce a non-finite literal.

fn fold_or(value: Option<ComplexValue>, node: impl FnOnce() -> ExprTree) -> ExprTree {
    match value {
        Some(c) if c.re.is_finite() && c.im.is_finite() => lit(c),
        _ => node(),
    }
}

fn add(a: ExprTree, b: ExprTree) -> ExprTree {
    let v = literal_of(&a).zip(literal_of(&b)).map(|(x, y)| x + y);
    fold_or(v, || ExprTree::Add(Box::new(a), Box::new(b)))
}

fn sub(a: ExprTree, b: ExprTree) -> ExprTree {
    let v = literal_of(&a).zip(literal_of(&b)).map(|(x, y)| x - y);
    fold_or(v, || ExprTree::Sub(Box::new(a), Box::new(b)))
}

fn mul(a: ExprTree, b: ExprTree) -> ExprTree {
    let v = literal_of(&a).zip(literal_of(&b)).map(|(x, y)| x * y);
    fold_or(v, || ExprTree::Mul(Box::new(a), Box::new(b)))
}

fn div(a: ExprTree, b: ExprTree) -> ExprTree {
    let v = literal_of(&a)
        .zip(literal_of(&b))
        .filter(|(_, y)| *y != ComplexValue::new(0.0, 0.0))
        .map(|(x, y)| x / y);
    fold_or(v, || ExprTree::Div(Box::new(a), Box::new(b)))
}

fn pow(a: ExprTree, n: u32) -> ExprTree {
    let v = literal_of(&a).map(|x| x.powu(n));
    fold_or(v, || ExprTree::Pow(Box::new(a), n))
}

fn neg(a: ExprTree) -> ExprTree {
    let v = literal_of(&a).map(|x| -x);
    fold_or(v, || ExprTree::Neg(Box::new(a)))
}

fn call(func: Func, a: ExprTree) -> ExprTree {
    let v = literal_of(&a).map(|x| func.apply(x));
    fold_or(v, || ExprTree::Call(func, Box::new(a)))
}

impl ExprTree {
    /// Exact symbolic derivative `d/dz`.
    ///
    /// Constant folding is the only simplification applied, so results are
    /// deterministic but not minimal.
    pub fn differentiate(&self) -> ExprTree {
        let zero = || lit(ComplexValue::new(0.0, 0.0));
        match self {
            ExprTree::Var => lit(ComplexValue::new(1.0, 0.0)),
            ExprTree::Literal(_) => zero(),
            ExprTree::Add(a, b) => add(a.differentiate(), b.differentiate()),
            ExprTree::Sub(a, b) => sub(a.differentiate(), b.differentiate()),
            ExprTree::Mul(a, b) => add(
                mul(a.differentiate(), b.folded()),
                mul(a.folded(), b.differentiate()),
            ),
            ExprTree::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = sub(
                    mul(a.differentiate(), b.folded()),
                    mul(a.folded(), b.differentiate()),
                );
                div(num, pow(b.folded(), 2))
            }
            ExprTree::Pow(_, 0) => zero(),
            ExprTree::Pow(a, 1) => a.differentiate(),
            ExprTree::Pow(a, n) => mul(
                mul(
                    lit(ComplexValue::new(f64::from(*n), 0.0)),
                    pow(a.folded(), n - 1),
                ),
                a.differentiate(),
            ),
            ExprTree::Neg(a) => neg(a.differentiate()),
            ExprTree::Call(func, a) => {
                let inner = a.folded();
                let outer = match func {
                    Func::Exp => call(Func::Exp, inner),
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                };
                mul(outer, a.differentiate())
            }
        }
    }

    /// Copy of the tree with every all-literal subtree collapsed.
    pub fn folded(&self) -> ExprTree {
        match self {
            ExprTree::Var | ExprTree::Literal(_) => self.clone(),
            ExprTree::Add(a, b) => add(a.folded(), b.folded()),
            ExprTree::Sub(a, b) => sub(a.folded(), b.folded()),
            ExprTree::Mul(a, b) => mul(a.folded(), b.folded()),
            ExprTree::Div(a, b) => div(a.folded(), b.folded()),
            ExprTree::Pow(a, n) => pow(a.folded(), *n),
            ExprTree::Neg(a) => neg(a.folded()),
            ExprTree::Call(f, a) => call(*f, a.folded()),
        }
    }
}
