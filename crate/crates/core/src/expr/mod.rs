//! Symbolic expression kernel.
//!
//! Expressions are immutable trees behind [`Arc`], so cloning is cheap and
//! subtrees are freely shared between derivatives. Variables carry their
//! domain ([`VarKind`]); differentiation with respect to a complex variable
//! is the complex derivative and refuses non-holomorphic nodes.
//!
//! Semantic equality is never decided by rewriting. [`simplify`] only does
//! constant folding, neutral-element removal and one-level like-term
//! collection; use [`numeric_equal`] to compare two expressions.

mod diff;
mod equal;
mod eval;
mod parse;
mod print;
mod simplify;
pub mod special;

use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use diff::DiffError;
pub use equal::{compare, numeric_equal, Comparison};
pub use eval::{EvalError, EvalPoint};
pub use parse::{parse, ParseError, VarRegistry};

/// Domain of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    kind: VarKind,
}

impl Symbol {
    pub fn new(name: &str, kind: VarKind) -> Self {
        Symbol {
            name: Arc::from(name),
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }
}

/// Built-in functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Atan2,
    Erf,
    Abs,
    Re,
    Im,
    Conj,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 14] = [
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Atan2,
        Func::Erf,
        Func::Abs,
        Func::Re,
        Func::Im,
        Func::Conj,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Atan2 => "atan2",
            Func::Erf => "erf",
            Func::Abs => "abs",
            Func::Re => "re",
            Func::Im => "im",
            Func::Conj => "conj",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "arctan2" => Some(Func::Atan2),
            "log" => Some(Func::Ln),
            _ => Func::ALL.iter().copied().find(|f| f.name() == name),
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }

    /// Whether the function is complex-differentiable in its arguments.
    pub fn is_holomorphic(self) -> bool {
        !matches!(self, Func::Abs | Func::Re | Func::Im | Func::Conj | Func::Atan2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, Expr),
    Neg(Expr),
    Quotient(Expr, Expr),
    Call(Func, Vec<Expr>),
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_prefix())
    }
}

impl Expr {
    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr_key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(value: f64) -> Expr {
        Expr::from_node(Node::Const(Complex64::new(value, 0.0)))
    }

    pub fn complex_constant(value: Complex64) -> Expr {
        Expr::from_node(Node::Const(value))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    /// The imaginary unit.
    pub fn i() -> Expr {
        Expr::complex_constant(Complex64::new(0.0, 1.0))
    }

    /// A real variable.
    pub fn var(name: &str) -> Expr {
        Expr::from_node(Node::Var(Symbol::new(name, VarKind::Real)))
    }

    pub fn complex_var(name: &str) -> Expr {
        Expr::from_node(Node::Var(Symbol::new(name, VarKind::Complex)))
    }

    pub fn symbol(sym: Symbol) -> Expr {
        Expr::from_node(Node::Var(sym))
    }

    /// Raw n-ary sum; no folding beyond the empty and singleton cases.
    pub fn sum(mut terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::from_node(Node::Sum(terms)),
        }
    }

    /// Raw n-ary product; no folding beyond the empty and singleton cases.
    pub fn product(mut factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.pop().unwrap(),
            _ => Expr::from_node(Node::Product(factors)),
        }
    }

    pub fn call(func: Func, args: Vec<Expr>) -> Expr {
        debug_assert_eq!(func.arity(), args.len());
        Expr::from_node(Node::Call(func, args))
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_real_const(&self) -> Option<f64> {
        self.as_const().filter(|c| c.im == 0.0).map(|c| c.re)
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c == Complex64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c == Complex64::new(1.0, 0.0))
    }

    // Folding constructors used by the operator overloads and by the
    // differentiation rules. They keep derivative trees from filling up with
    // `0 * ...` and `1 * ...` noise.

    pub fn add(&self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return Expr::complex_constant(a + b);
        }
        let mut terms = Vec::new();
        for side in [self, rhs] {
            match side.node() {
                Node::Sum(ts) => terms.extend(ts.iter().cloned()),
                _ => terms.push(side.clone()),
            }
        }
        Expr::sum(terms)
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        self.add(&rhs.negate())
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return Expr::complex_constant(a * b);
        }
        if self.as_real_const() == Some(-1.0) {
            return rhs.negate();
        }
        if rhs.as_real_const() == Some(-1.0) {
            return self.negate();
        }
        let mut factors = Vec::new();
        for side in [self, rhs] {
            match side.node() {
                Node::Product(fs) => factors.extend(fs.iter().cloned()),
                _ => factors.push(side.clone()),
            }
        }
        Expr::product(factors)
    }

    pub fn div(&self, rhs: &Expr) -> Expr {
        if rhs.is_one() {
            return self.clone();
        }
        if self.is_zero() && !rhs.is_zero() {
            return Expr::zero();
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            if b != Complex64::new(0.0, 0.0) {
                return Expr::complex_constant(a / b);
            }
        }
        Expr::from_node(Node::Quotient(self.clone(), rhs.clone()))
    }

    pub fn negate(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::complex_constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn pow(&self, exponent: &Expr) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return self.clone();
        }
        Expr::from_node(Node::Pow(self.clone(), exponent.clone()))
    }

    pub fn powf(&self, exponent: f64) -> Expr {
        self.pow(&Expr::constant(exponent))
    }

    pub fn exp(&self) -> Expr {
        Expr::call(Func::Exp, vec![self.clone()])
    }
    pub fn ln(&self) -> Expr {
        Expr::call(Func::Ln, vec![self.clone()])
    }
    pub fn sin(&self) -> Expr {
        Expr::call(Func::Sin, vec![self.clone()])
    }
    pub fn cos(&self) -> Expr {
        Expr::call(Func::Cos, vec![self.clone()])
    }
    pub fn sinh(&self) -> Expr {
        Expr::call(Func::Sinh, vec![self.clone()])
    }
    pub fn cosh(&self) -> Expr {
        Expr::call(Func::Cosh, vec![self.clone()])
    }
    pub fn tanh(&self) -> Expr {
        Expr::call(Func::Tanh, vec![self.clone()])
    }
    pub fn erf(&self) -> Expr {
        Expr::call(Func::Erf, vec![self.clone()])
    }
    pub fn abs(&self) -> Expr {
        Expr::call(Func::Abs, vec![self.clone()])
    }
    pub fn re(&self) -> Expr {
        Expr::call(Func::Re, vec![self.clone()])
    }
    pub fn im(&self) -> Expr {
        Expr::call(Func::Im, vec![self.clone()])
    }
    pub fn conj(&self) -> Expr {
        Expr::call(Func::Conj, vec![self.clone()])
    }
    pub fn sqrt(&self) -> Expr {
        Expr::call(Func::Sqrt, vec![self.clone()])
    }

    /// `atan2(y, x)`, the principal polar angle of `(x, y)` in `(-pi, pi]`.
    pub fn atan2(y: &Expr, x: &Expr) -> Expr {
        Expr::call(Func::Atan2, vec![y.clone(), x.clone()])
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Var(_) => Vec::new(),
            Node::Sum(xs) | Node::Product(xs) | Node::Call(_, xs) => xs.iter().collect(),
            Node::Pow(a, b) | Node::Quotient(a, b) => vec![a, b],
            Node::Neg(a) => vec![a],
        }
    }

    /// Rebuild this node with new children (same arity and kind).
    pub(crate) fn with_children(&self, children: Vec<Expr>) -> Expr {
        let mut it = children.into_iter();
        let node = match self.node() {
            Node::Const(_) | Node::Var(_) => return self.clone(),
            Node::Sum(_) => Node::Sum(it.collect()),
            Node::Product(_) => Node::Product(it.collect()),
            Node::Call(f, _) => Node::Call(*f, it.collect()),
            Node::Pow(..) => Node::Pow(it.next().unwrap(), it.next().unwrap()),
            Node::Quotient(..) => Node::Quotient(it.next().unwrap(), it.next().unwrap()),
            Node::Neg(_) => Node::Neg(it.next().unwrap()),
        };
        Expr::from_node(node)
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_key()) {
                continue;
            }
            if let Node::Var(s) = e.node() {
                out.insert(s.clone());
            }
            stack.extend(e.children());
        }
        out
    }

    /// Names of the free variables, sorted.
    pub fn free_vars(&self) -> Vec<String> {
        self.free_symbols()
            .into_iter()
            .map(|s| s.name().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.free_symbols().iter().any(|s| s.name() == name)
    }

    /// Number of distinct nodes (shared subtrees counted once).
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if seen.insert(e.ptr_key()) {
                stack.extend(e.children());
            }
        }
        seen.len()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Simultaneously replace variables by expressions.
    pub fn substitute_all(&self, map: &[(&str, Expr)]) -> Expr {
        let mut memo = std::collections::HashMap::new();
        substitute_rec(self, map, &mut memo)
    }

    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        self.substitute_all(&[(name, with.clone())])
    }

    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// Exact partial derivative with respect to `var`.
    ///
    /// The kind of `var` is read off the tree: if it occurs as a complex
    /// variable the result is the complex derivative and non-holomorphic
    /// nodes depending on it are rejected.
    pub fn differentiate(&self, var: &str) -> Result<Expr, DiffError> {
        diff::differentiate(self, var)
    }

    /// Differentiate and simplify.
    pub fn d(&self, var: &str) -> Result<Expr, DiffError> {
        Ok(self.differentiate(var)?.simplify())
    }

    pub fn eval(&self, point: &EvalPoint) -> Result<Complex64, EvalError> {
        eval::evaluate(self, point)
    }

    /// Evaluate and require a real result (imaginary part below `1e-9` of
    /// the magnitude).
    pub fn eval_real(&self, point: &EvalPoint) -> Result<f64, EvalError> {
        let z = self.eval(point)?;
        if z.im.abs() > 1e-9 * (1.0 + z.re.abs()) {
            return Err(EvalError::NotReal {
                subtree: print::truncated_prefix(self),
                value: z,
            });
        }
        Ok(z.re)
    }

    pub fn to_prefix(&self) -> String {
        print::prefix(self)
    }
}

fn substitute_rec(
    e: &Expr,
    map: &[(&str, Expr)],
    memo: &mut std::collections::HashMap<usize, Expr>,
) -> Expr {
    if let Some(hit) = memo.get(&e.ptr_key()) {
        return hit.clone();
    }
    let out = match e.node() {
        Node::Const(_) => e.clone(),
        Node::Var(s) => map
            .iter()
            .find(|(n, _)| *n == s.name())
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| e.clone()),
        _ => {
            let kids: Vec<Expr> = e
                .children()
                .into_iter()
                .map(|c| substitute_rec(c, map, memo))
                .collect();
            let unchanged = kids
                .iter()
                .zip(e.children())
                .all(|(a, b)| Arc::ptr_eq(&a.0, &b.0));
            if unchanged {
                e.clone()
            } else {
                e.with_children(kids)
            }
        }
    };
    memo.insert(e.ptr_key(), out.clone());
    out
}

impl fmt::Display for Expr {
    /// Fully parenthesised infix form accepted by [`parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::infix(self))
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::constant(v)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inner(&self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(&self, rhs)
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inner(self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(self, rhs)
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$inner(&self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$inner(self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inner(&Expr::constant(self), &rhs)
            }
        }
        impl ops::$trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(&Expr::constant(self), rhs)
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negate()
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negate()
    }
}
