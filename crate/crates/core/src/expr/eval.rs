use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use super::print::truncated_prefix;
use super::special;
use super::{Expr, Func, Node};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("variable `{name}` has no value")]
    Unbound { name: String },
    #[error("{op} outside its domain at {subtree}")]
    Domain { op: &'static str, subtree: String },
    #[error("non-finite value {value} at {subtree}")]
    NonFinite { subtree: String, value: Complex64 },
    #[error("expected a real value, got {value} at {subtree}")]
    NotReal { subtree: String, value: Complex64 },
}

/// Variable assignment for [`Expr::eval`].
#[derive(Clone, Debug, Default)]
pub struct EvalPoint {
    values: HashMap<Arc<str>, Complex64>,
}

impl EvalPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_reals(pairs: &[(&str, f64)]) -> Self {
        let mut p = Self::new();
        for (n, v) in pairs {
            p.set(n, *v);
        }
        p
    }

    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        self.set_complex(name, Complex64::new(value, 0.0))
    }

    pub fn set_complex(&mut self, name: &str, value: Complex64) -> &mut Self {
        self.values.insert(Arc::from(name), value);
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Complex64)> {
        self.values.iter().map(|(k, v)| (k.as_ref(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn evaluate(e: &Expr, p: &EvalPoint) -> Result<Complex64, EvalError> {
    let mut memo = HashMap::new();
    eval_rec(e, p, &mut memo)
}

fn domain(op: &'static str, e: &Expr) -> EvalError {
    EvalError::Domain {
        op,
        subtree: truncated_prefix(e),
    }
}

fn on_negative_real_axis(z: Complex64) -> bool {
    z.im == 0.0 && z.re < 0.0
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= 1e-12 * (1.0 + z.re.abs())
}

fn eval_rec(
    e: &Expr,
    p: &EvalPoint,
    memo: &mut HashMap<usize, Complex64>,
) -> Result<Complex64, EvalError> {
    // Shared subtrees (common in derivative trees) are evaluated once.
    let key = e.ptr_key();
    let shared = Arc::strong_count(&e.0) > 1;
    if shared {
        if let Some(v) = memo.get(&key) {
            return Ok(*v);
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let v = match e.node() {
        Node::Const(c) => *c,
        Node::Var(s) => p.get(s.name()).ok_or_else(|| EvalError::Unbound {
            name: s.name().to_string(),
        })?,
        Node::Sum(xs) => {
            let mut acc = zero;
            for x in xs {
                acc += eval_rec(x, p, memo)?;
            }
            acc
        }
        Node::Product(xs) => {
            let mut acc = Complex64::new(1.0, 0.0);
            for x in xs {
                acc *= eval_rec(x, p, memo)?;
            }
            acc
        }
        Node::Neg(a) => -eval_rec(a, p, memo)?,
        Node::Quotient(a, b) => {
            let num = eval_rec(a, p, memo)?;
            let den = eval_rec(b, p, memo)?;
            if den == zero {
                return Err(domain("division", e));
            }
            num / den
        }
        Node::Pow(a, b) => {
            let base = eval_rec(a, p, memo)?;
            let ex = eval_rec(b, p, memo)?;
            power(base, ex).ok_or_else(|| domain("power", e))?
        }
        Node::Call(f, args) => {
            let x = eval_rec(&args[0], p, memo)?;
            match f {
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x == zero || on_negative_real_axis(x) {
                        return Err(domain("ln", e));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if on_negative_real_axis(x) {
                        return Err(domain("sqrt", e));
                    }
                    x.sqrt()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => tanh(x),
                Func::Erf => special::erf(x),
                Func::Abs => Complex64::new(x.norm(), 0.0),
                Func::Re => Complex64::new(x.re, 0.0),
                Func::Im => Complex64::new(x.im, 0.0),
                Func::Conj => x.conj(),
                Func::Atan2 => {
                    let xx = eval_rec(&args[1], p, memo)?;
                    if !is_real(x) || !is_real(xx) || (x.re == 0.0 && xx.re == 0.0) {
                        return Err(domain("atan2", e));
                    }
                    Complex64::new(x.re.atan2(xx.re), 0.0)
                }
            }
        }
    };
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(EvalError::NonFinite {
            subtree: truncated_prefix(e),
            value: v,
        });
    }
    if shared {
        memo.insert(key, v);
    }
    Ok(v)
}

/// Principal power; integer exponents use repeated multiplication so that
/// negative real bases are fine.
fn power(base: Complex64, ex: Complex64) -> Option<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if ex.im == 0.0 && ex.re.fract() == 0.0 && ex.re.abs() <= i32::MAX as f64 {
        let n = ex.re as i32;
        if base == zero && n < 0 {
            return None;
        }
        return Some(base.powi(n));
    }
    if base == zero {
        return if ex.re > 0.0 { Some(zero) } else { None };
    }
    if on_negative_real_axis(base) {
        return None;
    }
    if base.im == 0.0 && ex.im == 0.0 {
        return Some(Complex64::new(base.re.powf(ex.re), 0.0));
    }
    Some((ex * base.ln()).exp())
}

/// `tanh` without the overflow of `sinh/cosh` at large real part.
fn tanh(z: Complex64) -> Complex64 {
    if z.re.abs() > 20.0 {
        let s = z.re.signum();
        // tanh z = s (1 - 2 e^{-2 s z} / (1 + e^{-2 s z}))
        let w = (-2.0 * s * z).exp();
        return s * (Complex64::new(1.0, 0.0) - 2.0 * w / (1.0 + w));
    }
    z.tanh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Expr, VarKind, VarRegistry};

    fn ev(src: &str, pairs: &[(&str, f64)]) -> Result<Complex64, EvalError> {
        let names: Vec<&str> = pairs.iter().map(|(n, _)| *n).collect();
        parse(src, &VarRegistry::real(&names))
            .unwrap()
            .eval(&EvalPoint::from_reals(pairs))
    }

    #[test]
    fn arithmetic() {
        let v = ev("x^2 - 3*y / 2 + exp(0)", &[("x", 2.0), ("y", 4.0)]).unwrap();
        assert_eq!(v, Complex64::new(-1.0, 0.0));
        let v = ev("(-2)^3", &[]).unwrap();
        assert_eq!(v, Complex64::new(-8.0, 0.0));
        let v = ev("atan2(1, -1)", &[]).unwrap();
        assert!((v.re - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn domain_errors_name_the_subtree() {
        match ev("1 + ln(x - 1)", &[("x", 1.0)]) {
            Err(EvalError::Domain { op: "ln", subtree }) => assert_eq!(subtree, "(ln (+ x (- 1)))"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ev("x / (x - x)", &[("x", 2.0)]), Err(EvalError::Domain { op: "division", .. })));
        assert!(matches!(ev("sqrt(-1)", &[]), Err(EvalError::Domain { .. })));
        assert!(matches!(ev("(-1)^0.5", &[]), Err(EvalError::Domain { .. })));
        assert!(matches!(ev("exp(1000)", &[]), Err(EvalError::NonFinite { .. })));
        assert!(matches!(Expr::var("x").eval(&EvalPoint::new()), Err(EvalError::Unbound { .. })));
    }

    #[test]
    fn complex_branches() {
        let reg = VarRegistry::new().with("z", VarKind::Complex);
        let e = parse("ln(z) + sqrt(z)", &reg).unwrap();
        let mut p = EvalPoint::new();
        p.set_complex("z", Complex64::new(-1.0, 1e-300));
        let v = e.eval(&p).unwrap();
        assert!((v.im - (std::f64::consts::PI + 1.0)).abs() < 1e-12);
        let v = parse("I^2", &reg).unwrap().eval(&EvalPoint::new()).unwrap();
        assert_eq!(v, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn tanh_large_argument() {
        let v = ev("tanh(800)", &[]).unwrap();
        assert_eq!(v.re, 1.0);
        let v = ev("tanh(-800)", &[]).unwrap();
        assert_eq!(v.re, -1.0);
    }
}
