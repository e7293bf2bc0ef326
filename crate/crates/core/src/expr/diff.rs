use std::collections::HashMap;

use thiserror::Error;

use super::{Expr, Func, Node, VarKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error("`{func}` is not holomorphic; cannot differentiate with respect to complex `{var}`")]
    NonHolomorphic { func: &'static str, var: String },
}

pub(crate) fn differentiate(e: &Expr, var: &str) -> Result<Expr, DiffError> {
    let holomorphic = e
        .free_symbols()
        .iter()
        .any(|s| s.name() == var && s.kind() == VarKind::Complex);
    let mut cx = Ctx {
        var,
        holomorphic,
        memo: HashMap::new(),
    };
    cx.d(e)
}

struct Ctx<'a> {
    var: &'a str,
    holomorphic: bool,
    memo: HashMap<usize, Expr>,
}

const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;

impl Ctx<'_> {
    fn d(&mut self, e: &Expr) -> Result<Expr, DiffError> {
        if let Some(hit) = self.memo.get(&e.ptr_key()) {
            return Ok(hit.clone());
        }
        let out = self.rule(e)?;
        self.memo.insert(e.ptr_key(), out.clone());
        Ok(out)
    }

    fn rule(&mut self, e: &Expr) -> Result<Expr, DiffError> {
        Ok(match e.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(s) => {
                if s.name() == self.var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(xs) => {
                let mut terms = Vec::new();
                for x in xs {
                    let dx = self.d(x)?;
                    if !dx.is_zero() {
                        terms.push(dx);
                    }
                }
                Expr::sum(terms)
            }
            Node::Product(xs) => {
                let mut terms = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    let dx = self.d(x)?;
                    if dx.is_zero() {
                        continue;
                    }
                    let mut t = dx;
                    for (j, y) in xs.iter().enumerate() {
                        if j != i {
                            t = t.mul(y);
                        }
                    }
                    terms.push(t);
                }
                Expr::sum(terms)
            }
            Node::Neg(a) => self.d(a)?.negate(),
            Node::Quotient(n, den) => {
                let dn = self.d(n)?;
                let dd = self.d(den)?;
                if dd.is_zero() {
                    dn.div(den)
                } else {
                    let num = dn.mul(den).sub(&n.mul(&dd));
                    num.div(&den.powf(2.0))
                }
            }
            Node::Pow(b, x) => {
                let db = self.d(b)?;
                let dx = self.d(x)?;
                match (db.is_zero(), dx.is_zero()) {
                    (true, true) => Expr::zero(),
                    (false, true) => {
                        let lowered = match x.as_const() {
                            Some(c) => Expr::complex_constant(c - 1.0),
                            None => x.add(&Expr::constant(-1.0)),
                        };
                        x.mul(&b.pow(&lowered)).mul(&db)
                    }
                    (true, false) => e.mul(&b.ln()).mul(&dx),
                    (false, false) => {
                        let inner = dx.mul(&b.ln()).add(&x.mul(&db).div(b));
                        e.mul(&inner)
                    }
                }
            }
            Node::Call(f, args) => {
                let a = &args[0];
                if self.holomorphic && !f.is_holomorphic() {
                    let depends = args.iter().any(|x| x.contains_var(self.var));
                    if depends {
                        return Err(DiffError::NonHolomorphic {
                            func: f.name(),
                            var: self.var.to_string(),
                        });
                    }
                    return Ok(Expr::zero());
                }
                if *f == Func::Atan2 {
                    let b = &args[1];
                    let da = self.d(a)?;
                    let db = self.d(b)?;
                    if da.is_zero() && db.is_zero() {
                        return Ok(Expr::zero());
                    }
                    let num = b.mul(&da).sub(&a.mul(&db));
                    let den = a.powf(2.0).add(&b.powf(2.0));
                    return Ok(num.div(&den));
                }
                let da = self.d(a)?;
                if da.is_zero() {
                    return Ok(Expr::zero());
                }
                let outer = match f {
                    Func::Exp => e.clone(),
                    Func::Ln => Expr::one().div(a),
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().negate(),
                    Func::Sinh => a.cosh(),
                    Func::Cosh => a.sinh(),
                    Func::Tanh => Expr::one().sub(&e.powf(2.0)),
                    Func::Sqrt => Expr::one().div(&Expr::constant(2.0).mul(e)),
                    Func::Erf => Expr::constant(TWO_OVER_SQRT_PI).mul(&a.powf(2.0).negate().exp()),
                    Func::Re => return Ok(da.re()),
                    Func::Im => return Ok(da.im()),
                    Func::Conj => return Ok(da.conj()),
                    Func::Abs => return Ok(a.conj().mul(&da).re().div(e)),
                    Func::Atan2 => unreachable!(),
                };
                outer.mul(&da)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{numeric_equal, parse, EvalPoint, VarRegistry};
    use crate::sampling::SamplingBox;

    fn reg() -> VarRegistry {
        VarRegistry::real(&["x", "y"]).with("z", VarKind::Complex)
    }

    fn check(src: &str, var: &str, want: &str, bx: &SamplingBox) {
        let r = reg();
        let got = parse(src, &r).unwrap().d(var).unwrap();
        let want = parse(want, &r).unwrap();
        assert!(
            numeric_equal(&got, &want, bx, 64, 1e-10, 3).unwrap(),
            "d/d{var} {src}: got {got}"
        );
    }

    #[test]
    fn real_rules() {
        let bx = SamplingBox::new().real("x", 0.2, 2.0).real("y", -1.0, 1.0);
        check("x^3*y", "x", "3*x^2*y", &bx);
        check("x^y", "x", "y*x^(y-1)", &bx);
        check("x^y", "y", "x^y*ln(x)", &bx);
        check("x^x", "x", "x^x*(ln(x)+1)", &bx);
        check("sin(x)/x", "x", "(x*cos(x)-sin(x))/x^2", &bx);
        check("atan2(y, x)", "x", "-y/(x^2+y^2)", &bx);
        check("atan2(y, x)", "y", "x/(x^2+y^2)", &bx);
        check("erf(x*y)", "x", "2/sqrt(pi)*y*exp(-(x*y)^2)", &bx);
        check("tanh(x)", "x", "1/cosh(x)^2", &bx);
        check("sqrt(x)", "x", "1/(2*sqrt(x))", &bx);
        check("abs(y - x)", "x", "(x-y)/abs(x-y)", &bx);
    }

    #[test]
    fn real_derivative_through_complex_subtree() {
        // f = exp((x + I y)^2); d/dx of |f| and re f
        let bx = SamplingBox::new().real("x", -1.0, 1.0).real("y", -1.0, 1.0);
        check("abs(exp((x + I*y)^2))", "x", "2*x*exp(x^2 - y^2)", &bx);
        check("re((x + I*y)^3)", "x", "3*x^2 - 3*y^2", &bx);
        check("im((x + I*y)^3)", "y", "3*x^2 - 3*y^2", &bx);
        check("conj(x + I*y)", "y", "-I", &bx);
    }

    #[test]
    fn holomorphic_derivative() {
        let bx = SamplingBox::new().complex("z", (0.2, 1.0), (-1.0, 1.0));
        check("exp(z^2)/z", "z", "exp(z^2)*(2 - 1/z^2)", &bx);
        check("ln(1 + z)", "z", "1/(1+z)", &bx);
        check("(1 + z)^(1/3)", "z", "(1+z)^(-2/3)/3", &bx);
    }

    #[test]
    fn non_holomorphic_rejected() {
        let e = parse("abs(z) + x", &reg()).unwrap();
        assert!(matches!(e.d("z"), Err(DiffError::NonHolomorphic { func: "abs", .. })));
        // Fine with respect to a variable the subtree does not contain.
        assert!(e.d("x").is_ok());
        let e = parse("re(z)", &reg()).unwrap();
        assert!(e.d("z").is_err());
    }

    #[test]
    fn absent_variable_gives_exact_zero() {
        let e = parse("exp(sin(y)) * y^3", &reg()).unwrap();
        assert!(e.differentiate("x").unwrap().is_zero());
        let _ = EvalPoint::new();
    }
}
