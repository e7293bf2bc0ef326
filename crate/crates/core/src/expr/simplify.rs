use std::collections::HashMap;

use num_complex::Complex64;

use super::eval::EvalPoint;
use super::{Expr, Node};

const MAX_ROUNDS: usize = 64;

/// Constant folding, neutral elements, flattening and like-term collection,
/// iterated to a fixpoint so that the result is stable under another call.
pub(crate) fn simplify(e: &Expr) -> Expr {
    let mut cur = e.clone();
    for _ in 0..MAX_ROUNDS {
        let mut memo = HashMap::new();
        let next = pass(&cur, &mut memo);
        if next == cur {
            return next;
        }
        cur = next;
    }
    cur
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Fold a constant-only subtree if it evaluates to a finite value.
fn fold(e: &Expr) -> Option<Expr> {
    e.eval(&EvalPoint::new()).ok().map(Expr::complex_constant)
}

fn pass(e: &Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(hit) = memo.get(&e.ptr_key()) {
        return hit.clone();
    }
    let out = match e.node() {
        Node::Const(_) | Node::Var(_) => e.clone(),
        Node::Neg(a) => {
            let a = pass(a, memo);
            match a.node() {
                Node::Const(v) => Expr::complex_constant(-v),
                Node::Neg(b) => b.clone(),
                _ => Expr::from_node(Node::Neg(a)),
            }
        }
        Node::Sum(xs) => {
            let mut flat = Vec::new();
            for x in xs {
                let x = pass(x, memo);
                match x.node() {
                    Node::Sum(ys) => flat.extend(ys.iter().cloned()),
                    _ => flat.push(x),
                }
            }
            collect_terms(flat)
        }
        Node::Product(xs) => {
            let mut flat = Vec::new();
            for x in xs {
                let x = pass(x, memo);
                match x.node() {
                    Node::Product(ys) => flat.extend(ys.iter().cloned()),
                    _ => flat.push(x),
                }
            }
            collect_factors(flat)
        }
        Node::Pow(b, x) => {
            let b = pass(b, memo);
            let x = pass(x, memo);
            let raw = Expr::from_node(Node::Pow(b.clone(), x.clone()));
            if x.is_zero() {
                Expr::one()
            } else if x.is_one() {
                b
            } else if b.is_one() {
                Expr::one()
            } else if b.as_const().is_some() && x.as_const().is_some() {
                fold(&raw).unwrap_or(raw)
            } else {
                raw
            }
        }
        Node::Quotient(n, d) => {
            let n = pass(n, memo);
            let d = pass(d, memo);
            let raw = Expr::from_node(Node::Quotient(n.clone(), d.clone()));
            if d.is_one() {
                n
            } else if n.is_zero() && !d.is_zero() {
                Expr::zero()
            } else if n.as_const().is_some() && d.as_const().is_some() {
                fold(&raw).unwrap_or(raw)
            } else {
                raw
            }
        }
        Node::Call(f, args) => {
            let args: Vec<Expr> = args.iter().map(|a| pass(a, memo)).collect();
            let all_const = args.iter().all(|a| a.as_const().is_some());
            let raw = Expr::call(*f, args);
            if all_const {
                fold(&raw).unwrap_or(raw)
            } else {
                raw
            }
        }
    };
    memo.insert(e.ptr_key(), out.clone());
    out
}

/// Split a term into numeric coefficient and symbolic part.
fn split_term(t: &Expr) -> (Complex64, Option<Expr>) {
    match t.node() {
        Node::Const(v) => (*v, None),
        Node::Neg(a) => {
            let (k, rest) = split_term(a);
            (-k, rest)
        }
        Node::Product(fs) => match fs[0].as_const() {
            Some(k) => (k, Some(Expr::product(fs[1..].to_vec()))),
            None => (c(1.0), Some(t.clone())),
        },
        _ => (c(1.0), Some(t.clone())),
    }
}

fn scaled(k: Complex64, base: Expr) -> Expr {
    if k == c(1.0) {
        return base;
    }
    if k == c(-1.0) {
        return Expr::from_node(Node::Neg(base));
    }
    let mut fs = vec![Expr::complex_constant(k)];
    match base.node() {
        Node::Product(ys) => fs.extend(ys.iter().cloned()),
        _ => fs.push(base),
    }
    Expr::from_node(Node::Product(fs))
}

fn collect_terms(terms: Vec<Expr>) -> Expr {
    let mut constant = c(0.0);
    let mut groups: Vec<(Expr, Complex64)> = Vec::new();
    for t in &terms {
        match split_term(t) {
            (k, None) => constant += k,
            (k, Some(base)) => match groups.iter_mut().find(|(b, _)| *b == base) {
                Some((_, acc)) => *acc += k,
                None => groups.push((base, k)),
            },
        }
    }
    let mut out: Vec<Expr> = groups
        .into_iter()
        .filter(|(_, k)| *k != c(0.0))
        .map(|(b, k)| scaled(k, b))
        .collect();
    if constant != c(0.0) {
        out.push(Expr::complex_constant(constant));
    }
    Expr::sum(out)
}

fn collect_factors(factors: Vec<Expr>) -> Expr {
    let mut coeff = c(1.0);
    let mut groups: Vec<(Expr, Option<Complex64>, Expr)> = Vec::new();
    for f in factors {
        let f = match f.node() {
            Node::Neg(a) => {
                coeff = -coeff;
                a.clone()
            }
            _ => f,
        };
        if let Some(v) = f.as_const() {
            coeff *= v;
            continue;
        }
        // (base, numeric exponent, original factor)
        let (base, ex) = match f.node() {
            Node::Pow(b, x) => match x.as_const() {
                Some(k) => (b.clone(), Some(k)),
                None => (f.clone(), None),
            },
            _ => (f.clone(), Some(c(1.0))),
        };
        match ex {
            Some(k) => match groups.iter_mut().find(|(b, e, _)| e.is_some() && *b == base) {
                Some((_, acc, _)) => *acc = Some(acc.unwrap() + k),
                None => groups.push((base, Some(k), f)),
            },
            None => groups.push((base, None, f)),
        }
    }
    if coeff == c(0.0) {
        return Expr::zero();
    }
    let rest: Vec<Expr> = groups
        .into_iter()
        .filter_map(|(base, ex, orig)| match ex {
            None => Some(orig),
            Some(k) if k == c(0.0) => None,
            Some(k) if k == c(1.0) => Some(base),
            Some(k) => Some(Expr::from_node(Node::Pow(base, Expr::complex_constant(k)))),
        })
        .collect();
    if rest.is_empty() {
        return Expr::complex_constant(coeff);
    }
    if coeff == c(-1.0) {
        return Expr::from_node(Node::Neg(Expr::product(rest)));
    }
    if coeff == c(1.0) {
        return Expr::product(rest);
    }
    let mut fs = vec![Expr::complex_constant(coeff)];
    fs.extend(rest);
    Expr::from_node(Node::Product(fs))
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr, VarRegistry};

    fn s(src: &str) -> String {
        parse(src, &VarRegistry::real(&["x", "y", "z"]))
            .unwrap()
            .simplify()
            .to_prefix()
    }

    #[test]
    fn folds_and_collects() {
        assert_eq!(s("2 + 3*4"), "14");
        assert_eq!(s("x + 0"), "x");
        assert_eq!(s("1*x*1"), "x");
        assert_eq!(s("x + 2*x - y + x"), "(+ (* 4 x) (- y))");
        assert_eq!(s("x*x*y"), "(* (^ x 2) y)");
        assert_eq!(s("x^2 * x^-2"), "1");
        assert_eq!(s("(x + y) + (x - y)"), "(* 2 x)");
        assert_eq!(s("-(-x)"), "x");
        assert_eq!(s("x^0 + y^1"), "(+ y 1)");
        assert_eq!(s("exp(0) + cos(0)"), "2");
        assert_eq!(s("0 * exp(x)"), "0");
        assert_eq!(s("-x * 3"), "(* -3 x)");
    }

    #[test]
    fn keeps_invalid_constant_subtrees() {
        assert_eq!(s("ln(0) + x"), "(+ (ln 0) x)");
        assert_eq!(s("1/0"), "(/ 1 0)");
    }

    #[test]
    fn idempotent_on_examples() {
        for src in ["x*(y*(x*2))*3 - x^2*y", "(x+1)^2/(x+1) + sin(x)*sin(x)", "x - x"] {
            let e = parse(src, &VarRegistry::real(&["x", "y"])).unwrap();
            let once = e.simplify();
            assert_eq!(once.simplify(), once);
        }
        assert_eq!(Expr::var("x").simplify(), Expr::var("x"));
    }
}
