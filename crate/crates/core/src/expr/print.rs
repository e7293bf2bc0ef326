use num_complex::Complex64;

use super::{Expr, Node};

/// Shortest decimal form that parses back to the same `f64`.
pub(crate) fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn infix_real(x: f64) -> String {
    if x.is_sign_negative() {
        format!("(-{})", format_real(-x))
    } else {
        format_real(x)
    }
}

fn infix_const(c: Complex64) -> String {
    if c.im == 0.0 {
        return infix_real(c.re);
    }
    if c.re == 0.0 {
        return format!("({} * I)", infix_real(c.im));
    }
    format!("({} + ({} * I))", infix_real(c.re), infix_real(c.im))
}

pub(crate) fn infix(e: &Expr) -> String {
    let mut out = String::new();
    write_infix(e, &mut out);
    out
}

fn write_joined(xs: &[Expr], sep: &str, out: &mut String) {
    out.push('(');
    for (k, x) in xs.iter().enumerate() {
        if k > 0 {
            out.push_str(sep);
        }
        write_infix(x, out);
    }
    out.push(')');
}

fn write_infix(e: &Expr, out: &mut String) {
    match e.node() {
        Node::Const(c) => out.push_str(&infix_const(*c)),
        Node::Var(s) => out.push_str(s.name()),
        Node::Sum(xs) => write_joined(xs, " + ", out),
        Node::Product(xs) => write_joined(xs, " * ", out),
        Node::Pow(a, b) => {
            out.push('(');
            write_infix(a, out);
            out.push_str(" ^ ");
            write_infix(b, out);
            out.push(')');
        }
        Node::Quotient(a, b) => {
            out.push('(');
            write_infix(a, out);
            out.push_str(" / ");
            write_infix(b, out);
            out.push(')');
        }
        Node::Neg(a) => {
            out.push_str("(-");
            write_infix(a, out);
            out.push(')');
        }
        Node::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_infix(a, out);
            }
            out.push(')');
        }
    }
}

/// Canonical prefix form, e.g. `(+ x (* 2 y))`.
pub(crate) fn prefix(e: &Expr) -> String {
    let mut out = String::new();
    write_prefix(e, &mut out);
    out
}

/// Prefix form cut to a size suitable for error messages.
pub(crate) fn truncated_prefix(e: &Expr) -> String {
    let mut s = prefix(e);
    if s.len() > 240 {
        let mut cut = 240;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str(" ...");
    }
    s
}

fn write_list(head: &str, xs: &[&Expr], out: &mut String) {
    out.push('(');
    out.push_str(head);
    for x in xs {
        out.push(' ');
        write_prefix(x, out);
    }
    out.push(')');
}

fn write_prefix(e: &Expr, out: &mut String) {
    match e.node() {
        Node::Const(c) if c.im == 0.0 => out.push_str(&format_real(c.re)),
        Node::Const(c) => {
            out.push_str(&format!("(complex {} {})", format_real(c.re), format_real(c.im)))
        }
        Node::Var(s) => out.push_str(s.name()),
        Node::Sum(xs) => write_list("+", &xs.iter().collect::<Vec<_>>(), out),
        Node::Product(xs) => write_list("*", &xs.iter().collect::<Vec<_>>(), out),
        Node::Pow(a, b) => write_list("^", &[a, b], out),
        Node::Quotient(a, b) => write_list("/", &[a, b], out),
        Node::Neg(a) => write_list("-", &[a], out),
        Node::Call(f, args) => write_list(f.name(), &args.iter().collect::<Vec<_>>(), out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, VarRegistry};

    #[test]
    fn prefix_forms() {
        let reg = VarRegistry::real(&["x", "y"]);
        let e = parse("x + 2*y", &reg).unwrap();
        assert_eq!(e.to_prefix(), "(+ x (* 2 y))");
        let e = parse("-x^2 / atan2(y, x)", &reg).unwrap();
        assert_eq!(e.to_prefix(), "(/ (- (^ x 2)) (atan2 y x))");
        let c = Expr::complex_constant(Complex64::new(1.5, -2.0));
        assert_eq!(c.to_prefix(), "(complex 1.5 -2)");
    }

    #[test]
    fn infix_forms() {
        let reg = VarRegistry::real(&["x", "y"]);
        let e = parse("x - 3*y", &reg).unwrap();
        assert_eq!(e.to_string(), "(x + (-(3 * y)))");
        assert_eq!(Expr::constant(-3.0).to_string(), "(-3)");
        assert_eq!(Expr::constant(1e-7).to_string(), "1e-7");
        assert_eq!(
            Expr::complex_constant(Complex64::new(1.0, -2.0)).to_string(),
            "(1 + ((-2) * I))"
        );
    }
}
