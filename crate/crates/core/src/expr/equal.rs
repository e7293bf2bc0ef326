use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sampling::{format_point, point_map, rng, SamplingBox};

use super::Expr;

/// Outcome of a sampled comparison.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub equal: bool,
    /// Largest `|a - b| / (1 + max(|a|, |b|))` seen.
    pub max_deviation: f64,
    pub worst_point: BTreeMap<String, f64>,
}

/// Compare two expressions at `n` seeded points of `bx`.
///
/// Agreement at a point means `|a - b| <= tol * (1 + max(|a|, |b|))`. An
/// evaluation failure is an error carrying the offending point, never a
/// silent `false`.
pub fn compare(a: &Expr, b: &Expr, bx: &SamplingBox, n: usize, tol: f64, seed: u64) -> Result<Comparison> {
    let mut r = rng(seed);
    let mut out = Comparison {
        equal: true,
        max_deviation: 0.0,
        worst_point: BTreeMap::new(),
    };
    for _ in 0..n {
        let (p, _) = bx.sample(&mut r)?;
        let at = |e: &Expr| {
            e.eval(&p).map_err(|source| Error::EvalAt {
                point: format_point(&p),
                source,
            })
        };
        let (va, vb) = (at(a)?, at(b)?);
        let dev = (va - vb).norm() / (1.0 + va.norm().max(vb.norm()));
        if dev > out.max_deviation || out.worst_point.is_empty() {
            out.max_deviation = out.max_deviation.max(dev);
            out.worst_point = point_map(&p);
        }
        if dev > tol {
            out.equal = false;
        }
    }
    Ok(out)
}

pub fn numeric_equal(a: &Expr, b: &Expr, bx: &SamplingBox, n: usize, tol: f64, seed: u64) -> Result<bool> {
    Ok(compare(a, b, bx, n, tol, seed)?.equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, VarRegistry};

    #[test]
    fn identities_and_non_identities() {
        let r = VarRegistry::real(&["x", "y"]);
        let bx = SamplingBox::new().real("x", -2.0, 2.0).real("y", -2.0, 2.0);
        let p = |s: &str| parse(s, &r).unwrap();
        assert!(numeric_equal(&p("cosh(x)^2 - sinh(x)^2"), &p("1"), &bx, 50, 1e-12, 1).unwrap());
        assert!(numeric_equal(&p("(x+y)^2"), &p("x^2 + 2*x*y + y^2"), &bx, 50, 1e-12, 1).unwrap());
        assert!(!numeric_equal(&p("(x+y)^2"), &p("x^2 + y^2"), &bx, 50, 1e-12, 1).unwrap());
    }

    #[test]
    fn eval_failure_reports_point() {
        let r = VarRegistry::real(&["x"]);
        let bx = SamplingBox::new().real("x", -2.0, -1.0);
        let err = numeric_equal(&parse("ln(x)", &r).unwrap(), &Expr::zero(), &bx, 5, 1e-9, 0).unwrap_err();
        match err {
            Error::EvalAt { point, .. } => assert!(point.starts_with("x=-")),
            other => panic!("{other:?}"),
        }
    }
}
