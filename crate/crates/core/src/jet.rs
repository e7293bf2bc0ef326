//! Jet coordinates and total derivatives.
//!
//! A derivative coordinate is named after its dependent variable and a sorted
//! multi-index of independent-variable letters: `u_xxt` is the third
//! derivative of `u` twice in `x` and once in `t`. Mixed partials are
//! therefore stored once.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{EvalPoint, Expr};

/// Numeric values of a jet: independent variables, dependent variables and
/// their derivative coordinates, keyed by coordinate name.
pub type JetPoint = EvalPoint;

/// Derivative counts per independent variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn raised(&self, i: usize) -> Self {
        let mut c = self.0.clone();
        c[i] += 1;
        MultiIndex(c)
    }

    pub fn lowered(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut c = self.0.clone();
        c[i] -= 1;
        Some(MultiIndex(c))
    }

    /// Position of the last nonzero count.
    pub fn last_direction(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c > 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coord {
    Independent(usize),
    Dependent { var: usize, index: MultiIndex },
}

#[derive(Clone)]
pub struct JetSpace {
    independent: Vec<String>,
    dependent: Vec<String>,
    max_order: usize,
    coords: Vec<Coord>,
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "JetSpace({:?} -> {:?}, order {})",
            self.independent, self.dependent, self.max_order
        )
    }
}

fn indices_of_order(n: usize, order: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, left: usize, prefix: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == n - 1 {
            prefix.push(left as u8);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k as u8);
            rec(n, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, order, &mut Vec::new(), &mut out);
    out
}

impl JetSpace {
    /// Independent variables must be single letters.
    pub fn new(independent: &[&str], dependent: &[&str], max_order: usize) -> Result<Self> {
        if independent.is_empty() || independent.iter().any(|v| v.chars().count() != 1) {
            return Err(Error::Invalid(
                "independent variables must be single letters".into(),
            ));
        }
        let mut js = JetSpace {
            independent: independent.iter().map(|s| s.to_string()).collect(),
            dependent: dependent.iter().map(|s| s.to_string()).collect(),
            max_order,
            coords: Vec::new(),
            names: Vec::new(),
            lookup: HashMap::new(),
        };
        for i in 0..independent.len() {
            js.push(Coord::Independent(i));
        }
        for order in 0..=max_order {
            for var in 0..dependent.len() {
                for index in indices_of_order(independent.len(), order) {
                    js.push(Coord::Dependent { var, index });
                }
            }
        }
        Ok(js)
    }

    fn push(&mut self, c: Coord) {
        let name = self.coord_name(&c);
        self.lookup.insert(name.clone(), self.coords.len());
        self.names.push(name);
        self.coords.push(c);
    }

    pub fn independent(&self) -> &[String] {
        &self.independent
    }

    pub fn dependent(&self) -> &[String] {
        &self.dependent
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// All coordinates with their names, independent variables first, then
    /// dependent coordinates by increasing order.
    pub fn coords(&self) -> impl Iterator<Item = (&Coord, &str)> {
        self.coords.iter().zip(self.names.iter().map(String::as_str))
    }

    pub fn coord_name(&self, c: &Coord) -> String {
        match c {
            Coord::Independent(i) => self.independent[*i].clone(),
            Coord::Dependent { var, index } => {
                let mut s = self.dependent[*var].clone();
                if index.order() > 0 {
                    s.push('_');
                    for (i, &n) in index.counts().iter().enumerate() {
                        for _ in 0..n {
                            s.push_str(&self.independent[i]);
                        }
                    }
                }
                s
            }
        }
    }

    pub fn coord(&self, name: &str) -> Option<&Coord> {
        self.lookup.get(name).map(|&k| &self.coords[k])
    }

    pub fn order_of(&self, name: &str) -> Option<usize> {
        match self.coord(name)? {
            Coord::Independent(_) => Some(0),
            Coord::Dependent { index, .. } => Some(index.order()),
        }
    }

    pub fn is_derivative(&self, name: &str) -> bool {
        self.order_of(name).is_some_and(|o| o > 0) && !matches!(self.coord(name), Some(Coord::Independent(_)))
    }

    pub fn independent_index(&self, name: &str) -> Option<usize> {
        self.independent.iter().position(|v| v == name)
    }

    pub fn dependent_index(&self, name: &str) -> Option<usize> {
        self.dependent.iter().position(|v| v == name)
    }

    /// Derivative coordinate `dep_letters`, e.g. `("u", "tx")` is `u_xt`.
    pub fn name_of(&self, dep: &str, letters: &str) -> Result<String> {
        let var = self.dependent_index(dep).ok_or_else(|| Error::Unknown {
            kind: "dependent variable",
            name: dep.into(),
        })?;
        let mut index = MultiIndex::zero(self.independent.len());
        for ch in letters.chars() {
            let i = self
                .independent_index(&ch.to_string())
                .ok_or_else(|| Error::Unknown {
                    kind: "independent variable",
                    name: ch.to_string(),
                })?;
            index = index.raised(i);
        }
        if index.order() > self.max_order {
            return Err(Error::Invalid(format!(
                "derivative order {} exceeds jet order {}",
                index.order(),
                self.max_order
            )));
        }
        Ok(self.coord_name(&Coord::Dependent { var, index }))
    }

    /// Jet variable as an expression. Panics on a malformed request, which
    /// is a programming error in a system definition.
    pub fn var(&self, dep: &str, letters: &str) -> Expr {
        Expr::var(&self.name_of(dep, letters).expect("valid jet coordinate"))
    }

    pub fn x(&self, i: usize) -> Expr {
        Expr::var(&self.independent[i])
    }

    /// Total derivative `D_i f`. Variables that are not jet coordinates are
    /// treated as constants.
    pub fn total_derivative(&self, f: &Expr, i: usize) -> Result<Expr> {
        let mut out = f.differentiate(&self.independent[i])?;
        for name in f.free_vars() {
            if let Some(Coord::Dependent { var, index }) = self.coord(&name) {
                let partial = f.differentiate(&name)?;
                if partial.is_zero() {
                    continue;
                }
                let up = index.raised(i);
                if up.order() > self.max_order {
                    return Err(Error::Invalid(format!(
                        "total derivative of `{name}` leaves the order-{} jet",
                        self.max_order
                    )));
                }
                let next = Expr::var(&self.coord_name(&Coord::Dependent { var: *var, index: up }));
                out = out.add(&next.mul(&partial));
            }
        }
        Ok(out.simplify())
    }

    /// `D_x`, `D_y`, ... by variable name.
    pub fn d(&self, f: &Expr, var: &str) -> Result<Expr> {
        let i = self.independent_index(var).ok_or_else(|| Error::Unknown {
            kind: "independent variable",
            name: var.into(),
        })?;
        self.total_derivative(f, i)
    }

    /// Total derivative along a multi-index.
    pub fn d_multi(&self, f: &Expr, index: &MultiIndex) -> Result<Expr> {
        let mut out = f.clone();
        for (i, &n) in index.counts().iter().enumerate() {
            for _ in 0..n {
                out = self.total_derivative(&out, i)?;
            }
        }
        Ok(out)
    }

    /// Planar Laplacian `D_x^2 + D_y^2`.
    pub fn laplacian(&self, f: &Expr) -> Result<Expr> {
        let fx = self.d(&self.d(f, "x")?, "x")?;
        let fy = self.d(&self.d(f, "y")?, "y")?;
        Ok(fx.add(&fy).simplify())
    }

    /// Poisson bracket `{f, g} = f_x g_y - g_x f_y` with total derivatives.
    pub fn bracket(&self, f: &Expr, g: &Expr) -> Result<Expr> {
        let (fx, fy) = (self.d(f, "x")?, self.d(f, "y")?);
        let (gx, gy) = (self.d(g, "x")?, self.d(g, "y")?);
        Ok(fx.mul(&gy).sub(&gx.mul(&fy)).simplify())
    }

    /// Highest derivative order among the jet coordinates in `f`.
    pub fn order_in(&self, f: &Expr) -> usize {
        f.free_vars()
            .iter()
            .filter(|n| !matches!(self.coord(n), Some(Coord::Independent(_))))
            .filter_map(|n| self.order_of(n))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_multi_indices() {
        let j = JetSpace::new(&["x", "y", "t"], &["u", "v"], 3).unwrap();
        assert_eq!(j.name_of("u", "txx").unwrap(), "u_xxt");
        assert_eq!(j.name_of("v", "yx").unwrap(), "v_xy");
        assert_eq!(j.name_of("u", "").unwrap(), "u");
        assert!(j.name_of("u", "xxxx").is_err());
        assert!(j.name_of("w", "x").is_err());
        // 3 independent + 2 * (1 + 3 + 6 + 10)
        assert_eq!(j.coords().count(), 3 + 2 * 20);
        assert_eq!(j.order_of("u_xyt"), Some(3));
        assert!(j.is_derivative("u_x"));
        assert!(!j.is_derivative("u"));
        assert!(!j.is_derivative("x"));
    }

    #[test]
    fn total_derivative_chain_rule() {
        let j = JetSpace::new(&["x", "y"], &["u"], 3).unwrap();
        let u = j.var("u", "");
        let ux = j.var("u", "x");
        let f = Expr::var("x").mul(&u).add(&ux.powf(2.0));
        let dx = j.d(&f, "x").unwrap();
        // u + x u_x + 2 u_x u_xx
        let want = u.add(&Expr::var("x").mul(&ux)).add(&(2.0 * &ux * j.var("u", "xx")));
        let p = JetPoint::from_reals(&[("x", 0.3), ("u", 1.1), ("u_x", -0.7), ("u_xx", 0.4)]);
        assert!((dx.eval(&p).unwrap() - want.eval(&p).unwrap()).norm() < 1e-14);
        let dy = j.d(&f, "y").unwrap();
        let p = p.with("u_y", 0.2).with("u_xy", 0.9);
        let want = Expr::var("x").mul(&j.var("u", "y")).add(&(2.0 * &ux * j.var("u", "xy")));
        assert!((dy.eval(&p).unwrap() - want.eval(&p).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn total_derivative_respects_order_cap() {
        let j = JetSpace::new(&["x", "y"], &["u"], 2).unwrap();
        assert!(j.d(&j.var("u", "xy"), "x").is_err());
        assert!(j.d(&j.var("u", "x"), "x").is_ok());
    }
}
