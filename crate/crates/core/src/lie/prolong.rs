use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Coord, JetSpace, MultiIndex};

use super::generator::{FieldKind, GeneratorField};

pub const MAX_PROLONGATION_ORDER: usize = 3;

/// Coefficients of a prolonged field keyed by jet coordinate name; the base
/// coefficients (`x`, `u`, ...) are included.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub order: usize,
    coeffs: BTreeMap<String, Expr>,
}

impl Prolongation {
    pub fn get(&self, coord: &str) -> Option<&Expr> {
        self.coeffs.get(coord)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.coeffs.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Apply `pr X` to a function on the jet.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut out = Expr::zero();
        for name in f.free_vars() {
            let Some(c) = self.coeffs.get(&name) else {
                continue;
            };
            if c.is_zero() {
                continue;
            }
            out = out.add(&c.mul(&f.differentiate(&name)?));
        }
        Ok(out.simplify())
    }
}

fn base_table(g: &GeneratorField, jet: &JetSpace) -> Result<BTreeMap<String, Expr>> {
    if g.independent.as_slice() != jet.independent() || g.dependent.as_slice() != jet.dependent() {
        return Err(Error::Invalid(format!(
            "field `{}` does not match the jet variables {:?} / {:?}",
            g.label,
            jet.independent(),
            jet.dependent()
        )));
    }
    Ok(g.coefficients().map(|(n, e)| (n.to_string(), e.clone())).collect())
}

fn check_order(order: usize, jet: &JetSpace) -> Result<()> {
    if order == 0 || order > MAX_PROLONGATION_ORDER {
        return Err(Error::Invalid(format!(
            "prolongation order {order} outside 1..={MAX_PROLONGATION_ORDER}"
        )));
    }
    if order > jet.max_order() {
        return Err(Error::Invalid(format!(
            "prolongation order {order} exceeds jet order {}",
            jet.max_order()
        )));
    }
    Ok(())
}

fn dep_coord(jet: &JetSpace, var: usize, index: MultiIndex) -> Expr {
    Expr::var(&jet.coord_name(&Coord::Dependent { var, index }))
}

/// Prolong a point field by
/// `zeta^{J,i} = D_i zeta^J - sum_j (D_i xi_j) u_{J,j}`.
pub fn prolong(g: &GeneratorField, order: usize, jet: &JetSpace) -> Result<Prolongation> {
    check_order(order, jet)?;
    if g.kind == FieldKind::Contact {
        return Err(Error::Invalid(format!(
            "field `{}` is a contact field; the point prolongation does not apply",
            g.label
        )));
    }
    g.validate_point(jet)?;
    let mut coeffs = base_table(g, jet)?;
    let n = jet.independent().len();
    let mut dxi: Vec<Vec<Expr>> = Vec::with_capacity(n);
    for i in 0..n {
        let row = g
            .xi
            .iter()
            .map(|xi| jet.total_derivative(xi, i))
            .collect::<Result<Vec<_>>>()?;
        dxi.push(row);
    }
    let targets: Vec<(usize, MultiIndex)> = jet
        .coords()
        .filter_map(|(c, _)| match c {
            Coord::Dependent { var, index } if (1..=order).contains(&index.order()) => {
                Some((*var, index.clone()))
            }
            _ => None,
        })
        .collect();
    // Coordinates come by increasing order, so every parent is present.
    for (var, index) in targets {
        let i = index.last_direction().expect("order >= 1");
        let parent = index.lowered(i).expect("nonzero count");
        let parent_name = jet.coord_name(&Coord::Dependent { var, index: parent.clone() });
        let mut z = jet.total_derivative(&coeffs[&parent_name], i)?;
        for (j, dij) in dxi[i].iter().enumerate() {
            if !dij.is_zero() {
                z = z.sub(&dij.mul(&dep_coord(jet, var, parent.raised(j))));
            }
        }
        let name = jet.coord_name(&Coord::Dependent { var, index });
        coeffs.insert(name, z.simplify());
    }
    Ok(Prolongation { order, coeffs })
}

/// Prolongation through the characteristic:
/// `zeta^J = D_J Q + sum_j xi_j u_{J,j}` with `Q = phi - sum_j xi_j u_j`.
///
/// This route also covers contact fields. It needs one jet order more than
/// the recursion because `D_J Q` contains order `|J| + 1` terms that cancel.
pub fn prolong_via_characteristic(g: &GeneratorField, order: usize, jet: &JetSpace) -> Result<Prolongation> {
    if order == 0 || order > MAX_PROLONGATION_ORDER || order + 1 > jet.max_order() {
        return Err(Error::Invalid(format!(
            "characteristic prolongation of order {order} needs jet order {}",
            order + 1
        )));
    }
    let mut coeffs = base_table(g, jet)?;
    let q = g.characteristic(jet)?;
    let targets: Vec<(usize, MultiIndex)> = jet
        .coords()
        .filter_map(|(c, _)| match c {
            Coord::Dependent { var, index } if (1..=order).contains(&index.order()) => {
                Some((*var, index.clone()))
            }
            _ => None,
        })
        .collect();
    for (var, index) in targets {
        let mut z = jet.d_multi(&q[var], &index)?;
        for (j, xi) in g.xi.iter().enumerate() {
            if !xi.is_zero() {
                z = z.add(&xi.mul(&dep_coord(jet, var, index.raised(j))));
            }
        }
        coeffs.insert(jet.coord_name(&Coord::Dependent { var, index }), z.simplify());
    }
    Ok(Prolongation { order, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{numeric_equal, parse, VarRegistry};
    use crate::sampling::SamplingBox;

    fn jet_box(jet: &JetSpace) -> SamplingBox {
        let mut bx = SamplingBox::new();
        for (_, name) in jet.coords() {
            bx = bx.real(name, -1.5, 1.5);
        }
        bx
    }

    fn liouville_field(zeta: &str) -> GeneratorField {
        let reg = VarRegistry::real(&["x", "y", "u"]);
        let p = |s: &str| parse(s, &reg).unwrap();
        GeneratorField::point("phi=z^2", &["x", "y"], &["u"], vec![p("x^2 - y^2"), p("2*x*y")], vec![p(zeta)]).unwrap()
    }

    #[test]
    fn first_order_coefficient_by_hand() {
        let jet = JetSpace::new(&["x", "y"], &["u"], 3).unwrap();
        let pr = prolong(&liouville_field("-2*x"), 1, &jet).unwrap();
        let reg = VarRegistry::real(&["x", "y", "u_x", "u_y"]);
        let hand = parse("-2 - 2*x*u_x - 2*y*u_y", &reg).unwrap();
        let bx = jet_box(&jet);
        assert!(numeric_equal(pr.get("u_x").unwrap(), &hand, &bx, 30, 1e-12, 1).unwrap());
        // The sign printed in some references for the u_y term does not hold.
        let printed = parse("-2 - 2*x*u_x + 2*y*u_y", &reg).unwrap();
        assert!(!numeric_equal(pr.get("u_x").unwrap(), &printed, &bx, 30, 1e-12, 1).unwrap());
    }

    #[test]
    fn translation_prolongs_to_zero_and_scaling_to_u_j() {
        let jet = JetSpace::new(&["x", "y"], &["u"], 3).unwrap();
        let dy = GeneratorField::point("dy", &["x", "y"], &["u"], vec![Expr::zero(), Expr::one()], vec![Expr::zero()]).unwrap();
        let pr = prolong(&dy, 3, &jet).unwrap();
        for (name, c) in pr.iter() {
            if name != "y" {
                assert!(c.is_zero(), "{name}: {c}");
            }
        }
        let scale = GeneratorField::point("u du", &["x", "y"], &["u"], vec![Expr::zero(), Expr::zero()], vec![Expr::var("u")]).unwrap();
        let pr = prolong(&scale, 3, &jet).unwrap();
        for (c, name) in jet.coords() {
            if let Coord::Dependent { .. } = c {
                assert_eq!(pr.get(name).unwrap(), &Expr::var(name));
            }
        }
    }

    #[test]
    fn recursion_matches_characteristic_formula() {
        let jet4 = JetSpace::new(&["x", "y"], &["u"], 4).unwrap();
        let g = liouville_field("-2*x + u*y");
        let a = prolong(&g, 3, &jet4).unwrap();
        let b = prolong_via_characteristic(&g, 3, &jet4).unwrap();
        let bx = jet_box(&jet4);
        for (name, c) in a.iter() {
            assert!(numeric_equal(c, b.get(name).unwrap(), &bx, 10, 1e-10, 2).unwrap(), "{name}");
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let jet = JetSpace::new(&["x", "y"], &["u"], 3).unwrap();
        let g = liouville_field("-2*x");
        assert!(prolong(&g, 4, &jet).is_err());
        assert!(prolong(&g, 0, &jet).is_err());
        let mut c = g.clone();
        c.kind = FieldKind::Contact;
        assert!(prolong(&c, 1, &jet).is_err());
    }
}
