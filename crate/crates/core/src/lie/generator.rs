use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Comparison, Expr};
use crate::jet::JetSpace;
use crate::sampling::SamplingBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// Coefficients depend on independent and dependent variables only.
    Point,
    /// Coefficients may depend on first derivatives.
    Contact,
}

/// `X = sum_i xi_i d/dx_i + sum_a phi_a d/du_a`.
#[derive(Clone, Debug)]
pub struct GeneratorField {
    pub label: String,
    pub independent: Vec<String>,
    pub dependent: Vec<String>,
    pub xi: Vec<Expr>,
    pub phi: Vec<Expr>,
    pub kind: FieldKind,
}

impl GeneratorField {
    pub fn new(
        label: &str,
        independent: &[&str],
        dependent: &[&str],
        xi: Vec<Expr>,
        phi: Vec<Expr>,
        kind: FieldKind,
    ) -> Result<Self> {
        if xi.len() != independent.len() || phi.len() != dependent.len() {
            return Err(Error::Invalid(format!(
                "field `{label}`: {} xi / {} phi coefficients for {} independent / {} dependent variables",
                xi.len(),
                phi.len(),
                independent.len(),
                dependent.len()
            )));
        }
        Ok(GeneratorField {
            label: label.to_string(),
            independent: independent.iter().map(|s| s.to_string()).collect(),
            dependent: dependent.iter().map(|s| s.to_string()).collect(),
            xi,
            phi,
            kind,
        })
    }

    pub fn point(label: &str, independent: &[&str], dependent: &[&str], xi: Vec<Expr>, phi: Vec<Expr>) -> Result<Self> {
        Self::new(label, independent, dependent, xi, phi, FieldKind::Point)
    }

    /// The zero field on the given variables.
    pub fn zero(label: &str, independent: &[&str], dependent: &[&str]) -> Self {
        Self::point(
            label,
            independent,
            dependent,
            vec![Expr::zero(); independent.len()],
            vec![Expr::zero(); dependent.len()],
        )
        .expect("counts match")
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Coefficient names followed by expressions, independent first.
    pub fn coefficients(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.independent
            .iter()
            .zip(&self.xi)
            .chain(self.dependent.iter().zip(&self.phi))
            .map(|(n, e)| (n.as_str(), e))
    }

    pub fn coefficient(&self, var: &str) -> Option<&Expr> {
        self.coefficients().find(|(n, _)| *n == var).map(|(_, e)| e)
    }

    /// Apply the (unprolonged) field to a function of the base variables.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut out = Expr::zero();
        for (name, c) in self.coefficients() {
            if c.is_zero() {
                continue;
            }
            let df = f.differentiate(name)?;
            if !df.is_zero() {
                out = out.add(&c.mul(&df));
            }
        }
        Ok(out.simplify())
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut g = self.clone();
        for c in g.xi.iter_mut().chain(g.phi.iter_mut()) {
            *c = c.mul(&Expr::constant(k)).simplify();
        }
        g
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_variables(other)?;
        let mut g = self.clone();
        for (a, b) in g.xi.iter_mut().zip(&other.xi).chain(g.phi.iter_mut().zip(&other.phi)) {
            *a = a.add(b).simplify();
        }
        g.label = format!("{} + {}", self.label, other.label);
        if other.kind == FieldKind::Contact {
            g.kind = FieldKind::Contact;
        }
        Ok(g)
    }

    fn same_variables(&self, other: &Self) -> Result<()> {
        if self.independent != other.independent || self.dependent != other.dependent {
            return Err(Error::Invalid(format!(
                "fields `{}` and `{}` live on different variables",
                self.label, other.label
            )));
        }
        Ok(())
    }

    /// Reject point fields whose coefficients mention derivative coordinates.
    pub fn validate_point(&self, jet: &JetSpace) -> Result<()> {
        if self.kind == FieldKind::Contact {
            return Err(Error::Invalid(format!(
                "field `{}` is a contact field; use the conditional-symmetry path",
                self.label
            )));
        }
        for (name, c) in self.coefficients() {
            if let Some(d) = c.free_vars().into_iter().find(|v| jet.is_derivative(v)) {
                return Err(Error::Invalid(format!(
                    "point field `{}` has derivative coordinate `{d}` in its `{name}` coefficient",
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Characteristic `Q_a = phi_a - sum_i xi_i u_{a,i}` in jet coordinates.
    pub fn characteristic(&self, jet: &JetSpace) -> Result<Vec<Expr>> {
        self.dependent
            .iter()
            .zip(&self.phi)
            .map(|(u, phi)| {
                let mut q = phi.clone();
                for (x, xi) in self.independent.iter().zip(&self.xi) {
                    if !xi.is_zero() {
                        q = q.sub(&xi.mul(&Expr::var(&jet.name_of(u, x)?)));
                    }
                }
                Ok(q.simplify())
            })
            .collect()
    }
}

/// Lie bracket `[X, Y]`, coefficient-wise `X(c_Y) - Y(c_X)`.
pub fn commutator(g1: &GeneratorField, g2: &GeneratorField) -> Result<GeneratorField> {
    g1.same_variables(g2)?;
    let mut out = GeneratorField::zero(
        &format!("[{}, {}]", g1.label, g2.label),
        &g1.independent.iter().map(String::as_str).collect::<Vec<_>>(),
        &g1.dependent.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    let slots = out.xi.len();
    for k in 0..slots + out.phi.len() {
        let (a, b) = if k < slots {
            (&g1.xi[k], &g2.xi[k])
        } else {
            (&g1.phi[k - slots], &g2.phi[k - slots])
        };
        let c = g1.apply(b)?.sub(&g2.apply(a)?).simplify();
        if k < slots {
            out.xi[k] = c;
        } else {
            out.phi[k - slots] = c;
        }
    }
    Ok(out)
}

/// Coefficient-wise sampled comparison of two fields; the deviation is the
/// worst over all coefficients.
pub fn compare_fields(
    g1: &GeneratorField,
    g2: &GeneratorField,
    bx: &SamplingBox,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<Comparison> {
    g1.same_variables(g2)?;
    let mut worst: Option<Comparison> = None;
    for ((_, a), (_, b)) in g1.coefficients().zip(g2.coefficients()) {
        let c = crate::expr::compare(a, b, bx, n, tol, seed)?;
        let replace = worst.as_ref().map_or(true, |w| c.max_deviation > w.max_deviation);
        let equal = c.equal && worst.as_ref().map_or(true, |w| w.equal);
        if replace {
            worst = Some(Comparison { equal, ..c });
        } else if let Some(w) = worst.as_mut() {
            w.equal = equal;
        }
    }
    Ok(worst.expect("fields have coefficients"))
}
