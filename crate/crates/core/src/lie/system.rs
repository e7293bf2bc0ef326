use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Coord, JetPoint, JetSpace};
use crate::report::{scaled_residual, ReportBuilder, ResidualReport};
use crate::sampling::{rng, uniform, Rng8, SamplingBox, MAX_REJECTIONS};

/// Coefficients smaller than this make a solve rule ill-conditioned; the
/// jet point is redrawn.
pub const MIN_PIVOT: f64 = 1e-6;

/// `target = rule` on the equation manifold.
#[derive(Clone, Debug)]
pub struct SolveRule {
    pub target: String,
    pub rule: Expr,
    pub coefficient: Expr,
}

impl SolveRule {
    /// Solve `combination = 0` for a target it contains linearly.
    pub fn linear(combination: &Expr, target: &str) -> Result<Self> {
        let coefficient = combination.d(target)?;
        if coefficient.is_zero() {
            return Err(Error::Invalid(format!("`{target}` does not occur in the equation")));
        }
        if coefficient.contains_var(target) {
            return Err(Error::Invalid(format!("`{target}` does not occur linearly")));
        }
        let rest = combination.substitute(target, &Expr::zero()).simplify();
        let rule = rest.negate().div(&coefficient).simplify();
        Ok(SolveRule {
            target: target.to_string(),
            rule,
            coefficient,
        })
    }
}

/// Sampling ranges for jet points.
#[derive(Clone, Debug)]
pub struct JetSampling {
    /// Independent variables (and exclusions on them).
    pub base: SamplingBox,
    /// Order-zero ranges per dependent variable.
    pub values: Vec<(String, (f64, f64))>,
    /// Range of every derivative coordinate.
    pub derivatives: (f64, f64),
}

impl JetSampling {
    pub fn new(base: SamplingBox) -> Self {
        JetSampling {
            base,
            values: Vec::new(),
            derivatives: (-2.0, 2.0),
        }
    }

    pub fn value_range(mut self, var: &str, lo: f64, hi: f64) -> Self {
        self.values.push((var.to_string(), (lo, hi)));
        self
    }
}

/// Residuals over jet coordinates plus solve rules for distinguished
/// derivatives, applied in order.
#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub name: String,
    pub jet: Arc<JetSpace>,
    pub equations: Vec<Expr>,
    pub rules: Vec<SolveRule>,
    pub sampling: JetSampling,
}

impl EquationSystem {
    pub fn new(name: &str, jet: Arc<JetSpace>, equations: Vec<Expr>, rules: Vec<SolveRule>, sampling: JetSampling) -> Result<Self> {
        for (k, r) in rules.iter().enumerate() {
            if jet.coord(&r.target).is_none() {
                return Err(Error::Invalid(format!("solve target `{}` is not a jet coordinate", r.target)));
            }
            for later in &rules[k..] {
                if r.rule.contains_var(&later.target) || r.coefficient.contains_var(&later.target) {
                    return Err(Error::Invalid(format!(
                        "rule for `{}` depends on `{}`, which is solved at or after it",
                        r.target, later.target
                    )));
                }
            }
        }
        Ok(EquationSystem {
            name: name.to_string(),
            jet,
            equations,
            rules,
            sampling,
        })
    }

    /// Highest jet order used by the equations.
    pub fn order(&self) -> usize {
        self.equations.iter().map(|e| self.jet.order_in(e)).max().unwrap_or(0)
    }

    /// Same rules and sampling, extra equations appended.
    pub fn with_equations(&self, name: &str, extra: Vec<Expr>, extra_rules: Vec<SolveRule>) -> Result<Self> {
        let mut eqs = self.equations.clone();
        eqs.extend(extra);
        let mut rules = extra_rules;
        rules.extend(self.rules.iter().cloned());
        EquationSystem::new(name, self.jet.clone(), eqs, rules, self.sampling.clone())
    }

    /// A jet point on the manifold cut out by the solve rules, and the
    /// number of rejected draws.
    pub fn sample(&self, r: &mut Rng8) -> Result<(JetPoint, usize)> {
        let mut rejected = 0;
        while rejected < MAX_REJECTIONS {
            let (mut p, rej) = self.sampling.base.sample(r)?;
            rejected += rej;
            for (c, name) in self.jet.coords() {
                if let Coord::Dependent { var, index } = c {
                    let range = if index.order() == 0 {
                        let dep = &self.jet.dependent()[*var];
                        self.sampling
                            .values
                            .iter()
                            .find(|(n, _)| n == dep)
                            .map(|(_, r)| *r)
                            .unwrap_or(self.sampling.derivatives)
                    } else {
                        self.sampling.derivatives
                    };
                    p.set(name, uniform(r, range.0, range.1));
                }
            }
            if self.project(&mut p) {
                return Ok((p, rejected));
            }
            rejected += 1;
        }
        Err(Error::Sampling(format!(
            "{}: no well-conditioned jet point after {MAX_REJECTIONS} draws",
            self.name
        )))
    }

    /// Overwrite the distinguished derivatives by their solve rules; false if
    /// a pivot is too small or a rule cannot be evaluated.
    pub fn project(&self, p: &mut JetPoint) -> bool {
        for rule in &self.rules {
            match rule.coefficient.eval(p) {
                Ok(c) if c.norm() >= MIN_PIVOT => {}
                _ => return false,
            }
            match rule.rule.eval(p) {
                Ok(v) if v.im.abs() <= 1e-12 * (1.0 + v.re.abs()) => {
                    p.set(&rule.target, v.re);
                }
                _ => return false,
            }
        }
        true
    }

    /// Scaled residual of every equation at a jet point.
    pub fn residuals_at(&self, p: &JetPoint) -> Result<Vec<f64>> {
        self.equations.iter().map(|e| expr_scaled_residual(e, p)).collect()
    }

    /// Evaluate the equations right after projection; they must vanish.
    pub fn check_rules(&self, samples: usize, seed: u64, tol: f64) -> Result<ResidualReport> {
        let mut r = rng(seed);
        let mut b = ReportBuilder::new(format!("{}: solve rules", self.name), seed, tol);
        for _ in 0..samples {
            let (p, rej) = self.sample(&mut r)?;
            b.add_resampled(rej);
            let worst = self.residuals_at(&p)?.into_iter().fold(0.0, f64::max);
            b.push(&p, worst);
        }
        Ok(b.finish())
    }
}

/// `|e| / (1 + max |term|)` where the terms are the summands of `e` (or `e`
/// itself when it is not a sum).
pub fn expr_scaled_residual(e: &Expr, p: &JetPoint) -> Result<f64> {
    let terms = match e.node() {
        crate::expr::Node::Sum(ts) => ts
            .iter()
            .map(|t| t.eval(p))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        _ => vec![e.eval(p)?],
    };
    if terms.len() == 1 {
        return Ok(terms[0].norm());
    }
    Ok(scaled_residual(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_rule_from_equation() {
        let jet = JetSpace::new(&["x", "y"], &["u"], 2).unwrap();
        // x*u_yy + u_xx + exp(2u) = 0, solved for u_yy
        let eq = Expr::var("x").mul(&jet.var("u", "yy")).add(&jet.var("u", "xx")).add(&(2.0 * jet.var("u", "")).exp());
        let rule = SolveRule::linear(&eq, "u_yy").unwrap();
        assert_eq!(rule.coefficient, Expr::var("x"));
        let sys = EquationSystem::new(
            "demo",
            Arc::new(jet),
            vec![eq.clone()],
            vec![rule],
            JetSampling::new(SamplingBox::new().real("x", -1.0, 1.0).real("y", -1.0, 1.0)),
        )
        .unwrap();
        let rep = sys.check_rules(50, 9, 1e-12).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(SolveRule::linear(&jet_square(), "u_x").is_err());
    }

    fn jet_square() -> Expr {
        Expr::var("u_x").powf(2.0)
    }

    #[test]
    fn rule_ordering_enforced() {
        let jet = Arc::new(JetSpace::new(&["x", "y"], &["u"], 2).unwrap());
        let r1 = SolveRule::linear(&(Expr::var("u_xx") - Expr::var("u_yy")), "u_xx").unwrap();
        let r2 = SolveRule::linear(&(Expr::var("u_yy") - 1.0), "u_yy").unwrap();
        let samp = JetSampling::new(SamplingBox::new().real("x", 0.0, 1.0).real("y", 0.0, 1.0));
        assert!(EquationSystem::new("bad", jet.clone(), vec![], vec![r1.clone(), r2.clone()], samp.clone()).is_err());
        assert!(EquationSystem::new("good", jet, vec![], vec![r2, r1], samp).is_ok());
    }
}
