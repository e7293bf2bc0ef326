//! Closed-form solutions and their residuals.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::expr::{EvalPoint, Expr};
use crate::jet::{Coord, JetPoint, JetSpace, MultiIndex};
use crate::lie::{expr_scaled_residual, EquationSystem};
use crate::report::{ReportBuilder, ResidualReport};
use crate::sampling::{format_point, rng, SamplingBox};

/// Named expressions for the dependent variables, with bound parameters and
/// a validity domain over the independent variables.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    pub name: String,
    pub independent: Vec<String>,
    pub fields: Vec<(String, Expr)>,
    pub params: Vec<(String, f64)>,
    pub domain: SamplingBox,
    /// Catalog name or transform history.
    pub provenance: String,
}

impl ClosedFormSolution {
    pub fn new(name: &str, independent: &[&str], fields: Vec<(&str, Expr)>, domain: SamplingBox) -> Self {
        ClosedFormSolution {
            name: name.to_string(),
            independent: independent.iter().map(|s| s.to_string()).collect(),
            fields: fields.into_iter().map(|(n, e)| (n.to_string(), e)).collect(),
            params: Vec::new(),
            domain,
            provenance: name.to_string(),
        }
    }

    pub fn with_params(mut self, params: &[(&str, f64)]) -> Self {
        self.params = params.iter().map(|(n, v)| (n.to_string(), *v)).collect();
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn with_domain(mut self, domain: SamplingBox) -> Self {
        self.domain = domain;
        self
    }

    pub fn field(&self, dep: &str) -> Option<&Expr> {
        self.fields.iter().find(|(n, _)| n == dep).map(|(_, e)| e)
    }

    /// Parameters as an evaluation point, to be extended with coordinates.
    pub fn base_point(&self) -> EvalPoint {
        let mut p = EvalPoint::new();
        for (n, v) in &self.params {
            p.set(n, *v);
        }
        p
    }

    /// Real value of one field at the given coordinates.
    pub fn value(&self, dep: &str, coords: &[(&str, f64)]) -> Result<f64> {
        let e = self.field(dep).ok_or_else(|| Error::Unknown {
            kind: "dependent variable",
            name: dep.into(),
        })?;
        let mut p = self.base_point();
        for (n, v) in coords {
            p.set(n, *v);
        }
        Ok(e.eval_real(&p)?)
    }

    /// Derivatives of the fields for every dependent jet coordinate that
    /// occurs in `exprs`.
    pub fn derivative_table(&self, jet: &JetSpace, exprs: &[Expr]) -> Result<DerivativeTable> {
        if self.independent.as_slice() != jet.independent() {
            return Err(Error::Invalid(format!(
                "solution `{}` is over {:?}, the jet over {:?}",
                self.name,
                self.independent,
                jet.independent()
            )));
        }
        let mut table = DerivativeTable {
            entries: Vec::new(),
            cache: HashMap::new(),
        };
        let mut wanted: Vec<String> = exprs.iter().flat_map(|e| e.free_vars()).collect();
        wanted.sort();
        wanted.dedup();
        for name in wanted {
            if let Some(Coord::Dependent { var, index }) = jet.coord(&name) {
                let e = table.derive(self, jet, *var, index)?;
                table.entries.push((name, e));
            }
        }
        Ok(table)
    }

    /// Scaled residuals of `exprs` (functions on the jet) along the solution.
    pub fn residual_report_for(
        &self,
        check: &str,
        jet: &JetSpace,
        exprs: &[Expr],
        samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<ResidualReport> {
        let table = self.derivative_table(jet, exprs)?;
        let mut r = rng(seed);
        let mut b = ReportBuilder::new(check, seed, tol);
        let mut first_error = None;
        for _ in 0..samples {
            let (p, rej) = self.domain.sample(&mut r)?;
            b.add_resampled(rej);
            let mut jp = self.base_point();
            for (n, v) in p.iter() {
                jp.set_complex(n, v);
            }
            let worst = table.fill(&mut jp).and_then(|()| {
                let mut worst: f64 = 0.0;
                for e in exprs {
                    worst = worst.max(expr_scaled_residual(e, &jp)?);
                }
                Ok(worst)
            });
            match worst {
                Ok(w) => b.push(&p, w),
                Err(e) => {
                    if first_error.is_none() {
                        first_error = Some(format!("at {}: {e}", format_point(&p)));
                    }
                    b.push(&p, f64::INFINITY);
                }
            }
        }
        if let Some(e) = first_error {
            b.note(format!("evaluation failed {e}"));
        }
        Ok(b.finish())
    }

    /// Residual of an equation system along the solution.
    pub fn residual_report(&self, sys: &EquationSystem, samples: usize, seed: u64, tol: f64) -> Result<ResidualReport> {
        self.residual_report_for(
            &format!("{} solves {}", self.name, sys.name),
            &sys.jet,
            &sys.equations,
            samples,
            seed,
            tol,
        )
    }
}

/// Symbolic derivatives of a solution, keyed by jet coordinate name.
pub struct DerivativeTable {
    entries: Vec<(String, Expr)>,
    cache: HashMap<(usize, MultiIndex), Expr>,
}

impl DerivativeTable {
    fn derive(&mut self, sol: &ClosedFormSolution, jet: &JetSpace, var: usize, index: &MultiIndex) -> Result<Expr> {
        if let Some(e) = self.cache.get(&(var, index.clone())) {
            return Ok(e.clone());
        }
        let e = match index.last_direction() {
            None => {
                let dep = &jet.dependent()[var];
                sol.field(dep)
                    .ok_or_else(|| Error::Invalid(format!("solution `{}` has no field `{dep}`", sol.name)))?
                    .clone()
            }
            Some(i) => {
                let parent = index.lowered(i).expect("nonzero count");
                let pe = self.derive(sol, jet, var, &parent)?;
                pe.d(&jet.independent()[i])?
            }
        };
        self.cache.insert((var, index.clone()), e.clone());
        Ok(e)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.entries.iter().map(|(n, e)| (n.as_str(), e))
    }

    /// Evaluate every entry at `p` (which holds the coordinates) and store
    /// the values under the jet coordinate names.
    pub fn fill(&self, p: &mut JetPoint) -> Result<()> {
        let mut values = Vec::with_capacity(self.entries.len());
        for (n, e) in &self.entries {
            values.push((n, e.eval(p)?));
        }
        for (n, v) in values {
            p.set_complex(n, v);
        }
        Ok(())
    }
}
