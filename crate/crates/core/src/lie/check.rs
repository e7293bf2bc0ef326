use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::JetSpace;
use crate::report::{merge, scaled_residual, ReportBuilder, ResidualReport};
use crate::sampling::rng;
use crate::solution::ClosedFormSolution;

use super::generator::{FieldKind, GeneratorField};
use super::prolong::{prolong, Prolongation};
use super::system::{EquationSystem, SolveRule};

/// The terms `zeta^c * dDelta/dc` of `pr X (Delta)` for each equation.
pub fn symmetry_terms(pr: &Prolongation, sys: &EquationSystem) -> Result<Vec<Vec<Expr>>> {
    let mut out = Vec::with_capacity(sys.equations.len());
    for eq in &sys.equations {
        let mut terms = Vec::new();
        for name in eq.free_vars() {
            let Some(c) = pr.get(&name) else { continue };
            if c.is_zero() {
                continue;
            }
            let d = eq.d(&name)?;
            if !d.is_zero() {
                terms.push(c.mul(&d).simplify());
            }
        }
        out.push(terms);
    }
    Ok(out)
}

/// `pr X (Delta_k)` evaluated on the equation manifold at seeded jet points;
/// the residual at a point is the worst scaled residual over the equations.
pub fn infinitesimal_symmetry_check(
    g: &GeneratorField,
    sys: &EquationSystem,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ResidualReport> {
    let order = sys.order().max(1);
    let pr = prolong(g, order, &sys.jet)?;
    let terms = symmetry_terms(&pr, sys)?;
    let mut r = rng(seed);
    let mut b = ReportBuilder::new(format!("{} on {}", g.label, sys.name), seed, tol);
    for _ in 0..samples {
        let (p, rej) = sys.sample(&mut r)?;
        b.add_resampled(rej);
        let mut worst: f64 = 0.0;
        for ts in &terms {
            let vals = ts.iter().map(|t| t.eval(&p)).collect::<std::result::Result<Vec<_>, _>>()?;
            worst = worst.max(scaled_residual(&vals));
        }
        b.push(&p, worst);
    }
    Ok(b.finish())
}

/// Check a one-parameter family of transformed solutions against `sys`.
///
/// The family at parameter 0 must itself pass; every listed parameter is
/// then checked on the family member's own domain.
pub fn flow_orbit_check(
    label: &str,
    family: impl Fn(f64) -> Result<ClosedFormSolution>,
    sys: &EquationSystem,
    params: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ResidualReport> {
    let base = family(0.0)?.residual_report(sys, samples, seed, tol)?;
    if !base.pass {
        return Err(Error::Invalid(format!(
            "{label}: base solution fails {} (max {:e})",
            sys.name, base.max
        )));
    }
    let mut parts = vec![base];
    for &lam in params {
        let sol = family(lam)?;
        let mut rep = sol.residual_report(sys, samples, seed, tol)?;
        rep.check = format!("{label} at {lam}");
        parts.push(rep);
    }
    Ok(merge(label, seed, tol, &parts))
}

/// Invariant-surface conditions `Q_a = phi_a - sum_i xi_i u_{a,i}` of a field.
/// For contact fields the coefficients already live on the jet.
pub fn invariant_surface_conditions(g: &GeneratorField, jet: &JetSpace) -> Result<Vec<Expr>> {
    g.characteristic(jet)
}

/// Conditional symmetry in the operational sense: the candidate satisfies
/// the system and the invariant-surface conditions of `g`. The report note
/// names the failing part.
pub fn conditional_symmetry_check(
    g: &GeneratorField,
    sys: &EquationSystem,
    sol: &ClosedFormSolution,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ResidualReport> {
    let system = sol.residual_report(sys, samples, seed, tol)?;
    let q = invariant_surface_conditions(g, &sys.jet)?;
    let mut surface = sol.residual_report_for(
        &format!("{} invariant surface of {}", sol.name, g.label),
        &sys.jet,
        &q,
        samples,
        seed,
        tol,
    )?;
    if g.kind == FieldKind::Point && q.iter().all(|e| e.is_zero()) {
        surface.note = Some("field has identically zero characteristic".into());
    }
    Ok(merge(
        format!("{} conditional under {}", sol.name, g.label),
        seed,
        tol,
        &[system, surface],
    ))
}

/// Outcome of a partial-symmetry check.
#[derive(Clone, Debug)]
pub struct PartialSymmetryReport {
    /// `pr X (Delta)` on `Delta = 0` and the condition: must vanish.
    pub on_subset: ResidualReport,
    /// `pr X (Delta)` on `Delta = 0` only: expected to fail.
    pub off_subset: ResidualReport,
    /// `X` on the enlarged system: exact symmetry expected.
    pub enlarged: ResidualReport,
}

impl PartialSymmetryReport {
    pub fn pass(&self) -> bool {
        self.on_subset.pass && !self.off_subset.pass && self.enlarged.pass
    }
}

/// `g` is a partial symmetry of `sys` with characterizing `condition`
/// (solved for `rule.target`, which is applied before the system's rules).
pub fn partial_symmetry_check(
    g: &GeneratorField,
    sys: &EquationSystem,
    condition: &Expr,
    rule: SolveRule,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PartialSymmetryReport> {
    let enlarged = sys.with_equations(&format!("{} + condition", sys.name), vec![condition.clone()], vec![rule])?;
    // pr X applied to the original equations only, sampled on the enlarged manifold.
    let restricted = EquationSystem::new(
        &format!("{} on condition", sys.name),
        sys.jet.clone(),
        sys.equations.clone(),
        enlarged.rules.clone(),
        sys.sampling.clone(),
    )?;
    let on_subset = infinitesimal_symmetry_check(g, &restricted, samples, seed, tol)?;
    let off_subset = infinitesimal_symmetry_check(g, sys, samples, seed, tol)?;
    let enlarged = infinitesimal_symmetry_check(g, &enlarged, samples, seed, tol)?;
    Ok(PartialSymmetryReport {
        on_subset,
        off_subset,
        enlarged,
    })
}
