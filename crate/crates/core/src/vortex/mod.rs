//! The two-field vortex system
//!
//! `D_t W+- + {v +- u, W+-} = 0`, `W+- = u - lap u +- lap v`,
//!
//! for magnetic and electric potentials `u(x, y, t)`, `v(x, y, t)`: its
//! symmetry algebra, the flows of that algebra on closed-form solutions,
//! invariant reductions and the weak (conditional and partial) symmetries.

mod algebra;
mod chart;
mod flows;
mod invariant;
mod partial;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{parse, EvalPoint, Expr, VarRegistry};
use crate::jet::JetSpace;
use crate::lie::{expr_scaled_residual, EquationSystem, JetSampling, SolveRule};
use crate::report::{ReportBuilder, ResidualReport};
use crate::sampling::{rng, Exclusion, SamplingBox};
use crate::solution::ClosedFormSolution;

pub use algebra::{
    build_generator, commutator_table, jacobi_check, negative_controls, prop2_generators, x_ab, x_h, BracketCheck,
    GENERATOR_NAMES,
};
pub use chart::{canonical_reduction, CanonicalChart};
pub use flows::{moving_frame_transform, rotation_flow};
pub use invariant::{
    combined_symmetry_ansatz, contact_check, contact_family, contact_field, x4_invariant_solutions, AnsatzCheck, AnsatzKind,
    ContactFamily,
};
pub use partial::{
    euler_identity_check, partial_symmetry_solutions, partial_symmetry_u_scaling, reduced_system,
    truncated_system, truncated_system_check, TruncatedChecks, ELEMENTARY_SOLUTIONS,
};

pub const INDEPENDENT: [&str; 3] = ["x", "y", "t"];
pub const DEPENDENT: [&str; 2] = ["u", "v"];
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const SAMPLES: usize = 100;

/// Parse an expression over `x, y, t, u, v` (and `r, s, w`).
pub fn expr(src: &str) -> Result<Expr> {
    Ok(parse(src, &VarRegistry::real(&["x", "y", "t", "u", "v", "r", "s", "w"]))?)
}

/// Smooth functions `A(t)`, `B(t)`, `H(t)` parametrizing the infinite
/// families of symmetries.
#[derive(Clone, Debug)]
pub struct TimeFunctionTriple {
    pub a: Expr,
    pub b: Expr,
    pub h: Expr,
}

impl TimeFunctionTriple {
    pub fn new(a: Expr, b: Expr, h: Expr) -> Result<Self> {
        for (name, e) in [("A", &a), ("B", &b), ("H", &h)] {
            if let Some(v) = e.free_vars().into_iter().find(|v| v != "t") {
                return Err(Error::Invalid(format!("{name}(t) = {e} depends on `{v}`")));
            }
        }
        Ok(TimeFunctionTriple { a, b, h })
    }

    pub fn parse(a: &str, b: &str, h: &str) -> Result<Self> {
        Self::new(expr(a)?, expr(b)?, expr(h)?)
    }
}

/// Jet of order three over `(x, y, t; u, v)`.
pub fn vortex_jet() -> Arc<JetSpace> {
    Arc::new(JetSpace::new(&INDEPENDENT, &DEPENDENT, 3).expect("valid jet"))
}

pub(crate) fn default_sampling() -> JetSampling {
    JetSampling::new(
        SamplingBox::new()
            .real("x", -1.0, 1.0)
            .real("y", -1.0, 1.0)
            .real("t", -1.0, 1.0),
    )
    .value_range("u", -1.0, 1.0)
    .value_range("v", -1.0, 1.0)
}

/// The expanded equations
/// `D1 = D_t(u - lap u) - {u - lap u, v} + {u, lap v}` and
/// `D2 = D_t(lap v) - {u, lap u} + {v, lap v}`.
pub(crate) fn expanded(jet: &JetSpace, coupling: bool) -> Result<(Expr, Expr)> {
    let u = jet.var("u", "");
    let v = jet.var("v", "");
    let lu = jet.laplacian(&u)?;
    let lv = jet.laplacian(&v)?;
    let w = u.sub(&lu);
    let mut d1 = jet.d(&w, "t")?.sub(&jet.bracket(&w, &v)?);
    if coupling {
        d1 = d1.add(&jet.bracket(&u, &lv)?);
    }
    let d2 = jet.d(&lv, "t")?.sub(&jet.bracket(&u, &lu)?).add(&jet.bracket(&v, &lv)?);
    Ok((d1.simplify(), d2.simplify()))
}

/// `D_t W + {v + sign u, W}` with `W = u - lap u + sign lap v`.
pub fn compact_equation(jet: &JetSpace, sign: f64) -> Result<Expr> {
    let u = jet.var("u", "");
    let v = jet.var("v", "");
    let w = u.sub(&jet.laplacian(&u)?).add(&(sign * jet.laplacian(&v)?));
    let stream = v.add(&(sign * &u));
    Ok(jet.d(&w, "t")?.add(&jet.bracket(&stream, &w)?).simplify())
}

/// The system as the signed pair `(Delta+, Delta-)`, with `u_xxt` solved
/// from `Delta+ + Delta-` and `v_xxt` from `Delta+ - Delta-`.
pub fn vortex_system() -> Result<EquationSystem> {
    let jet = vortex_jet();
    let (d1, d2) = expanded(&jet, true)?;
    let plus = compact_equation(&jet, 1.0)?;
    let minus = compact_equation(&jet, -1.0)?;
    let rules = vec![
        SolveRule::linear(&(2.0 * &d1).simplify(), "u_xxt")?,
        SolveRule::linear(&(2.0 * &d2).simplify(), "v_xxt")?,
    ];
    EquationSystem::new("vortex system", jet, vec![plus, minus], rules, default_sampling())
}

/// Residual of a candidate `(u, v)` against the vortex system.
pub fn closure_check(sol: &ClosedFormSolution, samples: usize, seed: u64) -> Result<ResidualReport> {
    sol.residual_report(&vortex_system()?, samples, seed, RESIDUAL_TOL)
}

/// `[-1, 1]^3` over `(x, y, t)`.
pub fn unit_box() -> SamplingBox {
    SamplingBox::new()
        .real("x", -1.0, 1.0)
        .real("y", -1.0, 1.0)
        .real("t", -1.0, 1.0)
}

/// The negative `x` axis and a small disk at the origin, where `atan2(y, x)`
/// jumps.
pub fn theta_cut() -> Exclusion {
    Exclusion::cut((0.0, 0.0), std::f64::consts::PI, 0.1)
}

pub(crate) fn solution(name: &str, u: Expr, v: Expr, domain: SamplingBox) -> ClosedFormSolution {
    ClosedFormSolution::new(name, &INDEPENDENT, vec![("u", u), ("v", v)], domain)
}

/// Draw `samples` points of `domain` and record `f` at each.
pub(crate) fn check_points(
    check: &str,
    domain: &SamplingBox,
    samples: usize,
    seed: u64,
    tol: f64,
    mut f: impl FnMut(&EvalPoint) -> Result<f64>,
) -> Result<ResidualReport> {
    let mut r = rng(seed);
    let mut b = ReportBuilder::new(check, seed, tol);
    for _ in 0..samples {
        let (p, rej) = domain.sample(&mut r)?;
        b.add_resampled(rej);
        b.push(&p, f(&p)?);
    }
    Ok(b.finish())
}

/// Worst scaled residual of plain expressions over sampled points.
pub(crate) fn sampled_residuals(
    check: &str,
    exprs: &[Expr],
    domain: &SamplingBox,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ResidualReport> {
    check_points(check, domain, samples, seed, tol, |p| {
        let mut worst: f64 = 0.0;
        for e in exprs {
            worst = worst.max(expr_scaled_residual(e, p)?);
        }
        Ok(worst)
    })
}
