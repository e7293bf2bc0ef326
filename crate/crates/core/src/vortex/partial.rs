use crate::error::{Error, Result};
use crate::expr::{parse, Expr, VarRegistry};
use crate::lie::{
    infinitesimal_symmetry_check, partial_symmetry_check, EquationSystem, GeneratorField, PartialSymmetryReport,
    SolveRule,
};
use crate::report::{ReportBuilder, ResidualReport};
use crate::sampling::rng;
use crate::solution::ClosedFormSolution;

use super::{
    default_sampling, expanded, negative_controls, prop2_generators, solution, theta_cut, unit_box, vortex_jet,
    vortex_system, DEPENDENT, INDEPENDENT,
};

pub const ELEMENTARY_SOLUTIONS: [&str; 3] = ["traveling_waves", "spiral", "shear"];

fn u_scaling() -> GeneratorField {
    let z = Expr::zero;
    GeneratorField::point("u d/du", &INDEPENDENT, &DEPENDENT, vec![z(), z(), z()], vec![Expr::var("u"), z()])
        .expect("counts match")
}

fn u_condition(sys: &EquationSystem) -> Result<Expr> {
    let u = sys.jet.var("u", "");
    sys.jet.bracket(&u, &sys.jet.laplacian(&u)?)
}

/// `u d/du` against the system with the characterizing condition
/// `{u, lap u} = 0`, solved for `u_yyy`.
pub fn partial_symmetry_u_scaling(samples: usize, seed: u64, tol: f64) -> Result<PartialSymmetryReport> {
    let sys = vortex_system()?;
    let cond = u_condition(&sys)?;
    let rule = SolveRule::linear(&cond, "u_yyy")?;
    partial_symmetry_check(&u_scaling(), &sys, &cond, rule, samples, seed, tol)
}

/// On `{u, lap u} = 0` the `v` equation is `D_t(lap v) + {v, lap v} = 0`:
/// the difference is evaluated at jet points of the enlarged system.
pub fn euler_identity_check(samples: usize, seed: u64, tol: f64) -> Result<ResidualReport> {
    let sys = vortex_system()?;
    let jet = &sys.jet;
    let cond = u_condition(&sys)?;
    let enlarged = sys.with_equations("vortex system + {u, lap u}", vec![cond.clone()], vec![SolveRule::linear(&cond, "u_yyy")?])?;
    let (_, d2) = expanded(jet, true)?;
    let v = jet.var("v", "");
    let lv = jet.laplacian(&v)?;
    let euler = jet.d(&lv, "t")?.add(&jet.bracket(&v, &lv)?);
    let mut r = rng(seed);
    let mut b = ReportBuilder::new("v equation reduces to the Euler equation", seed, tol);
    for _ in 0..samples {
        let (p, rej) = enlarged.sample(&mut r)?;
        b.add_resampled(rej);
        let (a, e) = (d2.eval(&p)?, euler.eval(&p)?);
        b.push(&p, (a - e).norm() / (1.0 + a.norm().max(e.norm())));
    }
    Ok(b.finish())
}

/// `u_t = {u, v}`, `{u, lap u} = 0`, `{u, lap v} = 0`: the reduced form in
/// which `lap u` and `lap v` are functions of `u`.
pub fn reduced_system() -> Result<EquationSystem> {
    let jet = vortex_jet();
    let u = jet.var("u", "");
    let v = jet.var("v", "");
    let eqs = vec![
        jet.var("u", "t").sub(&jet.bracket(&u, &v)?).simplify(),
        jet.bracket(&u, &jet.laplacian(&u)?)?,
        jet.bracket(&u, &jet.laplacian(&v)?)?,
    ];
    EquationSystem::new("reduced partial-symmetry system", jet, eqs, vec![], default_sampling())
}

pub fn partial_symmetry_solutions(name: &str) -> Result<ClosedFormSolution> {
    let reg = VarRegistry::real(&["x", "y", "t", "c1", "c2", "c3", "k"]);
    let p = |s: &str| -> Result<Expr> { Ok(parse(s, &reg)?) };
    Ok(match name {
        "traveling_waves" => solution(
            name,
            p("c1*sin(k*(x - t)) + c2*sin(k*(y - t)) + c3")?,
            p("x - y")?,
            unit_box(),
        )
        .with_params(&[("c1", 1.0), ("c2", 1.0), ("c3", 0.0), ("k", 2.0)]),
        "spiral" => solution(name, p("2*t - atan2(y, x)")?, p("x^2 + y^2")?, unit_box().exclude(theta_cut())),
        "shear" => solution(name, p("tanh(y - t)")?, p("x")?, unit_box()),
        _ => {
            return Err(Error::Unknown {
                kind: "elementary solution",
                name: name.into(),
            })
        }
    })
}

/// The truncated system (without `{u, lap v}` in the first equation),
/// optionally with `{u, lap v} = 0` (solved for `v_yyy`) and
/// `{u, lap u} = 0` (solved for `u_yyy`) appended.
pub fn truncated_system(with_lap_v: bool, with_lap_u: bool) -> Result<EquationSystem> {
    let jet = vortex_jet();
    let (d1, d2) = expanded(&jet, false)?;
    let mut eqs = vec![d1.clone(), d2.clone()];
    let mut rules = Vec::new();
    let mut name = String::from("truncated system");
    let u = jet.var("u", "");
    if with_lap_v {
        let c = jet.bracket(&u, &jet.laplacian(&jet.var("v", ""))?)?;
        rules.push(SolveRule::linear(&c, "v_yyy")?);
        eqs.push(c);
        name.push_str(" + {u, lap v}");
    }
    if with_lap_u {
        let c = jet.bracket(&u, &jet.laplacian(&u)?)?;
        rules.push(SolveRule::linear(&c, "u_yyy")?);
        eqs.push(c);
        name.push_str(" + {u, lap u}");
    }
    rules.push(SolveRule::linear(&d1, "u_xxt")?);
    rules.push(SolveRule::linear(&d2, "v_xxt")?);
    EquationSystem::new(&name, jet, eqs, rules, default_sampling())
}

/// Every algebra generator on the four truncated variants; the negative
/// control `x d/dx` on the plain truncated system.
#[derive(Clone, Debug)]
pub struct TruncatedChecks {
    pub reports: Vec<ResidualReport>,
    pub negative_control: ResidualReport,
}

impl TruncatedChecks {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass) && !self.negative_control.pass
    }
}

pub fn truncated_system_check(samples: usize, seed: u64, tol: f64) -> Result<TruncatedChecks> {
    let gens = prop2_generators()?;
    let mut reports = Vec::new();
    for (lv, lu) in [(false, false), (true, false), (false, true), (true, true)] {
        let sys = truncated_system(lv, lu)?;
        for g in &gens {
            reports.push(infinitesimal_symmetry_check(g, &sys, samples, seed, tol)?);
        }
    }
    let control = &negative_controls()[0];
    let negative_control = infinitesimal_symmetry_check(control, &truncated_system(false, false)?, samples, seed, tol)?;
    Ok(TruncatedChecks {
        reports,
        negative_control,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vortex::closure_check;

    #[test]
    fn scaling_is_a_partial_symmetry() {
        let rep = partial_symmetry_u_scaling(60, 3, 1e-9).unwrap();
        assert!(rep.on_subset.pass, "{:?}", rep.on_subset);
        assert!(rep.off_subset.max > 1e-3);
        assert!(rep.enlarged.pass);
        assert!(rep.pass());
    }

    #[test]
    fn euler_equation_on_the_subset() {
        assert!(euler_identity_check(60, 2, 1e-12).unwrap().pass);
    }

    #[test]
    fn elementary_solutions_solve_both_systems() {
        let reduced = reduced_system().unwrap();
        for name in ELEMENTARY_SOLUTIONS {
            let sol = partial_symmetry_solutions(name).unwrap();
            let r = sol.residual_report(&reduced, 80, 1, 1e-9).unwrap();
            assert!(r.pass, "{name}: {r:?}");
            assert!(closure_check(&sol, 80, 1).unwrap().pass, "{name}");
        }
        assert!(partial_symmetry_solutions("vortex_street").is_err());
    }

    #[test]
    fn truncated_variants_share_the_algebra() {
        let checks = truncated_system_check(25, 4, 1e-9).unwrap();
        for r in &checks.reports {
            assert!(r.pass, "{}: {:e}", r.check, r.max);
        }
        assert!(checks.negative_control.max > 1e-3);
        assert!(checks.pass());
    }
}
