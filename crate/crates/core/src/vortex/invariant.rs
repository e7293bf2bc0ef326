use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::{conditional_symmetry_check, invariant_surface_conditions, FieldKind, GeneratorField};
use crate::report::{merge, ResidualReport};
use crate::sampling::SamplingBox;
use crate::solution::ClosedFormSolution;

use super::{
    closure_check, expr, sampled_residuals, solution, theta_cut, vortex_jet, vortex_system, x_ab, x_h, DEPENDENT,
    INDEPENDENT, RESIDUAL_TOL, SAMPLES,
};

/// `(r, t)` box used for the radial equations; `t` stays away from the
/// `r^2 / 2t` singularity.
fn radial_box() -> SamplingBox {
    SamplingBox::new().real("r", 0.1, 2.0).real("t", 0.2, 2.0)
}

fn plane_box() -> SamplingBox {
    SamplingBox::new()
        .real("x", -1.0, 1.0)
        .real("y", -1.0, 1.0)
        .real("t", 0.2, 2.0)
        .exclude(theta_cut())
}

fn derivs(f: &Expr, spec: &str) -> Result<Expr> {
    let mut out = f.clone();
    for c in spec.chars() {
        out = out.d(&c.to_string())?;
    }
    Ok(out)
}

/// Left-hand sides of the radial equations for `U0(r, t)` and `V0(r, t)`.
pub fn radial_equations(u0: &Expr, v0: &Expr) -> Result<(Expr, Expr)> {
    let (r, t) = (Expr::var("r"), Expr::var("t"));
    let d = |f: &Expr, s: &str| derivs(f, s);
    let rt = r.mul(&t);
    let lu = Expr::sum(vec![
        r.mul(&r).mul(&d(u0, "rrr")?),
        (-2.0 * &rt).mul(&d(u0, "rrt")?),
        r.mul(&d(u0, "rr")?),
        (-2.0 * &t).mul(&d(u0, "rt")?),
        r.mul(&r).mul(&d(u0, "r")?).negate(),
        (2.0 * &rt).mul(&d(u0, "t")?),
        3.0 * d(u0, "r")?,
    ]);
    let lv = Expr::sum(vec![
        (2.0 * &rt).mul(&d(v0, "rrt")?),
        r.mul(&r).mul(&d(v0, "rrr")?).negate(),
        (2.0 * &t).mul(&d(v0, "rt")?),
        r.mul(&d(v0, "rr")?).negate(),
        5.0 * d(v0, "r")?,
    ]);
    Ok((lu, lv))
}

/// `u = U0(r, t)`, `v = (r^2 / 2t) atan2(y, x) + V0(r, t)` after checking the
/// two radial equations on `r` in `[0.1, 2]`, `t` in `[0.2, 2]`.
pub fn x4_invariant_solutions(u0: &Expr, v0: &Expr, seed: u64) -> Result<(ClosedFormSolution, ResidualReport)> {
    let (lu, lv) = radial_equations(u0, v0)?;
    let bx = radial_box();
    let ru = sampled_residuals("U0 radial equation", &[lu], &bx, SAMPLES, seed, RESIDUAL_TOL)?;
    let rv = sampled_residuals("V0 radial equation", &[lv], &bx, SAMPLES, seed, RESIDUAL_TOL)?;
    for rep in [&ru, &rv] {
        if !rep.pass {
            return Err(Error::Invalid(format!("{} fails (max {:e})", rep.check, rep.max)));
        }
    }
    let r = expr("sqrt(x^2 + y^2)")?;
    let u = u0.substitute("r", &r).simplify();
    let spiral = expr("(x^2 + y^2)/(2*t) * atan2(y, x)")?;
    let v = spiral.add(&v0.substitute("r", &r)).simplify();
    let sol = solution(&format!("X4-invariant (U0={u0}, V0={v0})"), u, v, plane_box());
    let rep = merge(format!("radial equations of {}", sol.name), seed, RESIDUAL_TOL, &[ru, rv]);
    Ok((sol, rep))
}

/// Combined symmetries `d/dt + X_H` and `d/dt + X_(A,B)` with their
/// invariant forms.
#[derive(Clone, Debug)]
pub enum AnsatzKind {
    /// `u = U(x, y)`, `v = T(t) + V(x, y)`; the symmetry uses `H = T_t`.
    TimePlusXh { t_fn: Expr, u: Expr, v: Expr },
    /// `u = U(x - alpha, y - beta)`, `v = x B - y A + V(x - alpha, y - beta)`
    /// with `A = alpha_t`, `B = beta_t`.
    TimePlusXab { alpha: Expr, beta: Expr, u: Expr, v: Expr },
}

/// Outcome of an ansatz check.
#[derive(Clone, Debug)]
pub struct AnsatzCheck {
    pub generator: GeneratorField,
    pub solution: ClosedFormSolution,
    /// Invariant-surface conditions of the combined generator.
    pub invariance: ResidualReport,
    /// `{U - lap U, V} = {U, lap V}`, `{U, lap U} = {V, lap V}` (first kind).
    pub reduced: Option<ResidualReport>,
    pub system: ResidualReport,
}

impl AnsatzCheck {
    pub fn pass(&self) -> bool {
        self.invariance.pass && self.reduced.as_ref().map_or(true, |r| r.pass) && self.system.pass
    }
}

fn time_translation() -> GeneratorField {
    let z = Expr::zero;
    GeneratorField::point("d/dt", &INDEPENDENT, &DEPENDENT, vec![z(), z(), Expr::one()], vec![z(), z()])
        .expect("counts match")
}

fn reduced_relations(u: &Expr, v: &Expr) -> Result<Vec<Expr>> {
    let lap = |f: &Expr| -> Result<Expr> { Ok(f.d("x")?.d("x")?.add(&f.d("y")?.d("y")?)) };
    let br = |f: &Expr, g: &Expr| -> Result<Expr> { Ok(f.d("x")?.mul(&g.d("y")?).sub(&g.d("x")?.mul(&f.d("y")?))) };
    let (lu, lv) = (lap(u)?, lap(v)?);
    Ok(vec![
        br(&u.sub(&lu), v)?.sub(&br(u, &lv)?).simplify(),
        br(u, &lu)?.sub(&br(v, &lv)?).simplify(),
    ])
}

pub fn combined_symmetry_ansatz(kind: &AnsatzKind, seed: u64) -> Result<AnsatzCheck> {
    let jet = vortex_jet();
    let (generator, sol, reduced) = match kind {
        AnsatzKind::TimePlusXh { t_fn, u, v } => {
            let g = time_translation().add(&x_h(&t_fn.d("t")?))?;
            let sol = solution("d/dt + X_H invariant", u.clone(), t_fn.add(v).simplify(), super::unit_box());
            let rel = reduced_relations(u, v)?;
            let bx = SamplingBox::new().real("x", -1.0, 1.0).real("y", -1.0, 1.0);
            let rep = sampled_residuals("reduced system of d/dt + X_H", &rel, &bx, SAMPLES, seed, RESIDUAL_TOL)?;
            (g, sol, Some(rep))
        }
        AnsatzKind::TimePlusXab { alpha, beta, u, v } => {
            let (a, b) = (alpha.d("t")?, beta.d("t")?);
            let g = time_translation().add(&x_ab(&a, &b)?)?;
            let shift = [("x", Expr::var("x").sub(alpha)), ("y", Expr::var("y").sub(beta))];
            let nu = u.substitute_all(&shift).simplify();
            let drift = Expr::var("x").mul(&b).sub(&Expr::var("y").mul(&a));
            let nv = drift.add(&v.substitute_all(&shift)).simplify();
            (g, solution("d/dt + X_AB invariant", nu, nv, super::unit_box()), None)
        }
    };
    let q = invariant_surface_conditions(&generator, &jet)?;
    let invariance = sol.residual_report_for(&format!("invariance under {}", generator.label), &jet, &q, SAMPLES, seed, RESIDUAL_TOL)?;
    let system = closure_check(&sol, SAMPLES, seed)?;
    Ok(AnsatzCheck {
        generator,
        solution: sol,
        invariance,
        reduced,
        system,
    })
}

/// `X = u_y d/du + v_x d/dv`.
pub fn contact_field() -> GeneratorField {
    let z = Expr::zero;
    GeneratorField::new(
        "u_y d/du + v_x d/dv",
        &INDEPENDENT,
        &DEPENDENT,
        vec![z(), z(), z()],
        vec![Expr::var("u_y"), Expr::var("v_x")],
        FieldKind::Contact,
    )
    .expect("counts match")
}

/// Wave solutions reached through the contact conditional symmetry.
#[derive(Clone, Debug)]
pub enum ContactFamily {
    /// `u = sin(k(x - T))`, `v = exp(sign kappa y) - T_t y`; solves the
    /// system iff `kappa^2 - k^2 = 1`.
    SinExp { k: f64, kappa: f64, sign: f64, t_fn: Expr },
    /// `u = exp(sign k (x - T))`, `v = sin(kappa y) - T_t y`; solves the
    /// system iff `k^2 - kappa^2 = 1`.
    ExpSin { k: f64, kappa: f64, sign: f64, t_fn: Expr },
}

pub fn contact_family(f: &ContactFamily) -> Result<ClosedFormSolution> {
    let (x, y) = (Expr::var("x"), Expr::var("y"));
    let (u, v, label) = match f {
        ContactFamily::SinExp { k, kappa, sign, t_fn } => {
            let u = (x.sub(t_fn) * *k).sin();
            let v = (&y * (sign * kappa)).exp().sub(&t_fn.d("t")?.mul(&y));
            (u, v, format!("sin-exp wave k={k}, kappa={kappa}"))
        }
        ContactFamily::ExpSin { k, kappa, sign, t_fn } => {
            let u = (x.sub(t_fn) * (sign * k)).exp();
            let v = (&y * *kappa).sin().sub(&t_fn.d("t")?.mul(&y));
            (u, v, format!("exp-sin wave k={k}, kappa={kappa}"))
        }
    };
    Ok(solution(&label, u.simplify(), v.simplify(), super::unit_box()))
}

/// Conditional-symmetry report of a contact-family member.
pub fn contact_check(f: &ContactFamily, seed: u64) -> Result<ResidualReport> {
    let sol = contact_family(f)?;
    conditional_symmetry_check(&contact_field(), &vortex_system()?, &sol, SAMPLES, seed, RESIDUAL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        expr(s).unwrap()
    }

    #[test]
    fn quoted_radial_solutions() {
        let (sol, rep) = x4_invariant_solutions(&e("r^2*t"), &e("r^2/t"), 1).unwrap();
        assert!(rep.pass);
        assert!(closure_check(&sol, 80, 2).unwrap().pass);
        for (a, b) in [(1.0, -2.5), (2.0, -1.0), (3.0, -1.0 / 6.0)] {
            let v0 = Expr::var("r").powf(a).mul(&Expr::var("t").powf(b));
            let (sol, _) = x4_invariant_solutions(&e("r^2*t"), &v0, 3).unwrap();
            let rep = closure_check(&sol, 80, 4).unwrap();
            assert!(rep.pass, "a={a}: {rep:?}");
        }
    }

    #[test]
    fn wrong_exponent_rejected() {
        let v0 = e("r^2*t^(-2)");
        let err = x4_invariant_solutions(&e("r^2*t"), &v0, 1).unwrap_err();
        assert!(err.to_string().contains("V0 radial equation"), "{err}");
    }

    #[test]
    fn first_kind_ansatz() {
        let trivial = AnsatzKind::TimePlusXh { t_fn: e("t^3"), u: e("2"), v: e("-1") };
        assert!(combined_symmetry_ansatz(&trivial, 1).unwrap().pass());
        let modes = AnsatzKind::TimePlusXh {
            t_fn: e("sin(t)"),
            u: e("sin(x)*sin(y)"),
            v: e("sin(x)*sin(y)"),
        };
        assert!(combined_symmetry_ansatz(&modes, 1).unwrap().pass());
        let bad = AnsatzKind::TimePlusXh { t_fn: e("t"), u: e("x"), v: e("y") };
        let c = combined_symmetry_ansatz(&bad, 1).unwrap();
        assert!(c.invariance.pass && !c.reduced.unwrap().pass && !c.system.pass);
    }

    #[test]
    fn second_kind_ansatz() {
        let zero = AnsatzKind::TimePlusXab { alpha: e("t"), beta: e("0"), u: e("0"), v: e("0") };
        assert!(combined_symmetry_ansatz(&zero, 2).unwrap().pass());
        let sheet = AnsatzKind::TimePlusXab {
            alpha: e("sin(t)"),
            beta: e("t^2"),
            u: e("-ln(cosh(x))"),
            v: e("0"),
        };
        let c = combined_symmetry_ansatz(&sheet, 2).unwrap();
        assert!(c.pass(), "{:?} {:?}", c.invariance, c.system);
    }

    #[test]
    fn contact_families() {
        let t_fn = e("t^2");
        let s2 = 2f64.sqrt();
        let printed = ContactFamily::SinExp { k: s2, kappa: 1.0, sign: 1.0, t_fn: t_fn.clone() };
        assert!(!contact_check(&printed, 1).unwrap().pass);
        for sign in [1.0, -1.0] {
            let ok = ContactFamily::SinExp { k: 1.0, kappa: s2, sign, t_fn: t_fn.clone() };
            assert!(contact_check(&ok, 1).unwrap().pass);
            let ex = ContactFamily::ExpSin { k: s2, kappa: 1.0, sign, t_fn: t_fn.clone() };
            assert!(contact_check(&ex, 1).unwrap().pass);
        }
        let off = ContactFamily::SinExp { k: 1.0, kappa: 1.0, sign: 1.0, t_fn };
        assert!(!contact_check(&off, 1).unwrap().pass);
    }
}
