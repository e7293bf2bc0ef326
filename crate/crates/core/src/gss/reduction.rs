use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{EvalPoint, Expr};
use crate::lie::{conditional_symmetry_check, expr_scaled_residual, GeneratorField};
use crate::report::{ReportBuilder, ResidualReport};
use crate::sampling::{rng, SamplingBox};
use crate::solution::ClosedFormSolution;

use super::{plane_box, GssEquation, Profile, DEPENDENT, INDEPENDENT, RESIDUAL_TOL};

/// The conditional symmetry `k d/dx + x^p d/dy` of the equation with
/// `a = -p` and `G = k^2 F`, whose invariant `s` reduces it to `u_ss = F(u)`.
#[derive(Clone, Debug)]
pub struct ConditionalReduction {
    pub k: f64,
    pub p: f64,
    pub f: Expr,
    /// `x^(p+1)/(p+1) - k y`, or `ln x - k y` for `p = -1`.
    pub s: Expr,
}

impl ConditionalReduction {
    pub fn new(k: f64, p: f64, a: f64, f: Expr) -> Result<Self> {
        if p == 0.0 || (a + p).abs() > 1e-14 {
            return Err(Error::Invalid(format!(
                "conditional reduction needs a = -p != 0, got a = {a}, p = {p}"
            )));
        }
        if k == 0.0 || !k.is_finite() {
            return Err(Error::Invalid(format!("conditional reduction needs k != 0, got {k}")));
        }
        if let Some(v) = f.free_vars().into_iter().find(|v| v != "u") {
            return Err(Error::Invalid(format!("F(u) = {f} depends on `{v}`")));
        }
        let x = Expr::var("x");
        let lead = if p == -1.0 {
            x.ln()
        } else {
            x.powf(p + 1.0).mul(&Expr::constant(1.0 / (p + 1.0)))
        };
        let s = lead.sub(&Expr::constant(k).mul(&Expr::var("y"))).simplify();
        Ok(ConditionalReduction { k, p, f, s })
    }

    pub fn a(&self) -> f64 {
        -self.p
    }

    /// The equation with `G = k^2 F`.
    pub fn equation(&self) -> Result<GssEquation> {
        GssEquation::new(self.a(), self.p, self.f.clone(), Expr::constant(self.k * self.k).mul(&self.f).simplify())
    }

    pub fn generator(&self) -> GeneratorField {
        GeneratorField::point(
            "k d/dx + x^p d/dy",
            &INDEPENDENT,
            &DEPENDENT,
            vec![Expr::constant(self.k), Expr::var("x").powf(self.p)],
            vec![Expr::zero()],
        )
        .expect("counts match")
    }

    /// `u(x, y) = phi(s(x, y))` for a profile `phi` given as an expression in `s`.
    pub fn lift(&self, phi: &Expr) -> Result<ClosedFormSolution> {
        if let Some(v) = phi.free_vars().into_iter().find(|v| v != "s") {
            return Err(Error::Invalid(format!("profile {phi} depends on `{v}`; expected a function of s")));
        }
        let u = phi.substitute("s", &self.s).simplify();
        Ok(ClosedFormSolution::new(&format!("phi = {phi} lifted along s = {}", self.s), &INDEPENDENT, vec![("u", u)], plane_box()))
    }

    /// Residual of the lifted profile on the equation, together with the
    /// invariant-surface condition of the generator.
    pub fn lift_check(&self, phi: &Expr, samples: usize, seed: u64) -> Result<ResidualReport> {
        let sol = self.lift(phi)?;
        conditional_symmetry_check(&self.generator(), &self.equation()?.system()?, &sol, samples, seed, RESIDUAL_TOL)
    }

    /// Lift a numeric profile: at points with `s` in `[0, s_max]` the jet of
    /// `u = phi(s)` follows from the chain rule with `phi'' = F(phi)`.
    pub fn profile_lift_check(&self, profile: &Profile, samples: usize, seed: u64) -> Result<ResidualReport> {
        let eq = self.equation()?.residual();
        let (k, p) = (self.k, self.p);
        let mut r = rng(seed);
        let mut b = ReportBuilder::new(format!("quadrature profile of F = {} lifted along s", self.f), seed, RESIDUAL_TOL);
        let mut pt = EvalPoint::new();
        for _ in 0..samples {
            let x: f64 = r.gen_range(0.1..2.0);
            let s: f64 = r.gen_range(0.0..=profile.s_max);
            pt.set("x", x);
            let lead = self.s.eval_real(&EvalPoint::from_reals(&[("x", x), ("y", 0.0)]))?;
            let y = (lead - s) / k;
            let (phi, dphi) = profile.eval(s)?;
            pt.set("u", phi);
            let ddphi = self.f.eval_real(&pt)?;
            let xp = x.powf(p);
            pt.set("y", y)
                .set("u_x", dphi * xp)
                .set("u_y", -k * dphi)
                .set("u_xx", ddphi * xp * xp + p * x.powf(p - 1.0) * dphi)
                .set("u_xy", -k * ddphi * xp)
                .set("u_yy", k * k * ddphi);
            b.push(&pt, expr_scaled_residual(&eq, &pt)?);
        }
        Ok(b.finish())
    }
}

/// `u = x^4` with `F = c1`, `G = (8 - c1) u^(1/2)`, `a = -1`, `p = 1` on
/// `0 < x < x0`.
#[derive(Clone, Debug)]
pub struct WorkedSolution {
    pub solution: ClosedFormSolution,
    pub equation: GssEquation,
    pub c1: f64,
    pub x0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WorkedRow {
    pub x: f64,
    pub u: f64,
    pub pressure: f64,
    pub current_squared: f64,
}

pub fn worked_cylindrical_solution(c1: f64, x0: f64) -> Result<WorkedSolution> {
    if !(x0 > 0.0 && x0.is_finite() && c1.is_finite()) {
        return Err(Error::Invalid(format!("need x0 > 0 and finite c1, got x0 = {x0}, c1 = {c1}")));
    }
    let equation = GssEquation::new(-1.0, 1.0, Expr::constant(c1), Expr::constant(8.0 - c1).mul(&Expr::var("u").sqrt()))?;
    let domain = SamplingBox::new().real("x", 0.1 * x0, x0).real("y", -1.0, 1.0);
    let solution = ClosedFormSolution::new("cylindrical x^4", &INDEPENDENT, vec![("u", Expr::var("x").powf(4.0))], domain)
        .with_provenance(format!("F = {c1}, G = ({} ) u^(1/2), a = -1, p = 1", 8.0 - c1));
    Ok(WorkedSolution {
        solution,
        equation,
        c1,
        x0,
    })
}

impl WorkedSolution {
    /// The polynomial identity, checked at `1e-12`.
    pub fn identity_residual(&self, samples: usize, seed: u64) -> Result<ResidualReport> {
        self.solution.residual_report(&self.equation.system()?, samples, seed, 1e-12)
    }

    /// `(c1 / 4 pi)(x0^4 - x^4)`.
    pub fn pressure(&self, x: f64) -> f64 {
        self.c1 / (4.0 * PI) * (self.x0.powi(4) - x.powi(4))
    }

    /// `I^2 = 4 (8 - c1) / 3 (x0^6 - x^6)`.
    pub fn current_squared(&self, x: f64) -> f64 {
        4.0 * (8.0 - self.c1) / 3.0 * (self.x0.powi(6) - x.powi(6))
    }

    /// `n + 1` rows on `[0, x0]`.
    pub fn profiles(&self, n: usize) -> Vec<WorkedRow> {
        (0..=n)
            .map(|i| {
                let x = self.x0 * i as f64 / n.max(1) as f64;
                WorkedRow {
                    x,
                    u: x.powi(4),
                    pressure: self.pressure(x),
                    current_squared: self.current_squared(x),
                }
            })
            .collect()
    }
}
