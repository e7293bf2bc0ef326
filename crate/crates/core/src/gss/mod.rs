//! The axisymmetric equilibrium equation
//!
//! `u_xx + (a/x) u_x + u_yy = x^(2p) F(u) + G(u)`,
//!
//! its equivalence transformations, the symmetry classification, the
//! conditional reduction to `u_ss = F(u)` and the cylindrical `u = x^4`
//! configuration.

mod classify;
mod quadrature;
mod reduction;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse, EvalPoint, Expr, VarRegistry};
use crate::jet::JetSpace;
use crate::lie::{EquationSystem, JetSampling, SolveRule};
use crate::sampling::SamplingBox;

pub use classify::{
    kernel_check, shifted_family, shifted_family_check, verify_classification_case, ClassificationCase,
    ClassificationCheck, KernelCheck, ShiftedFamilyCheck,
};
pub use quadrature::{quadrature_integrate, rk_gap, rk_profile, Profile, TurningPoint};
pub use reduction::{worked_cylindrical_solution, ConditionalReduction, WorkedRow, WorkedSolution};

pub const INDEPENDENT: [&str; 2] = ["x", "y"];
pub const DEPENDENT: [&str; 1] = ["u"];
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const SAMPLES: usize = 100;
/// Default sampled `u` range; keeps fractional powers real.
pub const U_RANGE: (f64, f64) = (0.2, 2.0);

/// Parse an expression in `u` (and `x`, `y`, `s`).
pub fn expr(src: &str) -> Result<Expr> {
    Ok(parse(src, &VarRegistry::real(&["u", "x", "y", "s"]))?)
}

/// `(x, y)` with `x` in `[0.1, 2]` away from the axis, `y` in `[-1, 1]`.
pub fn plane_box() -> SamplingBox {
    SamplingBox::new().real("x", 0.1, 2.0).real("y", -1.0, 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct GssEquation {
    pub a: f64,
    pub p: f64,
    #[serde(serialize_with = "as_string")]
    pub f: Expr,
    #[serde(serialize_with = "as_string")]
    pub g: Expr,
    /// Sampled range of `u` for symmetry checks.
    pub u_range: (f64, f64),
}

fn as_string<S: serde::Serializer>(e: &Expr, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

impl GssEquation {
    pub fn new(a: f64, p: f64, f: Expr, g: Expr) -> Result<Self> {
        for (name, e) in [("F", &f), ("G", &g)] {
            if let Some(v) = e.free_vars().into_iter().find(|v| v != "u") {
                return Err(Error::Invalid(format!("{name}(u) = {e} depends on `{v}`")));
            }
        }
        if !(a.is_finite() && p.is_finite()) {
            return Err(Error::Invalid(format!("a = {a}, p = {p} must be finite")));
        }
        Ok(GssEquation {
            a,
            p,
            f,
            g,
            u_range: U_RANGE,
        })
    }

    pub fn parse(a: f64, p: f64, f: &str, g: &str) -> Result<Self> {
        Self::new(a, p, expr(f)?, expr(g)?)
    }

    pub fn with_u_range(mut self, lo: f64, hi: f64) -> Self {
        self.u_range = (lo, hi);
        self
    }

    /// `u_xx + (a/x) u_x + u_yy - x^(2p) F(u) - G(u)` on the jet.
    pub fn residual(&self) -> Expr {
        let x = Expr::var("x");
        let lhs = Expr::var("u_xx")
            .add(&Expr::constant(self.a).div(&x).mul(&Expr::var("u_x")))
            .add(&Expr::var("u_yy"));
        lhs.sub(&x.powf(2.0 * self.p).mul(&self.f)).sub(&self.g).simplify()
    }

    pub fn system(&self) -> Result<EquationSystem> {
        let jet = Arc::new(JetSpace::new(&INDEPENDENT, &DEPENDENT, 2)?);
        let eq = self.residual();
        let rule = SolveRule::linear(&eq, "u_yy")?;
        let sampling = JetSampling::new(plane_box()).value_range("u", self.u_range.0, self.u_range.1);
        let name = format!("GSS[a={}, p={}, F={}, G={}]", self.a, self.p, self.f, self.g);
        EquationSystem::new(&name, jet, vec![eq], vec![rule], sampling)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "parameter", rename_all = "snake_case")]
pub enum EquivalenceTransform {
    /// `u -> u + k`.
    ShiftU(f64),
    /// `u -> alpha u`.
    ScaleU(f64),
    /// `x -> alpha x`, `y -> alpha y`.
    ScaleXy(f64),
}

impl EquivalenceTransform {
    pub fn inverse(self) -> Result<Self> {
        self.validate()?;
        Ok(match self {
            Self::ShiftU(k) => Self::ShiftU(-k),
            Self::ScaleU(a) => Self::ScaleU(1.0 / a),
            Self::ScaleXy(a) => Self::ScaleXy(1.0 / a),
        })
    }

    fn validate(self) -> Result<()> {
        match self {
            Self::ShiftU(k) if !k.is_finite() => Err(Error::Invalid(format!("shift {k} is not finite"))),
            Self::ScaleU(a) | Self::ScaleXy(a) if a == 0.0 || !a.is_finite() => {
                Err(Error::Invalid(format!("scale factor must be nonzero and finite, got {a}")))
            }
            _ => Ok(()),
        }
    }

    /// The transformed function: `u + k`, `alpha u` or `u(x/alpha, y/alpha)`.
    pub fn map_solution(self, u: &Expr) -> Result<Expr> {
        self.validate()?;
        Ok(match self {
            Self::ShiftU(k) => u.add(&Expr::constant(k)),
            Self::ScaleU(a) => Expr::constant(a).mul(u),
            Self::ScaleXy(a) => u.substitute_all(&[
                ("x", Expr::var("x").mul(&Expr::constant(1.0 / a))),
                ("y", Expr::var("y").mul(&Expr::constant(1.0 / a))),
            ]),
        }
        .simplify())
    }
}

/// The equation solved by the transformed functions:
/// `F(u - k)`, `alpha F(u / alpha)` or `alpha^(-2(p+1)) F`, `alpha^(-2) G`.
pub fn apply_equivalence(eq: &GssEquation, t: EquivalenceTransform) -> Result<GssEquation> {
    t.validate()?;
    let u = Expr::var("u");
    let (f, g, range) = match t {
        EquivalenceTransform::ShiftU(k) => {
            let arg = [("u", u.sub(&Expr::constant(k)))];
            (eq.f.substitute_all(&arg), eq.g.substitute_all(&arg), (eq.u_range.0 + k, eq.u_range.1 + k))
        }
        EquivalenceTransform::ScaleU(al) => {
            let arg = [("u", u.mul(&Expr::constant(1.0 / al)))];
            let c = Expr::constant(al);
            let (lo, hi) = (al * eq.u_range.0, al * eq.u_range.1);
            (c.mul(&eq.f.substitute_all(&arg)), c.mul(&eq.g.substitute_all(&arg)), (lo.min(hi), lo.max(hi)))
        }
        EquivalenceTransform::ScaleXy(al) => (
            Expr::constant(al.powf(-2.0 * (eq.p + 1.0))).mul(&eq.f),
            Expr::constant(al.powf(-2.0)).mul(&eq.g),
            eq.u_range,
        ),
    };
    Ok(GssEquation::new(eq.a, eq.p, f.simplify(), g.simplify())?.with_u_range(range.0, range.1))
}

/// Largest deviation of `(a, p, F, G)` between two equations, with `F` and
/// `G` compared on a grid over the `u` range of `lhs`.
pub fn equation_distance(lhs: &GssEquation, rhs: &GssEquation, n: usize) -> Result<f64> {
    let mut worst = (lhs.a - rhs.a).abs().max((lhs.p - rhs.p).abs());
    let (lo, hi) = lhs.u_range;
    let mut pt = EvalPoint::new();
    for i in 0..=n {
        let u = lo + (hi - lo) * i as f64 / n.max(1) as f64;
        pt.set("u", u);
        for (l, r) in [(&lhs.f, &rhs.f), (&lhs.g, &rhs.g)] {
            let (a, b) = (l.eval_real(&pt)?, r.eval_real(&pt)?);
            worst = worst.max((a - b).abs() / (1.0 + a.abs().max(b.abs())));
        }
    }
    Ok(worst)
}
