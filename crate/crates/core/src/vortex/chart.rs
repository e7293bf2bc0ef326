use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::GeneratorField;
use crate::report::ResidualReport;
use crate::sampling::SamplingBox;
use crate::solution::ClosedFormSolution;

use super::{closure_check, sampled_residuals, solution, x_ab, RESIDUAL_TOL, SAMPLES};

/// Symmetry-adapted coordinates of `X_(A,B)`:
/// `s = B x - A y`, `w = (A x + B y) / (A^2 + B^2)`, plus the quadrupolar
/// potential `Q` that absorbs the inhomogeneous `d/dv` part.
#[derive(Clone, Debug)]
pub struct CanonicalChart {
    pub a: Expr,
    pub b: Expr,
    /// `A^2 + B^2`.
    pub norm: Expr,
    pub s: Expr,
    pub w: Expr,
    pub q: Expr,
}

impl CanonicalChart {
    pub fn new(a: &Expr, b: &Expr) -> Result<Self> {
        let x = Expr::var("x");
        let y = Expr::var("y");
        let (at, bt) = (a.d("t")?, b.d("t")?);
        let norm = a.mul(a).add(&b.mul(b)).simplify();
        let s = b.mul(&x).sub(&a.mul(&y)).simplify();
        let w = a.mul(&x).add(&b.mul(&y)).div(&norm).simplify();
        let quad = at
            .mul(b)
            .add(&a.mul(&bt))
            .mul(&x.mul(&x).sub(&y.mul(&y)))
            .sub(&(2.0 * &x).mul(&y).mul(&a.mul(&at).sub(&b.mul(&bt))));
        let q = quad.div(&(2.0 * &norm)).simplify();
        Ok(CanonicalChart {
            a: a.clone(),
            b: b.clone(),
            norm,
            s,
            w,
            q,
        })
    }

    pub fn generator(&self) -> Result<GeneratorField> {
        x_ab(&self.a, &self.b)
    }

    /// `f(s, w, t)` as a function of `(x, y, t)`.
    pub fn to_xy(&self, f: &Expr) -> Expr {
        f.substitute_all(&[("s", self.s.clone()), ("w", self.w.clone())])
    }

    /// `f(x, y, t)` as a function of `(s, w, t)`.
    pub fn to_sw(&self, f: &Expr) -> Expr {
        let (s, w) = (Expr::var("s"), Expr::var("w"));
        let x = self.b.mul(&s).add(&self.a.mul(&self.norm).mul(&w)).div(&self.norm);
        let y = self.b.mul(&self.norm).mul(&w).sub(&self.a.mul(&s)).div(&self.norm);
        f.substitute_all(&[("x", x), ("y", y)])
    }

    /// Coefficient of the Coriolis-type term `c(s, t) d/dw` in the reduced
    /// equations: `2 (A_t B - A B_t) s / (A^2 + B^2)^2`.
    pub fn coriolis(&self) -> Result<Expr> {
        let (at, bt) = (self.a.d("t")?, self.b.d("t")?);
        let k = at.mul(&self.b).sub(&self.a.mul(&bt));
        Ok((2.0 * k).mul(&Expr::var("s")).div(&self.norm.mul(&self.norm)).simplify())
    }

    /// `X s = 0`, `X w = 1` and the `v`-invariance `X(Q) - zeta_v = 0` of
    /// the generator `X = X_(A,B)` on `(x, y, t)` samples.
    pub fn invariants_check(&self, domain: &SamplingBox, samples: usize, seed: u64, tol: f64) -> Result<ResidualReport> {
        let g = self.generator()?;
        let xs = g.apply(&self.s)?;
        let xw = g.apply(&self.w)?.sub(&Expr::one()).simplify();
        let xq = g.apply(&self.q)?.sub(&g.phi[1]).simplify();
        sampled_residuals("canonical chart invariants", &[xs, xw, xq], domain, samples, seed, tol)
    }

    /// `{f, g}_(x,y)` against `{f, g}_(s,w)` for `f, g` given over `(s, w, t)`.
    pub fn bracket_invariance(&self, f: &Expr, g: &Expr, domain: &SamplingBox, samples: usize, seed: u64, tol: f64) -> Result<ResidualReport> {
        let (fx, gx) = (self.to_xy(f), self.to_xy(g));
        let lhs = fx.d("x")?.mul(&gx.d("y")?).sub(&gx.d("x")?.mul(&fx.d("y")?));
        let rhs = f.d("s")?.mul(&g.d("w")?).sub(&g.d("s")?.mul(&f.d("w")?));
        let diff = lhs.sub(&self.to_xy(&rhs)).simplify();
        sampled_residuals("bracket chart invariance", &[diff], domain, samples, seed, tol)
    }
}

/// Reconstruct `u = U0(s, t)`, `v = Q + V0(s, t)` after checking the reduced
/// relations `D_t(U0 - (A^2+B^2) U0_ss) = 0` and `D_t((A^2+B^2) V0_ss) = 0`
/// on `s` in `[-2, 2]` and the `t` range of `domain`.
///
/// The reconstruction is then checked against the full system.
pub fn canonical_reduction(chart: &CanonicalChart, u0: &Expr, v0: &Expr, domain: SamplingBox, seed: u64) -> Result<ClosedFormSolution> {
    for (name, e) in [("U0", u0), ("V0", v0)] {
        if let Some(v) = e.free_vars().into_iter().find(|v| v != "s" && v != "t") {
            return Err(Error::Invalid(format!("{name} = {e} depends on `{v}`; expected a function of (s, t)")));
        }
    }
    let n = &chart.norm;
    let f = u0.sub(&n.mul(&u0.d("s")?.d("s")?)).simplify();
    let g = n.mul(&v0.d("s")?.d("s")?).simplify();
    let r1 = f.d("t")?;
    let r2 = g.d("t")?;
    let mut reduced_box = SamplingBox::new().real("s", -2.0, 2.0);
    if let Some(crate::sampling::Range::Real(lo, hi)) = domain.range("t") {
        reduced_box = reduced_box.real("t", *lo, *hi);
    }
    let reduced = sampled_residuals("reduced relations", &[r1, r2], &reduced_box, SAMPLES, seed, RESIDUAL_TOL)?;
    if !reduced.pass {
        return Err(Error::Invalid(format!(
            "reduced relations violated: F = U0 - (A^2+B^2) U0_ss or G = (A^2+B^2) V0_ss depends on t (max {:e})",
            reduced.max
        )));
    }
    let u = chart.to_xy(u0).simplify();
    let v = chart.q.add(&chart.to_xy(v0)).simplify();
    let sol = solution("canonical reduction", u, v, domain).with_provenance(format!(
        "U0 = {u0}, V0 = {v0} in the chart of X_AB[A={}, B={}]",
        chart.a, chart.b
    ));
    let rep = closure_check(&sol, SAMPLES, seed)?;
    if !rep.pass {
        return Err(Error::Invalid(format!(
            "reconstruction does not solve the vortex system (max {:e})",
            rep.max
        )));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vortex::{expr, unit_box};

    fn chart(a: &str, b: &str) -> CanonicalChart {
        CanonicalChart::new(&expr(a).unwrap(), &expr(b).unwrap()).unwrap()
    }

    #[test]
    fn chart_invariants_hold() {
        for (a, b) in [("t^2", "sin(t)"), ("cos(t)", "sin(t)"), ("1 + t^2", "t")] {
            let c = chart(a, b);
            let bx = unit_box().exclude(crate::sampling::Exclusion::band("t", -0.05, 0.05));
            let rep = c.invariants_check(&bx, 100, 1, 1e-10).unwrap();
            assert!(rep.pass, "{a}, {b}: {rep:?}");
        }
    }

    #[test]
    fn bracket_is_chart_invariant() {
        let c = chart("1 + t^2", "t");
        let f = expr("s^2*w - 3*w + s*t").unwrap();
        let g = expr("w^3 + s*w^2 - 2*s").unwrap();
        let rep = c.bracket_invariance(&f, &g, &unit_box(), 100, 2, 1e-9).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn inverse_chart_is_left_inverse() {
        let c = chart("t^2 + 1", "sin(t)");
        let back = c.to_sw(&c.to_xy(&expr("s^2 + w*t").unwrap()));
        let bx = SamplingBox::new().real("s", -1.0, 1.0).real("w", -1.0, 1.0).real("t", -1.0, 1.0);
        assert!(crate::expr::numeric_equal(&back, &expr("s^2 + w*t").unwrap(), &bx, 30, 1e-12, 0).unwrap());
    }

    #[test]
    fn static_sheet_from_reduction() {
        let c = chart("1", "0");
        let sol = canonical_reduction(&c, &expr("-ln(cosh(s))").unwrap(), &Expr::zero(), unit_box(), 3).unwrap();
        assert!(closure_check(&sol, 50, 1).unwrap().pass);
    }

    #[test]
    fn rotating_frame_reduction() {
        let c = chart("cos(t)", "sin(t)");
        let sol = canonical_reduction(&c, &expr("s^2").unwrap(), &expr("s^2/2").unwrap(), unit_box(), 3);
        assert!(sol.is_ok(), "{:?}", sol.err());
    }

    #[test]
    fn time_dependent_profile_rejected() {
        let c = chart("1", "0");
        let err = canonical_reduction(&c, &expr("t*s^3").unwrap(), &Expr::zero(), unit_box(), 3).unwrap_err();
        assert!(err.to_string().contains("reduced relations violated"), "{err}");
    }
}
