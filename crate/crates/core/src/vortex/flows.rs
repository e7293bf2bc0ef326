use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{EvalPoint, Expr};
use crate::sampling::{Exclusion, SamplingBox};
use crate::solution::ClosedFormSolution;

use super::solution;

type PointMap = Arc<dyn Fn(&EvalPoint) -> Option<(f64, f64)> + Send + Sync>;

/// The box of `domain` with its exclusions pulled back along a map of the
/// `(x, y)` plane.
fn pullback(domain: &SamplingBox, label: &str, map: PointMap) -> SamplingBox {
    let mut out = SamplingBox::new();
    for (name, range) in domain.ranges() {
        out.set(name, range.clone());
    }
    for ex in domain.exclusions() {
        let ex = ex.clone();
        let map = map.clone();
        out = out.exclude(Exclusion::custom(&format!("{} pulled back by {label}", ex.describe()), move |p| {
            let Some((x, y)) = map(p) else { return true };
            let mut q = p.clone();
            q.set("x", x).set("y", y);
            ex.excludes(&q)
        }));
    }
    out
}

fn fields(sol: &ClosedFormSolution) -> Result<(Expr, Expr)> {
    let get = |d: &str| {
        sol.field(d)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("solution `{}` has no field `{d}`", sol.name)))
    };
    Ok((get("u")?, get("v")?))
}

fn time_function(sol: &ClosedFormSolution, f: &Expr) -> impl Fn(&EvalPoint) -> Option<f64> + Send + Sync {
    let f = f.clone();
    let base = sol.base_point();
    move |p: &EvalPoint| {
        let mut q = base.clone();
        q.set("t", p.get("t")?.re);
        f.eval_real(&q).ok()
    }
}

/// `u(x - A, y - B, t)`, `x B_t - y A_t - (A B_t - A_t B)/2 + v(x - A, y - B, t)`.
pub fn moving_frame_transform(sol: &ClosedFormSolution, a: &Expr, b: &Expr) -> Result<ClosedFormSolution> {
    let (u, v) = fields(sol)?;
    let (at, bt) = (a.d("t")?, b.d("t")?);
    let (x, y) = (Expr::var("x"), Expr::var("y"));
    let shift = [("x", x.sub(a)), ("y", y.sub(b))];
    let nu = u.substitute_all(&shift).simplify();
    let drift = x
        .mul(&bt)
        .sub(&y.mul(&at))
        .sub(&a.mul(&bt).sub(&at.mul(b)).mul(&Expr::constant(0.5)));
    let nv = drift.add(&v.substitute_all(&shift)).simplify();
    let (fa, fb) = (time_function(sol, a), time_function(sol, b));
    let map: PointMap = Arc::new(move |p| Some((p.get("x")?.re - fa(p)?, p.get("y")?.re - fb(p)?)));
    let domain = pullback(&sol.domain, "moving frame", map);
    Ok(solution(&format!("{} in frame (A={a}, B={b})", sol.name), nu, nv, domain)
        .with_params(&sol.params.iter().map(|(n, v)| (n.as_str(), *v)).collect::<Vec<_>>())
        .with_provenance(format!("{} | moving frame A={a}, B={b}", sol.provenance)))
}

/// Flow of `X4` at parameter `lambda`: the solution rotated with angular
/// velocity `lambda` plus `lambda r^2 / 2` in `v`.
pub fn rotation_flow(sol: &ClosedFormSolution, lambda: f64) -> Result<ClosedFormSolution> {
    let (u, v) = fields(sol)?;
    let (x, y, t) = (Expr::var("x"), Expr::var("y"), Expr::var("t"));
    let angle = t.mul(&Expr::constant(lambda));
    let (c, s) = (angle.cos(), angle.sin());
    let rot = [("x", x.mul(&c).add(&y.mul(&s))), ("y", y.mul(&c).sub(&x.mul(&s)))];
    let nu = u.substitute_all(&rot).simplify();
    let radial = x.mul(&x).add(&y.mul(&y)).mul(&Expr::constant(lambda / 2.0));
    let nv = v.substitute_all(&rot).add(&radial).simplify();
    let map: PointMap = Arc::new(move |p| {
        let (x, y, t) = (p.get("x")?.re, p.get("y")?.re, p.get("t")?.re);
        let (s, c) = (lambda * t).sin_cos();
        Some((x * c + y * s, -x * s + y * c))
    });
    let domain = pullback(&sol.domain, "rotation", map);
    Ok(solution(&format!("{} rotated at {lambda}", sol.name), nu, nv, domain)
        .with_params(&sol.params.iter().map(|(n, v)| (n.as_str(), *v)).collect::<Vec<_>>())
        .with_provenance(format!("{} | X4 flow lambda={lambda}", sol.provenance)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::flow_orbit_check;
    use crate::vortex::{closure_check, expr, partial_symmetry_solutions, unit_box, vortex_system};

    fn sheet() -> ClosedFormSolution {
        solution("sheet", expr("-ln(cosh(x))").unwrap(), Expr::zero(), unit_box())
    }

    #[test]
    fn frame_of_trivial_solution() {
        let zero = solution("zero", Expr::zero(), Expr::zero(), unit_box());
        let moved = moving_frame_transform(&zero, &expr("t").unwrap(), &Expr::zero()).unwrap();
        assert!(moved.field("u").unwrap().is_zero());
        let bx = unit_box();
        assert!(crate::expr::numeric_equal(moved.field("v").unwrap(), &expr("-y").unwrap(), &bx, 20, 1e-14, 0).unwrap());
    }

    #[test]
    fn identity_frame() {
        let s = sheet();
        let same = moving_frame_transform(&s, &Expr::zero(), &Expr::zero()).unwrap();
        assert_eq!(same.field("u"), s.field("u"));
        assert!(same.field("v").unwrap().is_zero());
    }

    #[test]
    fn moving_frames_preserve_solutions() {
        for (a, b) in [("sin(t)", "cos(t)"), ("t^2", "exp(t)")] {
            let moved = moving_frame_transform(&sheet(), &expr(a).unwrap(), &expr(b).unwrap()).unwrap();
            let rep = closure_check(&moved, 60, 4).unwrap();
            assert!(rep.pass, "{a},{b}: {rep:?}");
        }
    }

    #[test]
    fn rotation_orbit_of_waves_and_spiral() {
        let sys = vortex_system().unwrap();
        for name in ["traveling_waves", "spiral"] {
            let base = partial_symmetry_solutions(name).unwrap();
            let fam = |l: f64| rotation_flow(&base, l);
            let rep = flow_orbit_check("X4 orbit", fam, &sys, &[0.5, -1.2], 40, 5, 1e-9).unwrap();
            assert!(rep.pass, "{name}: {rep:?}");
        }
    }

    #[test]
    fn rotation_at_zero_is_identity() {
        let base = partial_symmetry_solutions("shear").unwrap();
        let same = rotation_flow(&base, 0.0).unwrap();
        let bx = unit_box();
        for d in ["u", "v"] {
            let c = crate::expr::compare(same.field(d).unwrap(), base.field(d).unwrap(), &bx, 50, 1e-12, 1).unwrap();
            assert!(c.equal && c.max_deviation <= 1e-12);
        }
    }
}
