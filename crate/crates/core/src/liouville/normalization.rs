use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::EvalPoint;
use crate::numerics::{integrate, QuadOptions};
use crate::solution::ClosedFormSolution;

/// Radii of the disks used to diagnose divergence.
const DISK_RADII: [f64; 4] = [8.0, 16.0, 32.0, 64.0];

/// `int exp(2u) dx dy` over the plane.
#[derive(Clone, Debug, Serialize)]
pub struct Normalization {
    /// Full-plane value, absent when divergent.
    pub value: Option<f64>,
    pub error: f64,
    pub divergent: bool,
    /// `(R, integral over the disk of radius R)`.
    pub disks: Vec<(f64, f64)>,
}

fn density(sol: &ClosedFormSolution) -> Result<impl Fn(f64, f64) -> f64 + '_> {
    let u = sol
        .field("u")
        .ok_or_else(|| Error::Invalid(format!("solution `{}` has no field `u`", sol.name)))?;
    let base = sol.base_point();
    Ok(move |x: f64, y: f64| {
        let mut p: EvalPoint = base.clone();
        p.set("x", x).set("y", y);
        match u.eval_real(&p) {
            Ok(v) => (2.0 * v).exp(),
            Err(_) => f64::NAN,
        }
    })
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// Polar integral with the radial variable mapped by `r = map(s)` on `[0, 1]`.
fn polar(f: &dyn Fn(f64, f64) -> f64, map: &dyn Fn(f64) -> (f64, f64)) -> Result<(f64, f64)> {
    let mut inner_err: f64 = 0.0;
    let mut failure = None;
    let outer = integrate(
        |theta| {
            let (c, s) = (theta.cos(), theta.sin());
            let inner = integrate(
                |t| {
                    let (r, dr) = map(t);
                    if dr == 0.0 {
                        return 0.0;
                    }
                    f(r * c, r * s) * r * dr
                },
                0.0,
                1.0,
                opts(),
            );
            match inner {
                Ok(q) => {
                    inner_err = inner_err.max(q.error);
                    q.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        2.0 * PI,
        opts(),
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let q = outer?;
    Ok((q.value, q.error + 2.0 * PI * inner_err))
}

/// Normalization integral with a tail-growth divergence diagnosis: the disk
/// integrals of a finite density settle, those of a divergent one keep
/// growing by comparable or larger amounts.
pub fn normalization_integral(sol: &ClosedFormSolution) -> Result<Normalization> {
    let f = density(sol)?;
    let mut disks = Vec::new();
    for r in DISK_RADII {
        let (v, _) = polar(&f, &|t| (r * t, r))?;
        disks.push((r, v));
    }
    let steps: Vec<f64> = disks.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let divergent = steps.windows(2).any(|s| s[1] > 0.5 * s[0] && s[1] > 1e-6);
    if divergent {
        return Ok(Normalization {
            value: None,
            error: f64::INFINITY,
            divergent,
            disks,
        });
    }
    let (value, error) = polar(&f, &|t: f64| {
        if t >= 1.0 {
            (0.0, 0.0)
        } else {
            (t / (1.0 - t), 1.0 / ((1.0 - t) * (1.0 - t)))
        }
    })?;
    Ok(Normalization {
        value: Some(value),
        error,
        divergent,
        disks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, VarRegistry};
    use crate::sampling::SamplingBox;

    fn sol(u: &str) -> ClosedFormSolution {
        let u = parse(u, &VarRegistry::real(&["x", "y", "k"])).unwrap();
        ClosedFormSolution::new("s", &["x", "y"], vec![("u", u)], SamplingBox::new())
    }

    #[test]
    fn bennet_is_four_pi_for_every_k() {
        for k in [0.5, 1.0, 5.0] {
            let s = sol("ln(2*k / (k^2 + x^2 + y^2))").with_params(&[("k", k)]);
            let n = normalization_integral(&s).unwrap();
            assert!(!n.divergent);
            assert!((n.value.unwrap() - 4.0 * PI).abs() < 1e-6, "k={k}: {:?}", n);
            assert!(n.error < 1e-6);
        }
    }

    #[test]
    fn harris_diverges() {
        let n = normalization_integral(&sol("-ln(cosh(x))")).unwrap();
        assert!(n.divergent);
        assert!(n.value.is_none());
    }
}
