//! Profiles of `phi'' = F(phi)` by quadrature of the first integral
//! `phi'^2 / 2 = int_{u0}^{phi} F + p0^2 / 2`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{EvalPoint, Expr};
use crate::numerics::{dopri5, integrate, OdeOptions, QuadOptions};

/// Pieces per profile before the march is declared divergent.
const MAX_PIECES: usize = 20_000;
/// `|phi|` beyond which the profile is declared divergent.
const MAX_VALUE: f64 = 1e8;

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 2000,
    }
}

/// One monotone stretch of the profile between `v1` and `v2`, with
/// `K = phi'^2` known at both ends.
#[derive(Clone, Debug, Serialize)]
struct Piece {
    v1: f64,
    k1: f64,
    v2: f64,
    k2: f64,
    s1: f64,
    s2: f64,
}

impl Piece {
    fn dir(&self) -> f64 {
        (self.v2 - self.v1).signum()
    }
}

/// A turning point `phi' = 0` met by the march.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TurningPoint {
    pub s: f64,
    pub value: f64,
    /// Sign of `phi'` after the turn, `sign F(value)`.
    pub new_direction: f64,
}

/// Profile on `[0, s_max]`.
#[derive(Clone, Debug)]
pub struct Profile {
    pub f: Expr,
    pub u0: f64,
    pub p0: f64,
    pub s_max: f64,
    pub turning_points: Vec<TurningPoint>,
    pieces: Vec<Piece>,
    /// `phi` is constant (`F(u0) = 0`, `p0 = 0`).
    equilibrium: bool,
}

struct Rhs<'a> {
    f: &'a Expr,
    p: EvalPoint,
}

impl Rhs<'_> {
    fn at(&mut self, u: f64) -> Result<f64> {
        self.p.set("u", u);
        let v = self.f.eval_real(&self.p)?;
        if !v.is_finite() {
            return Err(Error::Invalid(format!("F = {} is not finite at u = {u}", self.f)));
        }
        Ok(v)
    }

    /// `int_0^1 F(v + delta tau) dtau`.
    fn mean(&mut self, v: f64, delta: f64) -> Result<f64> {
        if delta == 0.0 {
            return self.at(v);
        }
        let mut err = None;
        let q = integrate(
            |tau| match self.at(v + delta * tau) {
                Ok(y) => y,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            1.0,
            quad_opts(),
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(q.value),
        }
    }

    /// `K(vref + delta) = K(vref) + 2 delta int_0^1 F(vref + delta tau) dtau`;
    /// written in the offset so that `K` keeps full relative accuracy next to
    /// a turning point.
    fn k_offset(&mut self, vref: f64, kref: f64, delta: f64) -> Result<f64> {
        let k = kref + 2.0 * delta * self.mean(vref, delta)?;
        if !k.is_finite() {
            return Err(Error::Invalid(format!("first integral of F = {} overflows near phi = {vref:e}", self.f)));
        }
        Ok(k)
    }

    /// `K(v)` inside a piece, from the nearer end.
    fn k_in(&mut self, piece: &Piece, v: f64) -> Result<f64> {
        if (v - piece.v1).abs() <= (v - piece.v2).abs() {
            self.k_offset(piece.v1, piece.k1, v - piece.v1)
        } else {
            self.k_offset(piece.v2, piece.k2, v - piece.v2)
        }
    }

    /// `int |dv| / sqrt(K)` from `a` to `b`, with `v = a + (b - a) sin^2(pi th / 2)`
    /// so that a simple zero of `K` at either end leaves a bounded integrand.
    fn arc(&mut self, a: f64, ka: f64, b: f64, kb: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let width = b - a;
        let mut err = None;
        let q = integrate(
            |th| {
                let half = PI * th / 2.0;
                let jac = width.abs() * PI * (PI * th).sin() / 2.0;
                if jac == 0.0 {
                    return 0.0;
                }
                let k = if th <= 0.5 {
                    self.k_offset(a, ka, width * half.sin().powi(2))
                } else {
                    self.k_offset(b, kb, -width * half.cos().powi(2))
                };
                match k {
                    Ok(k) if k > 0.0 => jac / k.sqrt(),
                    Ok(_) => 0.0,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            1.0,
            quad_opts(),
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(q.value),
        }
    }
}

/// Root of a monotone `g` on `[lo, hi]` (with `g(lo) <= 0 <= g(hi)` after
/// orientation) by Newton steps kept inside a shrinking bracket.
fn safeguarded_newton(
    mut g: impl FnMut(f64) -> Result<f64>,
    mut dg: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let glo = g(lo)?;
    let ghi = g(hi)?;
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    let rising = ghi > glo;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(x);
        }
        if (gx > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let d = dg(x)?;
        let newton = x - gx / d;
        let next = if d.is_finite() && d != 0.0 && newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || (hi - lo).abs() <= 1e-15 * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Integrate `phi'' = F(phi)`, `phi(0) = u0`, `phi'(0) = p0` on `[0, s_max]`.
///
/// The march follows `phi` through monotone pieces of the first integral
/// `K(phi) = phi'^2`. Where `K` reaches zero the branch switches and the new
/// direction is the sign of `F` there.
pub fn quadrature_integrate(f: &Expr, u0: f64, p0: f64, s_max: f64) -> Result<Profile> {
    if let Some(v) = f.free_vars().into_iter().find(|v| v != "u") {
        return Err(Error::Invalid(format!("F = {f} depends on `{v}`; expected a function of u")));
    }
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::Invalid(format!("s_max must be positive, got {s_max}")));
    }
    let mut rhs = Rhs { f, p: EvalPoint::new() };
    let mut profile = Profile {
        f: f.clone(),
        u0,
        p0,
        s_max,
        turning_points: Vec::new(),
        pieces: Vec::new(),
        equilibrium: false,
    };
    let f0 = rhs.at(u0)?;
    if p0 == 0.0 && f0 == 0.0 {
        profile.equilibrium = true;
        return Ok(profile);
    }
    let mut dir = if p0 != 0.0 { p0.signum() } else { f0.signum() };
    let (mut v, mut k, mut s) = (u0, p0 * p0, 0.0);
    while s < s_max {
        if profile.pieces.len() >= MAX_PIECES || v.abs() > MAX_VALUE {
            return Err(Error::Invalid(format!(
                "profile of F = {f} leaves every bounded range before s = {s_max} (reached s = {s:.6}, phi = {v:e})"
            )));
        }
        let dv = 0.05 * (1.0 + v.abs()).min(1.0 + k.sqrt());
        let k_next = rhs.k_offset(v, k, dir * dv)?;
        let (end, kend, turning) = if k_next > 0.0 {
            (v + dir * dv, k_next, false)
        } else {
            let mut slope = Rhs { f, p: EvalPoint::new() };
            let w = safeguarded_newton(|w| rhs.k_offset(v, k, dir * w), |w| Ok(2.0 * dir * slope.at(v + dir * w)?), 0.0, dv)?;
            (v + dir * w, 0.0, true)
        };
        let ds = rhs.arc(v, k, end, kend)?;
        profile.pieces.push(Piece {
            v1: v,
            k1: k,
            v2: end,
            k2: kend,
            s1: s,
            s2: s + ds,
        });
        s += ds;
        v = end;
        k = kend;
        if turning && s < s_max {
            let fv = rhs.at(v)?;
            if fv == 0.0 {
                return Err(Error::Invalid(format!("degenerate turning point at phi = {v}: F vanishes there")));
            }
            let new_direction = fv.signum();
            log::info!("turning point at s = {s:.9}, phi = {v:.12}; branch switches to direction {new_direction}");
            profile.turning_points.push(TurningPoint {
                s,
                value: v,
                new_direction,
            });
            dir = new_direction;
        }
    }
    Ok(profile)
}

impl Profile {
    /// `(phi(s), phi'(s))` for `s` in `[0, s_max]`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.s_max * (1.0 + 1e-12)).contains(&s) {
            return Err(Error::Invalid(format!("s = {s} outside [0, {}]", self.s_max)));
        }
        if self.equilibrium {
            return Ok((self.u0, 0.0));
        }
        let idx = self.pieces.partition_point(|p| p.s2 < s).min(self.pieces.len() - 1);
        let piece = &self.pieces[idx];
        let mut rhs = Rhs {
            f: &self.f,
            p: EvalPoint::new(),
        };
        let mut slope = Rhs {
            f: &self.f,
            p: EvalPoint::new(),
        };
        let target = s - piece.s1;
        let dir = piece.dir();
        let v = if target <= 0.0 {
            piece.v1
        } else if s >= piece.s2 {
            piece.v2
        } else {
            // arc length along the piece as a function of the distance w from v1
            let w = safeguarded_newton(
                |w| {
                    let b = piece.v1 + dir * w;
                    let kb = rhs.k_in(piece, b)?;
                    Ok(rhs.arc(piece.v1, piece.k1, b, kb)? - target)
                },
                |w| {
                    let k = slope.k_in(piece, piece.v1 + dir * w)?;
                    Ok(if k > 0.0 { 1.0 / k.sqrt() } else { f64::INFINITY })
                },
                0.0,
                (piece.v2 - piece.v1).abs(),
            )?;
            piece.v1 + dir * w
        };
        let k = rhs.k_in(piece, v)?.max(0.0);
        Ok((v, dir * k.sqrt()))
    }

    /// `n + 1` equally spaced rows `(s, phi, phi')`.
    pub fn table(&self, n: usize) -> Result<Vec<[f64; 3]>> {
        (0..=n)
            .map(|i| {
                let s = self.s_max * i as f64 / n.max(1) as f64;
                let (v, dv) = self.eval(s)?;
                Ok([s, v, dv])
            })
            .collect()
    }
}

/// `(phi, phi')` at the requested `s` by Dormand-Prince integration.
pub fn rk_profile(f: &Expr, u0: f64, p0: f64, outputs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut p = EvalPoint::new();
    let rhs = |_s: f64, y: &[f64]| {
        p.set("u", y[0]);
        vec![y[1], f.eval_real(&p).unwrap_or(f64::NAN)]
    };
    let out = dopri5(rhs, 0.0, &[u0, p0], outputs, OdeOptions::default())?;
    Ok(out.into_iter().map(|y| (y[0], y[1])).collect())
}

/// Sup-norm gap between the quadrature profile and the Runge-Kutta
/// oracle on `n + 1` equally spaced points, over `phi` and `phi'`.
pub fn rk_gap(profile: &Profile, n: usize) -> Result<f64> {
    let rows = profile.table(n)?;
    let grid: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let rk = rk_profile(&profile.f, profile.u0, profile.p0, &grid)?;
    Ok(rows
        .iter()
        .zip(&rk)
        .map(|(r, (v, dv))| (r[1] - v).abs().max((r[2] - dv).abs()))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, VarRegistry};

    fn f(s: &str) -> Expr {
        parse(s, &VarRegistry::real(&["u", "x"])).unwrap()
    }

    #[test]
    fn cosh_profile() {
        let p = quadrature_integrate(&f("u"), 1.0, 0.0, 2.0).unwrap();
        for s in [0.0, 0.3, 1.0, 1.7, 2.0] {
            let (v, dv) = p.eval(s).unwrap();
            assert!((v - s.cosh()).abs() < 1e-9, "s={s}: {v}");
            assert!((dv - s.sinh()).abs() < 1e-8);
        }
        assert!(p.turning_points.is_empty());
    }

    #[test]
    fn linear_and_trigonometric_profiles() {
        let p = quadrature_integrate(&f("0"), 1.0, 2.0, 3.0).unwrap();
        assert!((p.eval(1.5).unwrap().0 - 4.0).abs() < 1e-12);
        let c = quadrature_integrate(&f("-u"), 1.0, 0.0, 7.0).unwrap();
        for s in [0.5, 2.0, 3.5, 6.9] {
            assert!((c.eval(s).unwrap().0 - s.cos()).abs() < 1e-8, "s={s}");
        }
        assert_eq!(c.turning_points.len(), 2);
        assert!((c.turning_points[0].s - PI).abs() < 1e-8);
        assert_eq!(c.turning_points[0].new_direction, 1.0);
    }

    #[test]
    fn separatrix_matches_closed_form_and_rk() {
        let p = quadrature_integrate(&f("exp(2*u)"), 0.0, -1.0, 3.0).unwrap();
        for s in [0.5, 1.5, 3.0] {
            assert!((p.eval(s).unwrap().0 + (1.0 + s).ln()).abs() < 1e-9);
        }
        assert!(rk_gap(&p, 60).unwrap() < 1e-7);
    }

    #[test]
    fn pendulum_agrees_with_rk() {
        let p = quadrature_integrate(&f("-sin(u)"), 0.0, 1.0, 12.0).unwrap();
        assert!(p.turning_points.len() >= 2);
        let gap = rk_gap(&p, 120).unwrap();
        assert!(gap < 1e-7, "{gap:e}");
    }

    #[test]
    fn blow_up_and_equilibrium() {
        assert!(quadrature_integrate(&f("exp(2*u)"), 0.0, 1.0, 2.0).is_err());
        let eq = quadrature_integrate(&f("u - 1"), 1.0, 0.0, 2.0).unwrap();
        assert_eq!(eq.eval(1.3).unwrap(), (1.0, 0.0));
        assert!(quadrature_integrate(&f("x*u"), 1.0, 0.0, 1.0).is_err());
    }
}
