use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::{infinitesimal_symmetry_check, GeneratorField};
use crate::report::ResidualReport;
use crate::sampling::rng;

use super::{apply_equivalence, equation_distance, EquivalenceTransform, GssEquation, DEPENDENT, INDEPENDENT, RESIDUAL_TOL, SAMPLES};

fn point_field(label: &str, xi_x: Expr, xi_y: Expr, phi: Expr) -> GeneratorField {
    GeneratorField::point(label, &INDEPENDENT, &DEPENDENT, vec![xi_x, xi_y], vec![phi]).expect("counts match")
}

/// `alpha (x d/dx + y d/dy) + zeta(u) d/du`.
fn dilation(label: &str, alpha: f64, zeta: Expr) -> GeneratorField {
    let c = Expr::constant(alpha);
    point_field(label, c.mul(&Expr::var("x")), c.mul(&Expr::var("y")), zeta)
}

fn upow(e: f64) -> Expr {
    Expr::var("u").powf(e)
}

/// The symmetric representatives of the classification.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassificationCase {
    /// `F = u^(1 + (p+1)/q)`, `G = u^(1 + 1/q)`, `X = x d/dx + y d/dy - 2q u d/du`.
    Power { a: f64, p: f64, q: f64 },
    /// `F = e^((1+p)u)`, `G = e^u`, `X = x d/dx + y d/dy - 2 d/du`.
    Exponential { a: f64, p: f64 },
    /// `p = -1`, `G = 0`, any `F`, `X = x d/dx + y d/dy`.
    Cylindrical { a: f64, f: Expr },
    /// `a = p = 0`, `F = u^k`, `G = 0`, `X = (k-1)(x d/dx + y d/dy) - 2u d/du`.
    LaplacePower { k: f64 },
}

impl ClassificationCase {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Power { .. } => "a",
            Self::Exponential { .. } => "b",
            Self::Cylindrical { .. } => "c",
            Self::LaplacePower { .. } => "laplace_power",
        }
    }

    /// The default instances used by the verification suite.
    pub fn defaults() -> Vec<Self> {
        vec![
            Self::Power { a: -1.0, p: 1.0, q: -2.0 },
            Self::Power { a: 0.5, p: 0.5, q: 3.0 },
            Self::Exponential { a: -1.0, p: 1.0 },
            Self::Cylindrical {
                a: -1.0,
                f: upow(3.0),
            },
            Self::LaplacePower { k: 3.0 },
        ]
    }

    fn equation(&self) -> Result<GssEquation> {
        let u = Expr::var("u");
        match *self {
            Self::Power { a, p, q } => {
                if q == 0.0 {
                    return Err(Error::Invalid("case (a) needs q != 0".into()));
                }
                GssEquation::new(a, p, upow(1.0 + (p + 1.0) / q), upow(1.0 + 1.0 / q))
            }
            Self::Exponential { a, p } => GssEquation::new(a, p, ((1.0 + p) * &u).exp(), u.exp()),
            Self::Cylindrical { a, ref f } => GssEquation::new(a, -1.0, f.clone(), Expr::zero()),
            Self::LaplacePower { k } => GssEquation::new(0.0, 0.0, upow(k), Expr::zero()),
        }
    }

    fn generator(&self) -> GeneratorField {
        let u = Expr::var("u");
        match *self {
            Self::Power { q, .. } => dilation("x d/dx + y d/dy - 2q u d/du", 1.0, (-2.0 * q) * &u),
            Self::Exponential { .. } => dilation("x d/dx + y d/dy - 2 d/du", 1.0, Expr::constant(-2.0)),
            Self::Cylindrical { .. } => dilation("x d/dx + y d/dy", 1.0, Expr::zero()),
            Self::LaplacePower { k } => dilation("(k-1)(x d/dx + y d/dy) - 2u d/du", k - 1.0, -2.0 * &u),
        }
    }

    /// A perturbed generator and a perturbed equation, each expected to fail.
    fn controls(&self) -> Result<Vec<(GeneratorField, GssEquation)>> {
        let eq = self.equation()?;
        let u = Expr::var("u");
        Ok(match *self {
            Self::Power { a, p, q } => vec![
                (dilation("perturbed zeta", 1.0, (-2.0 * q + 0.5) * &u), eq),
                (self.generator(), GssEquation::new(a, p, upow(1.5 + (p + 1.0) / q), upow(1.0 + 1.0 / q))?),
            ],
            Self::Exponential { a, p } => vec![
                (dilation("perturbed zeta", 1.0, Expr::constant(-2.5)), eq),
                (self.generator(), GssEquation::new(a, p, ((1.5 + p) * &u).exp(), u.exp())?),
            ],
            Self::Cylindrical { a, ref f } => vec![
                (point_field("x d/dx + 2y d/dy", Expr::var("x"), 2.0 * &Expr::var("y"), Expr::zero()), eq),
                (self.generator(), GssEquation::new(a, -1.0, f.clone(), u.clone())?),
            ],
            Self::LaplacePower { k } => vec![
                (dilation("perturbed zeta", k - 1.0, -2.5 * &u), eq),
                (self.generator(), GssEquation::new(0.0, 0.0, upow(k + 0.5), Expr::zero())?),
            ],
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationCheck {
    pub case: String,
    pub equation: GssEquation,
    pub report: ResidualReport,
    pub negative_controls: Vec<ResidualReport>,
}

impl ClassificationCheck {
    pub fn pass(&self) -> bool {
        self.report.pass && self.negative_controls.iter().all(|r| !r.pass)
    }
}

/// The case generator on its equation, plus the negative controls.
pub fn verify_classification_case(case: &ClassificationCase, samples: usize, seed: u64) -> Result<ClassificationCheck> {
    let equation = case.equation()?;
    let report = infinitesimal_symmetry_check(&case.generator(), &equation.system()?, samples, seed, RESIDUAL_TOL)?;
    let negative_controls = case
        .controls()?
        .iter()
        .map(|(g, e)| infinitesimal_symmetry_check(g, &e.system()?, samples, seed, RESIDUAL_TOL))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationCheck {
        case: case.name().into(),
        equation,
        report,
        negative_controls,
    })
}

/// `F = c1 (c+u)^(1 + (p+1)/q)`, `G = c2 (c+u)^(1 + 1/q)` with `u` sampled
/// where `c + u >= 0.2`.
pub fn shifted_family(a: f64, c: f64, c1: f64, c2: f64, p: f64, q: f64) -> Result<GssEquation> {
    if q == 0.0 {
        return Err(Error::Invalid("shifted family needs q != 0".into()));
    }
    let cu = Expr::constant(c).add(&Expr::var("u"));
    let f = Expr::constant(c1).mul(&cu.powf(1.0 + (p + 1.0) / q));
    let g = Expr::constant(c2).mul(&cu.powf(1.0 + 1.0 / q));
    let lo = 0.2 + (-c).max(0.0);
    Ok(GssEquation::new(a, p, f, g)?.with_u_range(lo, lo + 1.8))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftedFamilyCheck {
    pub report: ResidualReport,
    pub negative_control: ResidualReport,
    /// Distance to the image of case (a) under `scale_u(c2^(-q))` then
    /// `shift_u(-c)`; `None` off the orbit condition `c1 = c2^(p+1)`.
    pub image_distance: Option<f64>,
}

impl ShiftedFamilyCheck {
    pub fn pass(&self) -> bool {
        self.report.pass && !self.negative_control.pass && self.image_distance.map_or(true, |d| d <= 1e-12)
    }
}

pub fn shifted_family_check(a: f64, c: f64, c1: f64, c2: f64, p: f64, q: f64, seed: u64) -> Result<ShiftedFamilyCheck> {
    let eq = shifted_family(a, c, c1, c2, p, q)?;
    let sys = eq.system()?;
    let cu = Expr::constant(c).add(&Expr::var("u"));
    let x = dilation("x d/dx + y d/dy - 2q (c+u) d/du", 1.0, (-2.0 * q) * &cu);
    let report = infinitesimal_symmetry_check(&x, &sys, SAMPLES, seed, RESIDUAL_TOL)?;
    let wrong = dilation("wrong zeta sign", 1.0, (2.0 * q) * &cu);
    let negative_control = infinitesimal_symmetry_check(&wrong, &sys, SAMPLES, seed, RESIDUAL_TOL)?;
    let on_orbit = c2 > 0.0 && (c1 - c2.powf(p + 1.0)).abs() <= 1e-12 * (1.0 + c1.abs());
    let image_distance = if on_orbit {
        let base = ClassificationCase::Power { a, p, q }.equation()?;
        let scaled = apply_equivalence(&base, EquivalenceTransform::ScaleU(c2.powf(-q)))?;
        let image = apply_equivalence(&scaled, EquivalenceTransform::ShiftU(-c))?;
        Some(equation_distance(&eq, &image, 60)?)
    } else {
        None
    };
    Ok(ShiftedFamilyCheck {
        report,
        negative_control,
        image_distance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelCheck {
    pub equations: Vec<GssEquation>,
    /// `d/dy` on each instance.
    pub translation_y: Vec<ResidualReport>,
    /// `d/dx` on each instance (all with `a != 0`).
    pub translation_x: Vec<ResidualReport>,
}

impl KernelCheck {
    pub fn pass(&self) -> bool {
        self.translation_y.iter().all(|r| r.pass) && self.translation_x.iter().all(|r| !r.pass)
    }
}

/// `d/dy` and `d/dx` on `n` seeded random instances with `a` in
/// `+-[0.5, 2]`, `p` in `[-1.5, 1.5]` and `F`, `G` drawn from a fixed list.
pub fn kernel_check(n: usize, seed: u64) -> Result<KernelCheck> {
    const FUNCTIONS: [&str; 6] = ["u^2", "exp(u)", "sin(u) + 2", "u^(1/2) + u^3", "cosh(u)", "ln(u) - u"];
    let mut r = rng(seed);
    let mut out = KernelCheck {
        equations: Vec::new(),
        translation_y: Vec::new(),
        translation_x: Vec::new(),
    };
    let dy = point_field("d/dy", Expr::zero(), Expr::one(), Expr::zero());
    let dx = point_field("d/dx", Expr::one(), Expr::zero(), Expr::zero());
    for i in 0..n {
        let a = r.gen_range(0.5..2.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = r.gen_range(-1.5..1.5);
        let f = FUNCTIONS[r.gen_range(0..FUNCTIONS.len())];
        let g = FUNCTIONS[r.gen_range(0..FUNCTIONS.len())];
        let eq = GssEquation::parse(a, p, f, g)?;
        let sys = eq.system()?;
        let s = seed.wrapping_add(i as u64);
        out.translation_y.push(infinitesimal_symmetry_check(&dy, &sys, SAMPLES / 2, s, RESIDUAL_TOL)?);
        out.translation_x.push(infinitesimal_symmetry_check(&dx, &sys, SAMPLES / 2, s, RESIDUAL_TOL)?);
        out.equations.push(eq);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives_and_controls() {
        for case in ClassificationCase::defaults() {
            let c = verify_classification_case(&case, 60, 7).unwrap();
            assert!(c.report.pass, "{}: {:?}", c.case, c.report);
            for n in &c.negative_controls {
                assert!(n.max > 1e-3, "{}: control {} passed ({:e})", c.case, n.check, n.max);
            }
            assert!(c.pass());
        }
    }

    #[test]
    fn case_a_with_q_minus_two_is_four_u_scaling() {
        let case = ClassificationCase::Power { a: -1.0, p: 1.0, q: -2.0 };
        let g = case.generator();
        assert_eq!(g.phi[0].eval_real(&crate::expr::EvalPoint::from_reals(&[("u", 1.5)])).unwrap(), 6.0);
        assert!(case.equation().unwrap().f.is_one());
    }

    #[test]
    fn zero_q_rejected() {
        let case = ClassificationCase::Power { a: 0.0, p: 1.0, q: 0.0 };
        assert!(verify_classification_case(&case, 10, 0).is_err());
        assert!(shifted_family(0.0, 1.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn shifted_family_on_and_off_the_orbit() {
        let on = shifted_family_check(-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3).unwrap();
        assert!(on.pass(), "{on:?}");
        assert!(on.image_distance.unwrap() < 1e-12);
        let general = shifted_family_check(0.5, -0.3, 2.0, 3.0, 0.5, -2.0, 3).unwrap();
        assert!(general.report.pass && general.image_distance.is_none());
        let orbit = shifted_family_check(0.5, 0.4, 9.0, 3.0, 1.0, 2.0, 3).unwrap();
        assert!(orbit.pass() && orbit.image_distance.is_some());
    }

    #[test]
    fn zero_shift_is_case_a() {
        let eq = shifted_family(-1.0, 0.0, 1.0, 1.0, 1.0, 2.0).unwrap();
        let base = ClassificationCase::Power { a: -1.0, p: 1.0, q: 2.0 }.equation().unwrap();
        assert!(equation_distance(&eq, &base, 30).unwrap() < 1e-15);
    }

    #[test]
    fn only_y_translations_in_the_kernel() {
        let k = kernel_check(5, 11).unwrap();
        assert_eq!(k.translation_y.len(), 5);
        assert!(k.pass(), "{k:?}");
    }
}
