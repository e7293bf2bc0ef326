use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Comparison, Expr};
use crate::lie::{commutator, compare_fields, GeneratorField};
use crate::sampling::SamplingBox;

use super::{expr, TimeFunctionTriple, DEPENDENT, INDEPENDENT};

pub const GENERATOR_NAMES: [&str; 6] = ["X1", "X2", "X3", "X4", "XH", "XAB"];

const BRACKET_TOL: f64 = 1e-10;
const BRACKET_SAMPLES: usize = 40;

fn field(label: &str, xi: [Expr; 3], phi: [Expr; 2]) -> GeneratorField {
    GeneratorField::point(label, &INDEPENDENT, &DEPENDENT, xi.to_vec(), phi.to_vec()).expect("counts match")
}

fn e(s: &str) -> Expr {
    expr(s).expect("valid literal")
}

/// `H(t) d/dv`.
pub fn x_h(h: &Expr) -> GeneratorField {
    field(
        &format!("X_H[H={h}]"),
        [Expr::zero(), Expr::zero(), Expr::zero()],
        [Expr::zero(), h.clone()],
    )
}

/// `A d/dx + B d/dy + (x B_t - y A_t) d/dv`.
pub fn x_ab(a: &Expr, b: &Expr) -> Result<GeneratorField> {
    let zv = Expr::var("x").mul(&b.d("t")?).sub(&Expr::var("y").mul(&a.d("t")?)).simplify();
    Ok(field(
        &format!("X_AB[A={a}, B={b}]"),
        [a.clone(), b.clone(), Expr::zero()],
        [Expr::zero(), zv],
    ))
}

/// One of the generators of the symmetry algebra; `XH` reads `H` and `XAB`
/// reads `A`, `B` from the triple.
pub fn build_generator(name: &str, f: &TimeFunctionTriple) -> Result<GeneratorField> {
    let z = Expr::zero;
    Ok(match name {
        "X1" => field("X1", [z(), z(), Expr::one()], [z(), z()]),
        "X2" => field("X2", [e("y"), e("-x"), z()], [z(), z()]),
        "X3" => field("X3", [z(), z(), z()], [Expr::one(), z()]),
        "X4" => field("X4", [e("-t*y"), e("t*x"), z()], [z(), e("(x^2 + y^2)/2")]),
        "XH" => x_h(&f.h),
        "XAB" => x_ab(&f.a, &f.b)?,
        _ => {
            return Err(Error::Unknown {
                kind: "generator",
                name: name.into(),
            })
        }
    })
}

/// The instances of every family used in the suites: `X1`..`X4` once,
/// `XH` and `XAB` three times each.
pub fn prop2_generators() -> Result<Vec<GeneratorField>> {
    let triples = [
        TimeFunctionTriple::parse("t^2", "sin(t)", "1")?,
        TimeFunctionTriple::parse("sin(t)", "cos(t)", "sin(t)")?,
        TimeFunctionTriple::parse("exp(t)", "t^3", "t^2*exp(t)")?,
    ];
    let mut out = Vec::new();
    for name in ["X1", "X2", "X3", "X4"] {
        out.push(build_generator(name, &triples[0])?);
    }
    for tr in &triples {
        out.push(build_generator("XH", tr)?);
    }
    for tr in &triples {
        out.push(build_generator("XAB", tr)?);
    }
    Ok(out)
}

/// Fields that are not symmetries: `x d/dx`, `u d/du` and `t d/dt`.
pub fn negative_controls() -> Vec<GeneratorField> {
    let z = Expr::zero;
    vec![
        field("x d/dx", [e("x"), z(), z()], [z(), z()]),
        field("u d/du", [z(), z(), z()], [e("u"), z()]),
        field("t d/dt", [z(), z(), e("t")], [z(), z()]),
    ]
}

fn comparison_box() -> SamplingBox {
    SamplingBox::new()
        .real("x", -1.0, 1.0)
        .real("y", -1.0, 1.0)
        .real("t", -1.0, 1.0)
        .real("u", -1.0, 1.0)
        .real("v", -1.0, 1.0)
}

/// One bracket of the algebra: the computed commutator against the form
/// listed in the literature and against the corrected form.
#[derive(Clone, Debug, Serialize)]
pub struct BracketCheck {
    pub bracket: String,
    pub printed: String,
    pub corrected: String,
    pub printed_holds: bool,
    pub corrected_holds: bool,
    /// Deviation of the computed bracket from the printed form.
    pub printed_deviation: f64,
    pub corrected_deviation: f64,
}

impl BracketCheck {
    pub fn printed_is_correct(&self) -> bool {
        self.printed == self.corrected
    }
}

fn bracket_check(
    g1: &GeneratorField,
    g2: &GeneratorField,
    printed: (&str, GeneratorField),
    corrected: (&str, GeneratorField),
    seed: u64,
) -> Result<BracketCheck> {
    let c = commutator(g1, g2)?;
    let bx = comparison_box();
    let p: Comparison = compare_fields(&c, &printed.1, &bx, BRACKET_SAMPLES, BRACKET_TOL, seed)?;
    let q: Comparison = compare_fields(&c, &corrected.1, &bx, BRACKET_SAMPLES, BRACKET_TOL, seed)?;
    Ok(BracketCheck {
        bracket: format!("[{}, {}]", g1.label, g2.label),
        printed: printed.0.to_string(),
        corrected: corrected.0.to_string(),
        printed_holds: p.equal,
        corrected_holds: q.equal,
        printed_deviation: p.max_deviation,
        corrected_deviation: q.max_deviation,
    })
}

/// Every nonvanishing bracket of the algebra at concrete `A, B, C, D, H`,
/// followed by the pairs among `X1..X4` expected to commute.
pub fn commutator_table(seed: u64) -> Result<Vec<BracketCheck>> {
    let tr = TimeFunctionTriple::parse("t^2", "sin(t)", "sin(t)")?;
    let g = |n: &str| build_generator(n, &tr);
    let (x1, x2, x3, x4) = (g("X1")?, g("X2")?, g("X3")?, g("X4")?);
    let xh = g("XH")?;
    let xab = g("XAB")?;
    let (a, b, h) = (&tr.a, &tr.b, &tr.h);
    let zero = || GeneratorField::zero("0", &INDEPENDENT, &DEPENDENT);
    let same = |s: &str, f: &GeneratorField| ((s.to_string(), f.clone()), (s.to_string(), f.clone()));

    let mut rows: Vec<(GeneratorField, GeneratorField, (String, GeneratorField), (String, GeneratorField))> = Vec::new();
    rows.push((x1.clone(), x4.clone(), ("-X4".into(), x4.scale(-1.0)), ("-X2".into(), x2.scale(-1.0))));
    let (p, q) = same("X_{H_t}", &x_h(&h.d("t")?));
    rows.push((x1.clone(), xh.clone(), p, q));
    let (p, q) = same("X_{(A_t,B_t)}", &x_ab(&a.d("t")?, &b.d("t")?)?);
    rows.push((x1.clone(), xab.clone(), p, q));
    let (p, q) = same("X_{(-B,A)}", &x_ab(&b.negate(), a)?);
    rows.push((x2.clone(), xab.clone(), p, q));
    let tb = e("t").mul(b).negate().simplify();
    let ta = e("t").mul(a).simplify();
    let (p, q) = same("-X_{(-tB,tA)}", &x_ab(&tb, &ta)?.scale(-1.0));
    rows.push((x4.clone(), xab.clone(), p, q));

    let (c, d) = (e("t"), e("1"));
    let (a2, b2) = (e("t"), e("1"));
    let (c2, d2) = (e("t^2"), e("t"));
    let printed_h = |a: &Expr, b: &Expr, c: &Expr, d: &Expr| -> Result<Expr> {
        Ok(a.mul(&c.d("t")?)
            .sub(&b.mul(&d.d("t")?))
            .sub(&c.mul(&b.d("t")?))
            .add(&d.mul(&a.d("t")?))
            .simplify())
    };
    let corrected_h = |a: &Expr, b: &Expr, c: &Expr, d: &Expr| a.mul(d).sub(&b.mul(c)).d("t");
    // Generic instance, then the instance A=t, B=1, C=t^2, D=t.
    for (a, b, c, d) in [(a, b, &c, &d), (&a2, &b2, &c2, &d2)] {
        rows.push((
            x_ab(a, b)?,
            x_ab(c, d)?,
            ("X_H~, H~ = A C_t - B D_t - C B_t + D A_t".into(), x_h(&printed_h(a, b, c, d)?)),
            ("X_H~, H~ = (A D - B C)_t".into(), x_h(&corrected_h(a, b, c, d)?)),
        ));
    }
    for other in [&x1, &x2, &x4, &xh, &xab] {
        let (p, q) = same("0", &zero());
        rows.push((x3.clone(), other.clone(), p, q));
    }
    for (g1, g2) in [(&x1, &x2), (&x2, &x4)] {
        let (p, q) = same("0", &zero());
        rows.push((g1.clone(), g2.clone(), p, q));
    }

    rows.into_iter()
        .enumerate()
        .map(|(k, (g1, g2, p, q))| bracket_check(&g1, &g2, (&p.0, p.1), (&q.0, q.1), seed.wrapping_add(k as u64)))
        .collect()
}

/// `[X, [Y, Z]] + [Y, [Z, X]] + [Z, [X, Y]]` against the zero field.
pub fn jacobi_check(x: &GeneratorField, y: &GeneratorField, z: &GeneratorField, seed: u64) -> Result<Comparison> {
    let t1 = commutator(x, &commutator(y, z)?)?;
    let t2 = commutator(y, &commutator(z, x)?)?;
    let t3 = commutator(z, &commutator(x, y)?)?;
    let sum = t1.add(&t2)?.add(&t3)?;
    let zero = GeneratorField::zero("0", &INDEPENDENT, &DEPENDENT);
    compare_fields(&sum, &zero, &comparison_box(), BRACKET_SAMPLES, BRACKET_TOL, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::infinitesimal_symmetry_check;
    use crate::vortex::vortex_system;

    #[test]
    fn generator_coefficients() {
        let tr = TimeFunctionTriple::parse("t^2", "sin(t)", "1").unwrap();
        let xab = build_generator("XAB", &tr).unwrap();
        let bx = comparison_box();
        let want = e("x*cos(t) - 2*t*y");
        assert!(crate::expr::numeric_equal(&xab.phi[1], &want, &bx, 20, 1e-12, 0).unwrap());
        let xh = build_generator("XH", &tr).unwrap();
        assert!(xh.phi[1].is_one() && xh.xi.iter().all(Expr::is_zero));
        assert!(build_generator("X9", &tr).is_err());
    }

    #[test]
    fn generators_are_symmetries_and_controls_are_not() {
        let sys = vortex_system().unwrap();
        for g in prop2_generators().unwrap() {
            let rep = infinitesimal_symmetry_check(&g, &sys, 40, 7, 1e-9).unwrap();
            assert!(rep.pass, "{}: {:e}", g.label, rep.max);
        }
        for g in negative_controls() {
            let rep = infinitesimal_symmetry_check(&g, &sys, 40, 7, 1e-9).unwrap();
            assert!(rep.max > 1e-3, "{}: {:e}", g.label, rep.max);
        }
    }

    #[test]
    fn bracket_table_has_two_misprints() {
        let rows = commutator_table(11).unwrap();
        for r in &rows {
            assert!(r.corrected_holds, "{r:?}");
            assert_eq!(r.printed_holds, r.printed_is_correct(), "{r:?}");
        }
        let wrong: Vec<&str> = rows.iter().filter(|r| !r.printed_holds).map(|r| r.bracket.as_str()).collect();
        assert_eq!(wrong.len(), 3, "{wrong:?}");
        assert!(wrong[0].starts_with("[X1, X4]"));
    }

    #[test]
    fn special_instance_bracket_vanishes() {
        let g1 = x_ab(&e("t"), &e("1")).unwrap();
        let g2 = x_ab(&e("t^2"), &e("t")).unwrap();
        let c = commutator(&g1, &g2).unwrap();
        assert!(c.xi.iter().chain(&c.phi).all(|k| k.is_zero()), "{c:?}");
    }

    #[test]
    fn jacobi_on_x1_x2_x4() {
        let tr = TimeFunctionTriple::parse("t", "1", "1").unwrap();
        let g = |n| build_generator(n, &tr).unwrap();
        assert!(jacobi_check(&g("X1"), &g("X2"), &g("X4"), 3).unwrap().equal);
    }
}
