use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::sampling::SamplingBox;
use crate::solution::ClosedFormSolution;

use super::{hole, solution_from_gamma, GeneratingFunction};

pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Debug, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    /// Open interval of admissible values.
    pub range: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub gamma: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamSpec>,
    /// `[x0, x1] x [y0, y1]` used for residual checks.
    pub plane_box: [f64; 4],
    pub exclusions: &'static str,
    /// Whether the solution is defined on the whole plane (diagnostic).
    pub global: &'static str,
    #[serde(skip)]
    build: fn(&Params) -> (Expr, SamplingBox),
}

const INF: f64 = f64::INFINITY;

fn z() -> Expr {
    Expr::complex_var("z")
}

fn square(h: f64) -> SamplingBox {
    SamplingBox::new().real("x", -h, h).real("y", -h, h)
}

fn harris(_: &Params) -> (Expr, SamplingBox) {
    (z().exp(), square(2.0))
}

fn island_chain(p: &Params) -> (Expr, SamplingBox) {
    let (k, kappa) = (p["k"], p["kappa"]);
    ((k * z()).exp().mul(&Expr::constant(k)).add(&Expr::constant(kappa)), square(1.0))
}

fn bennet(p: &Params) -> (Expr, SamplingBox) {
    (z() / p["k"], square(2.0))
}

fn radial(p: &Params) -> (Expr, SamplingBox) {
    (z().powf(p["a"]), square(1.0).exclude(hole((0.0, 0.0), 0.05)))
}

fn deformed_harris(p: &Params) -> (Expr, SamplingBox) {
    let l = p["lambda"];
    let mut bx = square(1.0);
    if l != 0.0 {
        bx = bx.exclude(hole((1.0 / l, 0.0), 0.05));
    }
    ((z() / (1.0 - l * z())).exp(), bx)
}

fn p_family(p: &Params) -> (Expr, SamplingBox) {
    let q = p["p"];
    ((1.0 + q * z()).powf(1.0 / q), square(1.0).exclude(hole((-1.0 / q, 0.0), 0.05)))
}

fn erf_bar(p: &Params) -> (Expr, SamplingBox) {
    (z().erf().mul(&Expr::constant(p["p"])), square(2.0))
}

fn magnetotail(p: &Params) -> (Expr, SamplingBox) {
    let q = p["p"];
    let root = (q * q + 2.0 * q).sqrt();
    let bx = square(1.5)
        .exclude(hole((q, 0.0), 0.1))
        .exclude(hole((root, 0.0), 0.05))
        .exclude(hole((-root, 0.0), 0.05));
    (((z() + q) / (z() - q)).mul(&z().exp()), bx)
}

/// All catalog entries with their parameter schemas.
pub fn catalog_entries() -> Vec<CatalogEntry> {
    let p = |name, default, range| ParamSpec { name, default, range };
    vec![
        CatalogEntry {
            name: "harris",
            gamma: "exp(z)",
            description: "one-dimensional current sheet, u = -ln cosh x",
            params: vec![],
            plane_box: [-2.0, 2.0, -2.0, 2.0],
            exclusions: "none",
            global: "yes",
            build: harris,
        },
        CatalogEntry {
            name: "island_chain",
            gamma: "k*exp(k*z) + kappa",
            description: "chain of magnetic islands; kappa^2 = k^2 - 1 gives u = -ln(cosh kx + (kappa/k) cos ky)",
            params: vec![p("k", 2.0, (0.0, INF)), p("kappa", 3f64.sqrt(), (-INF, INF))],
            plane_box: [-1.0, 1.0, -1.0, 1.0],
            exclusions: "none",
            global: "yes",
            build: island_chain,
        },
        CatalogEntry {
            name: "bennet",
            gamma: "z/k",
            description: "radial pinch, u = ln(2k / (k^2 + r^2))",
            params: vec![p("k", 1.0, (0.0, INF))],
            plane_box: [-2.0, 2.0, -2.0, 2.0],
            exclusions: "none",
            global: "yes",
            build: bennet,
        },
        CatalogEntry {
            name: "radial",
            gamma: "z^a",
            description: "radial family, logarithmic singularity at the origin unless a = 1 (principal branch)",
            params: vec![p("a", 1.5, (0.0, INF))],
            plane_box: [-1.0, 1.0, -1.0, 1.0],
            exclusions: "r < 0.05",
            global: "only for a = 1",
            build: radial,
        },
        CatalogEntry {
            name: "deformed_harris",
            gamma: "exp(z / (1 - lambda*z))",
            description: "curved current sheets, image of harris under the flow of z^2 d/dz",
            params: vec![p("lambda", 0.2, (-INF, INF))],
            plane_box: [-1.0, 1.0, -1.0, 1.0],
            exclusions: "|z - 1/lambda| < 0.05",
            global: "no (essential singularity at z = 1/lambda)",
            build: deformed_harris,
        },
        CatalogEntry {
            name: "p_family",
            gamma: "(1 + p*z)^(1/p)",
            description: "circular field lines; bennet (recentered at x = -1) for p = 1, harris as p -> 0",
            params: vec![p("p", 0.5, (0.0, INF))],
            plane_box: [-1.0, 1.0, -1.0, 1.0],
            exclusions: "|z + 1/p| < 0.05",
            global: "only when 1/p is a positive integer",
            build: p_family,
        },
        CatalogEntry {
            name: "erf_bar",
            gamma: "p*erf(z)",
            description: "bar-like current distribution",
            params: vec![p("p", 1.0, (0.0, INF))],
            plane_box: [-2.0, 2.0, -2.0, 2.0],
            exclusions: "none (box kept inside |z| <= 3)",
            global: "yes",
            build: erf_bar,
        },
        CatalogEntry {
            name: "magnetotail",
            gamma: "((z + p)/(z - p))*exp(z)",
            description: "magnetotail-like configuration",
            params: vec![p("p", 1.0, (0.0, INF))],
            plane_box: [-1.5, 1.5, -1.5, 1.5],
            exclusions: "|z - p| < 0.1, |z -/+ sqrt(p^2 + 2p)| < 0.05",
            global: "yes (the pole of gamma is a regular point of u)",
            build: magnetotail,
        },
    ]
}

impl CatalogEntry {
    /// Defaults overridden by `given`; unknown or out-of-range names are errors.
    pub fn resolve(&self, given: &Params) -> Result<Params> {
        let mut out = Params::new();
        for spec in &self.params {
            out.insert(spec.name.to_string(), spec.default);
        }
        for (k, v) in given {
            let Some(spec) = self.params.iter().find(|s| s.name == k) else {
                return Err(Error::Unknown {
                    kind: "parameter",
                    name: format!("{k} (for {})", self.name),
                });
            };
            if !(spec.range.0 < *v && *v < spec.range.1) {
                return Err(Error::Invalid(format!(
                    "{}: parameter {k} = {v} outside ({}, {})",
                    self.name, spec.range.0, spec.range.1
                )));
            }
            out.insert(k.clone(), *v);
        }
        Ok(out)
    }

    pub fn generating_function(&self, given: &Params) -> Result<GeneratingFunction> {
        let params = self.resolve(given)?;
        let (gamma, domain) = (self.build)(&params);
        let pairs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        Ok(GeneratingFunction::new(self.name, gamma.simplify(), domain).with_params(&pairs))
    }

    pub fn solution(&self, given: &Params) -> Result<ClosedFormSolution> {
        let g = self.generating_function(given)?;
        Ok(solution_from_gamma(&g)?.with_provenance(format!("catalog {}", self.name)))
    }
}

/// Look up a catalog solution by name.
pub fn catalog(name: &str, given: &Params) -> Result<ClosedFormSolution> {
    catalog_entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Unknown {
            kind: "catalog solution",
            name: name.into(),
        })?
        .solution(given)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{numeric_equal, parse, EvalPoint, VarRegistry};
    use crate::liouville::{invariance_check, liouville_system, RESIDUAL_TOL};

    fn params(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn at(sol: &ClosedFormSolution, x: f64, y: f64) -> f64 {
        sol.value("u", &[("x", x), ("y", y)]).unwrap()
    }

    #[test]
    fn every_entry_solves_liouville_and_is_invariant() {
        let sys = liouville_system();
        for e in catalog_entries() {
            let sol = e.solution(&Params::new()).unwrap();
            let rep = sol.residual_report(&sys, 100, 11, RESIDUAL_TOL).unwrap();
            assert!(rep.pass, "{}: {rep:?}", e.name);
            let g = e.generating_function(&Params::new()).unwrap();
            let inv = invariance_check(&g, &sol, 100, 12, RESIDUAL_TOL).unwrap();
            assert!(inv.pass, "{}: {inv:?}", e.name);
        }
    }

    #[test]
    fn named_closed_forms() {
        let reg = VarRegistry::real(&["x", "y"]);
        let bx = SamplingBox::new().real("x", -1.0, 1.0).real("y", -1.0, 1.0);
        let island = catalog("island_chain", &Params::new()).unwrap();
        let want = parse("-ln(cosh(2*x) + (sqrt(3)/2)*cos(2*y))", &reg).unwrap();
        assert!(numeric_equal(island.field("u").unwrap(), &want, &bx, 40, 1e-12, 0).unwrap());
        let bennet = catalog("bennet", &params(&[("k", 1.0)])).unwrap();
        assert!((at(&bennet, 0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        let radial1 = catalog("radial", &params(&[("a", 1.0)])).unwrap();
        let want = parse("-ln((sqrt(x^2 + y^2)/2) * (sqrt(x^2 + y^2) + 1/sqrt(x^2 + y^2)))", &reg).unwrap();
        let ring = bx.clone().exclude(hole((0.0, 0.0), 0.05));
        assert!(numeric_equal(radial1.field("u").unwrap(), &want, &ring, 40, 1e-12, 0).unwrap());
        assert!(numeric_equal(radial1.field("u").unwrap(), bennet.field("u").unwrap(), &ring, 40, 1e-12, 0).unwrap());
        let deformed = catalog("deformed_harris", &params(&[("lambda", 0.2)])).unwrap();
        let want = parse(
            "-ln((1 - 0.4*x + 0.04*(x^2 + y^2)) * cosh((x - 0.2*(x^2 + y^2)) / (1 - 0.4*x + 0.04*(x^2 + y^2))))",
            &reg,
        )
        .unwrap();
        assert!(numeric_equal(deformed.field("u").unwrap(), &want, &bx, 40, 1e-12, 0).unwrap());
    }

    #[test]
    fn p_family_limits() {
        let harris = catalog("harris", &Params::new()).unwrap();
        let near = catalog("p_family", &params(&[("p", 1e-3)])).unwrap();
        let nearer = catalog("p_family", &params(&[("p", 1e-4)])).unwrap();
        // The gap is about p |x|: below 1e-4 near the axis x = 0, and
        // shrinking linearly in p everywhere.
        for (x, y) in [(0.05, 0.5), (-0.08, -0.3), (0.0, 0.9)] {
            assert!((at(&near, x, y) - at(&harris, x, y)).abs() < 1e-4);
        }
        for (x, y) in [(0.3, 0.2), (-0.5, 0.7), (0.9, -0.4)] {
            let d3 = (at(&near, x, y) - at(&harris, x, y)).abs();
            let d4 = (at(&nearer, x, y) - at(&harris, x, y)).abs();
            assert!(d3 < 2e-3 && (d4 / d3 - 0.1).abs() < 0.02, "{d3} {d4}");
        }
        let one = catalog("p_family", &params(&[("p", 1.0)])).unwrap();
        let bennet = catalog("bennet", &Params::new()).unwrap();
        for (x, y) in [(0.3, 0.2), (-0.5, 0.7)] {
            assert!((at(&one, x, y) - at(&bennet, x + 1.0, y)).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(catalog("nope", &Params::new()).is_err());
        assert!(catalog("bennet", &params(&[("k", -1.0)])).is_err());
        assert!(catalog("bennet", &params(&[("q", 1.0)])).is_err());
        let g = catalog_entries()[0].generating_function(&Params::new()).unwrap();
        let _ = g.gamma.eval(&EvalPoint::new().with("z", 0.0)).unwrap();
    }
}
