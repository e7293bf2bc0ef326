//! Named solutions across the three families, and their evaluation on
//! rectangular grids.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::EvalPoint;
use crate::gss;
use crate::liouville::{catalog_entries, Params};
use crate::solution::ClosedFormSolution;
use crate::vortex;

#[derive(Clone, Debug, Serialize)]
pub struct SolutionInfo {
    pub name: String,
    pub family: &'static str,
    pub fields: Vec<&'static str>,
    /// `(name, default)`.
    pub params: Vec<(String, f64)>,
    pub time_dependent: bool,
    pub description: String,
}

/// Every named solution, in a fixed order.
pub fn solution_index() -> Vec<SolutionInfo> {
    let mut out: Vec<SolutionInfo> = catalog_entries()
        .into_iter()
        .map(|e| SolutionInfo {
            name: e.name.into(),
            family: "liouville",
            fields: vec!["u"],
            params: e.params.iter().map(|p| (p.name.to_string(), p.default)).collect(),
            time_dependent: false,
            description: format!("gamma = {}; {}", e.gamma, e.description),
        })
        .collect();
    for name in vortex::ELEMENTARY_SOLUTIONS {
        let sol = vortex::partial_symmetry_solutions(name).expect("elementary solutions build");
        out.push(SolutionInfo {
            name: name.into(),
            family: "vortex",
            fields: vec!["u", "v"],
            params: sol.params.clone(),
            time_dependent: true,
            description: format!("u = {}, v = {}", sol.field("u").unwrap(), sol.field("v").unwrap()),
        });
    }
    out.push(SolutionInfo {
        name: "cylindrical_x4".into(),
        family: "gss",
        fields: vec!["u"],
        params: vec![("c1".into(), 2.0), ("x0".into(), 1.0)],
        time_dependent: false,
        description: "u = x^4 with F = c1, G = (8 - c1) u^(1/2), a = -1, p = 1".into(),
    });
    out
}

/// Look up a named solution with parameter overrides.
pub fn lookup_solution(name: &str, given: &Params) -> Result<ClosedFormSolution> {
    if let Some(e) = catalog_entries().into_iter().find(|e| e.name == name) {
        return e.solution(given);
    }
    if vortex::ELEMENTARY_SOLUTIONS.contains(&name) {
        let sol = vortex::partial_symmetry_solutions(name)?;
        let mut params = sol.params.clone();
        for (k, v) in given {
            match params.iter_mut().find(|(n, _)| n == k) {
                Some(slot) => slot.1 = *v,
                None => {
                    return Err(Error::Unknown {
                        kind: "parameter",
                        name: format!("{k} (for {name})"),
                    })
                }
            }
        }
        let pairs: Vec<(&str, f64)> = params.iter().map(|(n, v)| (n.as_str(), *v)).collect();
        return Ok(sol.with_params(&pairs));
    }
    if name == "cylindrical_x4" {
        let mut c1 = 2.0;
        let mut x0 = 1.0;
        for (k, v) in given {
            match k.as_str() {
                "c1" => c1 = *v,
                "x0" => x0 = *v,
                _ => {
                    return Err(Error::Unknown {
                        kind: "parameter",
                        name: format!("{k} (for {name})"),
                    })
                }
            }
        }
        return Ok(gss::worked_cylindrical_solution(c1, x0)?.solution);
    }
    Err(Error::Unknown {
        kind: "solution",
        name: name.into(),
    })
}

/// Parse `k=1,lambda=0.2`.
pub fn parse_params(src: &str) -> Result<Params> {
    let mut out = Params::new();
    for part in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("parameter `{part}` is not of the form name=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("parameter `{part}`: `{}` is not a number", v.trim())))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// Equally spaced samples `lo, ..., hi` of one axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| {
            if self.n == 1 {
                self.lo
            } else {
                self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
            }
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Invalid(format!("axis `{s}` is not of the form lo:hi:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() || (n > 1 && lo == hi) {
            return Err(bad());
        }
        Ok(Axis { lo, hi, n })
    }
}

/// `x0:x1:nx,y0:y1:ny`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| Error::Invalid(format!("grid `{s}` is not of the form x0:x1:nx,y0:y1:ny")))?;
        Ok(GridSpec {
            x: x.parse()?,
            y: y.parse()?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Grid {
    pub fields: Vec<String>,
    /// `(x, y, values)`; `None` marks an excluded or non-finite cell.
    pub rows: Vec<(f64, f64, Vec<Option<f64>>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSummary {
    pub solution: String,
    pub params: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub rows: usize,
    /// Cells emitted as `nan`.
    pub nan_cells: usize,
}

impl Grid {
    pub fn nan_cells(&self) -> usize {
        self.rows.iter().filter(|r| r.2.iter().any(Option::is_none)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y");
        for f in &self.fields {
            out.push(',');
            out.push_str(f);
        }
        out.push('\n');
        for (x, y, vals) in &self.rows {
            let _ = write!(out, "{x},{y}");
            for v in vals {
                match v {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push_str(",nan"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Values of every field on the grid. Cells inside an exclusion of the
/// solution's domain, or where a value is not finite, are `None`.
pub fn evaluate_grid(sol: &ClosedFormSolution, spec: &GridSpec, t: Option<f64>) -> Result<Grid> {
    let needs_t = sol.fields.iter().any(|(_, e)| e.contains_var("t"));
    if needs_t && t.is_none() {
        return Err(Error::MissingParameter(format!("t (for {})", sol.name)));
    }
    let fields: Vec<String> = sol.fields.iter().map(|(n, _)| n.clone()).collect();
    let base = sol.base_point();
    let mut rows = Vec::with_capacity(spec.x.n * spec.y.n);
    for y in spec.y.values() {
        for x in spec.x.values() {
            let mut p: EvalPoint = base.clone();
            p.set("x", x).set("y", y);
            if let Some(t) = t {
                p.set("t", t);
            }
            let excluded = sol.domain.exclusions().iter().any(|e| e.excludes(&p));
            let vals = sol
                .fields
                .iter()
                .map(|(_, e)| {
                    if excluded {
                        return None;
                    }
                    e.eval_real(&p).ok().filter(|v| v.is_finite())
                })
                .collect();
            rows.push((x, y, vals));
        }
    }
    Ok(Grid { fields, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bennet_center_is_ln2() {
        let sol = lookup_solution("bennet", &parse_params("k=1").unwrap()).unwrap();
        let g = evaluate_grid(&sol, &"-3:3:61,-3:3:61".parse().unwrap(), None).unwrap();
        let row = g.rows.iter().find(|r| r.0.abs() < 1e-12 && r.1.abs() < 1e-12).unwrap();
        assert!((row.2[0].unwrap() - 2f64.ln()).abs() < 1e-14);
        assert_eq!(g.nan_cells(), 0);
        assert!(g.to_csv().starts_with("x,y,u\n"));
    }

    #[test]
    fn excluded_cells_are_nan() {
        let sol = lookup_solution("radial", &Params::new()).unwrap();
        let g = evaluate_grid(&sol, &"-1:1:3,-1:1:3".parse().unwrap(), None).unwrap();
        let csv = g.to_csv();
        assert!(csv.contains("\n0,0,nan\n"), "{csv}");
        assert_eq!(g.nan_cells(), csv.matches("nan").count());
        assert!(g.nan_cells() >= 1);
    }

    #[test]
    fn time_dependent_needs_t() {
        let sol = lookup_solution("traveling_waves", &parse_params("k=3").unwrap()).unwrap();
        assert!(evaluate_grid(&sol, &"0:1:2,0:1:2".parse().unwrap(), None).is_err());
        let g = evaluate_grid(&sol, &"0:1:2,0:1:2".parse().unwrap(), Some(0.5)).unwrap();
        assert_eq!(g.fields, ["u", "v"]);
    }

    #[test]
    fn bad_inputs() {
        assert!(lookup_solution("nope", &Params::new()).is_err());
        assert!(lookup_solution("spiral", &parse_params("q=1").unwrap()).is_err());
        assert!(parse_params("k").is_err());
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("0:1:0,0:1:2".parse::<GridSpec>().is_err());
        assert_eq!(solution_index().len(), 12);
    }
}
