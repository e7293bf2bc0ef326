//! `symlab`: batch interface to the verification suites, grid export,
//! symmetry orbits and profile reduction.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use symlab_core::grid::{evaluate_grid, lookup_solution, parse_params, solution_index, GridSpec, GridSummary};
use symlab_core::gss::{quadrature_integrate, rk_gap};
use symlab_core::lie::flow_orbit_check;
use symlab_core::liouville::{self, catalog_entries, MobiusCoefficients};
use symlab_core::suites::{run_suite, SuiteConfig, SuiteName};
use symlab_core::{parse, vortex, VarKind, VarRegistry};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "symlab", version, about = "Symbolic-numeric checks of Lie symmetries of plasma equilibria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Named closed-form solutions.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Evaluate a named solution on a grid and write CSV.
    Eval {
        #[arg(long)]
        solution: String,
        /// `name=value,...`
        #[arg(long, default_value = "")]
        params: String,
        /// `x0:x1:nx,y0:y1:ny`
        #[arg(long, allow_hyphen_values = true)]
        grid: GridSpec,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and write the JSON report.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: SuiteName,
        #[arg(long, env = "SYMLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Override every sampled residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transform a named solution along a symmetry flow, check it and write CSV.
    Orbit {
        #[arg(long, value_enum)]
        equation: Equation,
        /// `phi=<quadratic in z>` (liouville) or `X4` (vortex).
        #[arg(long)]
        symmetry: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value = "-1:1:21,-1:1:21", allow_hyphen_values = true)]
        grid: GridSpec,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate `u_ss = F(u)` by quadrature and write the profile CSV.
    Reduce {
        /// `F(u)=<expression>` or a bare expression in u.
        #[arg(long)]
        ode: String,
        #[arg(long, allow_hyphen_values = true)]
        u0: f64,
        #[arg(long, allow_hyphen_values = true)]
        p0: f64,
        #[arg(long)]
        smax: f64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        points: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Equation {
    Liouville,
    Vortex,
}

fn parse_suite(s: &str) -> Result<SuiteName, String> {
    s.parse().map_err(|_| format!("unknown suite `{s}` (expected liouville, vortex, gss or all)"))
}

/// Errors caused by the request itself rather than by a check.
fn is_usage(err: &anyhow::Error) -> bool {
    use symlab_core::Error as E;
    err.chain().any(|c| {
        c.is::<symlab_core::expr::ParseError>()
            || matches!(
            c.downcast_ref::<E>(),
            Some(E::Parse(_) | E::Unknown { .. } | E::Invalid(_) | E::MissingParameter(_))
        )
    })
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn status(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn catalog_list(as_json: bool) -> anyhow::Result<ExitCode> {
    let index = solution_index();
    if as_json {
        println!("{}", serde_json::to_string_pretty(&index)?);
    } else {
        for s in index {
            let params: Vec<String> = s.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
            println!("{:<16} {:<9} [{}]  {}", s.name, s.family, params.join(","), s.description);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn eval(solution: &str, params: &str, grid: &GridSpec, t: Option<f64>, out: &Path) -> anyhow::Result<ExitCode> {
    let given = parse_params(params)?;
    let sol = lookup_solution(solution, &given)?;
    let g = evaluate_grid(&sol, grid, t)?;
    write(out, &g.to_csv())?;
    let summary = GridSummary {
        solution: solution.into(),
        params: sol.params.iter().cloned().collect(),
        t,
        rows: g.rows.len(),
        nan_cells: g.nan_cells(),
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn verify(suite: SuiteName, seed: u64, samples: u64, tol: Option<f64>, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let mut cfg = SuiteConfig::new(suite, seed, samples as usize)?;
    if let Some(tol) = tol {
        cfg = cfg.with_tolerance(tol)?;
    }
    let report = run_suite(&cfg);
    let text = report.to_json()?;
    match out {
        Some(p) => write(p, &(text + "\n"))?,
        None => println!("{text}"),
    }
    for f in report.failures() {
        eprintln!("FAIL [{}] {}{}", f.group, f.name, f.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default());
    }
    eprintln!(
        "{} suite: {}/{} checks pass",
        serde_json::to_value(suite)?.as_str().unwrap_or("?"),
        report.summary.passed,
        report.summary.total
    );
    Ok(status(report.pass))
}

#[allow(clippy::too_many_arguments)]
fn orbit(
    equation: Equation,
    symmetry: &str,
    lambda: f64,
    base: &str,
    params: &str,
    grid: &GridSpec,
    t: Option<f64>,
    seed: u64,
    samples: usize,
    out: &Path,
) -> anyhow::Result<ExitCode> {
    let given = parse_params(params)?;
    let (report, sol) = match equation {
        Equation::Liouville => {
            let src = symmetry
                .strip_prefix("phi=")
                .ok_or_else(|| symlab_core::Error::Invalid(format!("liouville symmetry `{symmetry}` is not of the form phi=...")))?;
            let phi = parse(src, &VarRegistry::new().with("z", VarKind::Complex))?;
            MobiusCoefficients::of(&phi)?;
            let entry = catalog_entries()
                .into_iter()
                .find(|e| e.name == base)
                .ok_or_else(|| symlab_core::Error::Unknown {
                    kind: "liouville solution",
                    name: base.into(),
                })?;
            let g = entry.generating_function(&given)?;
            let family = |l: f64| liouville::solution_from_gamma(&liouville::orbit_gamma(&g, &phi, l)?);
            let label = format!("{base} under phi = {src}");
            let rep = flow_orbit_check(&label, family, &liouville::liouville_system(), &[lambda], samples, seed, liouville::RESIDUAL_TOL)?;
            (rep, family(lambda)?)
        }
        Equation::Vortex => {
            if symmetry != "X4" {
                return Err(symlab_core::Error::Invalid(format!("vortex orbits support the symmetry X4, got `{symmetry}`")).into());
            }
            let b = lookup_solution(base, &given)?;
            if b.fields.len() != 2 {
                return Err(symlab_core::Error::Invalid(format!("`{base}` is not a vortex solution")).into());
            }
            let family = |l: f64| vortex::rotation_flow(&b, l);
            let rep = flow_orbit_check(&format!("{base} under X4"), family, &vortex::vortex_system()?, &[lambda], samples, seed, vortex::RESIDUAL_TOL)?;
            (rep, family(lambda)?)
        }
    };
    let g = evaluate_grid(&sol, grid, t)?;
    write(out, &g.to_csv())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "solution": sol.name,
            "lambda": lambda,
            "rows": g.rows.len(),
            "nan_cells": g.nan_cells(),
            "residual": report,
        }))?
    );
    Ok(status(report.pass))
}

fn reduce(ode: &str, u0: f64, p0: f64, smax: f64, points: usize, out: &Path) -> anyhow::Result<ExitCode> {
    let src = ode.split_once('=').map_or(ode, |(lhs, rhs)| if lhs.trim() == "F(u)" { rhs } else { ode });
    let f = parse(src, &VarRegistry::real(&["u"]))?;
    let profile = quadrature_integrate(&f, u0, p0, smax)?;
    let rows = profile.table(points)?;
    let mut csv = String::from("s,phi,dphi\n");
    for [s, v, dv] in &rows {
        csv.push_str(&format!("{s},{v},{dv}\n"));
    }
    write(out, &csv)?;
    let gap = rk_gap(&profile, points)?;
    let pass = gap <= 1e-7;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "F": f.to_string(),
            "u0": u0,
            "p0": p0,
            "s_max": smax,
            "rows": rows.len(),
            "turning_points": profile.turning_points,
            "rk_gap": gap,
            "rk_tol": 1e-7,
            "pass": pass,
        }))?
    );
    Ok(status(pass))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Catalog {
            action: CatalogAction::List { json },
        } => catalog_list(json),
        Command::Eval {
            solution,
            params,
            grid,
            t,
            out,
        } => eval(&solution, &params, &grid, t, &out),
        Command::Verify {
            suite,
            seed,
            samples,
            tol,
            out,
        } => verify(suite, seed, samples, tol, out.as_deref()),
        Command::Orbit {
            equation,
            symmetry,
            lambda,
            base,
            params,
            grid,
            t,
            seed,
            samples,
            out,
        } => orbit(equation, &symmetry, lambda, &base, &params, &grid, t, seed, samples as usize, &out),
        Command::Reduce {
            ode,
            u0,
            p0,
            smax,
            points,
            out,
        } => {
            if !(smax > 0.0) {
                return Err(anyhow!(symlab_core::Error::Invalid(format!("--smax must be positive, got {smax}"))));
            }
            reduce(&ode, u0, p0, smax, points as usize, &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_usage(&err) { EXIT_USAGE } else { EXIT_FAILED })
        }
    }
}
