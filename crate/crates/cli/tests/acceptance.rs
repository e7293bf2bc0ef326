//! Acceptance gate. Prints one `PASS`/`FAIL` line per criterion.
//!
//! Criteria listed in `KNOWN_FAILING` are evaluated literally and reported,
//! but do not fail the target; every other criterion must pass.

use std::process::Command;
use std::time::Instant;

use symlab_core::lie::infinitesimal_symmetry_check;
use symlab_core::suites::{run_suite, SuiteConfig, SuiteName, SuiteReport};
use symlab_core::vortex;

/// The printed commutator table contains brackets that do not hold.
const KNOWN_FAILING: &[u32] = &[5];

const SEED: u64 = 42;

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn groups(report: &SuiteReport, names: &[&str], min: usize) -> (bool, String) {
    let checks: Vec<_> = report.checks.iter().filter(|c| names.contains(&c.group.as_str())).collect();
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| format!("[{}] {}", c.group, c.name)).collect();
    let worst = checks
        .iter()
        .filter(|c| c.expected)
        .filter_map(|c| c.max)
        .fold(0.0, f64::max);
    let pass = failed.is_empty() && checks.len() >= min;
    let mut detail = format!("{} checks, worst positive residual {worst:.2e}", checks.len());
    if checks.len() < min {
        detail += &format!(", expected at least {min}");
    }
    if !failed.is_empty() {
        detail += &format!(", failing: {}", failed.join("; "));
    }
    (pass, detail)
}

fn criterion_4() -> (bool, String) {
    let sys = vortex::vortex_system().unwrap();
    let gens = vortex::prop2_generators().unwrap();
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for g in &gens {
        let rep = infinitesimal_symmetry_check(g, &sys, 200, SEED, 1e-9).unwrap();
        worst = worst.max(rep.max);
        if !rep.pass {
            bad.push(g.label.clone());
        }
    }
    let mut least = f64::INFINITY;
    for g in vortex::negative_controls() {
        let rep = infinitesimal_symmetry_check(&g, &sys, 200, SEED, 1e-9).unwrap();
        least = least.min(rep.max);
        if rep.max <= 1e-3 {
            bad.push(format!("control {}", g.label));
        }
    }
    (
        bad.is_empty() && gens.len() == 10,
        format!(
            "{} generator fields max {worst:.2e} over 200 samples, 3 controls min {least:.2e}{}",
            gens.len(),
            if bad.is_empty() { String::new() } else { format!(", failing: {}", bad.join("; ")) }
        ),
    )
}

fn criterion_5() -> (bool, String) {
    let table = vortex::commutator_table(SEED).unwrap();
    let misprints: Vec<String> = table
        .iter()
        .filter(|b| !b.printed_holds)
        .map(|b| format!("{} = {} (deviation {:.2e}; computed {})", b.bracket, b.printed, b.printed_deviation, b.corrected))
        .collect();
    let tr = vortex::TimeFunctionTriple::parse("t^2", "sin(t)", "sin(t)").unwrap();
    let g = |s: &str| vortex::build_generator(s, &tr).unwrap();
    let jacobi = vortex::jacobi_check(&g("X1"), &g("X2"), &g("X4"), SEED).unwrap();
    let corrected = table.iter().all(|b| b.corrected_holds);
    assert!(corrected && jacobi.equal, "computed brackets must hold even where the listed ones do not");
    let mut detail = format!(
        "{} of {} listed brackets reproduced, Jacobi max {:.2e}, all corrected brackets hold: {corrected}",
        table.len() - misprints.len(),
        table.len(),
        jacobi.max_deviation
    );
    if !misprints.is_empty() {
        detail += &format!("; not reproduced: {}", misprints.join("; "));
    }
    (misprints.is_empty() && jacobi.equal, detail)
}

fn criterion_11() -> (bool, String) {
    let bin = env!("CARGO_BIN_EXE_symlab");
    let run = || {
        let started = Instant::now();
        let out = Command::new(bin)
            .args(["verify", "--suite", "all", "--seed", "42"])
            .env_remove("SYMLAB_SEED")
            .output()
            .expect("run symlab");
        (out, started.elapsed().as_secs_f64())
    };
    let ((a, ta), (b, tb)) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let ok = a.status.success() && b.status.success();
    (
        same && ok && ta.max(tb) < 60.0,
        format!("{} bytes, identical: {same}, exit codes {:?}/{:?}, {ta:.1}s and {tb:.1}s", a.stdout.len(), a.status.code(), b.status.code()),
    )
}

fn main() {
    let started = Instant::now();
    let all = run_suite(&SuiteConfig::new(SuiteName::All, SEED, 100).unwrap());
    let g = |names: &[&str], min| groups(&all, names, min);

    let mut outcomes = Vec::new();
    let mut push = |id, title, (pass, detail): (bool, String)| outcomes.push(Outcome { id, title, pass, detail });
    push(1, "Liouville residuals of the 8 catalog solutions", g(&["liouville.residual"], 8));
    push(2, "invariance field phi0 = i gamma / gamma_z vanishes on each solution", g(&["liouville.invariance_field"], 8));
    push(3, "Bennet normalization 4 pi for k in {0.5, 1, 5}; Harris divergent", g(&["liouville.normalization"], 4));
    push(4, "vortex generator families and negative controls", criterion_4());
    push(5, "commutator table as listed; Jacobi on X1, X2, X4", criterion_5());
    push(6, "flow-orbit closure (deformed Harris, X4 rotations, identity at 0)", g(&["liouville.flow_orbit", "vortex.flows"], 6));
    push(7, "X4-invariant solutions for a in {1, 2, 3}", g(&["vortex.invariant_solutions"], 7));
    push(8, "partial symmetry u d/du, elementary solutions, truncated systems", g(&["vortex.partial"], 10));
    push(
        9,
        "axisymmetric classification, controls, conditional reduction, quadrature vs RK",
        g(&["gss.classification", "gss.shifted_family", "gss.kernel", "gss.equivalence", "gss.reduction", "gss.quadrature"], 20),
    );
    push(10, "u = x^4 identity, pressure and I^2 at x0", g(&["gss.worked_solution"], 4));
    push(11, "repeated verify --suite all --seed 42 is byte-identical", criterion_11());

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let known = !o.pass && KNOWN_FAILING.contains(&o.id);
        println!("criterion {:>2}: {tag} {}: {}{}", o.id, o.title, o.detail, if known { " (known)" } else { "" });
        if !o.pass && !known {
            unexpected.push(o.id);
        }
    }
    println!("acceptance total {:.1}s", started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("criteria failed: {unexpected:?}");
        std::process::exit(1);
    }
}
