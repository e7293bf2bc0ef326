use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use symlab_core::gss::{self, quadrature_integrate};
use symlab_core::jet::JetSpace;
use symlab_core::lie::{infinitesimal_symmetry_check, prolong};
use symlab_core::liouville::{self, catalog_entries, Params};
use symlab_core::suites::{run_suite, SuiteConfig, SuiteName};
use symlab_core::{parse, vortex, EvalPoint, VarRegistry};

fn expressions(c: &mut Criterion) {
    let reg = VarRegistry::real(&["x", "y"]);
    let src = "ln(2*exp(x)*cosh(y) / (1 + exp(2*x))) + sin(x*y)^2 - tanh(x - y)/(1 + x^2)";
    c.bench_function("parse", |b| b.iter(|| parse(black_box(src), &reg).unwrap()));
    let e = parse(src, &reg).unwrap();
    c.bench_function("simplify", |b| b.iter(|| black_box(&e).simplify()));
    c.bench_function("second derivative", |b| b.iter(|| e.d("x").unwrap().d("y").unwrap().simplify()));
    let p = EvalPoint::from_reals(&[("x", 0.3), ("y", -0.7)]);
    c.bench_function("eval", |b| b.iter(|| e.eval_real(black_box(&p)).unwrap()));
}

fn symmetry(c: &mut Criterion) {
    let jet = JetSpace::new(&vortex::INDEPENDENT, &["u", "v"], 3).unwrap();
    let gens = vortex::prop2_generators().unwrap();
    c.bench_function("prolong vortex generator to order 3", |b| b.iter(|| prolong(&gens[0], 3, &jet).unwrap()));
    let sys = vortex::vortex_system().unwrap();
    c.bench_function("vortex infinitesimal check, 50 samples", |b| {
        b.iter(|| infinitesimal_symmetry_check(&gens[3], &sys, 50, 1, vortex::RESIDUAL_TOL).unwrap())
    });
}

fn liouville_checks(c: &mut Criterion) {
    let sys = liouville::liouville_system();
    let sol = catalog_entries()[7].solution(&Params::new()).unwrap();
    c.bench_function("magnetotail residual, 100 samples", |b| {
        b.iter(|| sol.residual_report(&sys, 100, 1, liouville::RESIDUAL_TOL).unwrap())
    });
    let bennet = liouville::catalog("bennet", &Params::new()).unwrap();
    c.bench_function("bennet normalization", |b| b.iter(|| liouville::normalization_integral(&bennet).unwrap()));
}

fn reduction(c: &mut Criterion) {
    let f = gss::expr("-sin(u)").unwrap();
    c.bench_function("pendulum quadrature to s = 20", |b| b.iter(|| quadrature_integrate(&f, 0.0, 1.0, 20.0).unwrap()));
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    for suite in [SuiteName::Liouville, SuiteName::Vortex, SuiteName::Gss] {
        let cfg = SuiteConfig::new(suite, 42, 100).unwrap();
        g.bench_function(format!("{suite:?}"), |b| b.iter(|| run_suite(&cfg)));
    }
    g.finish();
}

criterion_group!(benches, expressions, symmetry, liouville_checks, reduction, suites);
criterion_main!(benches);
