use criterion::{criterion_group, criterion_main, Criterion};
use twistcalc::harness::{expr, run_suite, Suite, SuiteConfig};
use twistcalc::model_zoo::load_model;
use twistcalc::Exponent;

fn q(n: i64, d: i64) -> Exponent {
    Exponent::new(n, d)
}

fn cfg(model: &str, suite: Suite, w: Exponent, mw: Exponent) -> SuiteConfig {
    let mut c = SuiteConfig::new(model, suite);
    c.max_weight = w;
    c.module_weight = Some(mw);
    c.half_width = 3;
    c.jobs = 1;
    c
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    let cases = [
        ("axioms/fermion", cfg("fermion", Suite::Axioms, q(3, 2), q(1, 2))),
        ("jordan/heis3", cfg("heis3-unipotent", Suite::Jordan, q(2, 1), q(1, 1))),
        ("twisted-jacobi/fermion", cfg("fermion", Suite::TwistedJacobi, q(1, 1), q(1, 2))),
        ("twist-all/boson1", cfg("boson1", Suite::TwistAll, q(1, 1), q(1, 2))),
    ];
    for (name, config) in cases {
        g.bench_function(name, |b| b.iter(|| assert!(run_suite(&config).unwrap().all_passed())));
    }
    g.finish();
}

fn expansions(c: &mut Criterion) {
    let ramond = load_model("ramond").unwrap();
    let boson = load_model("boson1").unwrap();
    let mut g = c.benchmark_group("expand");
    g.bench_function("ramond/Ytw(vac,x) psi", |b| b.iter(|| expr::evaluate(&ramond, "Ytw(vac,x) psi", 3).unwrap()));
    g.bench_function("boson1/Y(h,x) h", |b| b.iter(|| expr::evaluate(&boson, "Y(h,x) h", 3).unwrap()));
    g.finish();
}

criterion_group!(benches, suites, expansions);
criterion_main!(benches);
