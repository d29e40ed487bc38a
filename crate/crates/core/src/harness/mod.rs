//! Batch verification: enumerate basis tuples, run the mapped checkers in
//! parallel and collect a JSON report.

pub mod expr;

use crate::automorphism::{check_conjugation, check_derivation, JordanData};
use crate::error::{CalcError, Result};
use crate::formal_calculus::rational::floor_i64;
use crate::model_zoo::{load_model_with_faults, Model};
use crate::twist_operator::{self as tw, TwistOperatorMap};
use crate::twisted_module::{self as tm, TwistedModule};
use crate::verdict::{MismatchInfo, Verdict};
use crate::vosa_core::{AxiomConfig, DualVector, Fault, FockKey, GradedVector};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Axioms,
    Jordan,
    TwistedJacobi,
    WeakComm,
    Commutator,
    Equivariance,
    Polynomiality,
    TwistAll,
    MixedProducts,
}

pub const SUITES: [(&str, Suite); 9] = [
    ("axioms", Suite::Axioms),
    ("jordan", Suite::Jordan),
    ("twisted-jacobi", Suite::TwistedJacobi),
    ("weak-comm", Suite::WeakComm),
    ("commutator", Suite::Commutator),
    ("equivariance", Suite::Equivariance),
    ("polynomiality", Suite::Polynomiality),
    ("twist-all", Suite::TwistAll),
    ("mixed-products", Suite::MixedProducts),
];

impl std::str::FromStr for Suite {
    type Err = CalcError;
    fn from_str(s: &str) -> Result<Suite> {
        SUITES
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, x)| *x)
            .ok_or_else(|| CalcError::Model(format!("unknown suite {s:?}; known: {}", SUITES.map(|x| x.0).join(", "))))
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        SUITES.iter().find(|(_, x)| *x == self).unwrap().0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub model: String,
    pub suite: Suite,
    /// Weight cutoff for algebra inputs.
    pub max_weight: Rational64,
    /// Level cutoff for module inputs; defaults to `max_weight`.
    pub module_weight: Option<Rational64>,
    pub half_width: i64,
    pub log_bound: u32,
    pub jobs: usize,
    /// Shuffle seed for the enumeration order; `None` keeps basis order.
    pub seed_order: Option<u64>,
    /// Dual vectors range over levels up to the input levels plus this.
    pub dual_slack: Rational64,
    #[serde(default)]
    pub faults: Vec<Fault>,
    /// Stop scheduling new tuples after the first failure.
    #[serde(default)]
    pub fail_fast: bool,
}

impl SuiteConfig {
    pub fn new(model: &str, suite: Suite) -> SuiteConfig {
        SuiteConfig {
            model: model.to_string(),
            suite,
            max_weight: Rational64::from_integer(2),
            module_weight: None,
            half_width: 4,
            log_bound: 0,
            jobs: 0,
            seed_order: None,
            dual_slack: Rational64::from_integer(2),
            faults: vec![],
            fail_fast: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_weight <= Rational64::from_integer(0) || self.half_width <= 0 {
            return Err(CalcError::Model("window and cutoff must be positive".into()));
        }
        if self.module_weight.is_some_and(|m| m < Rational64::from_integer(0)) || self.dual_slack < Rational64::from_integer(0) {
            return Err(CalcError::Model("module cutoff and dual slack must be nonnegative".into()));
        }
        Ok(())
    }

    fn module_cutoff(&self) -> Rational64 {
        self.module_weight.unwrap_or(self.max_weight)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub identity: String,
    /// Basis indices of the inputs, in the order the checker takes them.
    pub inputs: Vec<usize>,
    pub input_names: Vec<String>,
    pub window: i64,
    pub status: Status,
    pub first_mismatch: Option<MismatchInfo>,
    pub error: Option<String>,
    pub timing_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    /// Tuples not run because of `fail_fast`.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub engine_version: String,
    pub config: SuiteConfig,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn first_failure(&self) -> Option<&Record> {
        self.records.iter().find(|r| r.status != Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with timings and the thread count zeroed, for reproducibility
    /// comparisons.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.config.jobs = 0;
        for rec in &mut r.records {
            rec.timing_ms = 0;
        }
        r.to_json()
    }
}

/// A unit of work: one identity on one input tuple.
struct Job {
    identity: &'static str,
    inputs: Vec<usize>,
    names: Vec<String>,
    run: Box<dyn Fn() -> Verdict + Send + Sync>,
}

struct Ctx {
    model: Model,
    cfg: SuiteConfig,
    /// Algebra basis up to the cutoff.
    vb: Vec<FockKey>,
    /// Module basis up to the module cutoff.
    wb: Vec<FockKey>,
    /// Module basis for duals, by level.
    duals: Vec<FockKey>,
}

impl Ctx {
    fn module(&self) -> Result<Arc<TwistedModule>> {
        self.model.module()
    }

    fn v(&self, i: usize) -> GradedVector {
        GradedVector::basis(self.vb[i].clone())
    }

    fn w(&self, i: usize) -> GradedVector {
        GradedVector::basis(self.wb[i].clone())
    }

    fn vname(&self, i: usize) -> String {
        self.model.algebra.describe(&self.vb[i])
    }

    fn wname(&self, i: usize) -> String {
        self.model.module.as_ref().map(|m| m.describe(&self.wb[i])).unwrap_or_default()
    }

    /// Dual basis vectors up to `level`.
    fn duals_to(&self, level: Rational64) -> Arc<Vec<DualVector>> {
        Arc::new(self.duals.iter().filter(|k| k.level() <= level).cloned().map(DualVector::basis).collect())
    }
}

/// Runs `check` against every dual and reports the first failure, tagged
/// with the dual vector.
fn over_duals(m: &Arc<TwistedModule>, duals: &[DualVector], check: impl Fn(&DualVector) -> Verdict) -> Verdict {
    for d in duals {
        if let Some(mut x) = check(d)? {
            let k = d.comps.keys().next().expect("basis dual");
            x.monomial = format!("{} against ⟨{}|", x.monomial, m.describe(k));
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn jobs_for(ctx: &Arc<Ctx>) -> Result<Vec<Job>> {
    let cfg = &ctx.cfg;
    let hw = cfg.half_width;
    let mut jobs: Vec<Job> = Vec::new();
    let nv = ctx.vb.len();
    let nw = ctx.wb.len();
    let top = |v: &GradedVector| v.max_level();
    match cfg.suite {
        Suite::Axioms => {
            let c = ctx.clone();
            jobs.push(Job {
                identity: "axioms",
                inputs: vec![],
                names: vec![ctx.model.algebra.name.clone()],
                run: Box::new(move || {
                    let ac = AxiomConfig {
                        weight_cutoff: c.cfg.max_weight,
                        half_width: c.cfg.half_width,
                        locality_cutoff: c.cfg.max_weight.min(Rational64::from_integer(2)),
                        parallel: true,
                    };
                    Ok(c.model.algebra.check_axioms(&ac)?.map(|(at, mut m)| {
                        m.monomial = format!("{} at {}", m.monomial, at);
                        m
                    }))
                }),
            });
        }
        Suite::Jordan => {
            for (i, g) in ctx.model.automorphisms.iter().enumerate() {
                let j = Arc::new(JordanData::new(g.clone()));
                let name = g.name.clone();
                let cut = cfg.max_weight;
                let (j1, j2, j3, j4) = (j.clone(), j.clone(), j.clone(), j);
                let v1 = ctx.model.algebra.clone();
                let v2 = ctx.model.algebra.clone();
                jobs.push(Job { identity: "jordan-reconstruction", inputs: vec![i], names: vec![name.clone()], run: Box::new(move || j1.check_reconstruction(cut)) });
                jobs.push(Job { identity: "jordan-idempotent", inputs: vec![i], names: vec![name.clone()], run: Box::new(move || j2.check_idempotent(cut)) });
                jobs.push(Job { identity: "derivation", inputs: vec![i], names: vec![name.clone()], run: Box::new(move || check_derivation(&v1, &j3, cut, hw)) });
                jobs.push(Job { identity: "conjugation", inputs: vec![i], names: vec![name], run: Box::new(move || check_conjugation(&v2, &j4, cut, hw)) });
            }
        }
        Suite::TwistedJacobi | Suite::WeakComm | Suite::Commutator => {
            let m = ctx.module()?;
            type Check = fn(&TwistedModule, &GradedVector, &GradedVector, &GradedVector, &DualVector, i64) -> Verdict;
            let (identity, check): (&'static str, Check) = match cfg.suite {
                Suite::TwistedJacobi => ("twisted-jacobi", tm::check_twisted_jacobi),
                Suite::WeakComm => ("twisted-weak-commutativity", tm::check_twisted_weak_commutativity),
                _ => ("commutator-formula", tm::check_commutator_formula),
            };
            for a in 0..nv {
                for b in 0..nv {
                    for c in 0..nw {
                        let (u, v, w) = (ctx.v(a), ctx.v(b), ctx.w(c));
                        let duals = ctx.duals_to(top(&u) + top(&v) + top(&w) + cfg.dual_slack);
                        let m = m.clone();
                        jobs.push(Job {
                            identity,
                            inputs: vec![a, b, c],
                            names: vec![ctx.vname(a), ctx.vname(b), ctx.wname(c)],
                            run: Box::new(move || over_duals(&m, &duals, |d| check(&m, &u, &v, &w, d, hw))),
                        });
                    }
                }
            }
        }
        Suite::Equivariance => {
            let m = ctx.module()?;
            for a in 0..nv {
                for c in 0..nw {
                    let (u, w) = (ctx.v(a), ctx.w(c));
                    let duals = ctx.duals_to(top(&u) + top(&w) + cfg.dual_slack);
                    let names = vec![ctx.vname(a), ctx.wname(c)];
                    type Check = fn(&TwistedModule, &GradedVector, &GradedVector, &DualVector, i64) -> Verdict;
                    let checks: [(&'static str, Check); 3] = [
                        ("equivariance", tm::check_equivariance),
                        ("L(-1)-derivative", tm::check_l_minus1_derivative_w),
                        ("y0-decomposition", tm::check_y0_decomposition),
                    ];
                    for (identity, check) in checks {
                        let (m, u, w, duals) = (m.clone(), u.clone(), w.clone(), duals.clone());
                        jobs.push(Job {
                            identity,
                            inputs: vec![a, c],
                            names: names.clone(),
                            run: Box::new(move || over_duals(&m, &duals, |d| check(&m, &u, &w, d, hw))),
                        });
                    }
                }
            }
        }
        Suite::Polynomiality => {
            let m = ctx.module()?;
            let fields: Vec<usize> = (0..nv).filter(|&i| !ctx.vb[i].is_vacuum()).collect();
            let mut tuples: Vec<Vec<usize>> = fields.iter().map(|&i| vec![i]).collect();
            for &i in &fields {
                for &j in &fields {
                    tuples.push(vec![i, j]);
                    for &k in &fields {
                        tuples.push(vec![i, j, k]);
                    }
                }
            }
            tuples.retain(|t| t.iter().map(|&i| ctx.vb[i].level()).sum::<Rational64>() <= cfg.max_weight);
            for t in tuples {
                for c in 0..nw {
                    let vs: Vec<GradedVector> = t.iter().map(|&i| ctx.v(i)).collect();
                    let w = ctx.w(c);
                    let lv: Rational64 = vs.iter().map(top).sum();
                    let duals = ctx.duals_to(lv + top(&w) + cfg.dual_slack);
                    let mut inputs = t.clone();
                    inputs.push(c);
                    let mut names: Vec<String> = t.iter().map(|&i| ctx.vname(i)).collect();
                    names.push(ctx.wname(c));
                    let (m1, vs1, w1, d1) = (m.clone(), vs.clone(), w.clone(), duals.clone());
                    jobs.push(Job {
                        identity: "product-polynomiality",
                        inputs: inputs.clone(),
                        names: names.clone(),
                        run: Box::new(move || over_duals(&m1, &d1, |d| tm::check_product_polynomiality(&m1, &vs1, &w1, d, hw))),
                    });
                    if vs.len() > 1 {
                        let m2 = m.clone();
                        jobs.push(Job {
                            identity: "permutation-symmetry",
                            inputs,
                            names,
                            run: Box::new(move || {
                                let k = vs.len();
                                let perms = permutations(k);
                                over_duals(&m2, &duals, |d| {
                                    for p in &perms[1..] {
                                        if let Some(x) = tm::check_permutation_symmetry(&m2, &vs, &w, d, p, hw)? {
                                            return Ok(Some(x));
                                        }
                                    }
                                    Ok(None)
                                })
                            }),
                        });
                    }
                }
            }
        }
        Suite::TwistAll | Suite::MixedProducts => {
            let m = ctx.module()?;
            let t = Arc::new(TwistOperatorMap::new(m.clone(), cfg.max_weight.max(cfg.module_cutoff()))?);
            if cfg.suite == Suite::TwistAll {
                twist_jobs(ctx, &m, &t, &mut jobs);
            } else {
                mixed_jobs(ctx, &m, &t, &mut jobs);
            }
        }
    }
    Ok(jobs)
}

fn twist_jobs(ctx: &Arc<Ctx>, m: &Arc<TwistedModule>, t: &Arc<TwistOperatorMap>, jobs: &mut Vec<Job>) {
    let cfg = &ctx.cfg;
    let hw = cfg.half_width;
    let (nv, nw) = (ctx.vb.len(), ctx.wb.len());
    for c in 0..nw {
        let (t1, w) = (t.clone(), ctx.w(c));
        jobs.push(Job { identity: "twist-vacuum", inputs: vec![c], names: vec![ctx.wname(c)], run: Box::new(move || tw::check_vacuum_identity(&t1, &w, hw)) });
    }
    for c in 0..nw {
        for b in 0..nv {
            let (w, v) = (ctx.w(c), ctx.v(b));
            let duals = ctx.duals_to(w.max_level() + v.max_level() + cfg.dual_slack);
            let names = vec![ctx.wname(c), ctx.vname(b)];
            type Check = fn(&Arc<TwistOperatorMap>, &GradedVector, &GradedVector, &DualVector, i64) -> Verdict;
            let checks: [(&'static str, Check); 3] = [
                ("twist-routes", tw::check_twist_routes),
                ("twist-decomposition", |t, w, v, d, hw| tw::check_twist_decomposition(t, w, v, d, hw)),
                ("twist-L(-1)", |t, w, v, d, hw| tw::check_l_minus1_twist(t, w, v, d, hw)),
            ];
            for (identity, check) in checks {
                let (m, t, w, v, duals) = (m.clone(), t.clone(), w.clone(), v.clone(), duals.clone());
                jobs.push(Job { identity, inputs: vec![c, b], names: names.clone(), run: Box::new(move || over_duals(&m, &duals, |d| check(&t, &w, &v, d, hw))) });
            }
        }
    }
    type Check = fn(&Arc<TwistOperatorMap>, &GradedVector, &GradedVector, &GradedVector, &DualVector, i64) -> Verdict;
    let checks: [(&'static str, Check); 4] = [
        ("weak-associativity-twist", tw::check_weak_associativity),
        ("twist-jacobi", tw::check_twist_jacobi),
        ("gen-commutator", tw::check_gen_commutator),
        ("gen-weak-commutativity", tw::check_gen_weak_commutativity),
    ];
    for a in 0..nv {
        for b in 0..nv {
            for c in 0..nw {
                let (u, v, w) = (ctx.v(a), ctx.v(b), ctx.w(c));
                let duals = ctx.duals_to(u.max_level() + v.max_level() + w.max_level() + cfg.dual_slack);
                let names = vec![ctx.vname(a), ctx.vname(b), ctx.wname(c)];
                for (identity, check) in checks {
                    let (m, t, u, v, w, duals) = (m.clone(), t.clone(), u.clone(), v.clone(), w.clone(), duals.clone());
                    jobs.push(Job {
                        identity,
                        inputs: vec![a, b, c],
                        names: names.clone(),
                        run: Box::new(move || over_duals(&m, &duals, |d| check(&t, &u, &v, &w, d, hw))),
                    });
                }
            }
        }
    }
}

/// Mixed products with `k + l ≤ 2` and their adjacent transpositions.
fn mixed_jobs(ctx: &Arc<Ctx>, m: &Arc<TwistedModule>, t: &Arc<TwistOperatorMap>, jobs: &mut Vec<Job>) {
    let cfg = &ctx.cfg;
    let hw = cfg.half_width;
    let (nv, nw) = (ctx.vb.len(), ctx.wb.len());
    let fields: Vec<usize> = (0..nv).filter(|&i| !ctx.vb[i].is_vacuum()).collect();
    let vac = (0..nv).find(|&i| ctx.vb[i].is_vacuum()).expect("vacuum in basis");
    // (left fields, right fields, v)
    let mut shapes: Vec<(Vec<usize>, Vec<usize>, usize)> = Vec::new();
    for b in 0..nv {
        shapes.push((vec![], vec![], b));
        for &i in &fields {
            shapes.push((vec![i], vec![], b));
            for &j in &fields {
                shapes.push((vec![i, j], vec![], b));
            }
        }
    }
    for &i in &fields {
        shapes.push((vec![], vec![i], vac));
        for &j in &fields {
            shapes.push((vec![i], vec![j], vac));
        }
    }
    let weight = |s: &(Vec<usize>, Vec<usize>, usize)| s.0.iter().chain(s.1.iter()).chain([s.2].iter()).map(|&i| ctx.vb[i].level()).sum::<Rational64>();
    shapes.retain(|s| weight(s) <= cfg.max_weight);
    for s in shapes {
        for c in 0..nw {
            let left: Vec<GradedVector> = s.0.iter().map(|&i| ctx.v(i)).collect();
            let right: Vec<GradedVector> = s.1.iter().map(|&i| ctx.v(i)).collect();
            let (w, v) = (ctx.w(c), ctx.v(s.2));
            let duals = ctx.duals_to(weight(&s) + w.max_level() + cfg.dual_slack);
            let mut inputs: Vec<usize> = s.0.clone();
            inputs.extend(&s.1);
            inputs.push(c);
            inputs.push(s.2);
            let mut names: Vec<String> = s.0.iter().chain(s.1.iter()).map(|&i| ctx.vname(i)).collect();
            names.push(ctx.wname(c));
            names.push(ctx.vname(s.2));
            let (m1, t1, l1, r1, w1, v1, d1) = (m.clone(), t.clone(), left.clone(), right, w.clone(), v.clone(), duals.clone());
            jobs.push(Job {
                identity: "mixed-product",
                inputs: inputs.clone(),
                names: names.clone(),
                run: Box::new(move || over_duals(&m1, &d1, |d| tw::check_mixed_product_polynomiality(&t1, &l1, &r1, &w1, &v1, d, hw))),
            });
            if s.1.is_empty() {
                for swap in 0..left.len() {
                    let (m2, t2, l2, w2, v2, d2) = (m.clone(), t.clone(), left.clone(), w.clone(), v.clone(), duals.clone());
                    jobs.push(Job {
                        identity: "mixed-permutation",
                        inputs: inputs.clone(),
                        names: names.clone(),
                        run: Box::new(move || over_duals(&m2, &d2, |d| tw::check_mixed_permutation(&t2, &l2, &w2, &v2, d, swap, hw))),
                    });
                }
            }
        }
    }
}

/// All permutations of `0..k` with the identity first.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                go(cur, k, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), k, &mut out);
    out
}

/// Loads the model, enumerates the suite's tuples and runs them.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let model = load_model_with_faults(&cfg.model, &cfg.faults)?;
    let vb = model.algebra.basis(cfg.max_weight);
    let (wb, duals) = match &model.module {
        Some(m) => {
            let cap = cfg.max_weight * Rational64::from_integer(3) + cfg.module_cutoff() + cfg.dual_slack;
            (m.basis(cfg.module_cutoff()), m.basis(Rational64::from_integer(floor_i64(cap * Rational64::from_integer(2))) / 2))
        }
        None => (vec![], vec![]),
    };
    let ctx = Arc::new(Ctx { model, cfg: cfg.clone(), vb, wb, duals });
    let mut jobs = jobs_for(&ctx)?;
    // every module suite first checks that the extension grades the module
    if !matches!(cfg.suite, Suite::Axioms | Suite::Jordan) {
        let m = ctx.module()?;
        let cut = cfg.module_cutoff();
        jobs.insert(0, Job { identity: "module-grading", inputs: vec![], names: vec![m.name.clone()], run: Box::new(move || m.grading_verdict(cut)) });
    }
    if let Some(seed) = cfg.seed_order {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        jobs.shuffle(&mut rng);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| CalcError::Model(e.to_string()))?;
    let stop = AtomicBool::new(false);
    let window = cfg.half_width;
    let fail_fast = cfg.fail_fast;
    let results: Vec<Option<Record>> = pool.install(|| {
        jobs.par_iter()
            .map(|j| {
                if fail_fast && stop.load(Ordering::Relaxed) {
                    return None;
                }
                let t0 = Instant::now();
                let r = (j.run)();
                let timing_ms = t0.elapsed().as_millis() as u64;
                let (status, first_mismatch, error) = match r {
                    Ok(None) => (Status::Pass, None, None),
                    Ok(Some(m)) => (Status::Fail, Some(m), None),
                    Err(e) => (Status::Error, None, Some(e.to_string())),
                };
                if status != Status::Pass {
                    stop.store(true, Ordering::Relaxed);
                }
                Some(Record { identity: j.identity.to_string(), inputs: j.inputs.clone(), input_names: j.names.clone(), window, status, first_mismatch, error, timing_ms })
            })
            .collect()
    });
    let mut summary = Summary::default();
    let mut records = Vec::new();
    for r in results {
        match r {
            None => summary.skipped += 1,
            Some(r) => {
                summary.total += 1;
                match r.status {
                    Status::Pass => summary.passed += 1,
                    Status::Fail => summary.failed += 1,
                    Status::Error => summary.errors += 1,
                }
                records.push(r);
            }
        }
    }
    Ok(Report { schema_version: SCHEMA_VERSION, engine_version: ENGINE_VERSION.to_string(), config: cfg.clone(), summary, records })
}

#[cfg(test)]
mod tests;
