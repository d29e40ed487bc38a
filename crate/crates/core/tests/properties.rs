use num_rational::Rational64;
use proptest::prelude::*;
use std::sync::Arc;
use twistcalc::automorphism::JordanData;
use twistcalc::formal_calculus::expand::{binomial, delta, log_var, minus_delta, nilpotent_binomial, nilpotent_parts};
use twistcalc::formal_calculus::series::{mul, BranchShift};
use twistcalc::harness::{run_suite, Suite, SuiteConfig};
use twistcalc::model_zoo::load_model;
use twistcalc::twist_operator::TwistOperatorMap;
use twistcalc::vosa_core::fields::matrix_element;
use twistcalc::vosa_core::{DualVector, GradedVector};
use twistcalc::{LogLaurentSeries, Scalar, Series, Var, Window, Q};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// `q · e^{πi k/8} · Π^p · 2^{-s/2}`.
fn term() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -8i64..8, -1i32..=1, 0u8..2).prop_map(|(n, d, k, p, s)| {
        let mut x = &Scalar::rational(n, d) * &Scalar::expi_dyadic(r(k, 8));
        x = &x * &Scalar::pi_pow(p);
        if s == 1 {
            x = &x * &Scalar::inv_sqrt2();
        }
        x
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec(term(), 1..4).prop_map(|ts| ts.iter().fold(Scalar::zero(), |a, t| &a + t))
}

fn exponent() -> impl Strategy<Value = Rational64> {
    (-12i64..=12, prop::sample::select(vec![1i64, 2, 4, 8])).prop_map(|(n, d)| r(n, d))
}

fn same(a: &LogLaurentSeries, b: &LogLaurentSeries, w: &Window) -> Result<(), TestCaseError> {
    match a.first_mismatch(b, w).map_err(|e| TestCaseError::fail(e.to_string()))? {
        None => Ok(()),
        Some(m) => Err(TestCaseError::fail(format!("differ at {}: {} vs {}", m.describe_monomial(), m.left, m.right))),
    }
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn scalar_ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn phases_add(p in -16i64..16, q in -16i64..16) {
        prop_assert_eq!(&Scalar::expi_dyadic(r(p, 8)) * &Scalar::expi_dyadic(r(q, 8)), Scalar::expi_dyadic(r(p + q, 8)));
        prop_assert_eq!(Scalar::expi_dyadic(r(p, 8) + Rational64::from_integer(2)), Scalar::expi_dyadic(r(p, 8)));
    }

    #[test]
    fn monomial_scalars_invert(t in term()) {
        prop_assume!(!t.is_zero());
        prop_assert!((&t * &t.inverse().unwrap()).is_one());
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn delta_identity(hw in 1i64..=4) {
        let l = delta(Var::X0, Var::X1, Var::X2, -1, Rational64::from_integer(0), hw)
            .sub(&minus_delta(Var::X0, Var::X1, Var::X2, Rational64::from_integer(0), hw).unwrap());
        let rhs = delta(Var::X1, Var::X2, Var::X0, 1, Rational64::from_integer(0), hw);
        same(&l, &rhs, &Window::symmetric(3, hw, 0))?;
    }

    #[test]
    fn binomial_inverse(a in exponent(), s in prop::sample::select(vec![-1i64, 1]), hw in 1i64..=5) {
        let p = mul(&binomial(Var::X1, Var::X2, s, a, hw), &binomial(Var::X1, Var::X2, s, -a, hw)).unwrap();
        let one = Series::constant(Scalar::one());
        same(&p, &one, &Window::symmetric(2, hw, 0))?;
    }

    #[test]
    fn branch_shift_is_a_group_action(a in exponent(), p in -3i64..=3, q in -3i64..=3, hw in 1i64..=3) {
        let s = mul(&log_var(Var::X1, hw), &binomial(Var::X1, Var::X2, 1, a, hw)).unwrap();
        let sh = |x: &LogLaurentSeries, p| x.branch_shift(BranchShift { var: Var::X1, p }).unwrap();
        let w = Window::symmetric(2, hw, 1);
        same(&sh(&sh(&s, p), q), &sh(&s, p + q), &w)?;
        same(&sh(&s, 0), &s, &w)?;
    }

    #[test]
    fn substitution_twice_is_one_branch_shift(a in exponent(), hw in 1i64..=3) {
        let s = mul(&log_var(Var::Y, hw), &binomial(Var::Y, Var::X1, 1, a, hw)).unwrap();
        let twice = s.log_substitute(Var::Y, Var::X).unwrap().log_substitute(Var::X, Var::Y).unwrap();
        let shifted = s.branch_shift(BranchShift { var: Var::Y, p: 1 }).unwrap();
        same(&twice, &shifted, &Window::symmetric(2, hw, 1))?;
    }

    /// `((1 + x2/(x1-x2))/x1)^{-α}` expanded in `t = x2/(x1-x2)` is `(x1-x2)^α`.
    #[test]
    fn triple_expansion_of_a_power(a in exponent(), hw in 1i64..=4) {
        let aq = Q::from(a);
        let mut acc = Series::zero(vec![Var::X1, Var::X2], Window::symmetric(2, hw, 0));
        for j in 0..=hw {
            let c = Scalar::from_q(Q::binomial(&-aq.clone(), j as u64));
            let tj = binomial(Var::X1, Var::X2, -1, Rational64::from_integer(-j), hw).mul_monomial(Var::X2, Rational64::from_integer(j));
            acc = acc.add(&tj.scale(&c));
        }
        let lhs = acc.mul_monomial(Var::X1, a);
        same(&lhs, &binomial(Var::X1, Var::X2, -1, a, hw), &Window::symmetric(2, hw, 0))?;
    }

    /// The same with a nilpotent exponent: `log x1 - log(1 + t)` exponentiated
    /// part by part gives the parts of `(x1-x2)^N`.
    #[test]
    fn triple_expansion_of_a_nilpotent_power(order in 1u32..=3, hw in 1i64..=3) {
        let mut log1t = Series::zero(vec![Var::X1, Var::X2], Window::symmetric(2, hw, 0));
        for n in 1..=hw {
            let tn = binomial(Var::X1, Var::X2, -1, Rational64::from_integer(-n), hw).mul_monomial(Var::X2, Rational64::from_integer(n));
            let c = Scalar::rational(if n % 2 == 1 { 1 } else { -1 }, n);
            log1t = log1t.add(&tn.scale(&c));
        }
        let log = log_var(Var::X1, hw).sub(&log1t);
        let lhs = nilpotent_parts(&log, order).unwrap();
        let rhs = nilpotent_binomial(Var::X1, Var::X2, -1, order, hw).unwrap();
        let w = Window::symmetric(2, hw, order);
        for (l, r) in lhs.iter().zip(&rhs) {
            let full = |x: &LogLaurentSeries| x.ensure_var(Var::X1).ensure_var(Var::X2);
            same(&full(l), &full(r), &w)?;
        }
    }
}

fn level_of(v: &GradedVector) -> Option<Rational64> {
    let mut ls = v.comps.keys().map(|k| k.level());
    let first = ls.next()?;
    ls.all(|l| l == first).then_some(first)
}

fn model_id() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["fermion", "boson1", "heis3-unipotent"])
}

proptest! {
    #![proptest_config(cases(48))]

    /// `⟨v', Y(u,x)w⟩` is a single monomial `x^{wt v' - wt u - wt w}`, and
    /// vanishes unless the parities add up.
    #[test]
    fn weight_and_parity_conservation(id in model_id(), i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let m = load_model(id).unwrap();
        let b = m.algebra.basis(Rational64::from_integer(2));
        let (d, u, w) = (&b[i % b.len()], &b[j % b.len()], &b[k % b.len()]);
        let s = matrix_element(&m.algebra.engine, &DualVector::basis(d.clone()), &GradedVector::basis(u.clone()), &GradedVector::basis(w.clone()), Var::X, 4);
        let e = s.entries().unwrap();
        prop_assert!(e.len() <= 1);
        if let Some((mono, _)) = e.first() {
            prop_assert_eq!(mono.powers[0], d.level() - u.level() - w.level());
            prop_assert_eq!(d.parity, (u.parity + w.parity) % 2);
        }
    }

    /// `N_g` keeps weight and commutes with `S_g`.
    #[test]
    fn nilpotent_part_is_graded_and_commutes(i in 0usize..64) {
        let m = load_model("heis3-unipotent").unwrap();
        let j = Arc::new(JordanData::new(m.automorphism("unipotent").unwrap()));
        let b = m.algebra.basis(Rational64::from_integer(2));
        let v = GradedVector::basis(b[i % b.len()].clone());
        let n = j.log_nilpotent(&v).unwrap();
        if !n.is_zero() {
            prop_assert_eq!(level_of(&n), level_of(&v));
        }
        prop_assert_eq!(j.semisimple(&n).unwrap(), j.log_nilpotent(&j.semisimple(&v).unwrap()).unwrap());
    }

    /// Modes of `u` on the module sit in `α_u + ℤ` and shift levels by the grading.
    #[test]
    fn module_modes_respect_support_and_grading(id in prop::sample::select(vec!["fermion", "boson1"]), i in 0usize..16, k in 0usize..16) {
        let m = load_model(id).unwrap().module().unwrap();
        let vb = m.algebra.basis(Rational64::from_integer(2));
        let wb = m.basis(Rational64::new(3, 2));
        let (u, w) = (GradedVector::basis(vb[i % vb.len()].clone()), GradedVector::basis(wb[k % wb.len()].clone()));
        let alpha = m.alpha_of_vec(&u).unwrap();
        for (mono, c) in m.vertex_series(&u, &w, Var::X, 3).entries().unwrap() {
            let e = mono.powers[0];
            prop_assert!((e + alpha).is_integer(), "exponent {} for α = {}", e, alpha);
            prop_assert_eq!(level_of(&c), Some(level_of(&w).unwrap() + level_of(&u).unwrap() + e));
        }
    }

    /// The twist operator's exponents follow the g-weight of its argument and
    /// its coefficients have the predicted level.
    #[test]
    fn twist_exponents_follow_the_argument(id in prop::sample::select(vec!["fermion", "boson1"]), i in 0usize..16, k in 0usize..16) {
        let m = load_model(id).unwrap().module().unwrap();
        let t = TwistOperatorMap::new(m.clone(), Rational64::from_integer(2)).unwrap();
        let vb = m.algebra.basis(Rational64::new(3, 2));
        let wb = m.basis(Rational64::new(3, 2));
        let (v, w) = (GradedVector::basis(vb[i % vb.len()].clone()), GradedVector::basis(wb[k % wb.len()].clone()));
        let alpha = m.alpha_of_vec(&v).unwrap();
        for (mono, c) in t.twist_series(&w, &v, 3).unwrap().entries().unwrap() {
            let e = mono.powers[0];
            prop_assert!((e + alpha).is_integer());
            prop_assert_eq!(level_of(&c), Some(level_of(&w).unwrap() + level_of(&v).unwrap() + e));
        }
    }
}

proptest! {
    #![proptest_config(cases(8))]

    /// Shuffling the enumeration changes the record order and nothing else.
    #[test]
    fn reports_do_not_depend_on_order(seed in any::<u64>()) {
        let mut c = SuiteConfig::new("fermion", Suite::Commutator);
        c.max_weight = Rational64::new(1, 2);
        c.half_width = 3;
        let base = run_suite(&c).unwrap();
        c.seed_order = Some(seed);
        let a = run_suite(&c).unwrap();
        let b = run_suite(&c).unwrap();
        prop_assert_eq!(a.canonical_json(), b.canonical_json());
        let key = |r: &twistcalc::harness::Report| {
            let mut v: Vec<String> = r.records.iter().map(|x| format!("{} {:?} {:?}", x.identity, x.inputs, x.status)).collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(&a), key(&base));
        prop_assert_eq!(a.summary, base.summary);
    }
}
