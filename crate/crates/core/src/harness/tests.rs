use super::*;

fn small(model: &str, suite: Suite) -> SuiteConfig {
    let mut c = SuiteConfig::new(model, suite);
    c.max_weight = Rational64::new(1, 2);
    c.half_width = 3;
    c.jobs = 2;
    c
}

#[test]
fn unknown_suite_is_rejected() {
    assert!("no-such-suite".parse::<Suite>().is_err());
    for (n, s) in SUITES {
        assert_eq!(n.parse::<Suite>().unwrap(), s);
        assert_eq!(s.name(), n);
    }
}

#[test]
fn bad_config_is_rejected() {
    let mut c = small("fermion", Suite::Axioms);
    c.half_width = 0;
    assert!(run_suite(&c).is_err());
}

#[test]
fn small_suites_pass() {
    for suite in [Suite::Axioms, Suite::Jordan, Suite::TwistedJacobi, Suite::TwistAll] {
        let r = run_suite(&small("fermion", suite)).unwrap();
        assert!(r.summary.total > 0, "{suite:?}");
        assert!(r.all_passed(), "{suite:?}: {:?}", r.first_failure());
        assert_eq!(r.exit_code(), 0);
    }
}

#[test]
fn reports_are_deterministic() {
    let mut c = small("fermion", Suite::TwistedJacobi);
    c.seed_order = Some(7);
    let a = run_suite(&c).unwrap();
    c.jobs = 1;
    let b = run_suite(&c).unwrap();
    assert_eq!(a.canonical_json(), b.canonical_json());
}

#[test]
fn fault_gives_failed_report() {
    let mut c = small("fermion", Suite::TwistedJacobi);
    c.faults = vec![Fault::BracketSign { twice: 1 }];
    let r = run_suite(&c).unwrap();
    assert!(!r.all_passed());
    assert_eq!(r.exit_code(), 1);
    let f = r.first_failure().unwrap();
    assert!(f.first_mismatch.is_some() || f.error.is_some());
}

#[test]
fn module_faults_reach_the_identity_checks() {
    // odd modes live only in the module, so the algebra axioms cannot see these
    for f in [Fault::BracketSign { twice: 1 }, Fault::BracketSign { twice: 3 }] {
        let mut c = SuiteConfig::new("boson1", Suite::TwistedJacobi);
        c.max_weight = Rational64::from_integer(1);
        c.faults = vec![f];
        let r = run_suite(&c).unwrap();
        assert_eq!(r.records[0].identity, "module-grading");
        assert!(r.records[1..].iter().any(|x| x.status == Status::Fail), "{f:?}");
    }
}
