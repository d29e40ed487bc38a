use super::*;
use crate::model_zoo::{load_model, load_model_with_faults};
use crate::vosa_core::Fault;

fn twist(id: &str) -> Arc<TwistOperatorMap> {
    let m = load_model(id).unwrap().module().unwrap();
    Arc::new(TwistOperatorMap::new(m, Rational64::from_integer(2)).unwrap())
}

fn duals(t: &TwistOperatorMap, level: i64) -> Vec<DualVector> {
    t.module.basis(Rational64::from_integer(level)).into_iter().map(DualVector::basis).collect()
}

fn vac0() -> GradedVector {
    GradedVector::basis(FockKey::vacuum(0))
}

#[test]
fn ramond_leading_term() {
    let t = twist("fermion");
    let psi = t.module.algebra.generator(0);
    let s = t.twist_matrix_element(&DualVector::basis(FockKey::vacuum(1)), &vac0(), &psi, 4).unwrap();
    let c = s.coeff_at(&[(Var::X, Rational64::new(-1, 2), 0)]);
    assert_eq!(c, &Scalar::expi_dyadic(Rational64::new(-1, 2)) * &Scalar::inv_sqrt2());
}

#[test]
fn commutativity_orders() {
    let t = twist("fermion");
    let psi = t.module.algebra.generator(0);
    assert_eq!(t.twist_commutativity_order(&t.module.algebra.vacuum_vec(), &vac0()), 0);
    assert_eq!(t.twist_commutativity_order(&psi, &vac0()), 0);
}

#[test]
fn vacuum_and_routes() {
    for id in ["fermion", "boson1"] {
        let t = twist(id);
        let g = t.module.algebra.generator(0);
        for k in t.module.basis(Rational64::new(3, 2)) {
            let w = GradedVector::basis(k);
            assert_eq!(check_vacuum_identity(&t, &w, 4).unwrap(), None, "{id}");
            for d in duals(&t, 2) {
                assert_eq!(check_twist_routes(&t, &w, &g, &d, 4).unwrap(), None, "{id}");
            }
        }
    }
}

#[test]
fn generator_twist_identities() {
    for id in ["fermion", "boson1"] {
        let t = twist(id);
        let g = t.module.algebra.generator(0);
        for k in t.module.basis(Rational64::one()) {
            let w = GradedVector::basis(k);
            for d in duals(&t, 1) {
                let hw = 3;
                assert_eq!(check_weak_associativity(&t, &g, &g, &w, &d, hw).unwrap(), None, "{id} wk-assoc");
                assert_eq!(check_twist_jacobi(&t, &g, &g, &w, &d, hw).unwrap(), None, "{id} jacobi");
                assert_eq!(check_gen_commutator(&t, &g, &g, &w, &d, hw).unwrap(), None, "{id} gen-comm");
                assert_eq!(check_gen_weak_commutativity(&t, &g, &g, &w, &d, hw).unwrap(), None, "{id} gen-weak");
                assert_eq!(check_twist_decomposition(&t, &w, &g, &d, hw).unwrap(), None, "{id} decomp");
                assert_eq!(check_l_minus1_twist(&t, &w, &g, &d, hw).unwrap(), None, "{id} L(-1)");
            }
        }
    }
}

#[test]
fn mixed_products() {
    for id in ["fermion", "boson1"] {
        let t = twist(id);
        let g = t.module.algebra.generator(0);
        let vac = t.module.algebra.vacuum_vec();
        for d in duals(&t, 1) {
            assert_eq!(
                check_mixed_product_polynomiality(&t, std::slice::from_ref(&g), &[], &vac0(), &g, &d, 3).unwrap(),
                None,
                "{id} k=1"
            );
            assert_eq!(
                check_mixed_product_polynomiality(&t, std::slice::from_ref(&g), std::slice::from_ref(&g), &vac0(), &vac, &d, 3).unwrap(),
                None,
                "{id} k=l=1"
            );
            assert_eq!(
                check_mixed_permutation(&t, std::slice::from_ref(&g), &vac0(), &g, &d, 0, 3).unwrap(),
                None,
                "{id} past twist"
            );
            assert_eq!(
                check_mixed_permutation(&t, &[g.clone(), g.clone()], &vac0(), &g, &d, 0, 3).unwrap(),
                None,
                "{id} two fields"
            );
        }
    }
}

#[test]
fn translation_fault_breaks_twist_identity() {
    let m = load_model_with_faults("fermion", &[Fault::TranslationSign { twice: -1 }])
        .unwrap()
        .module()
        .unwrap();
    let t = Arc::new(TwistOperatorMap::new(m, Rational64::from_integer(2)).unwrap());
    let psi = t.module.algebra.generator(0);
    let mut caught = false;
    for d in duals(&t, 1) {
        caught |= check_l_minus1_twist(&t, &vac0(), &psi, &d, 3).unwrap().is_some();
        caught |= check_twist_jacobi(&t, &psi, &psi, &vac0(), &d, 3).unwrap().is_some();
    }
    assert!(caught);
}

#[test]
fn products_are_not_vacuous() {
    for id in ["fermion", "boson1"] {
        let t = twist(id);
        let g = t.module.algebra.generator(0);
        let mut n1 = 0;
        let mut n2 = 0;
        let mut n3 = 0;
        for d in duals(&t, 1) {
            n1 += t
                .chain(&d, &[(g.clone(), Var::X1)], &vac0(), Var::X2, &[], &g, 3)
                .unwrap()
                .entries()
                .unwrap()
                .len();
            n2 += t
                .chain(&d, &[], &vac0(), Var::X2, &[(g.clone(), Var::X1)], &g, 3)
                .unwrap()
                .entries()
                .unwrap()
                .len();
            n3 += t.iterate(&d, &g, &vac0(), &g, (Var::X0, Var::X2), 3).unwrap().entries().unwrap().len();
        }
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "{id}: {n1} {n2} {n3}");
    }
}
