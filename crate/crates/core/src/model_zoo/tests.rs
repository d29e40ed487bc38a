use super::*;
use crate::formal_calculus::Var;
use crate::twisted_module::*;
use crate::vosa_core::{DualVector, FockKey, GradedVector};
use crate::vosa_core::fields::product_matrix_element;

fn ramond() -> Model {
    load_model("fermion").unwrap()
}

fn boson() -> Model {
    load_model("boson1").unwrap()
}

fn vac_dual(v: u8) -> DualVector {
    DualVector::basis(FockKey::vacuum(v))
}

#[test]
fn shipped_models_parse() {
    for (id, _) in SHIPPED {
        load_model(id).unwrap();
    }
}

#[test]
fn vacuum_weights_are_computed() {
    let q = Scalar::rational(1, 16);
    assert_eq!(ramond().module().unwrap().vacuum_weight, q);
    assert_eq!(boson().module().unwrap().vacuum_weight, q);
}

#[test]
fn ramond_one_point() {
    let m = ramond().module().unwrap();
    let psi = m.algebra.generator(0);
    let vac = GradedVector::basis(FockKey::vacuum(0));
    let s = m.twisted_vertex_matrix_element(&vac_dual(1), &psi, &vac, 4);
    let e = s.entries().unwrap();
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].0.powers[0], Rational64::new(-1, 2));
    assert_eq!(e[0].1, Scalar::inv_sqrt2());
}

#[test]
fn boson_one_point_vanishes() {
    let m = boson().module().unwrap();
    let h = m.algebra.generator(0);
    let vac = GradedVector::basis(FockKey::vacuum(0));
    assert!(m.twisted_vertex_matrix_element(&vac_dual(0), &h, &vac, 4).entries().unwrap().is_empty());
}

#[test]
fn generator_identities() {
    for model in [ramond(), boson()] {
        let m = model.module().unwrap();
        let g = m.algebra.generator(0);
        let vac = GradedVector::basis(FockKey::vacuum(0));
        for d in m.vacua() {
            let dual = DualVector::basis(d);
            assert_eq!(check_twisted_jacobi(&m, &g, &g, &vac, &dual, 3).unwrap(), None, "{}", m.name);
            assert_eq!(check_twisted_weak_commutativity(&m, &g, &g, &vac, &dual, 4).unwrap(), None);
            assert_eq!(check_commutator_formula(&m, &g, &g, &vac, &dual, 4).unwrap(), None);
            assert_eq!(check_equivariance(&m, &g, &vac, &dual, 4).unwrap(), None);
            assert_eq!(check_l_minus1_derivative_w(&m, &g, &vac, &dual, 4).unwrap(), None);
            assert_eq!(check_y0_decomposition(&m, &g, &vac, &dual, 4).unwrap(), None);
        }
    }
}

#[test]
fn wrong_alpha_rejected() {
    let model = ramond();
    let r = extend_from_generators(
        GeneratorTwistData { alphas: vec![Rational64::from_integer(0)], ramond: false },
        model.algebra.clone(),
        model.automorphism("parity").unwrap(),
    );
    assert!(matches!(r, Err(CalcError::ExtensionInconsistent(_))));
}

#[test]
fn products_are_polynomial() {
    let m = ramond().module().unwrap();
    let psi = m.algebra.generator(0);
    let vac = GradedVector::basis(FockKey::vacuum(0));
    let vs = vec![psi.clone(), psi.clone()];
    assert_eq!(check_product_polynomiality(&m, &vs, &vac, &vac_dual(0), 5).unwrap(), None);
    assert_eq!(check_permutation_symmetry(&m, &vs, &vac, &vac_dual(0), &[1, 0], 5).unwrap(), None);
    let _ = Var::X;
}

#[test]
fn zero_mode_fault_breaks_jacobi() {
    let model = load_model_with_faults("fermion", &[Fault::ZeroModeSign { vac: 0 }]).unwrap();
    let m = model.module().unwrap();
    let g = m.algebra.generator(0);
    let vac = GradedVector::basis(FockKey::vacuum(0));
    let r = check_twisted_jacobi(&m, &g, &g, &vac, &vac_dual(0), 3).unwrap();
    assert!(r.is_some());
}

#[test]
fn jacobi_sides_are_nonzero() {
    let m = ramond().module().unwrap();
    let g = m.algebra.generator(0);
    let vac = GradedVector::basis(FockKey::vacuum(0));
    let p = product_matrix_element(&m.engine, &vac_dual(0), &[(g.clone(), Var::X1), (g.clone(), Var::X2)], &vac, 3);
    // ψ_kψ_{-k}: k = 0, 1, 2 fit in the window, and ψ_0² = 1/2
    assert_eq!(p.entries().unwrap().len(), 3);
    let h = Rational64::new(-1, 2);
    assert_eq!(p.coeff_at(&[(Var::X1, h, 0), (Var::X2, h, 0)]), Scalar::rational(1, 2));
}
