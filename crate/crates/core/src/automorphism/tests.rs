use super::*;
use crate::vosa_core::{conformal_vector, Generator, Statistics};

fn q(n: i64, d: i64) -> Scalar {
    Scalar::rational(n, d)
}

fn fermion() -> Arc<VOSAStructure> {
    let f = FockSpace::new(vec![Generator { name: "psi".into(), stats: Statistics::Fermion }], vec![vec![Q::one()]], vec![1], false).unwrap();
    let om = conformal_vector(&f);
    Arc::new(VOSAStructure::new("fermion", f, om))
}

fn heis3() -> Arc<VOSAStructure> {
    let gens = ["a", "b", "c"].iter().map(|n| Generator { name: n.to_string(), stats: Statistics::Boson }).collect();
    let z = Q::zero;
    let o = Q::one;
    let gram = vec![vec![z(), o(), z()], vec![o(), z(), z()], vec![z(), z(), o()]];
    let f = FockSpace::new(gens, gram, vec![0, 0, 0], false).unwrap();
    let om = conformal_vector(&f);
    Arc::new(VOSAStructure::new("heis3", f, om))
}

fn unipotent(v: &VOSAStructure) -> Automorphism {
    // columns: g a = a, g b = b - c - a/2, g c = c + a
    let m = vec![vec![q(1, 1), q(-1, 2), q(1, 1)], vec![q(0, 1), q(1, 1), q(0, 1)], vec![q(0, 1), q(-1, 1), q(1, 1)]];
    Automorphism::orthogonal("unipotent", v.fock.clone(), m).unwrap()
}

#[test]
fn parity_decomposition() {
    let v = fermion();
    let g = Arc::new(Automorphism::orthogonal("parity", v.fock.clone(), vec![vec![q(-1, 1)]]).unwrap());
    assert_eq!(g.order, 2);
    let j = JordanData::new(g);
    assert_eq!(j.spectrum(Rational64::from_integer(3)).unwrap(), vec![Rational64::zero(), Rational64::new(1, 2)]);
    assert_eq!(j.max_nil_order(Rational64::from_integer(3)).unwrap(), 1);
    let psi = v.generator(0);
    let d = j.alpha_decompose(&psi).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[&Rational64::new(1, 2)], psi);
    assert!(j.check_reconstruction(Rational64::from_integer(3)).unwrap().is_none());
}

#[test]
fn identity_spectrum() {
    let v = heis3();
    let j = JordanData::new(Arc::new(Automorphism::identity(v.fock.clone())));
    assert_eq!(j.spectrum(Rational64::from_integer(2)).unwrap(), vec![Rational64::zero()]);
}

#[test]
fn unipotent_log() {
    let v = heis3();
    let j = Arc::new(JordanData::new(Arc::new(unipotent(&v))));
    let (a, b, c) = (v.generator(0), v.generator(1), v.generator(2));
    assert_eq!(j.log_nilpotent(&b).unwrap(), c.scaled(&q(-1, 1)));
    assert_eq!(j.log_nilpotent(&c).unwrap(), a);
    assert!(j.log_nilpotent(&a).unwrap().is_zero());
    assert_eq!(j.nil_order(&b).unwrap(), 3);
    assert_eq!(j.spectrum(Rational64::from_integer(2)).unwrap(), vec![Rational64::zero()]);
    assert!(j.check_reconstruction(Rational64::from_integer(2)).unwrap().is_none());
    assert!(j.check_idempotent(Rational64::from_integer(2)).unwrap().is_none());
    let mut sum = a.clone();
    sum.add_scaled(&b, &Scalar::one());
    sum.add_scaled(&c, &Scalar::one());
    let d = j.alpha_decompose(&sum).unwrap();
    assert_eq!(d.len(), 1);
}

#[test]
fn unipotent_derivation_and_conjugation_small() {
    let v = heis3();
    let j = Arc::new(JordanData::new(Arc::new(unipotent(&v))));
    let r = check_derivation(&v, &j, Rational64::from_integer(1), 3).unwrap();
    assert!(r.is_none(), "{:?}", r);
    let r = check_conjugation(&v, &j, Rational64::from_integer(1), 3).unwrap();
    assert!(r.is_none(), "{:?}", r);
    let j2 = j.clone();
    let en = move |x: &GradedVector| j2.exp_nilpotent(x);
    assert!(check_homomorphism(&v, "e^{2πiN}", &en, Rational64::from_integer(1), 3).unwrap().is_none());
}

#[test]
fn non_isometry_rejected() {
    let v = heis3();
    let m = vec![vec![q(2, 1), q(0, 1), q(0, 1)], vec![q(0, 1), q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1), q(1, 1)]];
    assert!(matches!(Automorphism::orthogonal("bad", v.fock.clone(), m), Err(CalcError::NotIsometry(_))));
}

#[test]
fn semisimple_part_is_not_a_derivation() {
    // S_g psi = psi/2 while S_g psi_(0) psi = S_g 1 = 0
    let v = fermion();
    let g = Arc::new(Automorphism::orthogonal("parity", v.fock.clone(), vec![vec![q(-1, 1)]]).unwrap());
    let j = JordanData::new(g);
    let psi = v.generator(0);
    let n = Rational64::zero();
    let lhs = j.semisimple(&v.mode(&psi, n, &psi)).unwrap();
    let sp = j.semisimple(&psi).unwrap();
    let mut rhs = v.mode(&sp, n, &psi);
    rhs.add_scaled(&v.mode(&psi, n, &sp), &Scalar::one());
    assert!(lhs.is_zero());
    assert_eq!(rhs, v.vacuum_vec());
}
