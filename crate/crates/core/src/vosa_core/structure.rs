//! Vertex superalgebras presented by a free-field mode oracle, and their
//! axiom checks.

use super::engine::VertexEngine;
use super::fields::{matrix_element, product_matrix_element, vertex_series};
use super::fock::{DualVector, FockKey, FockSpace, GradedVector};
use crate::error::Result;
use crate::formal_calculus::expand::binomial;
use crate::formal_calculus::{mul, Exponent, LogLaurentSeries, Scalar, Series, Var, Window, Q};
use crate::verdict::{compare_series, mismatch, MismatchInfo, Verdict};
use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::sync::Arc;

/// A grading-restricted vertex superalgebra given by its Fock space.
pub struct VOSAStructure {
    pub name: String,
    pub fock: Arc<FockSpace>,
    pub engine: Arc<VertexEngine>,
    /// Conformal vector, when the Gram matrix is invertible.
    pub omega: Option<GradedVector>,
}

/// Options for `check_axioms`.
#[derive(Clone, Debug)]
pub struct AxiomConfig {
    pub weight_cutoff: Exponent,
    /// Exponent half-width for series comparisons.
    pub half_width: i64,
    /// Largest `wt u + wt v + wt w` for the weak commutativity sweep.
    pub locality_cutoff: Exponent,
    pub parallel: bool,
}

impl VOSAStructure {
    pub fn new(name: &str, fock: FockSpace, omega: Option<GradedVector>) -> VOSAStructure {
        let fock = Arc::new(fock);
        let engine = Arc::new(VertexEngine::untwisted(fock.clone()));
        VOSAStructure { name: name.to_string(), fock, engine, omega }
    }

    pub fn vacuum(&self) -> FockKey {
        FockKey::vacuum(0)
    }

    pub fn vacuum_vec(&self) -> GradedVector {
        GradedVector::basis(self.vacuum())
    }

    pub fn basis(&self, max_weight: Exponent) -> Vec<FockKey> {
        self.fock.basis_up_to(max_weight)
    }

    pub fn weight(&self, u: &FockKey) -> Exponent {
        u.level()
    }

    /// Generator state `a(-wt a)|0⟩`.
    pub fn generator(&self, g: u8) -> GradedVector {
        let t = -self.fock.gens[g as usize].twice_weight();
        self.fock.create_word(&[super::fock::Mode { twice: t, gen: g }], 0)
    }

    pub fn generator_by_name(&self, name: &str) -> Option<GradedVector> {
        self.fock.gens.iter().position(|g| g.name == name).map(|i| self.generator(i as u8))
    }

    pub fn mode(&self, u: &GradedVector, n: Exponent, w: &GradedVector) -> GradedVector {
        self.engine.mode_vec(u, n, w)
    }

    pub fn l_minus_one(&self, v: &GradedVector) -> GradedVector {
        self.fock.translation_vec(v)
    }

    /// `L(0)` from the grading.
    pub fn l_zero(&self, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (k, c) in &v.comps {
            out.add_term(k.clone(), &c.scale(&Q::from(k.level())));
        }
        out
    }

    pub fn describe(&self, k: &FockKey) -> String {
        self.fock.describe(k)
    }

    pub fn vertex_matrix_element(&self, dual: &DualVector, u: &GradedVector, w: &GradedVector, hw: i64) -> LogLaurentSeries {
        matrix_element(&self.engine, dual, u, w, Var::X, hw)
    }

    /// `M_{u,v}`: minimal `M ≥ 0` with `x^M Y(u, x) v` a power series.
    pub fn weak_commutativity_order(&self, u: &FockKey, v: &FockKey) -> i64 {
        self.engine.order(u, v)
    }

    pub fn weak_commutativity_order_vec(&self, u: &GradedVector, v: &GradedVector) -> i64 {
        let mut m = 0;
        for uk in u.comps.keys() {
            for vk in v.comps.keys() {
                m = m.max(self.weak_commutativity_order(uk, vk));
            }
        }
        m
    }

    fn parity_of(v: &GradedVector) -> u8 {
        v.parity().unwrap_or(0)
    }

    /// `(x1 - x2)^M ⟨v', Y(u,x1)Y(v,x2)w⟩ = (-1)^{|u||v|} (x1 - x2)^M ⟨v', Y(v,x2)Y(u,x1)w⟩`.
    pub fn check_weak_commutativity(&self, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
        let m = self.weak_commutativity_order_vec(u, v).max(1);
        let eps = if Self::parity_of(u) * Self::parity_of(v) == 1 { -1 } else { 1 };
        let p = binomial(Var::X1, Var::X2, -1, Rational64::from_integer(m), hw);
        let left = product_matrix_element(&self.engine, dual, &[(u.clone(), Var::X1), (v.clone(), Var::X2)], w, hw);
        let right = product_matrix_element(&self.engine, dual, &[(v.clone(), Var::X2), (u.clone(), Var::X1)], w, hw);
        let l = mul(&p, &left)?;
        let r = mul(&p, &right)?.scale(&Scalar::int(eps));
        compare_series("weak-commutativity", &l, &r, &Window::symmetric(2, hw, 0), |c| c.to_string())
    }

    /// Identity, creation, `L(-1)`-derivative and `L(0)`-grading on basis
    /// vectors up to the cutoff, plus weak commutativity on small triples.
    pub fn check_axioms(&self, cfg: &AxiomConfig) -> Result<Option<(String, MismatchInfo)>> {
        let basis = self.basis(cfg.weight_cutoff);
        let one = self.vacuum_vec();
        let hw = cfg.half_width;
        let win = Window::symmetric(1, hw, 0);
        let describe = |v: &GradedVector| self.fock.describe_vec(v);

        let per_u = |u: &FockKey| -> Result<Option<(String, MismatchInfo)>> {
            let uv = GradedVector::basis(u.clone());
            let name = self.describe(u);
            // creation: Y(u,x)1 has no negative powers and u_(-1)1 = u
            let top = crate::formal_calculus::rational::floor_i64(u.level()) - 1;
            for n in 0..=top.max(-1) {
                let r = self.mode(&uv, Rational64::from_integer(n), &one);
                if !r.is_zero() {
                    return Ok(Some((name, mismatch("creation", format!("n={}", n), describe(&r), "0").unwrap())));
                }
            }
            let r = self.mode(&uv, -Rational64::one(), &one);
            if r != uv {
                return Ok(Some((name, mismatch("creation", "n=-1", describe(&r), describe(&uv)).unwrap())));
            }
            // L(0) and L(-1) from the conformal vector
            if let Some(om) = &self.omega {
                let l0 = self.mode(om, Rational64::one(), &uv);
                if l0 != self.l_zero(&uv) {
                    return Ok(Some((name, mismatch("L(0)-grading", "ω_(1)", describe(&l0), describe(&self.l_zero(&uv))).unwrap())));
                }
                let lm1 = self.mode(om, Rational64::zero(), &uv);
                if lm1 != self.l_minus_one(&uv) {
                    return Ok(Some((name, mismatch("L(-1)=ω_(0)", "ω_(0)", describe(&lm1), describe(&self.l_minus_one(&uv))).unwrap())));
                }
            }
            // L(-1)-derivative against every w with wt u + wt w ≤ cutoff
            let lu = self.l_minus_one(&uv);
            for w in basis.iter().filter(|w| w.level() + u.level() <= cfg.weight_cutoff) {
                let wv = GradedVector::basis(w.clone());
                // identity property
                let id = self.mode(&one, -Rational64::one(), &wv);
                if id != wv {
                    return Ok(Some((name, mismatch("identity", self.describe(w), describe(&id), describe(&wv)).unwrap())));
                }
                let y = vertex_series(&self.engine, &uv, &wv, Var::X, hw);
                let dy = y.derivative(Var::X);
                let ylu = if lu.is_zero() {
                    Series::zero(vec![Var::X], win.clone())
                } else {
                    vertex_series(&self.engine, &lu, &wv, Var::X, hw)
                };
                let fock = self.fock.clone();
                let lw = self.l_minus_one(&wv);
                let comm = y.map(false, move |c| fock.translation_vec(c));
                let comm = if lw.is_zero() { comm } else { comm.sub(&vertex_series(&self.engine, &uv, &lw, Var::X, hw)) };
                if let Some(m) = compare_series("L(-1)-derivative", &dy, &ylu, &win, |c| self.fock.describe_vec(c))? {
                    return Ok(Some((format!("{} ; {}", name, self.describe(w)), m)));
                }
                if let Some(m) = compare_series("L(-1)-commutator", &dy, &comm, &win, |c| self.fock.describe_vec(c))? {
                    return Ok(Some((format!("{} ; {}", name, self.describe(w)), m)));
                }
            }
            Ok(None)
        };
        let results: Vec<Result<Option<(String, MismatchInfo)>>> = if cfg.parallel {
            basis.par_iter().map(per_u).collect()
        } else {
            basis.iter().map(per_u).collect()
        };
        for r in results {
            if let Some(x) = r? {
                return Ok(Some(x));
            }
        }
        // weak commutativity on small triples, against every dual basis vector
        // whose level is reachable within the window
        let small = self.basis(cfg.locality_cutoff);
        let mut triples = Vec::new();
        for u in &small {
            for v in &small {
                for w in &small {
                    if u.is_vacuum() || v.is_vacuum() {
                        continue;
                    }
                    if u.level() + v.level() + w.level() <= cfg.locality_cutoff {
                        triples.push((u.clone(), v.clone(), w.clone()));
                    }
                }
            }
        }
        let duals = self.basis(cfg.locality_cutoff + Rational64::from_integer(2));
        let run = |(u, v, w): &(FockKey, FockKey, FockKey)| -> Result<Option<(String, MismatchInfo)>> {
            for d in &duals {
                let r = self.check_weak_commutativity(
                    &GradedVector::basis(u.clone()),
                    &GradedVector::basis(v.clone()),
                    &GradedVector::basis(w.clone()),
                    &DualVector::basis(d.clone()),
                    hw.min(3),
                )?;
                if let Some(m) = r {
                    return Ok(Some((format!("{} ; {} ; {} ; {}'", self.describe(u), self.describe(v), self.describe(w), self.describe(d)), m)));
                }
            }
            Ok(None)
        };
        let results: Vec<_> = if cfg.parallel { triples.par_iter().map(run).collect() } else { triples.iter().map(run).collect() };
        for r in results {
            if let Some(x) = r? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

/// `½ Σ G^{-1}_{ij} a_i(-1) a_j(-1)|0⟩` or `½ Σ G^{-1}_{ij} ψ_i(-3/2) ψ_j(-1/2)|0⟩`.
pub fn conformal_vector(fock: &FockSpace) -> Option<GradedVector> {
    let n = fock.gens.len();
    let inv = invert(&fock.gram)?;
    let mut om = GradedVector::zero();
    for i in 0..n {
        for j in 0..n {
            let c = &inv[i][j] * &Q::new(1, 2);
            if c.is_zero() {
                continue;
            }
            let ops = if fock.is_fermion(i as u8) {
                [super::fock::Mode { twice: -3, gen: i as u8 }, super::fock::Mode { twice: -1, gen: j as u8 }]
            } else {
                [super::fock::Mode { twice: -2, gen: i as u8 }, super::fock::Mode { twice: -2, gen: j as u8 }]
            };
            om.add_scaled(&fock.create_word(&ops, 0), &Scalar::from_q(c));
        }
    }
    Some(om)
}

/// Exact inverse of a rational matrix.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let t = &a[c][k] * &f;
                    a[r][k] = &a[r][k] - &t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vosa_core::fock::{Generator, Statistics};

    fn single(stats: Statistics) -> VOSAStructure {
        let shift = if stats == Statistics::Fermion { 1 } else { 0 };
        let f = FockSpace::new(vec![Generator { name: "a".into(), stats }], vec![vec![Q::one()]], vec![shift], false).unwrap();
        let om = conformal_vector(&f);
        VOSAStructure::new("t", f, om)
    }

    fn vac_dual() -> DualVector {
        DualVector::basis(FockKey::vacuum(0))
    }

    #[test]
    fn fermion_two_point() {
        let v = single(Statistics::Fermion);
        let psi = v.generator(0);
        let s = v.vertex_matrix_element(&vac_dual(), &psi, &psi, 4);
        let e = s.entries().unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].0.powers[0], Rational64::from_integer(-1));
        assert!(e[0].1.is_one());
        assert_eq!(v.weak_commutativity_order_vec(&psi, &psi), 1);
    }

    #[test]
    fn boson_two_point() {
        let v = single(Statistics::Boson);
        let h = v.generator(0);
        let s = v.vertex_matrix_element(&vac_dual(), &h, &h, 4);
        let e = s.entries().unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].0.powers[0], Rational64::from_integer(-2));
        assert!(e[0].1.is_one());
        assert_eq!(v.weak_commutativity_order_vec(&h, &h), 2);
    }

    #[test]
    fn axioms_hold_small() {
        for st in [Statistics::Fermion, Statistics::Boson] {
            let v = single(st);
            let cfg = AxiomConfig {
                weight_cutoff: Rational64::from_integer(3),
                half_width: 4,
                locality_cutoff: Rational64::from_integer(2),
                parallel: true,
            };
            let r = v.check_axioms(&cfg).unwrap();
            assert!(r.is_none(), "{:?}", r);
        }
    }

    #[test]
    fn faults_are_detected() {
        use crate::vosa_core::fock::Fault;
        let cases = [
            (Statistics::Fermion, Fault::BracketSign { twice: 1 }),
            (Statistics::Fermion, Fault::TranslationSign { twice: -1 }),
            (Statistics::Boson, Fault::BracketSign { twice: 4 }),
            (Statistics::Boson, Fault::TranslationSign { twice: -2 }),
        ];
        for (st, fault) in cases {
            let shift = if st == Statistics::Fermion { 1 } else { 0 };
            let f = FockSpace::new(vec![Generator { name: "a".into(), stats: st }], vec![vec![Q::one()]], vec![shift], false).unwrap();
            let om = conformal_vector(&f);
            let v = VOSAStructure::new("t", f.with_faults(vec![fault]), om);
            let cfg = AxiomConfig {
                weight_cutoff: Rational64::from_integer(3),
                half_width: 4,
                locality_cutoff: Rational64::from_integer(2),
                parallel: true,
            };
            let r = v.check_axioms(&cfg).unwrap();
            assert!(r.is_some(), "{:?} not detected", fault);
            eprintln!("{:?}: {:?}", fault, r);
        }
    }
}
