//! Lower-bounded twisted modules built from generator twist data.
//!
//! The seed fixes the g-weight of each generator; the module's Fock space
//! then has generator modes in the shifted coset, and composite vertex
//! operators come from the iterate recursion in [`VertexEngine`].

mod checks;
pub mod toy;

pub use checks::*;

use crate::automorphism::{Automorphism, JordanData};
use crate::error::{CalcError, Result};
use crate::formal_calculus::rational::frac;
use crate::formal_calculus::{Exponent, LogLaurentSeries, Scalar, Series, Var};
use crate::verdict::{mismatch, Verdict};
use crate::vosa_core::fields::{matrix_element, vertex_series};
use crate::vosa_core::{DualVector, FockKey, FockSpace, GradedVector, VOSAStructure, VertexEngine};
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Twisted mode data for the generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorTwistData {
    /// g-weight of each generator, in `[0, 1)`.
    pub alphas: Vec<Exponent>,
    /// Zero modes of a fermion act on a vacuum pair.
    pub ramond: bool,
}

pub struct TwistedModule {
    pub name: String,
    pub algebra: Arc<VOSAStructure>,
    pub g: Arc<Automorphism>,
    pub jordan: Arc<JordanData>,
    pub fock: Arc<FockSpace>,
    pub engine: Arc<VertexEngine>,
    pub seed: GeneratorTwistData,
    /// Eigenvalue of `L_W(0)` on the vacuum, produced by the extension.
    pub vacuum_weight: Scalar,
}

/// Builds the module for `g` from generator data and extends it to all of
/// the algebra by the iterate recursion.
pub fn extend_from_generators(seed: GeneratorTwistData, v: Arc<VOSAStructure>, g: Arc<Automorphism>) -> Result<TwistedModule> {
    let m = extend_unchecked(seed, v, g)?;
    m.check_grading(Rational64::from_integer(1))?;
    Ok(m)
}

/// The extension without the final grading check, so that deliberately
/// faulted models still reach the checkers.
pub fn extend_unchecked(seed: GeneratorTwistData, v: Arc<VOSAStructure>, g: Arc<Automorphism>) -> Result<TwistedModule> {
    let n = v.fock.gens.len();
    if seed.alphas.len() != n {
        return Err(CalcError::ExtensionInconsistent(format!("{} g-weights for {} generators", seed.alphas.len(), n)));
    }
    let mut shifts = Vec::new();
    for (i, a) in seed.alphas.iter().enumerate() {
        if *a < Rational64::zero() || *a >= Rational64::one() {
            return Err(CalcError::ExtensionInconsistent(format!("g-weight {a} outside [0, 1)")));
        }
        // the generator must be a g-eigenvector with eigenvalue e^{2πiα}
        let gen = v.generator(i as u8);
        let expect = gen.scaled(&Scalar::expi_dyadic(*a * Rational64::from_integer(2)));
        if g.apply(&gen) != expect {
            return Err(CalcError::ExtensionInconsistent(format!(
                "generator {} is not in the g-weight {} eigenspace",
                v.fock.gens[i].name, a
            )));
        }
        // n ∈ α + ℤ and r = n + 1 - wt, so 2r ≡ 2α + 2 - 2wt (mod 2)
        let t = *a * Rational64::from_integer(2) + Rational64::from_integer(2 - v.fock.gens[i].twice_weight() as i64);
        if !t.is_integer() {
            return Err(CalcError::ExtensionInconsistent(format!("g-weight {a} gives non-half-integral modes")));
        }
        shifts.push(t.to_integer().rem_euclid(2) as i32);
    }
    let fock = FockSpace::new(v.fock.gens.clone(), v.fock.gram.clone(), shifts, seed.ramond)
        .map_err(|e| CalcError::ExtensionInconsistent(e.to_string()))?
        .with_faults(v.fock.faults.clone());
    let fock = Arc::new(fock);
    let engine = Arc::new(VertexEngine::new(v.fock.clone(), fock.clone(), seed.alphas.clone()));
    let jordan = Arc::new(JordanData::new(g.clone()));
    let vac = GradedVector::basis(FockKey::vacuum(0));
    let vacuum_weight = match &v.omega {
        Some(om) => {
            let l0 = engine.mode_vec(om, Rational64::one(), &vac);
            let h = l0.get(&FockKey::vacuum(0));
            if l0 != vac.scaled(&h) {
                return Err(CalcError::ExtensionInconsistent("vacuum is not an L(0)-eigenvector".into()));
            }
            h
        }
        None => Scalar::zero(),
    };
    let m = TwistedModule {
        name: format!("{}-twisted", v.name),
        algebra: v,
        g,
        jordan,
        fock,
        engine,
        seed,
        vacuum_weight,
    };
    Ok(m)
}

impl TwistedModule {
    pub fn vacua(&self) -> Vec<FockKey> {
        self.fock.vacua()
    }

    pub fn basis(&self, max_level: Exponent) -> Vec<FockKey> {
        self.fock.basis_up_to(max_level)
    }

    pub fn describe(&self, k: &FockKey) -> String {
        self.fock.describe(k)
    }

    /// g-weight of an algebra basis vector.
    pub fn alpha_of(&self, u: &FockKey) -> Exponent {
        self.engine.alpha_of(u)
    }

    /// g-weight of a homogeneous algebra vector.
    pub fn alpha_of_vec(&self, u: &GradedVector) -> Result<Exponent> {
        let mut a = None;
        for k in u.comps.keys() {
            let b = self.alpha_of(k);
            if a.is_some_and(|x| x != b) {
                return Err(CalcError::Precondition("vector is not g-homogeneous; decompose it first".into()));
            }
            a = Some(b);
        }
        Ok(a.unwrap_or_else(Rational64::zero))
    }

    /// `L_W(-1) = ω_(0)`.
    pub fn l_minus_one(&self, w: &GradedVector) -> GradedVector {
        match &self.algebra.omega {
            Some(om) => self.engine.mode_vec(om, Rational64::zero(), w),
            None => GradedVector::zero(),
        }
    }

    /// `L_W(0) = ω_(1)`.
    pub fn l_zero(&self, w: &GradedVector) -> GradedVector {
        match &self.algebra.omega {
            Some(om) => self.engine.mode_vec(om, Rational64::one(), w),
            None => GradedVector::zero(),
        }
    }

    /// `(Y^g_W)_{n,0}(u) w`.
    pub fn mode(&self, u: &GradedVector, n: Exponent, w: &GradedVector) -> GradedVector {
        self.engine.mode_vec(u, n, w)
    }

    /// `L_W(0)` acts on each basis vector up to `max_level` as
    /// `h + level`.
    pub fn check_grading(&self, max_level: Exponent) -> Result<()> {
        match self.grading_verdict(max_level)? {
            Some(m) => Err(CalcError::ExtensionInconsistent(format!("L(0) is not diagonal on {}", m.monomial))),
            None => Ok(()),
        }
    }

    /// The grading check as a verdict located at the first bad basis vector.
    pub fn grading_verdict(&self, max_level: Exponent) -> Verdict {
        if self.algebra.omega.is_none() {
            return Ok(None);
        }
        for k in self.basis(max_level) {
            let b = GradedVector::basis(k.clone());
            let expect = b.scaled(&(&self.vacuum_weight + &Scalar::from_q(k.level().into())));
            let l0 = self.l_zero(&b);
            if l0 != expect {
                return Ok(mismatch("L(0)-grading", self.describe(&k), self.fock.describe_vec(&l0), self.fock.describe_vec(&expect)));
            }
        }
        Ok(None)
    }

    /// `P_W` from the g-weights of module basis vectors up to the level:
    /// the parity of a vector of the Ramond pair is its g-weight doubled.
    pub fn twisted_vertex_matrix_element(&self, dual: &DualVector, u: &GradedVector, w: &GradedVector, hw: i64) -> LogLaurentSeries {
        matrix_element(&self.engine, dual, u, w, Var::X, hw)
    }

    /// `Y^g_W(u, x) w` as a vector series.
    pub fn vertex_series(&self, u: &GradedVector, w: &GradedVector, x: Var, hw: i64) -> Series<GradedVector> {
        vertex_series(&self.engine, u, w, x, hw)
    }

    /// `(Y^g_W)_0(u, x)`: the part of log-degree zero.
    pub fn y0_part(&self, dual: &DualVector, u: &GradedVector, w: &GradedVector, hw: i64) -> LogLaurentSeries {
        self.twisted_vertex_matrix_element(dual, u, w, hw).log_constant_term(Var::X)
    }

    /// Sign `(-1)^{|a||b|}` for parity-homogeneous vectors.
    pub fn koszul(a: &GradedVector, b: &GradedVector) -> Scalar {
        if a.parity().unwrap_or(0) * b.parity().unwrap_or(0) == 1 {
            Scalar::int(-1)
        } else {
            Scalar::one()
        }
    }

    /// Nilpotency bound of `N_g` on `u`.
    pub fn nil_order(&self, u: &GradedVector) -> Result<u32> {
        Ok(self.jordan.nil_order(u)?.max(1) as u32)
    }
}

/// `frac(-α)` for a g-weight.
pub fn coset_of(alpha: Exponent) -> Exponent {
    frac(-alpha)
}
