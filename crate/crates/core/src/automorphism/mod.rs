//! Automorphisms of free-field algebras and their Jordan decomposition
//! `g = e^{2πi(S_g + N_g)}`.
//!
//! Every operator here preserves weight, so it is stored column by column on
//! PBW basis vectors and computed lazily. The semisimple part is found from
//! `g^L`, where `L` is the order of the generator spectrum: `g^L` is
//! unipotent, so `g_u = exp(log(g^L)/L)` and `g_s = g·g_u^{-1}`. The
//! nilpotent part then follows the log series of `e^{-2πiS_g}g - 1`.

pub mod linalg;

use crate::error::{CalcError, Result};
use crate::formal_calculus::expand::{build_cached, nilpotent_power};
use crate::formal_calculus::rational::frac;
use crate::formal_calculus::{mul, Exponent, Scalar, Series, Var, VarSupport, Window, Q};
use crate::verdict::{compare_series, mismatch, MismatchInfo, Verdict};
use crate::vosa_core::fields::vertex_series;
use crate::vosa_core::{FockKey, FockSpace, GradedVector, VOSAStructure};
use dashmap::DashMap;
use linalg::Mat;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Longest nilpotent series tolerated before giving up.
const NIL_LIMIT: usize = 64;

type Action = Arc<dyn Fn(&FockKey) -> GradedVector + Send + Sync>;

/// A weight- and parity-preserving automorphism of a free-field algebra,
/// given by its action on PBW basis vectors.
#[derive(Clone)]
pub struct Automorphism {
    pub name: String,
    pub fock: Arc<FockSpace>,
    action: Action,
    /// Action on the generator space when the map is induced from one;
    /// column `j` is the image of generator `j`.
    pub matrix: Option<Mat>,
    /// Order of the group generated by the generator g-weights.
    pub order: i64,
}

impl std::fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Automorphism({})", self.name)
    }
}

/// Generator-space eigenvalues tried: `e^{2πi k/16}`.
const SPECTRUM_LEVEL: i64 = 16;

fn root(alpha: Exponent) -> Scalar {
    Scalar::expi_dyadic(alpha * Rational64::from_integer(2))
}

/// g-weights of a generator matrix, with generalized multiplicities.
pub fn generator_spectrum(m: &Mat) -> Result<Vec<(Exponent, usize)>> {
    let d = m.len();
    let mut out = Vec::new();
    let mut total = 0;
    for k in 0..SPECTRUM_LEVEL {
        let a = Rational64::new(k, SPECTRUM_LEVEL);
        let shifted = linalg::sub(m, &linalg::scale(&linalg::identity(d), &root(a)));
        let mut p = linalg::identity(d);
        for _ in 0..d {
            p = linalg::mul(&p, &shifted);
        }
        let dim = linalg::kernel(&p)?.len();
        if dim > 0 {
            out.push((a, dim));
            total += dim;
        }
    }
    if total != d {
        return Err(CalcError::NonCyclotomicSpectrum(format!(
            "generator matrix has {} of {} eigenvalues among the {}-th roots of unity",
            total, d, SPECTRUM_LEVEL
        )));
    }
    Ok(out)
}

impl Automorphism {
    /// The map induced by a linear map on generators. Checks that it preserves
    /// statistics and the Gram form and is invertible.
    pub fn orthogonal(name: &str, fock: Arc<FockSpace>, m: Mat) -> Result<Automorphism> {
        let n = fock.gens.len();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(CalcError::Model(format!("automorphism matrix must be {n}×{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if !m[i][j].is_zero() && fock.gens[i].stats != fock.gens[j].stats {
                    return Err(CalcError::NotIsometry(format!("entry ({i},{j}) mixes bosons and fermions")));
                }
            }
        }
        let g = linalg::from_q(&fock.gram);
        let pulled = linalg::mul(&linalg::mul(&linalg::transpose(&m), &g), &m);
        if pulled != g {
            return Err(CalcError::NotIsometry(format!("{name}: Mᵀ G M ≠ G")));
        }
        linalg::inverse(&m).map_err(|_| CalcError::NotIsometry(format!("{name}: matrix is singular")))?;
        let spec = generator_spectrum(&m)?;
        let order = spec.iter().fold(1i64, |acc, (a, _)| acc.lcm(a.denom()));
        let f = fock.clone();
        let mm = m.clone();
        let action: Action = Arc::new(move |key: &FockKey| {
            let mut v = GradedVector::basis(FockKey::vacuum(key.vac));
            for md in key.modes.iter().rev() {
                let mut next = GradedVector::zero();
                for (i, row) in mm.iter().enumerate() {
                    let c = &row[md.gen as usize];
                    if !c.is_zero() {
                        next.add_scaled(&f.apply_mode_vec(i as u8, md.twice, &v), c);
                    }
                }
                v = next;
            }
            v
        });
        Ok(Automorphism { name: name.to_string(), fock, action, matrix: Some(m), order })
    }

    pub fn identity(fock: Arc<FockSpace>) -> Automorphism {
        let n = fock.gens.len();
        Automorphism::orthogonal("identity", fock, linalg::identity(n)).expect("identity is an isometry")
    }

    /// An automorphism given directly by its action on basis vectors.
    pub fn from_action(
        name: &str,
        fock: Arc<FockSpace>,
        order: i64,
        f: impl Fn(&FockKey) -> GradedVector + Send + Sync + 'static,
    ) -> Automorphism {
        Automorphism { name: name.to_string(), fock, action: Arc::new(f), matrix: None, order }
    }

    pub fn apply_key(&self, k: &FockKey) -> GradedVector {
        (self.action)(k)
    }

    pub fn apply(&self, v: &GradedVector) -> GradedVector {
        linear(v, |k| self.apply_key(k))
    }
}

fn linear(v: &GradedVector, f: impl Fn(&FockKey) -> GradedVector) -> GradedVector {
    let mut out = GradedVector::zero();
    for (k, c) in &v.comps {
        out.add_scaled(&f(k), c);
    }
    out
}

/// `Σ_{j≥1} (-1)^{j+1} A^j v / j`, requiring `A` nilpotent on `v`.
fn log_series(v: &GradedVector, a: impl Fn(&GradedVector) -> GradedVector) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    let mut p = a(v);
    let mut j = 1i64;
    while !p.is_zero() {
        if j as usize > NIL_LIMIT {
            return Err(CalcError::NotNilpotent(NIL_LIMIT));
        }
        out.add_scaled(&p, &Scalar::rational(if j % 2 == 1 { 1 } else { -1 }, j));
        p = a(&p);
        j += 1;
    }
    Ok(out)
}

/// `Σ_k c^k A^k v / k!`, requiring `A` nilpotent on `v`.
fn exp_series(v: &GradedVector, c: &Scalar, mut a: impl FnMut(&GradedVector) -> GradedVector) -> Result<GradedVector> {
    let mut out = v.clone();
    let mut p = v.clone();
    for k in 1.. {
        p = a(&p).scaled(c);
        if p.is_zero() {
            break;
        }
        if k > NIL_LIMIT {
            return Err(CalcError::NotNilpotent(NIL_LIMIT));
        }
        out.add_scaled(&p, &Scalar::from_q(Q::inv_factorial(k as u64)));
    }
    Ok(out)
}

#[derive(Clone)]
struct Columns {
    /// `(α, π_α b)` for the nonzero projections.
    proj: Vec<(Exponent, GradedVector)>,
    /// `2πi N_g b`.
    lambda: GradedVector,
}

/// Jordan data of an automorphism, computed lazily per basis vector.
pub struct JordanData {
    pub g: Arc<Automorphism>,
    /// Candidate g-weights `k/L`.
    pub candidates: Vec<Exponent>,
    gu_log: DashMap<FockKey, GradedVector>,
    cols: DashMap<FockKey, Columns>,
    errors: DashMap<FockKey, CalcError>,
}

/// Per-weight summary for reports.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BlockReport {
    pub weight: String,
    pub dim: usize,
    pub alphas: Vec<String>,
    pub nilpotency_index: usize,
    /// Nonzero columns of `2πi N_g`: `(basis vector, image)`.
    pub log_columns: Vec<(String, String)>,
}

/// `(2πi)^{-1} = ½ Π^{-1} e^{-πi/2}`.
pub fn inv_two_pi_i() -> Scalar {
    &Scalar::pi_pow(-1) * &Scalar::expi_dyadic(Rational64::new(-1, 2)).scale(&Q::new(1, 2))
}

impl JordanData {
    pub fn new(g: Arc<Automorphism>) -> JordanData {
        let candidates = (0..g.order).map(|k| Rational64::new(k, g.order)).collect();
        JordanData { g, candidates, gu_log: DashMap::new(), cols: DashMap::new(), errors: DashMap::new() }
    }

    fn g_pow_l(&self, v: &GradedVector) -> GradedVector {
        let mut p = v.clone();
        for _ in 0..self.g.order {
            p = self.g.apply(&p);
        }
        p
    }

    /// `log(g^L) b`.
    fn log_gl_key(&self, k: &FockKey) -> Result<GradedVector> {
        if let Some(x) = self.gu_log.get(k) {
            return Ok(x.clone());
        }
        let b = GradedVector::basis(k.clone());
        let r = log_series(&b, |v| {
            let mut w = self.g_pow_l(v);
            w.add_scaled(v, &Scalar::int(-1));
            w
        })
        .map_err(|_| CalcError::NonCyclotomicSpectrum(format!("g^{} - 1 is not nilpotent on {}", self.g.order, k)))?;
        self.gu_log.insert(k.clone(), r.clone());
        Ok(r)
    }

    fn log_gl(&self, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (k, c) in &v.comps {
            out.add_scaled(&self.log_gl_key(k)?, c);
        }
        Ok(out)
    }

    /// `g_s v = g · exp(-log(g^L)/L) v`.
    fn g_semisimple(&self, v: &GradedVector) -> Result<GradedVector> {
        let c = Scalar::rational(-1, self.g.order);
        let mut err = None;
        let r = exp_series(v, &c, |w| match self.log_gl(w) {
            Ok(x) => x,
            Err(e) => {
                err = Some(e);
                GradedVector::zero()
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(self.g.apply(&r))
    }

    fn columns(&self, k: &FockKey) -> Result<Columns> {
        if let Some(x) = self.cols.get(k) {
            return Ok(x.clone());
        }
        if let Some(e) = self.errors.get(k) {
            return Err(e.clone());
        }
        let r = self.compute_columns(k);
        match &r {
            Ok(c) => {
                self.cols.insert(k.clone(), c.clone());
            }
            Err(e) => {
                self.errors.insert(k.clone(), e.clone());
            }
        }
        r
    }

    fn compute_columns(&self, k: &FockKey) -> Result<Columns> {
        let b = GradedVector::basis(k.clone());
        let proj = self.columns_proj(k)?;
        // u = e^{-2πiS} g - 1, applied via projections of g·w
        let u = |w: &GradedVector| -> Result<GradedVector> {
            let gw = self.g.apply(w);
            let mut out = GradedVector::zero();
            for (a, p) in self.alpha_decompose_raw(&gw)? {
                out.add_scaled(&p, &root(-a));
            }
            out.add_scaled(w, &Scalar::int(-1));
            Ok(out)
        };
        let mut lambda = GradedVector::zero();
        let mut p = u(&b)?;
        let mut j = 1i64;
        while !p.is_zero() {
            if j as usize > NIL_LIMIT {
                return Err(CalcError::NotNilpotent(NIL_LIMIT));
            }
            lambda.add_scaled(&p, &Scalar::rational(if j % 2 == 1 { 1 } else { -1 }, j));
            p = u(&p)?;
            j += 1;
        }
        Ok(Columns { proj, lambda })
    }

    fn alpha_decompose_raw(&self, v: &GradedVector) -> Result<BTreeMap<Exponent, GradedVector>> {
        let mut out: BTreeMap<Exponent, GradedVector> = BTreeMap::new();
        for (k, c) in &v.comps {
            for (a, p) in self.columns_proj(k)? {
                out.entry(a).or_default().add_scaled(&p, c);
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    fn columns_proj(&self, k: &FockKey) -> Result<Vec<(Exponent, GradedVector)>> {
        // projections only need powers of g_s, never the log columns
        if let Some(x) = self.cols.get(k) {
            return Ok(x.proj.clone());
        }
        let b = GradedVector::basis(k.clone());
        let l = self.g.order;
        let mut pows = vec![b.clone()];
        for _ in 1..l {
            let next = self.g_semisimple(pows.last().unwrap())?;
            pows.push(next);
        }
        if self.g_semisimple(pows.last().unwrap())? != b {
            return Err(CalcError::NonCyclotomicSpectrum(format!("semisimple part has order > {} on {}", l, k)));
        }
        let mut proj = Vec::new();
        for &a in &self.candidates {
            let mut p = GradedVector::zero();
            for (j, w) in pows.iter().enumerate() {
                p.add_scaled(w, &root(-a * Rational64::from_integer(j as i64)));
            }
            let p = p.scaled(&Scalar::rational(1, l));
            if !p.is_zero() {
                proj.push((a, p));
            }
        }
        Ok(proj)
    }

    /// `v = Σ_α v_α` with `v_α` in the generalized eigenspace `V^{[α]}`.
    pub fn alpha_decompose(&self, v: &GradedVector) -> Result<BTreeMap<Exponent, GradedVector>> {
        self.alpha_decompose_raw(v)
    }

    /// `2πi N_g v`.
    pub fn log_nilpotent(&self, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (k, c) in &v.comps {
            out.add_scaled(&self.columns(k)?.lambda, c);
        }
        Ok(out)
    }

    /// `N_g v`.
    pub fn nilpotent(&self, v: &GradedVector) -> Result<GradedVector> {
        Ok(self.log_nilpotent(v)?.scaled(&inv_two_pi_i()))
    }

    /// `S_g v = Σ_α α v_α`.
    pub fn semisimple(&self, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (a, p) in self.alpha_decompose(v)? {
            out.add_scaled(&p, &Scalar::from_q(Q::from(a)));
        }
        Ok(out)
    }

    /// `e^{2πi S_g} v`.
    pub fn exp_semisimple(&self, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (a, p) in self.alpha_decompose(v)? {
            out.add_scaled(&p, &root(a));
        }
        Ok(out)
    }

    /// `e^{2πi N_g} v`.
    pub fn exp_nilpotent(&self, v: &GradedVector) -> Result<GradedVector> {
        let mut out = v.clone();
        let mut p = v.clone();
        for k in 1..=NIL_LIMIT {
            p = self.log_nilpotent(&p)?;
            if p.is_zero() {
                return Ok(out);
            }
            out.add_scaled(&p, &Scalar::from_q(Q::inv_factorial(k as u64)));
        }
        Err(CalcError::NotNilpotent(NIL_LIMIT))
    }

    /// Smallest `k` with `N_g^k v = 0`.
    pub fn nil_order(&self, v: &GradedVector) -> Result<usize> {
        let mut p = v.clone();
        for k in 0..=NIL_LIMIT {
            if p.is_zero() {
                return Ok(k);
            }
            p = self.log_nilpotent(&p)?;
        }
        Err(CalcError::NotNilpotent(NIL_LIMIT))
    }

    /// `P_V` restricted to weights up to the cutoff.
    pub fn spectrum(&self, cutoff: Exponent) -> Result<Vec<Exponent>> {
        let mut s = std::collections::BTreeSet::new();
        for k in self.g.fock.basis_up_to(cutoff) {
            for a in self.alpha_decompose(&GradedVector::basis(k))?.keys() {
                s.insert(*a);
            }
        }
        Ok(s.into_iter().collect())
    }

    /// Largest nilpotency index over weights up to the cutoff.
    pub fn max_nil_order(&self, cutoff: Exponent) -> Result<usize> {
        let mut m = 0;
        for k in self.g.fock.basis_up_to(cutoff) {
            m = m.max(self.nil_order(&GradedVector::basis(k))?);
        }
        Ok(m)
    }

    /// Checks on every basis vector up to the cutoff that
    /// `e^{2πiS}e^{2πiN} = g` and `S N = N S`.
    pub fn check_reconstruction(&self, cutoff: Exponent) -> Result<Option<MismatchInfo>> {
        for k in self.g.fock.basis_up_to(cutoff) {
            let b = GradedVector::basis(k.clone());
            let lhs = self.exp_semisimple(&self.exp_nilpotent(&b)?)?;
            let rhs = self.g.apply(&b);
            if lhs != rhs {
                return Ok(mismatch("e^{2πi(S+N)} = g", self.g.fock.describe(&k), self.g.fock.describe_vec(&lhs), self.g.fock.describe_vec(&rhs)));
            }
            let sn = self.semisimple(&self.log_nilpotent(&b)?)?;
            let ns = self.log_nilpotent(&self.semisimple(&b)?)?;
            if sn != ns {
                return Ok(mismatch("S N = N S", self.g.fock.describe(&k), self.g.fock.describe_vec(&sn), self.g.fock.describe_vec(&ns)));
            }
        }
        Ok(None)
    }

    /// The automorphism `e^{2πi(S+N)}` rebuilt from this decomposition.
    pub fn recomposed(self: &Arc<Self>) -> Automorphism {
        let me = self.clone();
        Automorphism::from_action(&format!("{}-recomposed", self.g.name), self.g.fock.clone(), self.g.order, move |k| {
            let b = GradedVector::basis(k.clone());
            me.exp_nilpotent(&b).and_then(|x| me.exp_semisimple(&x)).expect("decomposition already validated")
        })
    }

    /// Decomposing `e^{2πi(S+N)}` gives back `S` and `N` on every basis
    /// vector up to the cutoff.
    pub fn check_idempotent(self: &Arc<Self>, cutoff: Exponent) -> Result<Option<MismatchInfo>> {
        let again = JordanData::new(Arc::new(self.recomposed()));
        for k in self.g.fock.basis_up_to(cutoff) {
            let b = GradedVector::basis(k.clone());
            let (s1, s2) = (self.semisimple(&b)?, again.semisimple(&b)?);
            if s1 != s2 {
                return Ok(mismatch("idempotent S", self.g.fock.describe(&k), self.g.fock.describe_vec(&s1), self.g.fock.describe_vec(&s2)));
            }
            let (n1, n2) = (self.log_nilpotent(&b)?, again.log_nilpotent(&b)?);
            if n1 != n2 {
                return Ok(mismatch("idempotent N", self.g.fock.describe(&k), self.g.fock.describe_vec(&n1), self.g.fock.describe_vec(&n2)));
            }
        }
        Ok(None)
    }

    pub fn blocks(&self, cutoff: Exponent) -> Result<Vec<BlockReport>> {
        let mut by: BTreeMap<i32, Vec<FockKey>> = BTreeMap::new();
        for k in self.g.fock.basis_up_to(cutoff) {
            by.entry(k.level2).or_default().push(k);
        }
        let mut out = Vec::new();
        for (l2, keys) in by {
            let mut alphas = std::collections::BTreeSet::new();
            let mut nil = 0;
            let mut cols = Vec::new();
            for k in &keys {
                let b = GradedVector::basis(k.clone());
                alphas.extend(self.alpha_decompose(&b)?.into_keys());
                nil = nil.max(self.nil_order(&b)?);
                let l = self.log_nilpotent(&b)?;
                if !l.is_zero() {
                    cols.push((self.g.fock.describe(k), self.g.fock.describe_vec(&l)));
                }
            }
            out.push(BlockReport {
                weight: Rational64::new(l2 as i64, 2).to_string(),
                dim: keys.len(),
                alphas: alphas.iter().map(|a| a.to_string()).collect(),
                nilpotency_index: nil,
                log_columns: cols,
            });
        }
        Ok(out)
    }
}

/// Pairs `(u, v)` of basis vectors with `wt u, wt v ≤ cutoff`.
fn basis_pairs(v: &VOSAStructure, cutoff: Exponent) -> Vec<(FockKey, FockKey)> {
    let b = v.basis(cutoff);
    let mut out = Vec::new();
    for u in &b {
        for w in &b {
            out.push((u.clone(), w.clone()));
        }
    }
    out
}

/// Modes `n` with `-n-1` in `[-hw, hw]` and `u_n w` possibly nonzero.
fn window_modes(u: &FockKey, w: &FockKey, hw: i64) -> Vec<Exponent> {
    let top = crate::formal_calculus::rational::floor_i64(u.level() + w.level() - Rational64::one());
    (-hw - 1..=top.min(hw - 1)).map(Rational64::from_integer).collect()
}

/// `op(u_n v) = (op u)_n (op v)` for all basis pairs up to the cutoff and all
/// modes whose exponent lies in the window.
pub fn check_homomorphism(
    v: &VOSAStructure,
    name: &str,
    op: &(dyn Fn(&GradedVector) -> Result<GradedVector> + Sync),
    cutoff: Exponent,
    hw: i64,
) -> Verdict {
    let pairs = basis_pairs(v, cutoff);
    let res: Vec<Verdict> = pairs
        .par_iter()
        .map(|(u, w)| {
            let (uv, wv) = (GradedVector::basis(u.clone()), GradedVector::basis(w.clone()));
            let (gu, gw) = (op(&uv)?, op(&wv)?);
            for n in window_modes(u, w, hw) {
                let lhs = op(&v.mode(&uv, n, &wv))?;
                let rhs = v.mode(&gu, n, &gw);
                if lhs != rhs {
                    return Ok(mismatch(
                        &format!("{name} homomorphism"),
                        format!("{} ; {} ; n={}", v.describe(u), v.describe(w), n),
                        v.fock.describe_vec(&lhs),
                        v.fock.describe_vec(&rhs),
                    ));
                }
            }
            Ok(None)
        })
        .collect();
    crate::verdict::first_failure(res)
}

/// `[N, Y(u,x)]v = Y(N u, x)v` for all basis pairs up to the cutoff.
pub fn check_derivation(v: &VOSAStructure, j: &JordanData, cutoff: Exponent, hw: i64) -> Verdict {
    let pairs = basis_pairs(v, cutoff);
    let res: Vec<Verdict> = pairs
        .par_iter()
        .map(|(u, w)| {
            let (uv, wv) = (GradedVector::basis(u.clone()), GradedVector::basis(w.clone()));
            let (nu, nw) = (j.nilpotent(&uv)?, j.nilpotent(&wv)?);
            for n in window_modes(u, w, hw) {
                let mut lhs = j.nilpotent(&v.mode(&uv, n, &wv))?;
                lhs.add_scaled(&v.mode(&uv, n, &nw), &Scalar::int(-1));
                let rhs = v.mode(&nu, n, &wv);
                if lhs != rhs {
                    return Ok(mismatch(
                        "derivation",
                        format!("{} ; {} ; x^{}", v.describe(u), v.describe(w), -n - Rational64::one()),
                        v.fock.describe_vec(&lhs),
                        v.fock.describe_vec(&rhs),
                    ));
                }
            }
            Ok(None)
        })
        .collect();
    crate::verdict::first_failure(res)
}

fn n_power_series(j: &Arc<JordanData>, x: Var, v: &GradedVector, bound: u32, hw: i64) -> Result<Series<GradedVector>> {
    let jj = j.clone();
    let op = move |w: &GradedVector| jj.nilpotent(w).expect("nilpotent part on checked vector");
    j.nilpotent(v)?;
    nilpotent_power(x, v, op, bound, hw)
}

/// `x0^N Y(u,x) v = Y(x0^N u, x) x0^N v` as series in `x0` (logs only) and `x`.
pub fn check_conjugation_pair(v: &VOSAStructure, j: &Arc<JordanData>, u: &FockKey, w: &FockKey, hw: i64) -> Verdict {
    let (uv, wv) = (GradedVector::basis(u.clone()), GradedVector::basis(w.clone()));
    let bound = (j.nil_order(&uv)? + j.nil_order(&wv)?) as u32;
    let lb = bound.max(1);
    let y = vertex_series(&v.engine, &uv, &wv, Var::X, hw);
    // left side: apply x0^N to each coefficient
    let jj = j.clone();
    let max_log = lb;
    let lhs = {
        let y = y.clone();
        let lo = y.support().vars[0].lo;
        let cos = y.support().vars[0].cosets.clone();
        let sups = vec![VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), Some(Rational64::zero()), max_log), VarSupport::new(&cos, lo, None, 0)];
        build_cached(&[Var::X0, Var::X], sups, None, hw, lb, move |e, l| {
            if !e[0].is_zero() || l[1] != 0 {
                return GradedVector::zero();
            }
            let mut c = y.coeff_at(&[(Var::X, e[1], 0)]);
            for _ in 0..l[0] {
                c = jj.nilpotent(&c).expect("nilpotent part on checked vector");
            }
            c.scaled(&Scalar::from_q(Q::inv_factorial(l[0] as u64)))
        })
    };
    // right side: Σ_{i,k} (log x0)^{i+k}/(i!k!) Y(N^i u, x) N^k w
    let xu = n_power_series(j, Var::X0, &uv, lb, hw)?;
    let xw = n_power_series(j, Var::X0, &wv, lb, hw)?;
    let mut terms = Vec::new();
    for (mu, cu) in xu.entries()? {
        for (mw, cw) in xw.entries()? {
            let k = mu.log_powers[0] + mw.log_powers[0];
            let logs = Series::monomial(&[(Var::X0, Rational64::zero(), k)], Scalar::one(), hw).with_window(Window::symmetric(1, hw, lb));
            let field = vertex_series(&v.engine, &cu, &cw, Var::X, hw);
            terms.push(mul(&logs, &field)?);
        }
    }
    let rhs = if terms.is_empty() { Series::zero(vec![Var::X0, Var::X], Window::symmetric(2, hw, lb)) } else { Series::sum(&terms) };
    let r = compare_series("conjugation", &lhs, &rhs, &Window::symmetric(2, hw, lb), |c| v.fock.describe_vec(c))?;
    Ok(r.map(|mut m| {
        m.monomial = format!("{} ; {} ; {}", v.describe(u), v.describe(w), m.monomial);
        m
    }))
}

pub fn check_conjugation(v: &VOSAStructure, j: &Arc<JordanData>, cutoff: Exponent, hw: i64) -> Verdict {
    let pairs = basis_pairs(v, cutoff);
    let res: Vec<Verdict> = pairs.par_iter().map(|(u, w)| check_conjugation_pair(v, j, u, w, hw)).collect();
    crate::verdict::first_failure(res)
}

/// g-weight of a basis vector under a diagonal generator action.
pub fn alpha_of_key(alphas: &[Exponent], k: &FockKey) -> Exponent {
    frac(k.modes.iter().fold(Rational64::zero(), |a, m| a + alphas[m.gen as usize]))
}

#[cfg(test)]
mod tests;
