//! Modes of composite vertex operators, computed recursively from generator
//! modes by the iterate formula. The same recursion serves the algebra
//! acting on itself (all g-weights zero) and a twisted module.

use super::fock::{FockKey, FockSpace, GradedVector};
use crate::formal_calculus::rational::{floor_i64, frac};
use crate::formal_calculus::{Exponent, Scalar, Q};
use dashmap::DashMap;
use num_rational::Rational64;
use num_traits::{One, Zero};
use std::sync::Arc;

type MemoKey = (FockKey, Exponent, FockKey);

/// Mode oracle `u_n w` for `u` in the algebra and `w` in a module.
pub struct VertexEngine {
    /// The algebra's Fock space.
    pub v: Arc<FockSpace>,
    /// The module's Fock space (the algebra itself when untwisted).
    pub m: Arc<FockSpace>,
    /// g-weight of each generator in `[0, 1)`.
    pub alpha: Vec<Exponent>,
    memo: DashMap<MemoKey, GradedVector>,
    order: DashMap<(u8, FockKey), i64>,
}

fn split_first(u: &FockKey, v: &FockSpace) -> (super::fock::Mode, FockKey) {
    let a = u.modes[0];
    let mut modes = u.modes.clone();
    modes.remove(0);
    let rest = FockKey {
        level2: u.level2 + a.twice,
        vac: u.vac,
        modes,
        parity: u.parity ^ v.gens[a.gen as usize].parity(),
    };
    (a, rest)
}

fn sign(odd: bool) -> Q {
    if odd {
        Q::int(-1)
    } else {
        Q::one()
    }
}

impl VertexEngine {
    pub fn new(v: Arc<FockSpace>, m: Arc<FockSpace>, alpha: Vec<Exponent>) -> VertexEngine {
        assert_eq!(alpha.len(), v.gens.len());
        VertexEngine { v, m, alpha, memo: DashMap::new(), order: DashMap::new() }
    }

    /// The algebra acting on itself.
    pub fn untwisted(v: Arc<FockSpace>) -> VertexEngine {
        let n = v.gens.len();
        VertexEngine::new(v.clone(), v, vec![Rational64::zero(); n])
    }

    pub fn weight(&self, u: &FockKey) -> Exponent {
        u.level()
    }

    /// g-weight of a basis vector of the algebra.
    pub fn alpha_of(&self, u: &FockKey) -> Exponent {
        frac(u.modes.iter().fold(Rational64::zero(), |acc, m| acc + self.alpha[m.gen as usize]))
    }

    /// Generator mode `a_(β)` on the module, with `Y(a, x) = Σ a_(β) x^{-β-1}`.
    pub fn gen_mode(&self, g: u8, beta: Exponent, w: &FockKey, out: &mut GradedVector, c: &Scalar) {
        let twice = beta * Rational64::from_integer(2) + Rational64::from_integer(2 - self.v.gens[g as usize].twice_weight() as i64);
        if !twice.is_integer() {
            return;
        }
        self.m.apply_mode(g, twice.to_integer() as i32, w, out, c);
    }

    pub fn gen_mode_vec(&self, g: u8, beta: Exponent, w: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (k, c) in &w.comps {
            self.gen_mode(g, beta, k, &mut out, c);
        }
        out
    }

    /// `M_{a,v} = max{n + 1 : a_(n) v ≠ 0}`, at least 0, computed in the algebra.
    pub fn gen_order(&self, g: u8, v: &FockKey) -> i64 {
        if let Some(x) = self.order.get(&(g, v.clone())) {
            return *x;
        }
        let wt2 = self.v.gens[g as usize].twice_weight();
        // a_(n) v = 0 once level(v) + wt a - n - 1 < 0
        let top = floor_i64(v.level() + Rational64::new(wt2 as i64, 2) - Rational64::one());
        let mut res = 0;
        let mut n = top;
        while n >= 0 {
            let twice = 2 * n as i32 + 2 - wt2;
            let mut out = GradedVector::zero();
            self.v.apply_mode(g, twice, v, &mut out, &Scalar::one());
            if !out.is_zero() {
                res = n + 1;
                break;
            }
            n -= 1;
        }
        self.order.insert((g, v.clone()), res);
        res
    }

    /// `u_n w` for basis vectors.
    pub fn mode(&self, u: &FockKey, n: Exponent, w: &FockKey) -> GradedVector {
        if u.is_vacuum() {
            return if n == -Rational64::one() { GradedVector::basis(w.clone()) } else { GradedVector::zero() };
        }
        if !frac(n - self.alpha_of(u)).is_zero() {
            return GradedVector::zero();
        }
        if w.level() + u.level() - n - Rational64::one() < Rational64::zero() {
            return GradedVector::zero();
        }
        let key = (u.clone(), n, w.clone());
        if let Some(x) = self.memo.get(&key) {
            return x.clone();
        }
        let out = self.compute(u, n, w);
        self.memo.insert(key, out.clone());
        out
    }

    fn compute(&self, u: &FockKey, n: Exponent, w: &FockKey) -> GradedVector {
        let (a, v) = split_first(u, &self.v);
        let ga = &self.v.gens[a.gen as usize];
        let wt_a = ga.weight();
        // u = a_(m) v
        let m = (a.twice as i64 - 2 + ga.twice_weight() as i64) / 2;
        if v.is_vacuum() && m == -1 {
            let mut out = GradedVector::zero();
            self.gen_mode(a.gen, n, w, &mut out, &Scalar::one());
            return out;
        }
        let alpha = self.alpha[a.gen as usize];
        let eps = sign(ga.parity() == 1 && v.parity == 1);
        let big_m = self.gen_order(a.gen, &v);
        let lw = w.level();
        let wt_v = v.level();
        let mut out = GradedVector::zero();
        for i in 0..=(big_m - m - 1) {
            let k = m + i;
            let ci = Q::binomial(&Q::from(-alpha), i as u64);
            if ci.is_zero() {
                continue;
            }
            let ii = Rational64::from_integer(i);
            let kk = Rational64::from_integer(k);
            // Σ_j (-1)^j C(k,j) a_(α+k-j) v_(n-α-i+j) w
            let mut jmax = floor_i64(lw + wt_v - Rational64::one() - n + alpha + ii);
            if k >= 0 {
                jmax = jmax.min(k);
            }
            for j in 0..=jmax {
                let jj = Rational64::from_integer(j);
                let inner = self.mode(&v, n - alpha - ii + jj, w);
                if inner.is_zero() {
                    continue;
                }
                let b = &Q::binomial(&Q::int(k), j as u64) * &sign(j % 2 == 1);
                let c = Scalar::from_q(&ci * &b);
                for (key, x) in &inner.comps {
                    self.gen_mode(a.gen, alpha + kk - jj, key, &mut out, &(x * &c));
                }
            }
            // -ε Σ_j (-1)^{k-j} C(k,j) v_(n-α-i+k-j) a_(α+j) w
            let mut jmax = floor_i64(lw + wt_a - alpha - Rational64::one());
            if k >= 0 {
                jmax = jmax.min(k);
            }
            for j in 0..=jmax {
                let jj = Rational64::from_integer(j);
                let mut inner = GradedVector::zero();
                self.gen_mode(a.gen, alpha + jj, w, &mut inner, &Scalar::one());
                if inner.is_zero() {
                    continue;
                }
                let b = &(&Q::binomial(&Q::int(k), j as u64) * &sign((k - j).rem_euclid(2) == 1)) * &eps;
                let c = Scalar::from_q(-(&ci * &b));
                for (key, x) in &inner.comps {
                    let r = self.mode(&v, n - alpha - ii + kk - jj, key);
                    out.add_scaled(&r, &(x * &c));
                }
            }
        }
        out
    }

    /// `u_n w` extended linearly in both arguments.
    pub fn mode_vec(&self, u: &GradedVector, n: Exponent, w: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (uk, uc) in &u.comps {
            for (wk, wc) in &w.comps {
                let r = self.mode(uk, n, wk);
                if !r.is_zero() {
                    out.add_scaled(&r, &(uc * wc));
                }
            }
        }
        out
    }

    /// `max{n + 1 - α_u : u_n w ≠ 0}`, at least 0, scanning down from the
    /// truncation bound.
    pub fn order(&self, u: &FockKey, w: &FockKey) -> i64 {
        let alpha = self.alpha_of(u);
        let top = w.level() + u.level() - Rational64::one();
        // largest n ≤ top in α + ℤ
        let mut n = alpha + Rational64::from_integer(floor_i64(top - alpha));
        while n + Rational64::one() - alpha > Rational64::zero() {
            if !self.mode(u, n, w).is_zero() {
                return (n + Rational64::one() - alpha).to_integer();
            }
            n -= Rational64::one();
        }
        0
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vosa_core::fock::{Generator, Statistics};
    use crate::vosa_core::structure::conformal_vector;

    fn twisted_vacuum_weight(stats: Statistics) -> GradedVector {
        let g = || vec![Generator { name: "a".into(), stats }];
        let (vs, ms, ramond) = if stats == Statistics::Fermion { (1, 0, true) } else { (0, 1, false) };
        let v = Arc::new(FockSpace::new(g(), vec![vec![Q::one()]], vec![vs], false).unwrap());
        let m = Arc::new(FockSpace::new(g(), vec![vec![Q::one()]], vec![ms], ramond).unwrap());
        let om = conformal_vector(&v).unwrap();
        let eng = VertexEngine::new(v, m, vec![Rational64::new(1, 2)]);
        eng.mode_vec(&om, Rational64::one(), &GradedVector::basis(FockKey::vacuum(0)))
    }

    #[test]
    fn twisted_vacuum_weights() {
        let vac = GradedVector::basis(FockKey::vacuum(0));
        assert_eq!(twisted_vacuum_weight(Statistics::Fermion), vac.scaled(&Scalar::rational(1, 16)));
        assert_eq!(twisted_vacuum_weight(Statistics::Boson), vac.scaled(&Scalar::rational(1, 16)));
    }
}
