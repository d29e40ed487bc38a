//! The twist vertex operator `Y^tw(w, x)v = (-1)^{|v||w|} e^{xL_W(-1)} Y^g_W(v, y)w`
//! at `y^n = e^{πin}x^n`, `log y = log x + Π`, and the identities it satisfies.
//!
//! Coefficients always come from that definition. Two routes are kept: a
//! memoized coefficient formula used inside products, and a series route
//! (substitution, then the exponential) used for single matrix elements.

mod checks;

pub use checks::*;

use crate::error::{CalcError, Result};
use crate::formal_calculus::expand::build_cached;
use crate::formal_calculus::rational::{floor_i64, frac};
use crate::formal_calculus::{Exponent, LogLaurentSeries, Scalar, Series, Var, VarSupport, Q};
use crate::twisted_module::TwistedModule;
use crate::vosa_core::fields::{exponent_cosets, levels, pair_series};
use crate::vosa_core::{DualVector, FockKey, GradedVector};
use dashmap::DashMap;
use num_rational::Rational64;
use num_traits::{One, Zero};
use std::sync::Arc;

pub struct TwistOperatorMap {
    pub module: Arc<TwistedModule>,
    coeffs: DashMap<(FockKey, FockKey, Exponent), GradedVector>,
    orders: DashMap<(FockKey, FockKey), i64>,
}

fn top(v: &GradedVector) -> Exponent {
    *levels(v).last().unwrap_or(&Rational64::zero())
}

fn combine(parts: &[Vec<Exponent>]) -> Vec<Exponent> {
    let mut acc = vec![Rational64::zero()];
    for p in parts {
        let mut next: Vec<Exponent> = acc.iter().flat_map(|a| p.iter().map(move |b| *a + *b)).collect();
        next.sort();
        next.dedup();
        acc = next;
    }
    acc
}

fn neg_levels(v: &GradedVector) -> Vec<Exponent> {
    levels(v).iter().map(|x| -*x).collect()
}

impl TwistOperatorMap {
    /// Logarithmic twist operators are not built; `g` must act semisimply
    /// up to weight `cutoff`.
    pub fn new(module: Arc<TwistedModule>, cutoff: Exponent) -> Result<TwistOperatorMap> {
        if module.jordan.max_nil_order(cutoff)? > 1 {
            return Err(CalcError::Precondition("twist operator needs N_g = 0".into()));
        }
        Ok(TwistOperatorMap { module, coeffs: DashMap::new(), orders: DashMap::new() })
    }

    /// Coefficient of `x^e` in `Y^tw(w, x)a` for basis vectors:
    /// `ε Σ_j L(-1)^j/j! e^{πif} a_(-f-1) w` with `f = e - j`.
    pub fn coeff_key(&self, w: &FockKey, a: &FockKey, e: Exponent) -> GradedVector {
        let key = (w.clone(), a.clone(), e);
        if let Some(x) = self.coeffs.get(&key) {
            return x.clone();
        }
        let eng = &self.module.engine;
        let lo = -(w.level() + a.level());
        let mut out = GradedVector::zero();
        if frac(e + eng.alpha_of(a)).is_zero() && e >= lo {
            let wv = GradedVector::basis(w.clone());
            let av = GradedVector::basis(a.clone());
            // Horner from the top j down: out ← c_j + L(-1)out/(j+1)
            for j in (0..=floor_i64(e - lo)).rev() {
                let f = e - Rational64::from_integer(j);
                let c = eng.mode_vec(&av, -f - Rational64::one(), &wv);
                if c.is_zero() && out.is_zero() {
                    continue;
                }
                out = self.module.l_minus_one(&out).scaled(&Scalar::from_q(Q::new(1, j + 1)));
                out.add_scaled(&c, &Scalar::expi_dyadic(f));
            }
            if w.parity * a.parity == 1 {
                out = out.scaled(&Scalar::int(-1));
            }
        }
        self.coeffs.insert(key, out.clone());
        out
    }

    /// Coefficient of `x^e` in `Y^tw(w, x)a`, linear in both arguments.
    pub fn coeff(&self, w: &GradedVector, a: &GradedVector, e: Exponent) -> GradedVector {
        let mut out = GradedVector::zero();
        for (wk, wc) in &w.comps {
            for (ak, ac) in &a.comps {
                let r = self.coeff_key(wk, ak, e);
                if !r.is_zero() {
                    out.add_scaled(&r, &(wc * ac));
                }
            }
        }
        out
    }

    pub fn memo_len(&self) -> usize {
        self.coeffs.len()
    }

    /// `Y^tw(w, x)v` through the substitution `y ↦ e^{πi}x` on `Y^g_W(v, y)w`
    /// followed by `e^{xL_W(-1)}`.
    pub fn twist_series(&self, w: &GradedVector, v: &GradedVector, hw: i64) -> Result<Series<GradedVector>> {
        let y = self.module.vertex_series(v, w, Var::Y, hw);
        let sub = y.log_substitute(Var::Y, Var::X)?;
        let m = self.module.clone();
        let shifted = sub.exp_operator(Var::X, move |c| m.l_minus_one(c))?;
        Ok(shifted.scale(&TwistedModule::koszul(w, v)))
    }

    /// `⟨w', Y^tw(w, x)v⟩`.
    pub fn twist_matrix_element(&self, dual: &DualVector, w: &GradedVector, v: &GradedVector, hw: i64) -> Result<LogLaurentSeries> {
        Ok(pair_series(dual, &self.twist_series(w, v, hw)?))
    }

    /// `M_{u,w}`: least `M ≥ 0` with `x^{α+M} Y_0(u, x)w` a power series.
    pub fn twist_commutativity_order(&self, u: &GradedVector, w: &GradedVector) -> i64 {
        let mut m = 0;
        for uk in u.comps.keys() {
            for wk in w.comps.keys() {
                let key = (uk.clone(), wk.clone());
                let o = match self.orders.get(&key) {
                    Some(o) => *o,
                    None => {
                        let o = self.module.engine.order(uk, wk);
                        self.orders.insert(key, o);
                        o
                    }
                };
                m = m.max(o);
            }
        }
        m
    }

    /// `⟨w', Y^g_W(l_1, y_1)⋯Y^g_W(l_k, y_k) Y^tw(w, xt) Y_V(r_1, z_1)⋯Y_V(r_m, z_m) v⟩`.
    #[allow(clippy::too_many_arguments)]
    pub fn chain(
        self: &Arc<Self>,
        dual: &DualVector,
        left: &[(GradedVector, Var)],
        w: &GradedVector,
        xt: Var,
        right: &[(GradedVector, Var)],
        v: &GradedVector,
        hw: i64,
    ) -> Result<LogLaurentSeries> {
        let m = &self.module;
        let ld = dual.max_level();
        let lw = w.max_level();
        let mut vars = Vec::new();
        let mut sups = Vec::new();
        for (i, (u, x)) in left.iter().enumerate() {
            vars.push(*x);
            let hi = if i == 0 { Some(ld - levels(u)[0]) } else { None };
            sups.push(VarSupport::new(&exponent_cosets(&m.engine, u), None, hi, 0));
        }
        // the twist variable carries -α of its whole argument
        let mut alpha = m.alpha_of_vec(v)?;
        for (u, _) in right {
            alpha += m.alpha_of_vec(u)?;
        }
        vars.push(xt);
        let t_hi = if left.is_empty() { Some(ld - lw) } else { None };
        let t_lo = if right.is_empty() { Some(-(lw + top(v))) } else { None };
        sups.push(VarSupport::new(&[frac(-alpha)], t_lo, t_hi, 0));
        for (i, (u, x)) in right.iter().enumerate() {
            vars.push(*x);
            let lo = if i + 1 == right.len() { Some(-(top(u) + top(v))) } else { None };
            sups.push(VarSupport::new(&[Rational64::zero()], lo, None, 0));
        }
        let mut parts = vec![dual.levels(), neg_levels(w), neg_levels(v)];
        for (u, _) in left.iter().chain(right.iter()) {
            parts.push(neg_levels(u));
        }
        let me = self.clone();
        let (d, w, v) = (dual.clone(), w.clone(), v.clone());
        let (left, right) = (left.to_vec(), right.to_vec());
        let k = left.len();
        Ok(build_cached(&vars, sups, Some(combine(&parts)), hw, 0, move |e, _| {
            let mut a = v.clone();
            for (i, (u, _)) in right.iter().enumerate().rev() {
                a = me.module.algebra.engine.mode_vec(u, -e[k + 1 + i] - Rational64::one(), &a);
                if a.is_zero() {
                    return Scalar::zero();
                }
            }
            let mut t = me.coeff(&w, &a, e[k]);
            for (i, (u, _)) in left.iter().enumerate().rev() {
                if t.is_zero() {
                    return Scalar::zero();
                }
                t = me.module.engine.mode_vec(u, -e[i] - Rational64::one(), &t);
            }
            d.pair(&t)
        }))
    }

    /// `Y^tw(w, x)` applied to an algebra-valued series in other variables.
    pub fn apply(self: &Arc<Self>, w: &GradedVector, x: Var, s: &Series<GradedVector>, hw: i64) -> Series<GradedVector> {
        let d = self.module.engine.alpha.iter().map(|a| *a.denom()).fold(2, num_integer::lcm);
        let cosets: Vec<Exponent> = (0..d).map(|k| Rational64::new(k, d)).collect();
        let mut vars = vec![x];
        vars.extend(s.vars().iter().copied());
        let mut sups = vec![VarSupport::new(&cosets, None, None, 0)];
        for v in s.vars() {
            sups.push(s.support().vars[s.var_index(*v).unwrap()].clone());
        }
        let rest: Vec<Var> = s.vars().to_vec();
        let (me, w, s) = (self.clone(), w.clone(), s.clone());
        build_cached(&vars, sups, None, hw, 0, move |e, l| {
            if l[0] != 0 {
                return GradedVector::zero();
            }
            let at: Vec<(Var, Exponent, u32)> = rest.iter().enumerate().map(|(i, v)| (*v, e[i + 1], l[i + 1])).collect();
            let c = s.coeff_at(&at);
            if c.is_zero() {
                return c;
            }
            me.coeff(&w, &c, e[0])
        })
    }

    /// `⟨w', Y^tw(Y^g_W(u, x0)w, x2)v⟩`.
    pub fn iterate(self: &Arc<Self>, dual: &DualVector, u: &GradedVector, w: &GradedVector, v: &GradedVector, (x0, x2): (Var, Var), hw: i64) -> Result<LogLaurentSeries> {
        let m = &self.module;
        let s0 = VarSupport::new(&exponent_cosets(&m.engine, u), Some(-(w.max_level() + top(u))), None, 0);
        let s2 = VarSupport::new(&[frac(-m.alpha_of_vec(v)?)], None, Some(dual.max_level() - levels(v).first().copied().unwrap_or_default()), 0);
        let degrees = combine(&[dual.levels(), neg_levels(w), neg_levels(u), neg_levels(v)]);
        let me = self.clone();
        let (d, u, w, v) = (dual.clone(), u.clone(), w.clone(), v.clone());
        Ok(build_cached(&[x0, x2], vec![s0, s2], Some(degrees), hw, 0, move |e, _| {
            let inner = me.module.engine.mode_vec(&u, -e[0] - Rational64::one(), &w);
            if inner.is_zero() {
                return Scalar::zero();
            }
            d.pair(&me.coeff(&inner, &v, e[1]))
        }))
    }
}

#[cfg(test)]
mod tests;
