//! Matrix elements of vertex operators and their products as formal series.

use super::engine::VertexEngine;
use super::fock::{DualVector, GradedVector};
use crate::formal_calculus::expand::{build, build_cached};
use crate::formal_calculus::rational::frac;
use crate::formal_calculus::{Exponent, LogLaurentSeries, Series, Var, VarSupport, Window};
use num_rational::Rational64;
use num_traits::One;
use std::sync::Arc;

/// g-weight cosets of the exponents of `Y(u, x)`: `-α_u + ℤ`.
pub fn exponent_cosets(eng: &VertexEngine, u: &GradedVector) -> Vec<Exponent> {
    let mut c: Vec<Exponent> = u.comps.keys().map(|k| frac(-eng.alpha_of(k))).collect();
    c.sort();
    c.dedup();
    c
}

pub fn levels(v: &GradedVector) -> Vec<Exponent> {
    let mut l: Vec<Exponent> = v.comps.keys().map(|k| k.level()).collect();
    l.sort();
    l.dedup();
    l
}

fn combos(parts: &[Vec<Exponent>]) -> Vec<Exponent> {
    let mut acc = vec![Rational64::from_integer(0)];
    for p in parts {
        let mut next = Vec::new();
        for a in &acc {
            for b in p {
                next.push(*a + *b);
            }
        }
        next.sort();
        next.dedup();
        acc = next;
    }
    acc
}

/// `⟨w', Y(u_1, x_1) ⋯ Y(u_k, x_k) w⟩`.
pub fn product_matrix_element(
    eng: &Arc<VertexEngine>,
    dual: &DualVector,
    fields: &[(GradedVector, Var)],
    w: &GradedVector,
    hw: i64,
) -> LogLaurentSeries {
    let k = fields.len();
    let vars: Vec<Var> = fields.iter().map(|f| f.1).collect();
    if w.is_zero() || fields.iter().any(|f| f.0.is_zero()) {
        return Series::zero(vars, Window::symmetric(k, hw, 0));
    }
    let lw = levels(w);
    let ld = dual.levels();
    let wts: Vec<Vec<Exponent>> = fields.iter().map(|f| levels(&f.0)).collect();
    let mut sups = Vec::new();
    for (i, (u, _)) in fields.iter().enumerate() {
        let lo = if i == k - 1 { Some(-(*lw.last().unwrap_or(&Rational64::from_integer(0)) + *wts[i].last().unwrap())) } else { None };
        let hi = if i == 0 { Some(*ld.last().unwrap_or(&Rational64::from_integer(0)) - wts[i][0]) } else { None };
        sups.push(VarSupport::new(&exponent_cosets(eng, u), lo, hi, 0));
    }
    let mut parts: Vec<Vec<Exponent>> = vec![ld.clone(), lw.iter().map(|x| -*x).collect()];
    for w in &wts {
        parts.push(w.iter().map(|x| -*x).collect());
    }
    let degrees = combos(&parts);
    let eng = eng.clone();
    let dual = dual.clone();
    let us: Vec<GradedVector> = fields.iter().map(|f| f.0.clone()).collect();
    let w = w.clone();
    build_cached(&vars, sups, Some(degrees), hw, 0, move |e, _| {
        let mut vec = w.clone();
        for i in (0..us.len()).rev() {
            vec = eng.mode_vec(&us[i], -e[i] - Rational64::one(), &vec);
            if vec.is_zero() {
                return crate::formal_calculus::Scalar::zero();
            }
        }
        dual.pair(&vec)
    })
}

/// `⟨w', Y(u, x) w⟩`.
pub fn matrix_element(eng: &Arc<VertexEngine>, dual: &DualVector, u: &GradedVector, w: &GradedVector, x: Var, hw: i64) -> LogLaurentSeries {
    product_matrix_element(eng, dual, &[(u.clone(), x)], w, hw)
}

/// `Y(u, x) w` as a vector-valued series.
pub fn vertex_series(eng: &Arc<VertexEngine>, u: &GradedVector, w: &GradedVector, x: Var, hw: i64) -> Series<GradedVector> {
    let lw = levels(w);
    let wt = levels(u);
    let lo = -(*lw.last().unwrap_or(&Rational64::from_integer(0)) + *wt.last().unwrap_or(&Rational64::from_integer(0)));
    let sup = VarSupport::new(&exponent_cosets(eng, u), Some(lo), None, 0);
    let eng = eng.clone();
    let (u, w) = (u.clone(), w.clone());
    build_cached(&[x], vec![sup], None, hw, 0, move |e, _| eng.mode_vec(&u, -e[0] - Rational64::one(), &w))
}

/// Pairs a vector-valued series with a dual vector.
pub fn pair_series(dual: &DualVector, s: &Series<GradedVector>) -> LogLaurentSeries {
    let d = dual.clone();
    s.map(false, move |v| d.pair(v))
}

/// A constant series with the given scalar.
pub fn scalar_series(vars: &[Var], c: crate::formal_calculus::Scalar, hw: i64) -> LogLaurentSeries {
    let sups = vars.iter().map(|_| VarSupport::trivial()).collect();
    build(vars, sups, Some(vec![Rational64::from_integer(0)]), hw, 0, move |e, _| {
        if e.iter().all(|x| *x == Rational64::from_integer(0)) {
            c.clone()
        } else {
            crate::formal_calculus::Scalar::zero()
        }
    })
}

/// `Y(u, x)` applied to a vector-valued series in other variables.
pub fn apply_field(eng: &Arc<VertexEngine>, u: &GradedVector, x: Var, s: &Series<GradedVector>, hw: i64) -> Series<GradedVector> {
    let mut vars = vec![x];
    vars.extend(s.vars().iter().copied());
    let mut sups = vec![VarSupport::new(&exponent_cosets(eng, u), None, None, 0)];
    for v in s.vars() {
        let i = s.var_index(*v).unwrap();
        sups.push(s.support().vars[i].clone());
    }
    let lb = s.window().log_bound;
    let (eng, u, s) = (eng.clone(), u.clone(), s.clone());
    let rest: Vec<Var> = s.vars().to_vec();
    build_cached(&vars, sups, None, hw, lb, move |e, l| {
        let at: Vec<(Var, Exponent, u32)> = rest.iter().enumerate().map(|(i, v)| (*v, e[i + 1], l[i + 1])).collect();
        if l[0] != 0 {
            return GradedVector::zero();
        }
        let c = s.coeff_at(&at);
        if c.is_zero() {
            return c;
        }
        eng.mode_vec(&u, -e[0] - Rational64::one(), &c)
    })
}

/// `⟨w', Y_M(Y_V(u, x0) v, x2) w⟩` where `outer` acts on the module and
/// `inner` is the algebra acting on itself.
pub fn iterate_matrix_element(
    outer: &Arc<VertexEngine>,
    inner: &Arc<VertexEngine>,
    dual: &DualVector,
    u: &GradedVector,
    v: &GradedVector,
    w: &GradedVector,
    (x0, x2): (Var, Var),
    hw: i64,
) -> LogLaurentSeries {
    let (wu, wv, lw, ld) = (levels(u), levels(v), levels(w), dual.levels());
    let zero = Rational64::from_integer(0);
    let lo0 = -(*wu.last().unwrap() + *wv.last().unwrap());
    let hi2 = *ld.last().unwrap_or(&zero);
    let mut c2: Vec<Exponent> = Vec::new();
    for a in exponent_cosets(outer, u) {
        for b in exponent_cosets(outer, v) {
            c2.push(frac(a + b));
        }
    }
    c2.sort();
    c2.dedup();
    let sups = vec![VarSupport::new(&[zero], Some(lo0), None, 0), VarSupport::new(&c2, None, Some(hi2), 0)];
    let degrees = combos(&[ld, lw.iter().map(|x| -*x).collect(), wu.iter().map(|x| -*x).collect(), wv.iter().map(|x| -*x).collect()]);
    let (outer, inner, dual, u, v, w) = (outer.clone(), inner.clone(), dual.clone(), u.clone(), v.clone(), w.clone());
    build_cached(&[x0, x2], sups, Some(degrees), hw, 0, move |e, _| {
        let it = inner.mode_vec(&u, -e[0] - Rational64::one(), &v);
        if it.is_zero() {
            return crate::formal_calculus::Scalar::zero();
        }
        dual.pair(&outer.mode_vec(&it, -e[1] - Rational64::one(), &w))
    })
}
