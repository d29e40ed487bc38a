//! Identity checkers for the twist vertex operator. All of them assume
//! `N_g = 0`, which [`TwistOperatorMap::new`] enforces.

use super::TwistOperatorMap;
use crate::error::{CalcError, Result};
use crate::formal_calculus::expand::{binomial, build, build_cached, delta, delta_derivative, minus_binomial, minus_delta};
use crate::formal_calculus::rational::{floor_i64, frac};
use crate::formal_calculus::series::format_monomial;
use crate::formal_calculus::{mul, LogLaurentSeries, Scalar, Series, Var, VarSupport, Window, Q};
use crate::twisted_module::TwistedModule;
use crate::verdict::{compare_series, mismatch, Verdict};
use crate::vosa_core::fields::{exponent_cosets, levels, pair_series};
use crate::vosa_core::{DualVector, GradedVector};
use num_rational::Rational64;
use num_traits::{One, Zero};
use std::sync::Arc;

fn show(c: &Scalar) -> String {
    c.to_string()
}

fn vacuum(t: &TwistOperatorMap) -> GradedVector {
    t.module.algebra.vacuum_vec()
}

fn p1(t: &Arc<TwistOperatorMap>, dual: &DualVector, u: &GradedVector, w: &GradedVector, v: &GradedVector, hw: i64) -> Result<LogLaurentSeries> {
    t.chain(dual, &[(u.clone(), Var::X1)], w, Var::X2, &[], v, hw)
}

fn p2(t: &Arc<TwistOperatorMap>, dual: &DualVector, u: &GradedVector, w: &GradedVector, v: &GradedVector, hw: i64) -> Result<LogLaurentSeries> {
    t.chain(dual, &[], w, Var::X2, &[(u.clone(), Var::X1)], v, hw)
}

/// `Y^tw(w, x)𝟏 = e^{xL_W(-1)}w`, through both the series route and the
/// coefficient route.
pub fn check_vacuum_identity(t: &Arc<TwistOperatorMap>, w: &GradedVector, hw: i64) -> Verdict {
    let m = t.module.clone();
    let vac = vacuum(t);
    let sup = VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), None, 0);
    let (m2, w2) = (m.clone(), w.clone());
    let expect: Series<GradedVector> = build_cached(&[Var::X], vec![sup], None, hw, 0, move |e, _| {
        let j = e[0].to_integer();
        let mut c = w2.clone();
        for i in 1..=j {
            c = m2.l_minus_one(&c).scaled(&Scalar::from_q(Q::new(1, i)));
        }
        c
    });
    let fock = m.fock.clone();
    let shw = move |c: &GradedVector| fock.describe_vec(c);
    let win = Window::symmetric(1, hw, 0);
    if let Some(x) = compare_series("twist-vacuum", &t.twist_series(w, &vac, hw)?, &expect, &win, &shw)? {
        return Ok(Some(x));
    }
    let lw = w.max_level();
    let s = VarSupport::new(&[Rational64::zero()], Some(-lw), None, 0);
    let me = t.clone();
    let (w3, vac3) = (w.clone(), vac.clone());
    let coeffs: Series<GradedVector> = build_cached(&[Var::X], vec![s], None, hw, 0, move |e, _| me.coeff(&w3, &vac3, e[0]));
    compare_series("twist-vacuum-coefficients", &coeffs, &expect, &win, &shw)
}

/// The memoized coefficient formula agrees with the series route.
pub fn check_twist_routes(t: &Arc<TwistOperatorMap>, w: &GradedVector, v: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let a = t.chain(dual, &[], w, Var::X, &[], v, hw)?;
    let b = t.twist_matrix_element(dual, w, v, hw)?;
    compare_series("twist-routes", &a, &b, &Window::symmetric(1, hw, 0), show)
}

/// `(x0+x2)^M Y^g_W(u, x0+x2) Y^tw(w, x2)v = (x0+x2)^M Y^tw(Y^g_W(u, x0)w, x2)v`
/// with `M = M_{u,v}` and every `(x0+x2)`-power expanded in `x2`.
pub fn check_weak_associativity(t: &Arc<TwistOperatorMap>, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let m = &t.module;
    let order = m.algebra.weak_commutativity_order_vec(u, v).max(0);
    let lo_t = -(w.max_level() + levels(v).last().copied().unwrap_or_default());
    // Σ_j C(a+j, j) ⟨w', u_(M-1-a-j) T_{b-j}⟩ at x0^a x2^b
    let s0 = VarSupport::new(&exponent_cosets(&m.engine, u), None, None, 0);
    let s2 = VarSupport::new(&[frac(-m.alpha_of_vec(v)?)], Some(lo_t), None, 0);
    let me = t.clone();
    let (d, u2, v2, w2) = (dual.clone(), u.clone(), v.clone(), w.clone());
    let mo = Rational64::from_integer(order);
    let lhs = build(&[Var::X0, Var::X2], vec![s0, s2], None, hw, 0, move |e, _| {
        let (a, b) = (e[0], e[1]);
        let mut acc = Scalar::zero();
        for j in 0..=floor_i64(b - lo_t).max(-1) {
            let jr = Rational64::from_integer(j);
            let tv = me.coeff(&w2, &v2, b - jr);
            if tv.is_zero() {
                continue;
            }
            let x = me.module.engine.mode_vec(&u2, mo - Rational64::one() - a - jr, &tv);
            let c = d.pair(&x);
            if !c.is_zero() {
                acc += &(&c * &Scalar::from_q(Q::binomial(&Q::from(a + jr), j as u64)));
            }
        }
        acc
    });
    let pre = binomial(Var::X0, Var::X2, 1, mo, hw);
    let rhs = mul(&pre, &t.iterate(dual, u, w, v, (Var::X0, Var::X2), hw)?)?;
    compare_series("weak-associativity-twist", &lhs, &rhs, &Window::symmetric(2, hw, 0), show)
}

fn iterate_side(t: &Arc<TwistOperatorMap>, u: &GradedVector, w: &GradedVector, v: &GradedVector, dual: &DualVector, hw: i64) -> Result<LogLaurentSeries> {
    mul(&delta(Var::X1, Var::X2, Var::X0, 1, Rational64::zero(), hw), &t.iterate(dual, u, w, v, (Var::X0, Var::X2), hw)?)
}

/// The three-term Jacobi identity with the twist operator in the second slot.
pub fn check_twist_jacobi(t: &Arc<TwistOperatorMap>, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let alpha = t.module.alpha_of_vec(u)?;
    let eps = TwistedModule::koszul(u, w);
    let t1 = mul(&delta(Var::X0, Var::X1, Var::X2, -1, alpha, hw), &p1(t, dual, u, w, v, hw)?)?;
    let t2 = mul(&minus_delta(Var::X0, Var::X1, Var::X2, alpha, hw)?, &p2(t, dual, u, w, v, hw)?)?.scale(&eps);
    let t3 = iterate_side(t, u, w, v, dual, hw)?;
    compare_series("twist-jacobi", &t1.sub(&t2), &t3, &Window::symmetric(3, hw, 0), show)
}

/// `(x1-x2)^α Y(u,x1)Y^tw(w,x2) - ε(-x2+x1)^α Y^tw(w,x2)Y_V(u,x1)`, the
/// left side of the generalized commutator formula.
fn gen_commutator(t: &Arc<TwistOperatorMap>, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Result<LogLaurentSeries> {
    let alpha = t.module.alpha_of_vec(u)?;
    let eps = TwistedModule::koszul(u, w);
    let a = mul(&binomial(Var::X1, Var::X2, -1, alpha, hw), &p1(t, dual, u, w, v, hw)?)?;
    let b = mul(&minus_binomial(Var::X2, Var::X1, alpha, hw)?, &p2(t, dual, u, w, v, hw)?)?;
    Ok(a.sub(&b.scale(&eps)))
}

/// The generalized commutator formula as an `x0`-residue and, for
/// semisimple `g`, as a finite sum of delta derivatives.
pub fn check_gen_commutator(t: &Arc<TwistOperatorMap>, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let alpha = t.module.alpha_of_vec(u)?;
    let lhs = gen_commutator(t, u, v, w, dual, hw)?;
    let win = Window::symmetric(2, hw, 0);
    let x0a = Series::monomial(&[(Var::X0, alpha, 0)], Scalar::one(), hw);
    let r1 = mul(&x0a, &iterate_side(t, u, w, v, dual, hw)?)?.residue(Var::X0)?;
    if let Some(x) = compare_series("gen-commutator-residue", &lhs, &r1, &win, show)? {
        return Ok(Some(x));
    }
    let order = t.twist_commutativity_order(u, w);
    let mut terms = vec![Series::zero(vec![Var::X1, Var::X2], win.clone())];
    for k in 0..order {
        let uw = t.module.mode(u, alpha + Rational64::from_integer(k), w);
        if uw.is_zero() {
            continue;
        }
        let s = t.chain(dual, &[], &uw, Var::X2, &[], v, hw)?;
        let f = Scalar::from_q(Q::inv_factorial(k as u64));
        terms.push(mul(&delta_derivative(Var::X1, Var::X2, k as u32, hw), &s)?.scale(&f));
    }
    compare_series("gen-commutator-finite", &lhs, &Series::sum(&terms), &win, show)
}

/// Generalized weak commutativity with `M = M_{u,w}` clamped to at least 1,
/// both with the split prefactor `(x1-x2)^M (x1-x2)^α` and with the single
/// power `(x1-x2)^{α+M}`.
pub fn check_gen_weak_commutativity(t: &Arc<TwistOperatorMap>, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let alpha = t.module.alpha_of_vec(u)?;
    let eps = TwistedModule::koszul(u, w);
    let order = Rational64::from_integer(t.twist_commutativity_order(u, w).max(1));
    let (a, b) = (p1(t, dual, u, w, v, hw)?, p2(t, dual, u, w, v, hw)?);
    let win = Window::symmetric(2, hw, 0);
    let pm = binomial(Var::X1, Var::X2, -1, order, hw);
    let l = mul(&pm, &mul(&binomial(Var::X1, Var::X2, -1, alpha, hw), &a)?)?;
    let r = mul(&pm, &mul(&minus_binomial(Var::X2, Var::X1, alpha, hw)?, &b)?)?.scale(&eps);
    if let Some(x) = compare_series("gen-weak-commutativity", &l, &r, &win, show)? {
        return Ok(Some(x));
    }
    let l4 = mul(&binomial(Var::X1, Var::X2, -1, alpha + order, hw), &a)?;
    let r4 = mul(&minus_binomial(Var::X2, Var::X1, alpha + order, hw)?, &b)?.scale(&eps);
    compare_series("gen-weak-commutativity-single-power", &l4, &r4, &win, show)
}

/// `Y^tw_0(w, x) = Y^tw(w, x)x^{N}` is log-free and recovers `Y^tw`. With
/// `N = 0` both sides are the same series and the content is the absence
/// of logarithms.
pub fn check_twist_decomposition(t: &TwistOperatorMap, w: &GradedVector, v: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let full = t.twist_matrix_element(dual, w, v, hw)?;
    for (mono, c) in full.with_window(Window::symmetric(1, hw, 1)).entries()? {
        if mono.log_powers.iter().any(|k| *k > 0) && !c.is_zero() {
            return Ok(mismatch("twist-decomposition", format_monomial(full.vars(), &mono), c.to_string(), "0"));
        }
    }
    let zero_part = full.log_constant_term(Var::X);
    compare_series("twist-decomposition", &full, &zero_part, &Window::symmetric(1, hw, 1), show)
}

/// `d/dx Y^tw(w,x)v = Y^tw(L_W(-1)w, x)v = L_W(-1)Y^tw(w,x)v - Y^tw(w,x)L_V(-1)v`.
pub fn check_l_minus1_twist(t: &TwistOperatorMap, w: &GradedVector, v: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let m = t.module.clone();
    let win = Window::symmetric(1, hw, 0);
    let s = t.twist_series(w, v, hw)?;
    let d = pair_series(dual, &s).derivative(Var::X);
    let r1 = t.twist_matrix_element(dual, &m.l_minus_one(w), v, hw)?;
    if let Some(x) = compare_series("twist-L(-1)-derivative", &d, &r1, &win, show)? {
        return Ok(Some(x));
    }
    let dd = dual.clone();
    let m2 = m.clone();
    let outer = s.map(false, move |c| dd.pair(&m2.l_minus_one(c)));
    let inner = t.twist_matrix_element(dual, w, &m.algebra.l_minus_one(v), hw)?;
    compare_series("twist-L(-1)-commutator", &d, &outer.sub(&inner), &win, show)
}

/// Sum over compositions of `s` into `parts` nonnegative integers.
fn compositions(s: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 0 {
        return if s == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=s {
        for mut rest in compositions(s - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `⟨w', e^{xL_W(-1)} Y^g_W(v_1, x_1-x)⋯Y^g_W(v_k, x_k-x) R⟩` with
/// `R = ε Y^g_W(b, y)w` at `y = e^{πi}x`, where `b = v` when there is no
/// right field and `b = v_r` at `(x_r + y)` expanded in `x_r` when `v = 𝟏`.
fn recentered(t: &Arc<TwistOperatorMap>, left: &[GradedVector], right: Option<&GradedVector>, w: &GradedVector, v: &GradedVector, dual: &DualVector, hw: i64) -> Result<LogLaurentSeries> {
    let m = t.module.clone();
    let k = left.len();
    let b = right.cloned().unwrap_or_else(|| v.clone());
    let eps = TwistedModule::koszul(w, &b);
    let alpha = m.alpha_of_vec(&b)?;
    let mut vars: Vec<Var> = (0..k).map(|i| Var::indexed(i + 1)).collect();
    let mut sups: Vec<VarSupport> = left.iter().map(|u| VarSupport::new(&exponent_cosets(&m.engine, u), None, None, 0)).collect();
    vars.push(Var::X);
    sups.push(VarSupport::new(&[frac(-alpha)], None, None, 0));
    if right.is_some() {
        vars.push(Var::indexed(k + 1));
        sups.push(VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), None, 0));
    }
    let lo_b = -(w.max_level() + levels(&b).last().copied().unwrap_or_default());
    let (d, left, w) = (dual.clone(), left.to_vec(), w.clone());
    let has_right = right.is_some();
    Ok(build(&vars, sups, None, hw, 0, move |e, _| {
        let er = if has_right { e[k + 1] } else { Rational64::zero() };
        let ex = e[k];
        let lo_f = lo_b - er;
        let mut acc = Scalar::zero();
        // f runs over the coset of ex, from lo_f up to ex
        let mut f = ex - Rational64::from_integer(floor_i64(ex - lo_f));
        while f <= ex {
            let n = -f - Rational64::one() - er;
            let mut r = m.mode(&b, n, &w);
            if !r.is_zero() {
                let mut c = Scalar::expi_dyadic(f);
                if has_right {
                    c = &c * &Scalar::from_q(Q::binomial(&Q::from(-n - Rational64::one()), er.to_integer() as u64));
                }
                r = r.scaled(&c);
                let s = (ex - f).to_integer();
                for comp in compositions(s, k + 1) {
                    let mut x = r.clone();
                    let mut coef = Scalar::one();
                    for i in (0..k).rev() {
                        let j = comp[i + 1];
                        let jr = Rational64::from_integer(j);
                        x = m.mode(&left[i], -e[i] - jr - Rational64::one(), &x);
                        if x.is_zero() {
                            break;
                        }
                        let bc = Q::binomial(&Q::from(e[i] + jr), j as u64);
                        coef = &coef * &Scalar::from_q(if j % 2 == 1 { -bc } else { bc });
                    }
                    if x.is_zero() {
                        continue;
                    }
                    for p in 1..=comp[0] {
                        x = m.l_minus_one(&x).scaled(&Scalar::from_q(Q::new(1, p)));
                    }
                    let c = d.pair(&x);
                    if !c.is_zero() {
                        acc += &(&c * &coef);
                    }
                }
            }
            f += Rational64::one();
        }
        &acc * &eps
    }))
}

/// `⟨w', Y^g_W(v_1,x_1)⋯Y^g_W(v_k,x_k) Y^tw(w,x) Y_V(v_{k+1},x_{k+1}) v⟩`
/// equals its recentered pure-module form. At most one right field, and
/// then only on `v = 𝟏`.
pub fn check_mixed_product_polynomiality(
    t: &Arc<TwistOperatorMap>,
    left: &[GradedVector],
    right: &[GradedVector],
    w: &GradedVector,
    v: &GradedVector,
    dual: &DualVector,
    hw: i64,
) -> Verdict {
    let vac = vacuum(t);
    if right.len() > 1 || (right.len() == 1 && *v != vac) || left.len() > 4 {
        return Err(CalcError::Precondition("mixed products need l = 0, or l = 1 with v = 1, and k ≤ 4".into()));
    }
    let k = left.len();
    let lf: Vec<(GradedVector, Var)> = left.iter().enumerate().map(|(i, u)| (u.clone(), Var::indexed(i + 1))).collect();
    let rf: Vec<(GradedVector, Var)> = right.iter().map(|u| (u.clone(), Var::indexed(k + 1))).collect();
    let lhs = t.chain(dual, &lf, w, Var::X, &rf, v, hw)?;
    let rhs = recentered(t, left, right.first(), w, v, dual, hw)?;
    compare_series("mixed-product", &lhs, &rhs, &Window::symmetric(k + rf.len() + 1, hw, 0), show)
}

/// Transposes slots `swap` and `swap + 1` of `Y^g_W(l_1,x_1)⋯Y^g_W(l_k,x_k)Y^tw(w,x)v`,
/// where slot `k` is the twist operator. Two module fields exchange with
/// `(x_i-x_j)^{M}`; the last module field moves past the twist operator
/// into `Y_V` with `(x_k-x)^{α+M_{u,w}}` and the sign `(-1)^{|u||w|}`.
pub fn check_mixed_permutation(t: &Arc<TwistOperatorMap>, left: &[GradedVector], w: &GradedVector, v: &GradedVector, dual: &DualVector, swap: usize, hw: i64) -> Verdict {
    let k = left.len();
    if swap >= k {
        return Err(CalcError::Precondition(format!("no slot {} to exchange with", swap + 1)));
    }
    let lf: Vec<(GradedVector, Var)> = left.iter().enumerate().map(|(i, u)| (u.clone(), Var::indexed(i + 1))).collect();
    let win = Window::symmetric(k + 1, hw, 0);
    let base = t.chain(dual, &lf, w, Var::X, &[], v, hw)?;
    let (xi, ui) = (Var::indexed(swap + 1), &left[swap]);
    if swap + 1 < k {
        let xj = Var::indexed(swap + 2);
        let order = t.module.algebra.weak_commutativity_order_vec(ui, &left[swap + 1]).max(1);
        let pre = binomial(xi, xj, -1, Rational64::from_integer(order), hw);
        let mut sw = lf.clone();
        sw.swap(swap, swap + 1);
        let eps = TwistedModule::koszul(ui, &left[swap + 1]);
        let a = mul(&pre, &base)?;
        let b = mul(&pre, &t.chain(dual, &sw, w, Var::X, &[], v, hw)?)?.scale(&eps);
        return compare_series("mixed-permutation", &a, &b, &win, show);
    }
    let alpha = t.module.alpha_of_vec(ui)?;
    let order = Rational64::from_integer(t.twist_commutativity_order(ui, w).max(1));
    let eps = TwistedModule::koszul(ui, w);
    let a = mul(&binomial(xi, Var::X, -1, alpha + order, hw), &base)?;
    let moved = t.chain(dual, &lf[..k - 1], w, Var::X, &[(ui.clone(), xi)], v, hw)?;
    let b = mul(&minus_binomial(Var::X, xi, alpha + order, hw)?, &moved)?.scale(&eps);
    compare_series("mixed-permutation-twist", &a, &b, &win, show)
}
