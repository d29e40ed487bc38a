//! Identity checkers for twisted vertex operators.

use super::TwistedModule;
use crate::error::{CalcError, Result};
use crate::formal_calculus::expand::{binomial, delta, delta_ratio_parts, minus_delta};
use crate::formal_calculus::{mul, BranchShift, Exponent, LogLaurentSeries, Scalar, Series, Var, Window};
use crate::verdict::{compare_series, mismatch, Verdict};
use crate::vosa_core::fields::{iterate_matrix_element, levels, pair_series, product_matrix_element};
use crate::vosa_core::{DualVector, GradedVector};
use num_rational::Rational64;
use num_traits::Zero;

fn show(c: &Scalar) -> String {
    c.to_string()
}

fn sign(eps: &Scalar) -> i64 {
    if eps.is_one() {
        1
    } else {
        -1
    }
}

/// `x1^{-1}δ((x2+x0)/x1)⟨w', Y_W(Y_V(((x2+x0)/x1)^{L_g} u, x0) v, x2) w⟩`.
fn iterate_term(m: &TwistedModule, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Result<(LogLaurentSeries, u32)> {
    let alpha = m.alpha_of_vec(u)?;
    let k = m.nil_order(u)?;
    let it = |u: &GradedVector| iterate_matrix_element(&m.engine, &m.algebra.engine, dual, u, v, w, (Var::X0, Var::X2), hw);
    if k <= 1 {
        return Ok((mul(&delta(Var::X1, Var::X2, Var::X0, 1, alpha, hw), &it(u))?, 0));
    }
    let parts = delta_ratio_parts(Var::X1, Var::X2, Var::X0, alpha, k, hw)?;
    let mut cur = u.clone();
    let mut terms = Vec::new();
    for p in &parts {
        terms.push(mul(p, &it(&cur))?);
        cur = m.jordan.nilpotent(&cur)?;
    }
    Ok((Series::sum(&terms), k - 1))
}

fn pair(m: &TwistedModule, dual: &DualVector, a: (&GradedVector, Var), b: (&GradedVector, Var), w: &GradedVector, hw: i64) -> LogLaurentSeries {
    product_matrix_element(&m.engine, dual, &[(a.0.clone(), a.1), (b.0.clone(), b.1)], w, hw)
}

/// The three-variable Jacobi identity for `Y^g_W`.
pub fn check_twisted_jacobi(m: &TwistedModule, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let eps = TwistedModule::koszul(u, v);
    let p1 = pair(m, dual, (u, Var::X1), (v, Var::X2), w, hw);
    let p2 = pair(m, dual, (v, Var::X2), (u, Var::X1), w, hw);
    let t1 = mul(&delta(Var::X0, Var::X1, Var::X2, -1, Rational64::zero(), hw), &p1)?;
    let t2 = mul(&minus_delta(Var::X0, Var::X1, Var::X2, Rational64::zero(), hw)?, &p2)?.scale(&eps);
    let (t3, lb) = iterate_term(m, u, v, w, dual, hw)?;
    compare_series("twisted-jacobi", &t1.sub(&t2), &t3, &Window::symmetric(3, hw, lb), show)
}

/// `(x1-x2)^M` times both orderings, with `M = M_{u,v}` from the algebra.
pub fn check_twisted_weak_commutativity(m: &TwistedModule, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let order = m.algebra.weak_commutativity_order_vec(u, v).max(1);
    let eps = TwistedModule::koszul(u, v);
    let p = binomial(Var::X1, Var::X2, -1, Rational64::from_integer(order), hw);
    let l = mul(&p, &pair(m, dual, (u, Var::X1), (v, Var::X2), w, hw))?;
    let r = mul(&p, &pair(m, dual, (v, Var::X2), (u, Var::X1), w, hw))?.scale(&eps);
    compare_series("twisted-weak-commutativity", &l, &r, &Window::symmetric(2, hw, 0), show)
}

/// The supercommutator equals the `x0`-residue of the iterate side.
pub fn check_commutator_formula(m: &TwistedModule, u: &GradedVector, v: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let eps = TwistedModule::koszul(u, v);
    let l = pair(m, dual, (u, Var::X1), (v, Var::X2), w, hw).sub(&pair(m, dual, (v, Var::X2), (u, Var::X1), w, hw).scale(&eps));
    let (t3, lb) = iterate_term(m, u, v, w, dual, hw)?;
    let r = t3.residue(Var::X0)?;
    compare_series("commutator-formula", &l, &r, &Window::symmetric(2, hw, lb), show)
}

/// `⟨w', Y(gu, x) w⟩` after `x ↦ e^{2πi}x` equals `⟨w', Y(u, x) w⟩`.
pub fn check_equivariance(m: &TwistedModule, u: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let gu = m.g.apply(u);
    let l = m.twisted_vertex_matrix_element(dual, &gu, w, hw).branch_shift(BranchShift { var: Var::X, p: 1 })?;
    let r = m.twisted_vertex_matrix_element(dual, u, w, hw);
    compare_series("equivariance", &l, &r, &Window::symmetric(1, hw, 0), show)
}

/// `d/dx Y(u,x) = Y(L(-1)u, x) = [L_W(-1), Y(u,x)]`.
pub fn check_l_minus1_derivative_w(m: &TwistedModule, u: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let win = Window::symmetric(1, hw, 0);
    let d = m.twisted_vertex_matrix_element(dual, u, w, hw).derivative(Var::X);
    let lu = m.algebra.l_minus_one(u);
    let r1 = m.twisted_vertex_matrix_element(dual, &lu, w, hw);
    if let Some(x) = compare_series("L(-1)-derivative", &d, &r1, &win, show)? {
        return Ok(Some(x));
    }
    let eng = m.engine.clone();
    let om = m.algebra.omega.clone();
    let d2 = dual.clone();
    let outer = m.vertex_series(u, w, Var::X, hw).map(false, move |c| match &om {
        Some(om) => d2.pair(&eng.mode_vec(om, Rational64::zero(), c)),
        None => Scalar::zero(),
    });
    let inner = pair_series(dual, &m.vertex_series(u, &m.l_minus_one(w), Var::X, hw));
    compare_series("L(-1)-commutator", &d, &outer.sub(&inner), &win, show)
}

/// `Y(u,x) = Y_0(x^{-N}u, x) = Σ_k (-log x)^k/k! Y_0(N^k u, x)`.
pub fn check_y0_decomposition(m: &TwistedModule, u: &GradedVector, w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let k = m.nil_order(u)?;
    let lb = k.saturating_sub(1).max(1);
    let full = m.twisted_vertex_matrix_element(dual, u, w, hw);
    let logs = crate::formal_calculus::expand::nilpotent_monomial(Var::X, k, hw)?;
    let mut cur = u.clone();
    let mut terms = Vec::new();
    for (j, l) in logs.iter().enumerate() {
        let s = if j % 2 == 1 { Scalar::int(-1) } else { Scalar::one() };
        terms.push(mul(&l.scale(&s), &m.y0_part(dual, &cur, w, hw))?);
        cur = m.jordan.nilpotent(&cur)?;
    }
    let r = Series::sum(&terms);
    // W carries no nilpotent part here, so the conjugated form reduces to the same sum
    compare_series("y0-decomposition", &full, &r, &Window::symmetric(1, hw, lb), show)
}

fn parities(vs: &[GradedVector]) -> Vec<u8> {
    vs.iter().map(|v| v.parity().unwrap_or(0)).collect()
}

/// Sign of reordering odd vectors into the order `sigma`.
pub fn koszul_sign(par: &[u8], sigma: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] && par[sigma[i]] == 1 && par[sigma[j]] == 1 {
                s = -s;
            }
        }
    }
    s
}

fn prefactor(m: &TwistedModule, vs: &[GradedVector], hw: i64) -> Result<(LogLaurentSeries, Vec<Exponent>, Vec<Vec<i64>>)> {
    let k = vs.len();
    let mut alphas = Vec::new();
    let mut p = Series::constant(Scalar::one());
    for (i, v) in vs.iter().enumerate() {
        let a = m.alpha_of_vec(v)?;
        alphas.push(a);
        p = mul(&Series::monomial(&[(Var::indexed(i + 1), a, 0)], Scalar::one(), hw), &p)?;
    }
    let mut ms = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let o = m.algebra.weak_commutativity_order_vec(&vs[i], &vs[j]).max(0);
            ms[i][j] = o;
            ms[j][i] = o;
            if o > 0 {
                p = mul(&binomial(Var::indexed(i + 1), Var::indexed(j + 1), -1, Rational64::from_integer(o), hw), &p)?;
            }
        }
    }
    Ok((p, alphas, ms))
}

fn prefactored(m: &TwistedModule, pre: &LogLaurentSeries, vs: &[GradedVector], order: &[usize], w: &GradedVector, dual: &DualVector, hw: i64) -> Result<LogLaurentSeries> {
    let fields: Vec<(GradedVector, Var)> = order.iter().map(|&i| (vs[i].clone(), Var::indexed(i + 1))).collect();
    Ok(mul(pre, &product_matrix_element(&m.engine, dual, &fields, w, hw))?.with_window(Window::symmetric(vs.len(), hw, 0)))
}

/// The prefactored product `Π x_i^{α_i} Π (x_i-x_j)^{M_ij} ⟨w', Y(v_1,x_1)⋯Y(v_k,x_k) w⟩`
/// vanishes outside the interval predicted by the gradings in every variable.
pub fn check_product_polynomiality(m: &TwistedModule, vs: &[GradedVector], w: &GradedVector, dual: &DualVector, hw: i64) -> Verdict {
    let k = vs.len();
    if k == 0 || k > 6 {
        return Err(CalcError::Precondition("between 1 and 6 fields".into()));
    }
    let (pre, alphas, ms) = prefactor(m, vs, hw)?;
    let order: Vec<usize> = (0..k).collect();
    let f = prefactored(m, &pre, vs, &order, w, dual, hw)?;
    let lw = w.max_level();
    let ld = dual.max_level();
    let mut bounds = Vec::new();
    for i in 0..k {
        let wt = *levels(&vs[i]).last().unwrap_or(&Rational64::zero());
        let others: i64 = (0..k).filter(|&j| j != i).map(|j| ms[i][j]).sum();
        bounds.push((alphas[i] - lw - wt, ld - wt + alphas[i] + Rational64::from_integer(others)));
    }
    for (mono, c) in f.entries()? {
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let e = mono.powers[i];
            if !c.is_zero() && (e < *lo || e > *hi || mono.log_powers[i] > 0) {
                return Ok(mismatch(
                    "product-polynomiality",
                    crate::formal_calculus::series::format_monomial(f.vars(), &mono),
                    c.to_string(),
                    format!("0 outside [{lo}, {hi}] in x{}", i + 1),
                ));
            }
        }
    }
    Ok(None)
}

/// The prefactored products for the identity order and for `sigma` agree up
/// to the parity sign of the reordering.
pub fn check_permutation_symmetry(m: &TwistedModule, vs: &[GradedVector], w: &GradedVector, dual: &DualVector, sigma: &[usize], hw: i64) -> Verdict {
    let k = vs.len();
    let mut sorted = sigma.to_vec();
    sorted.sort();
    if sorted != (0..k).collect::<Vec<_>>() {
        return Err(CalcError::Precondition("sigma is not a permutation".into()));
    }
    let (pre, _, _) = prefactor(m, vs, hw)?;
    let id: Vec<usize> = (0..k).collect();
    let a = prefactored(m, &pre, vs, &id, w, dual, hw)?;
    let b = prefactored(m, &pre, vs, sigma, w, dual, hw)?;
    let s = koszul_sign(&parities(vs), sigma);
    compare_series("permutation-symmetry", &a.scale(&Scalar::int(s)), &b, &Window::symmetric(k, hw, 0), show)
}

/// Sign `(-1)^{|u||v|}` as an integer.
pub fn parity_sign(u: &GradedVector, v: &GradedVector) -> i64 {
    sign(&TwistedModule::koszul(u, v))
}
