//! Closed-form expansions: binomials, formal delta functions and the
//! logarithms needed for nilpotent powers.

use super::rational::Q;
use super::scalar::Scalar;
use super::series::{int_exp, Coeff, mul, Exponent, LogLaurentSeries, Monomial, Series, Support, Var, VarSupport, Window};
use crate::error::{CalcError, Result};
use num_rational::Rational64;
use num_traits::{One, Zero};

fn is_natural(a: Exponent) -> bool {
    a.is_integer() && a >= Rational64::zero()
}

/// Reorders `(var, support, range)` triples into declared variable order and
/// returns the permutation mapping sorted positions to input positions.
fn sorted_layout(vars: &[Var]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vars.len()).collect();
    order.sort_by_key(|&i| vars[i]);
    order
}

/// Series over variables given in any order; the closure receives exponents
/// and log powers in that same order.
pub fn build(
    vars: &[Var],
    supports: Vec<VarSupport>,
    degrees: Option<Vec<Exponent>>,
    hw: i64,
    log_bound: u32,
    f: impl Fn(&[Exponent], &[u32]) -> Scalar + Send + Sync + 'static,
) -> LogLaurentSeries {
    build_with(vars, supports, degrees, hw, log_bound, false, f)
}

/// As [`build`], memoizing coefficients.
pub fn build_cached<C: Coeff>(
    vars: &[Var],
    supports: Vec<VarSupport>,
    degrees: Option<Vec<Exponent>>,
    hw: i64,
    log_bound: u32,
    f: impl Fn(&[Exponent], &[u32]) -> C + Send + Sync + 'static,
) -> Series<C> {
    build_with(vars, supports, degrees, hw, log_bound, true, f)
}

fn build_with<C: Coeff>(
    vars: &[Var],
    supports: Vec<VarSupport>,
    degrees: Option<Vec<Exponent>>,
    hw: i64,
    log_bound: u32,
    cached: bool,
    f: impl Fn(&[Exponent], &[u32]) -> C + Send + Sync + 'static,
) -> Series<C> {
    let order = sorted_layout(vars);
    let svars: Vec<Var> = order.iter().map(|&i| vars[i]).collect();
    let sup = Support::new(order.iter().map(|&i| supports[i].clone()).collect(), degrees);
    let n = vars.len();
    let mut back = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        back[i] = pos;
    }
    let g = move |m: &Monomial| {
        let e: Vec<Exponent> = back.iter().map(|&p| m.powers[p]).collect();
        let k: Vec<u32> = back.iter().map(|&p| m.log_powers[p]).collect();
        f(&e, &k)
    };
    let w = Window::symmetric(n, hw, log_bound);
    if cached {
        Series::from_fn(svars, sup, w, g)
    } else {
        Series::from_fn_uncached(svars, sup, w, g)
    }
}

/// `(x + s·y)^a` expanded in nonnegative integer powers of `y`.
pub fn binomial(x: Var, y: Var, s: i64, a: Exponent, hw: i64) -> LogLaurentSeries {
    let nat = is_natural(a);
    let sx = VarSupport::new(&[a], if nat { Some(Rational64::zero()) } else { None }, Some(a), 0);
    let sy = VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), if nat { Some(a) } else { None }, 0);
    let aq = Q::from(a);
    build(&[x, y], vec![sx, sy], Some(vec![a]), hw, 0, move |e, _| {
        let j = e[1].to_integer();
        if e[0] + e[1] != a || j < 0 {
            return Scalar::zero();
        }
        let c = Q::binomial(&aq, j as u64);
        let c = if s == -1 && j % 2 == 1 { -c } else if s == 1 || s == -1 { c } else { &c * &Q::int(s.pow(j as u32)) };
        Scalar::from_q(c)
    })
}

/// `(-x + y)^a := e^{πi a}(x - y)^a`, expanded in nonnegative powers of `y`.
pub fn minus_binomial(x: Var, y: Var, a: Exponent, hw: i64) -> Result<LogLaurentSeries> {
    let phase = Scalar::expi(a)?;
    Ok(binomial(x, y, -1, a, hw).scale(&phase))
}

/// `x0^{-1} δ((x1 + s·x2)/x0) ((x1 + s·x2)/x0)^α`: the sum over `A ∈ α + ℤ`
/// of `x0^{-A-1}(x1 + s·x2)^A`, each binomial in nonnegative powers of `x2`.
pub fn delta(x0: Var, x1: Var, x2: Var, s: i64, alpha: Exponent, hw: i64) -> LogLaurentSeries {
    let s0 = VarSupport::new(&[-alpha - Rational64::one()], None, None, 0);
    let s1 = VarSupport::new(&[alpha], None, None, 0);
    let s2 = VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), None, 0);
    build(&[x0, x1, x2], vec![s0, s1, s2], Some(vec![-Rational64::one()]), hw, 0, move |e, _| {
        let a = -e[0] - Rational64::one();
        let j = e[2].to_integer();
        if e[1] + e[2] != a || j < 0 {
            return Scalar::zero();
        }
        let c = Q::binomial(&Q::from(a), j as u64);
        Scalar::from_q(if s < 0 && j % 2 == 1 { -c } else { c })
    })
}

/// `x0^{-1} δ((-x2 + x1)/x0) ((-x2 + x1)/x0)^α`, where `(-x2 + x1)^A` is
/// `e^{πiA}(x2 - x1)^A` expanded in nonnegative powers of `x1`.
pub fn minus_delta(x0: Var, x1: Var, x2: Var, alpha: Exponent, hw: i64) -> Result<LogLaurentSeries> {
    Scalar::expi(alpha)?;
    let s0 = VarSupport::new(&[-alpha - Rational64::one()], None, None, 0);
    let s1 = VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), None, 0);
    let s2 = VarSupport::new(&[alpha], None, None, 0);
    Ok(build(&[x0, x1, x2], vec![s0, s1, s2], Some(vec![-Rational64::one()]), hw, 0, move |e, _| {
        let a = -e[0] - Rational64::one();
        let j = e[1].to_integer();
        if e[1] + e[2] != a || j < 0 {
            return Scalar::zero();
        }
        let c = Q::binomial(&Q::from(a), j as u64);
        let c = if j % 2 == 1 { -c } else { c };
        &Scalar::from_q(c) * &Scalar::expi_dyadic(a)
    }))
}

/// `x1^{-1} ∂^k/∂x2^k δ(x2/x1)`.
pub fn delta_derivative(x1: Var, x2: Var, k: u32, hw: i64) -> LogLaurentSeries {
    let s1 = VarSupport::integral();
    let s2 = VarSupport::new(&[Rational64::zero()], None, None, 0);
    build(&[x1, x2], vec![s1, s2], Some(vec![-int_exp(1 + k as i64)]), hw, 0, move |e, _| {
        // x1^{-1}δ(x2/x1) = Σ_n x2^n x1^{-n-1}; differentiate k times in x2.
        let m = e[1].to_integer();
        let n = m + k as i64;
        if e[0] != int_exp(-n - 1) {
            return Scalar::zero();
        }
        let mut c = 1i64;
        for t in 0..k as i64 {
            c *= n - t;
        }
        Scalar::int(c)
    })
}

/// `log(1 + s·y/x) = Σ_{n≥1} (-1)^{n+1} s^n y^n x^{-n} / n`.
pub fn log_one_plus(x: Var, y: Var, s: i64, hw: i64) -> LogLaurentSeries {
    let sx = VarSupport::new(&[Rational64::zero()], None, Some(-Rational64::one()), 0);
    let sy = VarSupport::new(&[Rational64::zero()], Some(Rational64::one()), None, 0);
    build(&[x, y], vec![sx, sy], Some(vec![Rational64::zero()]), hw, 0, move |e, _| {
        let n = e[1].to_integer();
        if n < 1 || e[0] != -e[1] {
            return Scalar::zero();
        }
        // (-1)^{n+1} s^n with s = ±1
        let sign = if s < 0 || n % 2 == 0 { -1 } else { 1 };
        Scalar::rational(sign, n)
    })
}

/// The single term `log x`.
pub fn log_var(x: Var, hw: i64) -> LogLaurentSeries {
    let mut s = Series::monomial(&[(x, Rational64::zero(), 1)], Scalar::one(), hw);
    s = s.with_window(Window::symmetric(1, hw, 1));
    s
}

/// `log(x + s·y) = log x + log(1 + s·y/x)`.
pub fn log_binomial(x: Var, y: Var, s: i64, hw: i64) -> LogLaurentSeries {
    log_var(x, hw).add(&log_one_plus(x, y, s, hw))
}

/// `log(-x + y) = log(x - y) + Π`.
pub fn log_minus(x: Var, y: Var, hw: i64) -> LogLaurentSeries {
    log_binomial(x, y, -1, hw).add(&Series::constant(Scalar::pi()))
}

/// `base^k / k!`.
pub fn divided_power(base: &LogLaurentSeries, k: u32) -> Result<LogLaurentSeries> {
    let mut acc = Series::constant(Scalar::one());
    for _ in 0..k {
        acc = mul(base, &acc)?;
    }
    Ok(acc.scale(&Scalar::from_q(Q::inv_factorial(k as u64))))
}

/// Scalar parts of `exp(N · log)` for a nilpotent `N`: the `k`-th entry
/// multiplies `N^k`.
pub fn nilpotent_parts(log: &LogLaurentSeries, nil_order: u32) -> Result<Vec<LogLaurentSeries>> {
    (0..nil_order).map(|k| divided_power(log, k)).collect()
}

/// `(x + s·y)^N = Σ_k (log(x + s·y))^k/k! · N^k`, truncated at nilpotency.
pub fn nilpotent_binomial(x: Var, y: Var, s: i64, nil_order: u32, hw: i64) -> Result<Vec<LogLaurentSeries>> {
    nilpotent_parts(&log_binomial(x, y, s, hw), nil_order)
}

/// `(-x + y)^N` in the minus convention.
pub fn nilpotent_minus_binomial(x: Var, y: Var, nil_order: u32, hw: i64) -> Result<Vec<LogLaurentSeries>> {
    nilpotent_parts(&log_minus(x, y, hw), nil_order)
}

/// `x^N = Σ_k (log x)^k/k! · N^k`.
pub fn nilpotent_monomial(x: Var, nil_order: u32, hw: i64) -> Result<Vec<LogLaurentSeries>> {
    nilpotent_parts(&log_var(x, hw), nil_order)
}

/// Scalar factors of `x1^{-1}δ((x2+x0)/x1)((x2+x0)/x1)^{α + N}`: entry `k`
/// is the kernel times `(log x2 + log(1 + x0/x2) - log x1)^k / k!`.
pub fn delta_ratio_parts(x1: Var, x2: Var, x0: Var, alpha: Exponent, nil_order: u32, hw: i64) -> Result<Vec<LogLaurentSeries>> {
    let kernel = delta(x1, x2, x0, 1, alpha, hw);
    let log = log_binomial(x2, x0, 1, hw).sub(&log_var(x1, hw));
    let mut out = Vec::new();
    for k in 0..nil_order {
        out.push(mul(&divided_power(&log, k)?, &kernel)?);
    }
    Ok(out)
}

/// `x^N v = Σ_k (log x)^k N^k v / k!` for an operator `N` nilpotent on `v`.
pub fn nilpotent_power<C: Coeff>(x: Var, v: &C, op: impl Fn(&C) -> C, bound: u32, hw: i64) -> Result<Series<C>> {
    let mut terms = Vec::new();
    let mut cur = v.clone();
    let mut k = 0u32;
    while !cur.is_zero() {
        if k > bound {
            return Err(CalcError::NotNilpotent(bound as usize));
        }
        terms.push(cur.scale(&Scalar::from_q(Q::inv_factorial(k as u64))));
        cur = op(&cur);
        k += 1;
    }
    let max_log = terms.len().saturating_sub(1) as u32;
    let sup = VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), Some(Rational64::zero()), max_log);
    let n = terms.len();
    Ok(build_cached(&[x], vec![sup], Some(vec![Rational64::zero()]), hw, max_log.max(1), move |e, l| {
        if e[0].is_zero() && (l[0] as usize) < n {
            terms[l[0] as usize].clone()
        } else {
            C::zero()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_calculus::series::exp;

    #[test]
    fn binomial_half_coefficients() {
        let b = binomial(Var::X1, Var::X2, -1, exp(1, 2), 4);
        let c = b.coeff_at(&[(Var::X1, exp(-3, 2), 0), (Var::X2, int_exp(2), 0)]);
        assert_eq!(c, Scalar::rational(-1, 8));
        let c = b.coeff_at(&[(Var::X1, exp(-1, 2), 0), (Var::X2, int_exp(1), 0)]);
        assert_eq!(c, Scalar::rational(-1, 2));
    }

    #[test]
    fn natural_binomial_is_polynomial() {
        let b = binomial(Var::X1, Var::X2, -1, int_exp(3), 4);
        let e = b.entries().unwrap();
        assert_eq!(e.len(), 4);
    }

    #[test]
    fn delta_at_zero_alpha() {
        let d = delta(Var::X0, Var::X1, Var::X2, -1, Rational64::zero(), 3);
        // x0^{-1}δ((x1-x2)/x0): coefficient of x0^{-3} x1 x2 is C(2,1)(-1) = -2.
        let c = d.coeff_at(&[(Var::X0, int_exp(-3), 0), (Var::X1, int_exp(1), 0), (Var::X2, int_exp(1), 0)]);
        assert_eq!(c, Scalar::int(-2));
    }

    #[test]
    fn log_series() {
        let l = log_one_plus(Var::X1, Var::X2, -1, 4);
        let c = l.coeff_at(&[(Var::X1, int_exp(-2), 0), (Var::X2, int_exp(2), 0)]);
        assert_eq!(c, Scalar::rational(-1, 2));
        let l = log_one_plus(Var::X1, Var::X2, 1, 4);
        let c = l.coeff_at(&[(Var::X1, int_exp(-2), 0), (Var::X2, int_exp(2), 0)]);
        assert_eq!(c, Scalar::rational(-1, 2));
        let c = l.coeff_at(&[(Var::X1, int_exp(-3), 0), (Var::X2, int_exp(3), 0)]);
        assert_eq!(c, Scalar::rational(1, 3));
    }
}
