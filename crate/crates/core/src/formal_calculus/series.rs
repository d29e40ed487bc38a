//! Lazily evaluated multivariable series with rational exponents and
//! powers of logarithms.
//!
//! A series is a coefficient oracle plus a support descriptor. The descriptor
//! records, for every variable, the exponent cosets mod 1, optional exponent
//! bounds and the largest log power, together with the finite set of total
//! degrees when the series is homogeneous. Products use the descriptors to
//! reduce each coefficient to an exact finite sum, or refuse with
//! `InfiniteConvolution` when that cannot be certified.

use super::rational::{ceil_i64, floor_i64, frac, Q};
use super::scalar::Scalar;
use crate::error::{CalcError, Result};
use dashmap::DashMap;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Exponent = Rational64;

/// Hard cap on tracked log powers.
pub const MAX_LOG_POWER: u32 = 32;

pub fn exp(n: i64, d: i64) -> Exponent {
    Rational64::new(n, d)
}

pub fn int_exp(n: i64) -> Exponent {
    Rational64::from_integer(n)
}

/// A formal variable. Ordering of ids is the declared variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u8);

const VAR_NAMES: [&str; 9] = ["x", "x0", "x1", "x2", "x3", "x4", "x5", "x6", "y"];

impl Var {
    pub const X: Var = Var(0);
    pub const X0: Var = Var(1);
    pub const X1: Var = Var(2);
    pub const X2: Var = Var(3);
    pub const X3: Var = Var(4);
    pub const X4: Var = Var(5);
    pub const X5: Var = Var(6);
    pub const X6: Var = Var(7);
    pub const Y: Var = Var(8);

    pub fn name(self) -> &'static str {
        VAR_NAMES[self.0 as usize]
    }

    pub fn named(s: &str) -> Option<Var> {
        VAR_NAMES.iter().position(|n| *n == s).map(|i| Var(i as u8))
    }

    /// `x1, x2, ...` by 1-based index.
    pub fn indexed(i: usize) -> Var {
        assert!((1..=6).contains(&i));
        Var(i as u8 + 1)
    }
}

/// Coefficient types a series may carry.
pub trait Coeff: Clone + Send + Sync + fmt::Debug + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    fn neg(&self) -> Self {
        self.scale(&Scalar::int(-1))
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn same(&self, other: &Self) -> bool;
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
    fn same(&self, other: &Self) -> bool {
        self == other
    }
}

/// Exponents and log powers, aligned with the variables of a series.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub powers: SmallVec<[Exponent; 4]>,
    pub log_powers: SmallVec<[u32; 4]>,
}

impl Monomial {
    pub fn new(powers: &[Exponent], log_powers: &[u32]) -> Monomial {
        Monomial { powers: powers.iter().copied().collect(), log_powers: log_powers.iter().copied().collect() }
    }

    pub fn unit(n: usize) -> Monomial {
        Monomial { powers: smallvec::smallvec![Rational64::zero(); n], log_powers: smallvec::smallvec![0; n] }
    }

    pub fn degree(&self) -> Exponent {
        self.powers.iter().fold(Rational64::zero(), |a, b| a + b)
    }
}

/// Support data for one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSupport {
    /// Exponent classes mod 1, each in `[0, 1)`, sorted.
    pub cosets: SmallVec<[Exponent; 2]>,
    pub lo: Option<Exponent>,
    pub hi: Option<Exponent>,
    pub max_log: u32,
}

impl VarSupport {
    pub fn new(cosets: &[Exponent], lo: Option<Exponent>, hi: Option<Exponent>, max_log: u32) -> VarSupport {
        let mut c: SmallVec<[Exponent; 2]> = cosets.iter().map(|e| frac(*e)).collect();
        c.sort();
        c.dedup();
        VarSupport { cosets: c, lo, hi, max_log }
    }

    pub fn integral() -> VarSupport {
        VarSupport::new(&[Rational64::zero()], None, None, 0)
    }

    /// Support of a series that does not involve the variable.
    pub fn trivial() -> VarSupport {
        VarSupport::new(&[Rational64::zero()], Some(Rational64::zero()), Some(Rational64::zero()), 0)
    }

    pub fn in_coset(&self, e: Exponent) -> bool {
        self.cosets.binary_search(&frac(e)).is_ok()
    }

    pub fn contains(&self, e: Exponent) -> bool {
        self.in_coset(e) && self.lo.is_none_or(|l| e >= l) && self.hi.is_none_or(|h| e <= h)
    }

    fn union(&self, o: &VarSupport) -> VarSupport {
        let mut c: Vec<Exponent> = self.cosets.iter().chain(o.cosets.iter()).copied().collect();
        c.sort();
        c.dedup();
        VarSupport {
            cosets: c.into_iter().collect(),
            lo: match (self.lo, o.lo) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            },
            hi: match (self.hi, o.hi) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
            max_log: self.max_log.max(o.max_log),
        }
    }

    fn shifted(&self, by: Exponent) -> VarSupport {
        VarSupport {
            cosets: self.cosets.iter().map(|c| frac(*c + by)).collect::<SmallVec<_>>().tap_sort(),
            lo: self.lo.map(|l| l + by),
            hi: self.hi.map(|h| h + by),
            max_log: self.max_log,
        }
    }

    /// Exponents in `[lo, hi]` lying in the support, ascending.
    pub fn exponents_between(&self, lo: Exponent, hi: Exponent) -> Vec<Exponent> {
        let lo = self.lo.map_or(lo, |l| l.max(lo));
        let hi = self.hi.map_or(hi, |h| h.min(hi));
        let mut out = Vec::new();
        if lo > hi {
            return out;
        }
        for c in &self.cosets {
            let start = ceil_i64(lo - c);
            let end = floor_i64(hi - c);
            for n in start..=end {
                out.push(*c + Rational64::from_integer(n));
            }
        }
        out.sort();
        out
    }
}

trait TapSort {
    fn tap_sort(self) -> Self;
}

impl TapSort for SmallVec<[Exponent; 2]> {
    fn tap_sort(mut self) -> Self {
        self.sort();
        self.dedup();
        self
    }
}

/// Support descriptor of a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub vars: Vec<VarSupport>,
    /// Finite set of total degrees, when known.
    pub degrees: Option<Vec<Exponent>>,
}

impl Support {
    pub fn new(vars: Vec<VarSupport>, degrees: Option<Vec<Exponent>>) -> Support {
        let degrees = degrees.map(|mut d| {
            d.sort();
            d.dedup();
            d
        });
        Support { vars, degrees }
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        for (i, vs) in self.vars.iter().enumerate() {
            if m.log_powers[i] > vs.max_log || !vs.contains(m.powers[i]) {
                return false;
            }
        }
        match &self.degrees {
            Some(ds) => ds.binary_search(&m.degree()).is_ok(),
            None => true,
        }
    }
}

/// Region on which a series is enumerated, compared and serialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub ranges: Vec<(Exponent, Exponent)>,
    pub log_bound: u32,
}

impl Window {
    pub fn symmetric(nvars: usize, half_width: i64, log_bound: u32) -> Window {
        Window { ranges: vec![(int_exp(-half_width), int_exp(half_width)); nvars], log_bound }
    }
}

type Oracle<C> = dyn Fn(&Monomial) -> C + Send + Sync;

struct Node<C: Coeff> {
    vars: Vec<Var>,
    support: Support,
    window: Window,
    oracle: Arc<Oracle<C>>,
    cache: Option<Arc<DashMap<Monomial, C>>>,
}

/// A windowed, lazily memoized series with coefficients in `C`.
pub struct Series<C: Coeff> {
    node: Arc<Node<C>>,
}

impl<C: Coeff> Clone for Series<C> {
    fn clone(&self) -> Self {
        Series { node: self.node.clone() }
    }
}

/// The scalar-valued series of the formal calculus.
pub type LogLaurentSeries = Series<Scalar>;

/// A located disagreement between two series.
#[derive(Clone, Debug)]
pub struct Mismatch<C> {
    pub vars: Vec<Var>,
    pub monomial: Monomial,
    pub left: C,
    pub right: C,
}

impl<C: fmt::Debug> Mismatch<C> {
    pub fn describe_monomial(&self) -> String {
        format_monomial(&self.vars, &self.monomial)
    }
}

pub fn format_monomial(vars: &[Var], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, v) in vars.iter().enumerate() {
        let e = m.powers[i];
        if !e.is_zero() {
            if e.is_one() {
                parts.push(v.name().to_string());
            } else {
                parts.push(format!("{}^{}", v.name(), e));
            }
        }
        let k = m.log_powers[i];
        if k == 1 {
            parts.push(format!("log({})", v.name()));
        } else if k > 1 {
            parts.push(format!("log({})^{}", v.name(), k));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("·")
    }
}

fn merge_vars(a: &[Var], b: &[Var]) -> Vec<Var> {
    let mut u: Vec<Var> = a.iter().chain(b.iter()).copied().collect();
    u.sort();
    u.dedup();
    u
}

fn positions(sub: &[Var], all: &[Var]) -> Vec<Option<usize>> {
    all.iter().map(|v| sub.iter().position(|w| w == v)).collect()
}

/// Restrict a monomial over `all` to the variables of a series, returning
/// `None` when a missing variable carries a nontrivial exponent or log.
fn project(m: &Monomial, pos: &[Option<usize>], n: usize) -> Option<Monomial> {
    let mut out = Monomial::unit(n);
    for (i, p) in pos.iter().enumerate() {
        match p {
            Some(j) => {
                out.powers[*j] = m.powers[i];
                out.log_powers[*j] = m.log_powers[i];
            }
            None => {
                if !m.powers[i].is_zero() || m.log_powers[i] != 0 {
                    return None;
                }
            }
        }
    }
    Some(out)
}

impl<C: Coeff> Series<C> {
    /// Builds a memoized series from a coefficient oracle.
    pub fn from_fn(
        vars: Vec<Var>,
        support: Support,
        window: Window,
        f: impl Fn(&Monomial) -> C + Send + Sync + 'static,
    ) -> Series<C> {
        Series::build(vars, support, window, Arc::new(f), true)
    }

    /// As `from_fn`, without memoization; for cheap closed-form oracles.
    pub fn from_fn_uncached(
        vars: Vec<Var>,
        support: Support,
        window: Window,
        f: impl Fn(&Monomial) -> C + Send + Sync + 'static,
    ) -> Series<C> {
        Series::build(vars, support, window, Arc::new(f), false)
    }

    fn build(vars: Vec<Var>, support: Support, window: Window, oracle: Arc<Oracle<C>>, memo: bool) -> Series<C> {
        assert!(vars.windows(2).all(|w| w[0] < w[1]), "variables must be listed in declared order");
        assert_eq!(vars.len(), support.vars.len());
        assert_eq!(vars.len(), window.ranges.len());
        let cache = if memo { Some(Arc::new(DashMap::new())) } else { None };
        Series { node: Arc::new(Node { vars, support, window, oracle, cache }) }
    }

    pub fn zero(vars: Vec<Var>, window: Window) -> Series<C> {
        let n = vars.len();
        let sup = Support::new(vec![VarSupport::trivial(); n], Some(vec![]));
        Series::from_fn_uncached(vars, sup, window, |_| C::zero())
    }

    /// A single term `c · Π x^e (log x)^k`.
    pub fn monomial(terms: &[(Var, Exponent, u32)], c: C, half_width: i64) -> Series<C> {
        let mut t: Vec<(Var, Exponent, u32)> = terms.to_vec();
        t.sort_by_key(|x| x.0);
        let vars: Vec<Var> = t.iter().map(|x| x.0).collect();
        let target = Monomial::new(&t.iter().map(|x| x.1).collect::<Vec<_>>(), &t.iter().map(|x| x.2).collect::<Vec<_>>());
        let vs = t.iter().map(|x| VarSupport::new(&[x.1], Some(x.1), Some(x.1), x.2)).collect();
        let maxlog = t.iter().map(|x| x.2).max().unwrap_or(0);
        let sup = Support::new(vs, Some(vec![target.degree()]));
        let w = Window::symmetric(vars.len(), half_width, maxlog);
        Series::from_fn_uncached(vars, sup, w, move |m| if *m == target { c.clone() } else { C::zero() })
    }

    pub fn constant(c: C) -> Series<C> {
        Series::monomial(&[], c, 0)
    }

    pub fn vars(&self) -> &[Var] {
        &self.node.vars
    }

    pub fn support(&self) -> &Support {
        &self.node.support
    }

    pub fn window(&self) -> &Window {
        &self.node.window
    }

    pub fn var_index(&self, v: Var) -> Option<usize> {
        self.node.vars.iter().position(|w| *w == v)
    }

    /// Same coefficients, different window.
    pub fn with_window(&self, window: Window) -> Series<C> {
        assert_eq!(window.ranges.len(), self.node.vars.len());
        Series {
            node: Arc::new(Node {
                vars: self.node.vars.clone(),
                support: self.node.support.clone(),
                window,
                oracle: self.node.oracle.clone(),
                cache: self.node.cache.clone(),
            }),
        }
    }

    /// Same coefficients, support replaced by a (checked-by-caller) refinement.
    pub fn with_support(&self, support: Support) -> Series<C> {
        Series {
            node: Arc::new(Node {
                vars: self.node.vars.clone(),
                support,
                window: self.node.window.clone(),
                oracle: self.node.oracle.clone(),
                cache: self.node.cache.clone(),
            }),
        }
    }

    /// Exact coefficient of a monomial.
    pub fn coeff(&self, m: &Monomial) -> C {
        if !self.node.support.contains(m) {
            return C::zero();
        }
        match &self.node.cache {
            None => (self.node.oracle)(m),
            Some(cache) => {
                if let Some(c) = cache.get(m) {
                    return c.clone();
                }
                let c = (self.node.oracle)(m);
                cache.insert(m.clone(), c.clone());
                c
            }
        }
    }

    /// Coefficient addressed by `(variable, exponent, log power)` triples;
    /// unspecified variables get exponent 0 and no logarithm.
    pub fn coeff_at(&self, terms: &[(Var, Exponent, u32)]) -> C {
        let mut m = Monomial::unit(self.node.vars.len());
        for (v, e, k) in terms {
            match self.var_index(*v) {
                Some(i) => {
                    m.powers[i] = *e;
                    m.log_powers[i] = *k;
                }
                None => {
                    if !e.is_zero() || *k != 0 {
                        return C::zero();
                    }
                }
            }
        }
        self.coeff(&m)
    }

    /// All monomials of the window compatible with the support, in the
    /// deterministic order: variables in declared order, exponents ascending,
    /// log powers ascending.
    pub fn window_monomials(&self) -> Result<Vec<Monomial>> {
        monomial_grid(&self.node.support, &self.node.window)
    }

    /// Nonzero coefficients on the window.
    pub fn entries(&self) -> Result<Vec<(Monomial, C)>> {
        Ok(self
            .window_monomials()?
            .into_iter()
            .filter_map(|m| {
                let c = self.coeff(&m);
                if c.is_zero() {
                    None
                } else {
                    Some((m, c))
                }
            })
            .collect())
    }

    pub fn neg(&self) -> Series<C> {
        self.scale(&Scalar::int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Series<C> {
        let a = self.clone();
        let s = s.clone();
        Series::from_fn_uncached(self.node.vars.clone(), self.node.support.clone(), self.node.window.clone(), move |m| {
            a.coeff(m).scale(&s)
        })
    }

    /// Applies a linear map to every coefficient.
    pub fn map<D: Coeff>(&self, degrees_preserved: bool, f: impl Fn(&C) -> D + Send + Sync + 'static) -> Series<D> {
        let a = self.clone();
        let mut sup = self.node.support.clone();
        if !degrees_preserved {
            sup.degrees = None;
        }
        Series::from_fn(self.node.vars.clone(), sup, self.node.window.clone(), move |m| f(&a.coeff(m)))
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &Series<C>) -> Series<C> {
        let vars = merge_vars(&self.node.vars, &other.node.vars);
        let pa = positions(&self.node.vars, &vars);
        let pb = positions(&other.node.vars, &vars);
        let sa = lift_support(&self.node.support, &pa);
        let sb = lift_support(&other.node.support, &pb);
        let support = Support::new(
            sa.vars.iter().zip(sb.vars.iter()).map(|(x, y)| x.union(y)).collect(),
            match (&sa.degrees, &sb.degrees) {
                (Some(x), Some(y)) => Some(x.iter().chain(y.iter()).copied().collect()),
                _ => None,
            },
        );
        let window = merge_windows(&self.node.window, &pa, &other.node.window, &pb);
        let (a, b) = (self.clone(), other.clone());
        let (na, nb) = (self.node.vars.len(), other.node.vars.len());
        Series::from_fn_uncached(vars, support, window, move |m| {
            let x = project(m, &pa, na).map(|p| a.coeff(&p)).unwrap_or_else(C::zero);
            let y = project(m, &pb, nb).map(|p| b.coeff(&p)).unwrap_or_else(C::zero);
            x.add(&y)
        })
    }

    pub fn sub(&self, other: &Series<C>) -> Series<C> {
        self.add(&other.neg())
    }

    /// Sum of several series.
    pub fn sum(items: &[Series<C>]) -> Series<C> {
        let mut it = items.iter();
        let first = it.next().expect("non-empty sum").clone();
        it.fold(first, |acc, s| acc.add(s))
    }

    /// Multiplication by `x^e`.
    pub fn mul_monomial(&self, v: Var, e: Exponent) -> Series<C> {
        let s = self.ensure_var(v);
        let i = s.var_index(v).unwrap();
        let mut sup = s.node.support.clone();
        sup.vars[i] = sup.vars[i].shifted(e);
        sup.degrees = sup.degrees.map(|d| d.into_iter().map(|x| x + e).collect());
        let a = s.clone();
        Series::from_fn_uncached(s.node.vars.clone(), sup, s.node.window.clone(), move |m| {
            let mut p = m.clone();
            p.powers[i] -= e;
            a.coeff(&p)
        })
    }

    /// Adds a variable the series does not depend on.
    pub fn ensure_var(&self, v: Var) -> Series<C> {
        if self.var_index(v).is_some() {
            return self.clone();
        }
        let vars = merge_vars(&self.node.vars, &[v]);
        let pos = positions(&self.node.vars, &vars);
        let support = lift_support(&self.node.support, &pos);
        let mut ranges = Vec::new();
        for p in &pos {
            ranges.push(match p {
                Some(j) => self.node.window.ranges[*j],
                None => (Rational64::zero(), Rational64::zero()),
            });
        }
        let window = Window { ranges, log_bound: self.node.window.log_bound };
        let a = self.clone();
        let n = self.node.vars.len();
        Series::from_fn_uncached(vars, support, window, move |m| match project(m, &pos, n) {
            Some(p) => a.coeff(&p),
            None => C::zero(),
        })
    }

    /// `Res_v`: the coefficient of `v^{-1}`.
    pub fn residue(&self, v: Var) -> Result<Series<C>> {
        let i = match self.var_index(v) {
            Some(i) => i,
            None => {
                let n = self.node.vars.len();
                return Ok(Series::zero(self.node.vars.clone(), Window::symmetric(n, 0, 0)).with_window(self.node.window.clone()));
            }
        };
        let vs = &self.node.support.vars[i];
        if vs.max_log > 0 || vs.cosets.iter().any(|c| !c.is_zero()) {
            return Err(CalcError::NonMeromorphicVariable(v.name().to_string()));
        }
        let mut vars = self.node.vars.clone();
        vars.remove(i);
        let mut svars = self.node.support.vars.clone();
        svars.remove(i);
        let support = Support::new(svars, self.node.support.degrees.clone().map(|d| d.into_iter().map(|x| x + Rational64::one()).collect()));
        let mut ranges = self.node.window.ranges.clone();
        ranges.remove(i);
        let window = Window { ranges, log_bound: self.node.window.log_bound };
        let a = self.clone();
        Ok(Series::from_fn_uncached(vars, support, window, move |m| {
            let mut p = m.clone();
            p.powers.insert(i, -Rational64::one());
            p.log_powers.insert(i, 0);
            a.coeff(&p)
        }))
    }

    /// `x^n ↦ e^{2πi p n} x^n`, `log x ↦ log x + 2pΠ`.
    pub fn branch_shift(&self, shift: BranchShift) -> Result<Series<C>> {
        let i = match self.var_index(shift.var) {
            Some(i) => i,
            None => return Ok(self.clone()),
        };
        if shift.p == 0 {
            return Ok(self.clone());
        }
        for c in &self.node.support.vars[i].cosets {
            Scalar::expi(*c * Rational64::from_integer(2 * shift.p))?;
        }
        let p = shift.p;
        let a = self.clone();
        let maxlog = self.node.support.vars[i].max_log;
        let two_p_pi = Scalar::pi().scale(&Q::int(2 * p));
        Ok(Series::from_fn(self.node.vars.clone(), self.node.support.clone(), self.node.window.clone(), move |m| {
            let e = m.powers[i];
            let phase = Scalar::expi_dyadic(e * Rational64::from_integer(2 * p));
            let k = m.log_powers[i];
            let mut acc = C::zero();
            let mut q = m.clone();
            for kk in k..=maxlog {
                q.log_powers[i] = kk;
                let c = a.coeff(&q);
                if c.is_zero() {
                    continue;
                }
                let f = pow_scalar(&two_p_pi, kk - k).scale(&Q::binomial(&Q::int(kk as i64), (k) as u64));
                acc = acc.add(&c.scale(&f));
            }
            acc.scale(&phase)
        }))
    }

    /// Substitution `y^n ↦ e^{πi n} x^n`, `log y ↦ log x + Π`, renaming `y` to `x`.
    pub fn log_substitute(&self, y: Var, x: Var) -> Result<Series<C>> {
        let i = self.var_index(y).ok_or_else(|| CalcError::Precondition(format!("series does not involve {}", y.name())))?;
        if self.var_index(x).is_some() {
            return Err(CalcError::Precondition(format!("series already involves {}", x.name())));
        }
        for c in &self.node.support.vars[i].cosets {
            Scalar::expi(*c)?;
        }
        let mut vars = self.node.vars.clone();
        vars[i] = x;
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by_key(|&j| vars[j]);
        let new_vars: Vec<Var> = order.iter().map(|&j| vars[j]).collect();
        let support = Support::new(order.iter().map(|&j| self.node.support.vars[j].clone()).collect(), self.node.support.degrees.clone());
        let window = Window { ranges: order.iter().map(|&j| self.node.window.ranges[j]).collect(), log_bound: self.node.window.log_bound };
        let maxlog = self.node.support.vars[i].max_log;
        let a = self.clone();
        let inv: Vec<usize> = {
            let mut inv = vec![0; order.len()];
            for (new_pos, &old) in order.iter().enumerate() {
                inv[old] = new_pos;
            }
            inv
        };
        let pi = Scalar::pi();
        Ok(Series::from_fn(new_vars, support, window, move |m| {
            let mut old = Monomial::unit(inv.len());
            for (o, &np) in inv.iter().enumerate() {
                old.powers[o] = m.powers[np];
                old.log_powers[o] = m.log_powers[np];
            }
            let e = old.powers[i];
            let k = old.log_powers[i];
            let mut acc = C::zero();
            for kk in k..=maxlog {
                old.log_powers[i] = kk;
                let c = a.coeff(&old);
                if c.is_zero() {
                    continue;
                }
                let f = pow_scalar(&pi, kk - k).scale(&Q::binomial(&Q::int(kk as i64), k as u64));
                acc = acc.add(&c.scale(&f));
            }
            acc.scale(&Scalar::expi_dyadic(e))
        }))
    }

    /// `d/dx`, with `d/dx (log x)^k = k (log x)^{k-1} x^{-1}`.
    pub fn derivative(&self, v: Var) -> Series<C> {
        let i = match self.var_index(v) {
            Some(i) => i,
            None => return Series::zero(self.node.vars.clone(), self.node.window.clone()),
        };
        let mut sup = self.node.support.clone();
        sup.vars[i] = sup.vars[i].shifted(-Rational64::one());
        sup.degrees = sup.degrees.map(|d| d.into_iter().map(|x| x - Rational64::one()).collect());
        let a = self.clone();
        Series::from_fn_uncached(self.node.vars.clone(), sup, self.node.window.clone(), move |m| {
            let mut p = m.clone();
            p.powers[i] += Rational64::one();
            let e = p.powers[i];
            let mut acc = a.coeff(&p).scale(&Scalar::from_q(Q::from(e)));
            p.log_powers[i] += 1;
            let k1 = p.log_powers[i];
            let c = a.coeff(&p);
            if !c.is_zero() {
                acc = acc.add(&c.scale(&Scalar::int(k1 as i64)));
            }
            acc
        })
    }

    /// The part of log-degree zero in `v`.
    pub fn log_constant_term(&self, v: Var) -> Series<C> {
        let i = match self.var_index(v) {
            Some(i) => i,
            None => return self.clone(),
        };
        let mut sup = self.node.support.clone();
        sup.vars[i].max_log = 0;
        let a = self.clone();
        Series::from_fn_uncached(self.node.vars.clone(), sup, self.node.window.clone(), move |m| a.coeff(m))
    }

    /// `e^{x A}` applied coefficient-wise: `Σ_j x^j A^j(c)/j!`. Needs the
    /// exponents of `x` bounded below.
    pub fn exp_operator(&self, v: Var, op: impl Fn(&C) -> C + Send + Sync + 'static) -> Result<Series<C>> {
        let s = self.ensure_var(v);
        let i = s.var_index(v).unwrap();
        let lo = s.node.support.vars[i]
            .lo
            .ok_or_else(|| CalcError::InfiniteConvolution(format!("exp(x A) needs {} bounded below", v.name())))?;
        let mut sup = s.node.support.clone();
        sup.vars[i].hi = None;
        sup.degrees = None;
        let a = s.clone();
        Ok(Series::from_fn(s.node.vars.clone(), sup, s.node.window.clone(), move |m| {
            let e = m.powers[i];
            if e < lo {
                return C::zero();
            }
            let jmax = floor_i64(e - lo);
            let mut acc = C::zero();
            for j in 0..=jmax {
                let mut p = m.clone();
                p.powers[i] = e - Rational64::from_integer(j);
                let mut c = a.coeff(&p);
                if c.is_zero() {
                    continue;
                }
                for _ in 0..j {
                    c = op(&c);
                }
                acc = acc.add(&c.scale(&Scalar::from_q(Q::inv_factorial(j as u64))));
            }
            acc
        }))
    }

    /// First monomial of the window (union of both supports) where the two
    /// series differ.
    pub fn first_mismatch(&self, other: &Series<C>, window: &Window) -> Result<Option<Mismatch<C>>> {
        let vars = merge_vars(&self.node.vars, &other.node.vars);
        assert_eq!(window.ranges.len(), vars.len(), "window must cover the merged variables");
        let pa = positions(&self.node.vars, &vars);
        let pb = positions(&other.node.vars, &vars);
        let sa = lift_support(&self.node.support, &pa);
        let sb = lift_support(&other.node.support, &pb);
        let sup = Support::new(
            sa.vars.iter().zip(sb.vars.iter()).map(|(x, y)| x.union(y)).collect(),
            match (&sa.degrees, &sb.degrees) {
                (Some(x), Some(y)) => Some(x.iter().chain(y.iter()).copied().collect()),
                _ => None,
            },
        );
        let (na, nb) = (self.node.vars.len(), other.node.vars.len());
        for m in monomial_grid(&sup, window)? {
            let x = project(&m, &pa, na).map(|p| self.coeff(&p)).unwrap_or_else(C::zero);
            let y = project(&m, &pb, nb).map(|p| other.coeff(&p)).unwrap_or_else(C::zero);
            if !x.same(&y) {
                return Ok(Some(Mismatch { vars: vars.clone(), monomial: m, left: x, right: y }));
            }
        }
        Ok(None)
    }
}

/// Integer power of a scalar.
pub fn pow_scalar(s: &Scalar, k: u32) -> Scalar {
    let mut acc = Scalar::one();
    for _ in 0..k {
        acc = &acc * s;
    }
    acc
}

fn lift_support(s: &Support, pos: &[Option<usize>]) -> Support {
    Support {
        vars: pos
            .iter()
            .map(|p| match p {
                Some(j) => s.vars[*j].clone(),
                None => VarSupport::trivial(),
            })
            .collect(),
        degrees: s.degrees.clone(),
    }
}

fn merge_windows(wa: &Window, pa: &[Option<usize>], wb: &Window, pb: &[Option<usize>]) -> Window {
    let mut ranges = Vec::new();
    for (x, y) in pa.iter().zip(pb.iter()) {
        ranges.push(match (x, y) {
            (Some(i), Some(j)) => {
                let (a, b) = (wa.ranges[*i], wb.ranges[*j]);
                (a.0.max(b.0), a.1.min(b.1))
            }
            (Some(i), None) => wa.ranges[*i],
            (None, Some(j)) => wb.ranges[*j],
            (None, None) => unreachable!(),
        });
    }
    Window { ranges, log_bound: wa.log_bound.max(wb.log_bound) }
}

/// Monomials of a window compatible with a support, in deterministic order.
pub fn monomial_grid(sup: &Support, window: &Window) -> Result<Vec<Monomial>> {
    let n = sup.vars.len();
    let mut per_var: Vec<Vec<(Exponent, u32)>> = Vec::with_capacity(n);
    for (i, vs) in sup.vars.iter().enumerate() {
        if vs.max_log > window.log_bound {
            return Err(CalcError::LogBoundExceeded(window.log_bound));
        }
        let (lo, hi) = window.ranges[i];
        let mut opts = Vec::new();
        for e in vs.exponents_between(lo, hi) {
            for k in 0..=vs.max_log {
                opts.push((e, k));
            }
        }
        per_var.push(opts);
    }
    let mut out = Vec::new();
    let mut cur = Monomial::unit(n);
    fn rec(i: usize, per_var: &[Vec<(Exponent, u32)>], cur: &mut Monomial, sup: &Support, out: &mut Vec<Monomial>) {
        if i == per_var.len() {
            if let Some(ds) = &sup.degrees {
                if ds.binary_search(&cur.degree()).is_err() {
                    return;
                }
            }
            out.push(cur.clone());
            return;
        }
        for (e, k) in &per_var[i] {
            cur.powers[i] = *e;
            cur.log_powers[i] = *k;
            rec(i + 1, per_var, cur, sup, out);
        }
    }
    rec(0, &per_var, &mut cur, sup, &mut out);
    Ok(out)
}

/// How a shared variable's split is determined in a product.
#[derive(Clone, Debug)]
enum Split {
    Bounded,
    Free,
}

/// Product of two series with a bilinear coefficient pairing.
pub fn mul_with<A: Coeff, B: Coeff, C: Coeff>(
    a: &Series<A>,
    b: &Series<B>,
    f: impl Fn(&A, &B) -> C + Send + Sync + 'static,
) -> Result<Series<C>> {
    let vars = merge_vars(a.vars(), b.vars());
    let pa = positions(a.vars(), &vars);
    let pb = positions(b.vars(), &vars);
    let sa = a.support().clone();
    let sb = b.support().clone();
    let mut splits: Vec<Option<Split>> = Vec::new();
    let mut free: Option<usize> = None;
    for (u, (x, y)) in pa.iter().zip(pb.iter()).enumerate() {
        match (x, y) {
            (Some(i), Some(j)) => {
                let (va, vb) = (&sa.vars[*i], &sb.vars[*j]);
                let below = va.lo.is_some() || vb.hi.is_some();
                let above = va.hi.is_some() || vb.lo.is_some();
                if below && above {
                    splits.push(Some(Split::Bounded));
                } else {
                    if let Some(f) = free {
                        return Err(CalcError::InfiniteConvolution(format!(
                            "variables {} and {} are both unbounded in the product",
                            vars[f].name(),
                            vars[u].name()
                        )));
                    }
                    free = Some(u);
                    splits.push(Some(Split::Free));
                }
            }
            _ => splits.push(None),
        }
    }
    let free_side = match free {
        None => None,
        Some(u) => {
            if sa.degrees.is_some() {
                Some((u, true))
            } else if sb.degrees.is_some() {
                Some((u, false))
            } else {
                return Err(CalcError::InfiniteConvolution(format!(
                    "variable {} is unbounded and neither factor is homogeneous",
                    vars[u].name()
                )));
            }
        }
    };
    // Support of the product.
    let mut svars = Vec::new();
    for (x, y) in pa.iter().zip(pb.iter()) {
        svars.push(match (x, y) {
            (Some(i), Some(j)) => {
                let (va, vb) = (&sa.vars[*i], &sb.vars[*j]);
                let mut cos = Vec::new();
                for c in &va.cosets {
                    for d in &vb.cosets {
                        cos.push(*c + *d);
                    }
                }
                VarSupport::new(
                    &cos,
                    match (va.lo, vb.lo) {
                        (Some(p), Some(q)) => Some(p + q),
                        _ => None,
                    },
                    match (va.hi, vb.hi) {
                        (Some(p), Some(q)) => Some(p + q),
                        _ => None,
                    },
                    va.max_log + vb.max_log,
                )
            }
            (Some(i), None) => sa.vars[*i].clone(),
            (None, Some(j)) => sb.vars[*j].clone(),
            (None, None) => unreachable!(),
        });
    }
    let degrees = match (&sa.degrees, &sb.degrees) {
        (Some(x), Some(y)) => Some(x.iter().flat_map(|p| y.iter().map(move |q| *p + *q)).collect()),
        _ => None,
    };
    let support = Support::new(svars, degrees);
    let mut window = merge_windows(a.window(), &pa, b.window(), &pb);
    let needed = support.vars.iter().map(|v| v.max_log).max().unwrap_or(0);
    if needed > MAX_LOG_POWER {
        return Err(CalcError::LogBoundExceeded(MAX_LOG_POWER));
    }
    window.log_bound = window.log_bound.max(needed);
    let (a, b) = (a.clone(), b.clone());
    let (na, nb) = (a.vars().len(), b.vars().len());
    Ok(Series::from_fn(vars, support, window, move |m| {
        let mut acc = C::zero();
        let mut ma = Monomial::unit(na);
        let mut mb = Monomial::unit(nb);
        let mut bounded: Vec<(usize, Vec<Exponent>)> = Vec::new();
        for (u, s) in splits.iter().enumerate() {
            let e = m.powers[u];
            match (s, pa[u], pb[u]) {
                (None, Some(i), None) => ma.powers[i] = e,
                (None, None, Some(j)) => mb.powers[j] = e,
                (Some(Split::Bounded), Some(i), Some(j)) => {
                    let (va, vb) = (&sa.vars[i], &sb.vars[j]);
                    let lo = match (va.lo, vb.hi) {
                        (Some(x), Some(y)) => x.max(e - y),
                        (Some(x), None) => x,
                        (None, Some(y)) => e - y,
                        _ => unreachable!(),
                    };
                    let hi = match (va.hi, vb.lo) {
                        (Some(x), Some(y)) => x.min(e - y),
                        (Some(x), None) => x,
                        (None, Some(y)) => e - y,
                        _ => unreachable!(),
                    };
                    let cands: Vec<Exponent> =
                        va.exponents_between(lo, hi).into_iter().filter(|p| vb.contains(e - *p)).collect();
                    if cands.is_empty() {
                        return acc;
                    }
                    bounded.push((u, cands));
                }
                _ => {}
            }
        }
        // Enumerate bounded splits.
        let mut idx = vec![0usize; bounded.len()];
        loop {
            for (t, (u, cands)) in bounded.iter().enumerate() {
                let p = cands[idx[t]];
                ma.powers[pa[*u].unwrap()] = p;
                mb.powers[pb[*u].unwrap()] = m.powers[*u] - p;
            }
            let mut assignments: SmallVec<[(Exponent, Exponent); 2]> = SmallVec::new();
            match free_side {
                None => assignments.push((Rational64::zero(), Rational64::zero())),
                Some((u, on_a)) => {
                    let (i, j) = (pa[u].unwrap(), pb[u].unwrap());
                    let e = m.powers[u];
                    if on_a {
                        let rest: Exponent = ma.powers.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, x)| *x).sum();
                        for d in sa.degrees.as_ref().unwrap() {
                            let p = *d - rest;
                            assignments.push((p, e - p));
                        }
                    } else {
                        let rest: Exponent = mb.powers.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).sum();
                        for d in sb.degrees.as_ref().unwrap() {
                            let q = *d - rest;
                            assignments.push((e - q, q));
                        }
                    }
                }
            }
            for (p, q) in assignments {
                if let Some((u, _)) = free_side {
                    ma.powers[pa[u].unwrap()] = p;
                    mb.powers[pb[u].unwrap()] = q;
                }
                accumulate_logs(&m.log_powers, &pa, &pb, &mut ma, &mut mb, 0, &a, &b, &f, &mut acc);
            }
            // Advance the odometer.
            let mut t = 0;
            loop {
                if t == bounded.len() {
                    return acc;
                }
                idx[t] += 1;
                if idx[t] < bounded[t].1.len() {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
        }
    }))
}

#[allow(clippy::too_many_arguments)]
fn accumulate_logs<A: Coeff, B: Coeff, C: Coeff>(
    logs: &[u32],
    pa: &[Option<usize>],
    pb: &[Option<usize>],
    ma: &mut Monomial,
    mb: &mut Monomial,
    u: usize,
    a: &Series<A>,
    b: &Series<B>,
    f: &impl Fn(&A, &B) -> C,
    acc: &mut C,
) {
    if u == logs.len() {
        if !a.support().contains(ma) || !b.support().contains(mb) {
            return;
        }
        let x = a.coeff(ma);
        if x.is_zero() {
            return;
        }
        let y = b.coeff(mb);
        if y.is_zero() {
            return;
        }
        *acc = acc.add(&f(&x, &y));
        return;
    }
    let k = logs[u];
    match (pa[u], pb[u]) {
        (Some(i), None) => {
            ma.log_powers[i] = k;
            accumulate_logs(logs, pa, pb, ma, mb, u + 1, a, b, f, acc);
        }
        (None, Some(j)) => {
            mb.log_powers[j] = k;
            accumulate_logs(logs, pa, pb, ma, mb, u + 1, a, b, f, acc);
        }
        (Some(i), Some(j)) => {
            let amax = a.support().vars[i].max_log;
            let bmax = b.support().vars[j].max_log;
            for ka in 0..=k.min(amax) {
                let kb = k - ka;
                if kb > bmax {
                    continue;
                }
                ma.log_powers[i] = ka;
                mb.log_powers[j] = kb;
                accumulate_logs(logs, pa, pb, ma, mb, u + 1, a, b, f, acc);
            }
        }
        (None, None) => unreachable!(),
    }
}

/// Product of a scalar series with a series of any coefficient type.
pub fn mul<C: Coeff>(a: &LogLaurentSeries, b: &Series<C>) -> Result<Series<C>> {
    mul_with(a, b, |s, c| c.scale(s))
}

/// A formal branch shift `x ↦ e^{2πi p} x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchShift {
    pub var: Var,
    pub p: i64,
}

impl LogLaurentSeries {
    /// Deterministic text rendering of the window entries.
    pub fn pretty(&self) -> Result<String> {
        let entries = self.entries()?;
        if entries.is_empty() {
            return Ok("0".to_string());
        }
        let mut out = String::new();
        for (i, (m, c)) in entries.iter().enumerate() {
            let cs = c.to_string();
            let mono = format_monomial(self.vars(), m);
            let multi = c.terms().len() > 1;
            let body = match (cs.as_str(), mono.as_str()) {
                (_, "1") => {
                    if multi {
                        format!("({})", cs)
                    } else {
                        cs.clone()
                    }
                }
                ("1", _) => mono.clone(),
                ("-1", _) => format!("-{}", mono),
                _ => {
                    if multi {
                        format!("({})·{}", cs, mono)
                    } else {
                        format!("{}·{}", cs, mono)
                    }
                }
            };
            if i == 0 {
                out.push_str(&body);
            } else if let Some(stripped) = body.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(&body);
            }
        }
        Ok(out)
    }

    /// JSON table of the window entries.
    pub fn to_table(&self) -> Result<SeriesTable> {
        let names: Vec<String> = self.vars().iter().map(|v| v.name().to_string()).collect();
        let window = WindowJson {
            ranges: self
                .vars()
                .iter()
                .zip(self.window().ranges.iter())
                .map(|(v, (lo, hi))| (v.name().to_string(), [lo.to_string(), hi.to_string()]))
                .collect(),
            log_bound: self.window().log_bound,
        };
        let mut entries = Vec::new();
        for (m, c) in self.entries()? {
            entries.push(EntryJson {
                powers: self.vars().iter().zip(m.powers.iter()).map(|(v, e)| (v.name().to_string(), e.to_string())).collect(),
                log_powers: self.vars().iter().zip(m.log_powers.iter()).map(|(v, k)| (v.name().to_string(), *k)).collect(),
                scalar: ScalarJson::from(&c),
            });
        }
        Ok(SeriesTable { variables: names, window, entries })
    }
}

/// JSON form of a scalar: its canonical terms and a rendering.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalarJson {
    pub text: String,
    pub terms: Vec<ScalarTermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalarTermJson {
    pub pi_power: i32,
    pub phase: String,
    pub coeff: String,
}

impl From<&Scalar> for ScalarJson {
    fn from(s: &Scalar) -> ScalarJson {
        ScalarJson {
            text: s.to_string(),
            terms: s
                .terms()
                .iter()
                .map(|(b, c)| ScalarTermJson { pi_power: b.pi, phase: b.phase.to_string(), coeff: c.to_string() })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WindowJson {
    pub ranges: BTreeMap<String, [String; 2]>,
    pub log_bound: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EntryJson {
    pub powers: BTreeMap<String, String>,
    pub log_powers: BTreeMap<String, u32>,
    pub scalar: ScalarJson,
}

/// Serialized coefficient table of a windowed series.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesTable {
    pub variables: Vec<String>,
    pub window: WindowJson,
    pub entries: Vec<EntryJson>,
}
