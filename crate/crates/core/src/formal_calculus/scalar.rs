//! Exact coefficients: Laurent polynomials in the symbol Π = πi whose
//! coefficients lie in the cyclotomic field generated by dyadic roots of unity.
//!
//! A term is `c · Π^k · e^{πi q}` with `q` dyadic. Phases are kept in `[0, 1)`
//! by folding `e^{πi} = -1`. For dyadic `q` the powers `ζ^j`, `0 <= j < 2^s`,
//! of `ζ = e^{πi/2^s}` form a basis of `Q(ζ)` (the cyclotomic polynomial is
//! `X^{2^s} + 1`), so this folding is already a canonical form.

use super::rational::{frac, Q};
use crate::error::{CalcError, Result};
use num_rational::Rational64;
use num_traits::{One, Zero};
use std::fmt;

/// Basis element `Π^pi · e^{πi phase}`, `phase` in `[0, 1)` with power-of-two denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis {
    pub pi: i32,
    pub phase: Rational64,
}

/// Exact scalar `Σ c · Π^pi · e^{πi phase}` in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: Vec<(Basis, Q)>,
}

fn is_dyadic(q: Rational64) -> bool {
    let d = *q.denom();
    d > 0 && (d & (d - 1)) == 0
}

/// Reduce an arbitrary dyadic phase to `[0,1)`, returning the sign picked up.
fn reduce_phase(q: Rational64) -> (Rational64, bool) {
    let whole = super::rational::floor_i64(q);
    let f = frac(q);
    (f, whole.rem_euclid(2) == 1)
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { terms: Vec::new() }
    }

    pub fn one() -> Scalar {
        Scalar::from_q(Q::one())
    }

    pub fn from_q(c: Q) -> Scalar {
        Scalar::term(0, Rational64::zero(), c)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::from_q(Q::int(n))
    }

    pub fn rational(n: i64, d: i64) -> Scalar {
        Scalar::from_q(Q::new(n, d))
    }

    /// The symbol Π = πi.
    pub fn pi() -> Scalar {
        Scalar::term(1, Rational64::zero(), Q::one())
    }

    /// `Π^k` for any integer `k`.
    pub fn pi_pow(k: i32) -> Scalar {
        Scalar::term(k, Rational64::zero(), Q::one())
    }

    fn term(pi: i32, phase: Rational64, c: Q) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        debug_assert!(is_dyadic(phase));
        let (phase, flip) = reduce_phase(phase);
        let c = if flip { -c } else { c };
        Scalar { terms: vec![(Basis { pi, phase }, c)] }
    }

    /// `e^{πi q}`; `q` must have a power-of-two denominator.
    pub fn expi(q: Rational64) -> Result<Scalar> {
        if !is_dyadic(q) {
            return Err(CalcError::NonCyclotomicPhase(q.to_string()));
        }
        Ok(Scalar::term(0, q, Q::one()))
    }

    /// `e^{πi q}` for a phase already known to be dyadic.
    pub fn expi_dyadic(q: Rational64) -> Scalar {
        Scalar::expi(q).expect("dyadic phase")
    }

    /// `2^{-1/2} = (e^{πi/4} + e^{-πi/4}) / 2`.
    pub fn inv_sqrt2() -> Scalar {
        let a = Scalar::expi_dyadic(Rational64::new(1, 4));
        let b = Scalar::expi_dyadic(Rational64::new(-1, 4));
        (&a + &b).scale(&Q::new(1, 2))
    }

    /// `2^{1/2}`.
    pub fn sqrt2() -> Scalar {
        Scalar::inv_sqrt2().scale(&Q::int(2))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0].0 == Basis { pi: 0, phase: Rational64::zero() }
            && self.terms[0].1.is_one()
    }

    /// The value as a plain rational, when it is one.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(b, c)] if b.pi == 0 && b.phase.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[(Basis, Q)] {
        &self.terms
    }

    /// Largest phase denominator occurring (1 if all phases are trivial).
    pub fn phase_denominator(&self) -> i64 {
        self.terms.iter().map(|(b, _)| *b.phase.denom()).max().unwrap_or(1)
    }

    /// Checks that every phase lies in `(1/level)·Z`.
    pub fn check_level(&self, level: u32) -> Result<()> {
        for (b, _) in &self.terms {
            if (level as i64) % b.phase.denom() != 0 {
                return Err(CalcError::PhaseOutsideLevel(b.phase.to_string(), level));
            }
        }
        Ok(())
    }

    /// Whether Π occurs.
    pub fn is_pi_free(&self) -> bool {
        self.terms.iter().all(|(b, _)| b.pi == 0)
    }

    pub fn scale(&self, c: &Q) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|(b, x)| (*b, x * c)).collect() }
    }

    fn from_unsorted(mut raw: Vec<(Basis, Q)>) -> Scalar {
        raw.sort_by_key(|a| a.0);
        let mut out: Vec<(Basis, Q)> = Vec::with_capacity(raw.len());
        for (b, c) in raw {
            match out.last_mut() {
                Some((lb, lc)) if *lb == b => *lc = &*lc + &c,
                _ => out.push((b, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Scalar { terms: out }
    }

    /// Multiplicative inverse. Supported when all terms share one power of Π.
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(CalcError::NotInvertible("zero".into()));
        }
        let pi = self.terms[0].0.pi;
        if self.terms.iter().any(|(b, _)| b.pi != pi) {
            return Err(CalcError::NotInvertible(format!("{} mixes powers of Π", self)));
        }
        if let [(b, c)] = self.terms.as_slice() {
            return Ok(Scalar::term(-b.pi, -b.phase, c.recip()));
        }
        // Solve x·self = 1 in Q(ζ), ζ = e^{πi/d}, basis ζ^0..ζ^{d-1}, ζ^d = -1.
        let d = self.phase_denominator() as usize;
        let mut coeffs = vec![Q::zero(); d];
        for (b, c) in &self.terms {
            let j = (b.phase * Rational64::from_integer(d as i64)).to_integer() as usize;
            coeffs[j] = c.clone();
        }
        // Column k of the multiplication matrix is self·ζ^k.
        let mut m = vec![vec![Q::zero(); d + 1]; d];
        for k in 0..d {
            for (j, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = j + k;
                let (row, v) = if e >= d { (e - d, -c) } else { (e, c.clone()) };
                m[row][k] = &m[row][k] + &v;
            }
        }
        m[0][d] = Q::one();
        let sol = solve_dense(m, d).ok_or_else(|| CalcError::NotInvertible(self.to_string()))?;
        let mut raw = Vec::new();
        for (k, c) in sol.into_iter().enumerate() {
            if !c.is_zero() {
                raw.push((Basis { pi: -pi, phase: Rational64::new(k as i64, d as i64) }, c));
            }
        }
        Ok(Scalar::from_unsorted(raw))
    }

    /// Rendering helper: recognise `r·e^{πiq}·2^{-1/2}`.
    fn as_root2_multiple(&self) -> Option<(Q, Rational64)> {
        if self.terms.len() != 2 || !self.is_pi_free() {
            return None;
        }
        // self·√2 = c·e^{πiq} means self = c·e^{πiq}·2^{-1/2}.
        let prod = self * &Scalar::sqrt2();
        match prod.terms.as_slice() {
            [(b, c)] => Some((c.clone(), b.phase)),
            _ => None,
        }
    }
}

/// Gaussian elimination on an augmented `n x (n+1)` matrix.
pub(crate) fn solve_dense(mut m: Vec<Vec<Q>>, n: usize) -> Option<Vec<Q>> {
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for k in col..=n {
            m[col][k] = &m[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in col..=n {
                    let t = &f * &m[col][k];
                    m[r][k] = &m[r][k] - &t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl<'a> std::ops::Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (a, b) = (&self.terms[i], &rhs.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = &a.1 + &b.1;
                    if !s.is_zero() {
                        out.push((a.0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&rhs.terms[j..]);
        Scalar { terms: out }
    }
}

impl<'a> std::ops::Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> std::ops::Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = self.as_rational() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_rational() {
            return self.scale(&c);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let mut phase = a.phase + b.phase;
                let mut c = x * y;
                if phase >= Rational64::one() {
                    phase -= Rational64::one();
                    c = -c;
                }
                raw.push((Basis { pi: a.pi + b.pi, phase }, c));
            }
        }
        Scalar::from_unsorted(raw)
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(b, c)| (*b, -c)).collect() }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::ops::AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Scalar {
        Scalar::from_q(q)
    }
}

fn fmt_phase(q: Rational64) -> String {
    let (n, d) = (*q.numer(), *q.denom());
    match (n, d) {
        (n, 1) => format!("e^{{{}πi}}", n),
        (1, d) => format!("e^{{πi/{}}}", d),
        (-1, d) => format!("e^{{-πi/{}}}", d),
        (n, d) => format!("e^{{{}πi/{}}}", n, d),
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, b: &Basis, c: &Q, first: bool) -> fmt::Result {
    // A negative coefficient on a nontrivial phase is folded into the angle.
    let (c, phase) = if !b.phase.is_zero() && c.is_negative() { (-c, b.phase - Rational64::one()) } else { (c.clone(), b.phase) };
    let neg = c.is_negative();
    let mag = if neg { -&c } else { c };
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    }
    let mut parts: Vec<String> = Vec::new();
    if !phase.is_zero() {
        parts.push(fmt_phase(phase));
    }
    if !mag.is_one() || (b.pi == 0 && phase.is_zero()) {
        parts.push(mag.to_string());
    }
    match b.pi {
        0 => {}
        1 => parts.push("Π".into()),
        k => parts.push(format!("Π^{}", k)),
    }
    write!(f, "{}", parts.join("·"))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if let Some((c, phase)) = self.as_root2_multiple() {
            fmt_term(f, &Basis { pi: 0, phase }, &c, true)?;
            return write!(f, "·2^{{-1/2}}");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            fmt_term(f, b, c, i == 0)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn e_pi_i_folds_to_minus_one() {
        assert_eq!(Scalar::expi(r(1, 1)).unwrap(), Scalar::int(-1));
        assert_eq!(Scalar::expi(r(2, 1)).unwrap(), Scalar::one());
        assert_eq!(Scalar::expi(r(-1, 2)).unwrap(), -Scalar::expi(r(1, 2)).unwrap());
    }

    #[test]
    fn inv_sqrt2_squares_to_half() {
        let s = Scalar::inv_sqrt2();
        assert_eq!(&s * &s, Scalar::rational(1, 2));
        assert_eq!(&Scalar::sqrt2() * &s, Scalar::one());
    }

    #[test]
    fn i_squared() {
        let i = Scalar::expi(r(1, 2)).unwrap();
        assert_eq!(&i * &i, Scalar::int(-1));
    }

    #[test]
    fn non_dyadic_phase_rejected() {
        assert!(Scalar::expi(r(1, 3)).is_err());
    }

    #[test]
    fn inverse_of_cyclotomic() {
        let a = &Scalar::one() + &Scalar::expi(r(1, 4)).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Scalar::one());
        let b = &Scalar::pi() * &Scalar::int(2);
        assert_eq!(&b * &b.inverse().unwrap(), Scalar::one());
    }

    #[test]
    fn level_check() {
        assert!(Scalar::inv_sqrt2().check_level(8).is_ok());
        assert!(Scalar::inv_sqrt2().check_level(2).is_err());
    }

    #[test]
    fn display_root2() {
        let s = &Scalar::expi(r(-1, 2)).unwrap() * &Scalar::inv_sqrt2();
        assert_eq!(s.to_string(), "e^{-πi/2}·2^{-1/2}");
        assert_eq!(Scalar::expi(r(1, 2)).unwrap().to_string(), "e^{πi/2}");
        assert_eq!((&Scalar::pi() * &Scalar::int(-2)).to_string(), "-2·Π");
    }
}
