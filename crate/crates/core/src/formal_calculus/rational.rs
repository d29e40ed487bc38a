//! Exact rationals: a machine-word fast path that promotes to big integers
//! on overflow, so no operation ever wraps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Exact rational number.
///
/// Values that fit in `i64/i64` are always stored in the small variant, so
/// structural equality is value equality.
#[derive(Clone, Debug)]
pub enum Q {
    Small(Rational64),
    Big(Box<BigRational>),
}

impl Q {
    pub fn new(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        Q::Small(Rational64::new(n, d))
    }

    pub fn int(n: i64) -> Q {
        Q::Small(Rational64::from_integer(n))
    }

    pub fn zero() -> Q {
        Q::int(0)
    }

    pub fn one() -> Q {
        Q::int(1)
    }

    pub fn from_ratio(r: Rational64) -> Q {
        Q::Small(r)
    }

    fn from_big(b: BigRational) -> Q {
        if let (Some(n), Some(d)) = (b.numer().to_i64(), b.denom().to_i64()) {
            return Q::Small(Rational64::new_raw(n, d));
        }
        Q::Big(Box::new(b))
    }

    fn to_big(&self) -> BigRational {
        match self {
            Q::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(r) => r.is_zero(),
            Q::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(r) if r.is_one())
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(r) => r.is_negative(),
            Q::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(r) => r.is_integer(),
            Q::Big(b) => b.is_integer(),
        }
    }

    /// The value as a small rational, if it fits.
    pub fn as_small(&self) -> Option<Rational64> {
        match self {
            Q::Small(r) => Some(*r),
            Q::Big(_) => None,
        }
    }

    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "division by zero");
        match self {
            Q::Small(r) if *r.numer() != i64::MIN => Q::Small(r.recip()),
            _ => Q::from_big(self.to_big().recip()),
        }
    }

    pub fn numer_denom_strings(&self) -> (String, String) {
        match self {
            Q::Small(r) => (r.numer().to_string(), r.denom().to_string()),
            Q::Big(b) => (b.numer().to_string(), b.denom().to_string()),
        }
    }

    /// Generalized binomial coefficient `C(a, n)` for rational `a`.
    pub fn binomial(a: &Q, n: u64) -> Q {
        let mut acc = Q::one();
        for j in 0..n {
            let num = a - &Q::int(j as i64);
            acc = &(&acc * &num) / &Q::int(j as i64 + 1);
        }
        acc
    }

    /// `1/n!`
    pub fn inv_factorial(n: u64) -> Q {
        let mut acc = Q::one();
        for j in 1..=n {
            acc = &acc / &Q::int(j as i64);
        }
        acc
    }
}

impl PartialEq for Q {
    fn eq(&self, other: &Q) -> bool {
        match (self, other) {
            (Q::Small(a), Q::Small(b)) => a == b,
            (Q::Big(a), Q::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Q {}

impl Hash for Q {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Q::Small(r) => {
                0u8.hash(state);
                r.hash(state)
            }
            Q::Big(b) => {
                1u8.hash(state);
                b.hash(state)
            }
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Small(a), Q::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Q> for &'a Q {
    type Output = Q;
    fn add(self, rhs: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_add(b) {
                return Q::Small(c);
            }
        }
        Q::from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Q> for &'a Q {
    type Output = Q;
    fn sub(self, rhs: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_sub(b) {
                return Q::Small(c);
            }
        }
        Q::from_big(self.to_big() - rhs.to_big())
    }
}

impl<'a> Mul<&'a Q> for &'a Q {
    type Output = Q;
    fn mul(self, rhs: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_mul(b) {
                return Q::Small(c);
            }
        }
        Q::from_big(self.to_big() * rhs.to_big())
    }
}

impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        self * &rhs.recip()
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(r) if *r.numer() != i64::MIN => Q::Small(-*r),
            _ => Q::from_big(-self.to_big()),
        }
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        -&self
    }
}

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        *self = &*self + rhs;
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::int(n)
    }
}

impl From<Rational64> for Q {
    fn from(r: Rational64) -> Q {
        Q::Small(r)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(r) => write!(f, "{}", r),
            Q::Big(b) => write!(f, "{}", b),
        }
    }
}

impl std::str::FromStr for Q {
    type Err = String;
    fn from_str(s: &str) -> Result<Q, String> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad rational `{}`", s))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad rational `{}`", s))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{}`", s));
        }
        Ok(Q::from_big(BigRational::new(n, d)))
    }
}

/// Floor of a small rational as an integer.
pub fn floor_i64(r: Rational64) -> i64 {
    Integer::div_floor(r.numer(), r.denom())
}

/// Ceiling of a small rational as an integer.
pub fn ceil_i64(r: Rational64) -> i64 {
    -Integer::div_floor(&(-*r.numer()), r.denom())
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: Rational64) -> Rational64 {
    r - Rational64::from_integer(floor_i64(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes() {
        let big = Q::int(i64::MAX);
        let s = &big + &Q::int(1);
        assert!(matches!(s, Q::Big(_)));
        let back = &s - &Q::int(1);
        assert_eq!(back, Q::int(i64::MAX));
        assert!(matches!(back, Q::Small(_)));
    }

    #[test]
    fn binomial_half() {
        let h = Q::new(1, 2);
        assert_eq!(Q::binomial(&h, 0), Q::one());
        assert_eq!(Q::binomial(&h, 1), Q::new(1, 2));
        assert_eq!(Q::binomial(&h, 2), Q::new(-1, 8));
        assert_eq!(Q::binomial(&h, 3), Q::new(1, 16));
        assert_eq!(Q::binomial(&Q::int(-1), 5), Q::int(-1));
    }

    #[test]
    fn parse_and_floor() {
        assert_eq!("-3/6".parse::<Q>().unwrap(), Q::new(-1, 2));
        assert_eq!(floor_i64(Rational64::new(-1, 2)), -1);
        assert_eq!(ceil_i64(Rational64::new(-1, 2)), 0);
        assert_eq!(frac(Rational64::new(-1, 4)), Rational64::new(3, 4));
    }
}
