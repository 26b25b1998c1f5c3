//! Exact rational numbers.
//!
//! Values that fit in a pair of `i64` stay on a machine-word fast path; anything
//! larger is promoted to a [`BigRational`]. Every value is kept in lowest terms
//! with a positive denominator, and a value that fits the small representation is
//! never stored as a big one, so structural equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Rational {
    pub const ZERO: Rational = Rational(Repr::Small(0, 1));
    pub const ONE: Rational = Rational(Repr::Small(1, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self::from_i128(numer as i128, denom as i128)
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    pub fn zero() -> Self {
        Self::ZERO
    }

    pub fn one() -> Self {
        Self::ONE
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            )))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // `r` is assumed reduced.
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(r))),
        }
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Self::from_big(BigRational::new(numer, denom))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                Self::from_i128(*d as i128, *n as i128)
            }
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// Lossy conversion for display and summary statistics only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.numer().to_f64().unwrap_or(f64::NAN) / b.denom().to_f64().unwrap_or(f64::NAN),
        }
    }

    /// `self += a * b` without intermediate allocation on the small path.
    pub fn add_mul(&mut self, a: &Rational, b: &Rational) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if let (Repr::Small(sn, sd), Repr::Small(an, ad), Repr::Small(bn, bd)) = (&self.0, &a.0, &b.0) {
            if *sd == 1 && *ad == 1 && *bd == 1 {
                if let Some(v) = an.checked_mul(*bn).and_then(|p| p.checked_add(*sn)) {
                    self.0 = Repr::Small(v, 1);
                    return;
                }
            }
        }
        let prod = a * b;
        *self += &prod;
    }
}

fn add_impl(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            if *ad == 1 && *bd == 1 {
                if let Some(s) = an.checked_add(*bn) {
                    return Rational(Repr::Small(s, 1));
                }
            }
            if ad == bd {
                return Rational::from_i128(*an as i128 + *bn as i128, *ad as i128);
            }
            let n = *an as i128 * *bd as i128 + *bn as i128 * *ad as i128;
            let d = *ad as i128 * *bd as i128;
            Rational::from_i128(n, d)
        }
        _ => Rational::from_big(a.to_big() + b.to_big()),
    }
}

fn mul_impl(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            if *ad == 1 && *bd == 1 {
                if let Some(p) = an.checked_mul(*bn) {
                    return Rational(Repr::Small(p, 1));
                }
            }
            let n = *an as i128 * *bn as i128;
            let d = *ad as i128 * *bd as i128;
            Rational::from_i128(n, d)
        }
        _ => Rational::from_big(a.to_big() * b.to_big()),
    }
}

fn neg_impl(a: &Rational) -> Rational {
    match &a.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(m) => Rational(Repr::Small(m, *d)),
            None => Rational::from_big(-a.to_big()),
        },
        Repr::Big(b) => Rational::from_big(-(**b).clone()),
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        match i64::try_from(n) {
            Ok(v) => Rational::from_integer(v),
            Err(_) => Rational::from_big(BigRational::from_integer(BigInt::from(n))),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => an == bn && ad == bd,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => b.hash(state),
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
        impl<'b> $trait<&'b Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, |a: &Rational, b: &Rational| add_impl(a, &neg_impl(b)));
binop!(Mul, mul, mul_impl);
binop!(Div, div, |a: &Rational, b: &Rational| mul_impl(a, &b.recip()));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(self)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs);
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add_impl(self, &rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, &neg_impl(rhs));
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = mul_impl(self, rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| &acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_bigints(n, d))
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn normalizes_sign_and_gcd() {
        let r = Rational::new(6, -4);
        assert_eq!(r, Rational::new(-3, 2));
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rational::new(0, -7), Rational::ZERO);
    }

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let m = Rational::from_integer(i64::MAX);
        let s = &m + &m;
        assert_eq!(s.numer(), BigInt::from(i64::MAX) * 2);
        let back = &s - &m;
        assert_eq!(back, m);
        assert!(matches!(back.0, Repr::Small(..)));
        let neg_min = -Rational::from_integer(i64::MIN);
        assert_eq!(neg_min.numer(), -BigInt::from(i64::MIN));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("-4".parse::<Rational>().unwrap(), Rational::from_integer(-4));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(an in -1_000_000_000_000i64..1_000_000_000_000, ad in 1i64..1_000_000_000,
                                   bn in -1_000_000_000_000i64..1_000_000_000_000, bd in 1i64..1_000_000_000) {
            let (a, b) = (Rational::new(an, ad), Rational::new(bn, bd));
            let (ba, bb) = (big(an, ad), big(bn, bd));
            prop_assert_eq!((&a + &b).to_big(), &ba + &bb);
            prop_assert_eq!((&a - &b).to_big(), &ba - &bb);
            prop_assert_eq!((&a * &b).to_big(), &ba * &bb);
            if bn != 0 {
                prop_assert_eq!((&a / &b).to_big(), &ba / &bb);
            }
            prop_assert_eq!(a.cmp(&b), ba.cmp(&bb));
            let mut c = a.clone();
            c.add_mul(&b, &b);
            prop_assert_eq!(c.to_big(), &ba + &bb * &bb);
        }
    }
}
