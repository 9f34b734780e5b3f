//! Exact rational scalars.
//!
//! Values that fit a reduced `i64 / i64` fraction are kept inline and combined
//! with `i128` intermediates; anything larger is promoted to a
//! [`BigRational`]. The representation is canonical (a value is `Small`
//! whenever it fits), so structural equality is value equality.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Continued-fraction walk down the Stern-Brocot tree.
fn simplest_open(lo: BigRational, hi: BigRational) -> BigRational {
    let fl = lo.floor();
    let next = &fl + BigRational::one();
    if next < hi {
        return next;
    }
    let (a, b) = (&lo - &fl, &hi - &fl);
    let tail = if a.is_zero() {
        (b.recip().floor() + BigRational::one()).recip()
    } else {
        simplest_open(b.recip(), a.recip()).recip()
    };
    fl + tail
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced, denominator > 0, both within `±i64::MAX`.
    Small(i64, i64),
    Big(BigRational),
}

/// An arbitrary-precision rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number literal `{0}`")]
pub struct ParseScalarError(pub String);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            core::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
fn fits(v: i128) -> bool {
    v >= -(i64::MAX as i128) && v <= i64::MAX as i128
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Scalar(Repr::Small(1, 1))
    }

    pub fn from_int(v: i64) -> Self {
        if v == i64::MIN {
            return Self::from_big(BigRational::from_integer(BigInt::from(v)));
        }
        Scalar(Repr::Small(v, 1))
    }

    /// `num / den`; panics when `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::from_big(BigRational::new(num, den))
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            // d > i128::MIN here because both operands came from i64 products.
            n = -n;
            d = -d;
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128);
        if g > 1 {
            n /= g as i128;
            d /= g as i128;
        }
        if fits(n) && fits(d) {
            Scalar(Repr::Small(n as i64, d as i64))
        } else {
            Scalar(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational::new already reduced; demote when possible.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN && d != i64::MIN {
                return Scalar(Repr::Small(n, d));
            }
        }
        Scalar(Repr::Big(r))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// `(numerator, denominator)` when both fit in an `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(n, d) => Some((*n, *d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small(n, _) => n.cmp(&0),
            Repr::Big(r) => {
                if r.is_positive() {
                    Ordering::Greater
                } else if r.is_negative() {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(n.div_floor(d)),
            Repr::Big(r) => r.floor().to_integer(),
        }
    }

    pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
        (a + b) * Scalar::from_ratio(1, 2)
    }

    /// The rational with the smallest denominator strictly between `lo` and
    /// `hi`. Panics unless `lo < hi`.
    pub fn simplest_between(lo: &Scalar, hi: &Scalar) -> Scalar {
        assert!(lo < hi, "empty interval");
        Scalar::from_big(simplest_open(lo.to_big(), hi.to_big()))
    }

    /// Nearest `f64`, for reporting only; never used in decisions.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => {
                let n = r.numer().to_f64().unwrap_or(f64::NAN);
                let d = r.denom().to_f64().unwrap_or(f64::NAN);
                if n.is_finite() && d.is_finite() {
                    n / d
                } else {
                    // Scale both down to keep the quotient representable.
                    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
                    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
                    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
                    n / d
                }
            }
        }
    }

    /// Bit length of numerator plus denominator; a cost proxy.
    pub fn bit_size(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => (128 - n.unsigned_abs().leading_zeros() - d.unsigned_abs().leading_zeros()) as u64,
            Repr::Big(r) => r.numer().bits() + r.denom().bits(),
        }
    }

    /// Exact `numerator/denominator` text, the persistence form.
    pub fn to_ratio_string(&self) -> String {
        match &self.0 {
            Repr::Small(n, 1) => n.to_string(),
            Repr::Small(n, d) => alloc::format!("{n}/{d}"),
            Repr::Big(r) if r.is_integer() => r.numer().to_string(),
            Repr::Big(r) => alloc::format!("{}/{}", r.numer(), r.denom()),
        }
    }

    /// Terminating decimal text if the denominator is `2^a 5^b`.
    pub fn to_decimal_string(&self) -> Option<String> {
        let num = self.numer();
        let mut den = self.denom();
        let (mut twos, mut fives) = (0u32, 0u32);
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while (&den % &two).is_zero() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        if digits == 0 {
            return Some(num.to_string());
        }
        // num / (2^twos 5^fives) == num * 2^(digits-twos) * 5^(digits-fives) / 10^digits
        let scaled = num * num_traits::pow(two, (digits - twos) as usize) * num_traits::pow(five, (digits - fives) as usize);
        let neg = scaled.sign() == Sign::Minus;
        let mut s = scaled.abs().to_string();
        let d = digits as usize;
        if s.len() <= d {
            let pad = d + 1 - s.len();
            s.insert_str(0, &"0".repeat(pad));
        }
        s.insert(s.len() - d, '.');
        if neg {
            s.insert(0, '-');
        }
        Some(s)
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `[-+]digits[.digits]`, `[-+]digits/digits`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(text.to_string());
        let t = text.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n = parse_int(n).ok_or_else(err)?;
            let d = parse_int(d).ok_or_else(err)?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Scalar::from_bigints(n, d));
        }
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) {
            return Err(err());
        }
        let mut digits = String::with_capacity(int_part.len() + frac_part.len());
        digits.push_str(int_part);
        digits.push_str(frac_part);
        let mut num: BigInt = digits.parse().map_err(|_| err())?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Scalar::from_bigints(num, den))
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ratio_string())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_decimal_string() {
            Some(s) => f.write_str(&s),
            None => f.write_str(&self.to_ratio_string()),
        }
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    let s = *a as i128 + *c as i128;
                    if fits(s) {
                        return Scalar(Repr::Small(s as i64, 1));
                    }
                    return Scalar::from_i128(s, 1);
                }
                if b == d {
                    return Scalar::from_i128(*a as i128 + *c as i128, *b as i128);
                }
                Scalar::from_i128(*a as i128 * *d as i128 + *c as i128 * *b as i128, *b as i128 * *d as i128)
            }
            _ => Scalar::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    let s = *a as i128 - *c as i128;
                    if fits(s) {
                        return Scalar(Repr::Small(s as i64, 1));
                    }
                    return Scalar::from_i128(s, 1);
                }
                if b == d {
                    return Scalar::from_i128(*a as i128 - *c as i128, *b as i128);
                }
                Scalar::from_i128(*a as i128 * *d as i128 - *c as i128 * *b as i128, *b as i128 * *d as i128)
            }
            _ => Scalar::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    let p = *a as i128 * *c as i128;
                    if fits(p) {
                        return Scalar(Repr::Small(p as i64, 1));
                    }
                    return Scalar::from_i128(p, 1);
                }
                Scalar::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Scalar::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => Scalar::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128),
            _ => Scalar::from_big(self.to_big() / rhs.to_big()),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small(a, b) => Scalar(Repr::Small(-a, *b)),
            Repr::Big(r) => Scalar::from_big(-r.clone()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<i32> for Scalar {
    fn from(v: i32) -> Self {
        Scalar::from_int(v as i64)
    }
}
