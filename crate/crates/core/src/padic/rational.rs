use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact fraction in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// A validated prime number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2
    }

    pub fn as_biguint(self) -> BigUint {
        BigUint::from(self.0)
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// p^n as an unsigned big integer.
    pub fn pow(self, n: usize) -> BigUint {
        num_traits::pow(self.as_biguint(), n)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation: an integer, or +infinity for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Finite value, or `i64::MAX` standing in for +infinity.
    pub fn or_max(self) -> i64 {
        self.finite().unwrap_or(i64::MAX)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

/// |x|_p stored as the exponent e in p^{-e}, or the zero norm.
///
/// `Ord` follows the size of the norm, so `Zero` is the smallest element and a
/// larger exponent is a smaller norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormExponent {
    Zero,
    Power(i64),
}

impl NormExponent {
    pub fn exponent(self) -> Option<i64> {
        match self {
            NormExponent::Zero => None,
            NormExponent::Power(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, NormExponent::Zero)
    }

    pub fn from_valuation(v: Valuation) -> Self {
        match v {
            Valuation::Finite(e) => NormExponent::Power(e),
            Valuation::Infinite => NormExponent::Zero,
        }
    }

    /// Renders as `p^-e`, `1` for units and `0` for zero.
    pub fn render(self, p: Prime) -> String {
        match self {
            NormExponent::Zero => "0".to_string(),
            NormExponent::Power(0) => "1".to_string(),
            NormExponent::Power(e) => format!("{p}^{}", -e),
        }
    }
}

impl Ord for NormExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormExponent::Zero, NormExponent::Zero) => Ordering::Equal,
            (NormExponent::Zero, _) => Ordering::Less,
            (_, NormExponent::Zero) => Ordering::Greater,
            (NormExponent::Power(a), NormExponent::Power(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for NormExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Number of times p divides a nonzero integer, and the cofactor.
pub(crate) fn split_int(p: Prime, n: &BigInt) -> (u64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = p.as_bigint();
    let mut k = 0u64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        m = q;
        k += 1;
    }
    (k, m)
}

pub(crate) fn val_uint(p: Prime, n: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    let pb = p.as_biguint();
    let mut k = 0u64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

pub fn valuation(p: Prime, r: &Rational) -> Valuation {
    if r.is_zero() {
        return Valuation::Infinite;
    }
    let (a, _) = split_int(p, r.numer());
    let (b, _) = split_int(p, r.denom());
    Valuation::Finite(a as i64 - b as i64)
}

pub fn norm(p: Prime, r: &Rational) -> NormExponent {
    NormExponent::from_valuation(valuation(p, r))
}

/// Valuation of an integer-valued quantity.
pub fn valuation_int(p: Prime, n: i64) -> Valuation {
    valuation(p, &Rational::from_integer(BigInt::from(n)))
}

/// Splits a nonzero rational into p^v times a p-adic unit.
pub fn unit_part(p: Prime, r: &Rational) -> Result<(i64, Rational)> {
    if r.is_zero() {
        return Err(Error::ZeroInput);
    }
    let (a, n) = split_int(p, r.numer());
    let (b, d) = split_int(p, r.denom());
    Ok((a as i64 - b as i64, Rational::new(n, d)))
}

/// Residue in [0, modulus) of a rational whose denominator is invertible
/// modulo `modulus`.
pub(crate) fn residue(r: &Rational, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let den = r.denom().mod_floor(&m);
    let inv = den
        .modinv(&m)
        .expect("denominator must be invertible modulo p^N");
    let v = (r.numer().mod_floor(&m) * inv).mod_floor(&m);
    v.to_biguint().expect("mod_floor is non-negative")
}

/// `p^e` as an exact rational, for any integer exponent.
pub fn prime_power(p: Prime, e: i64) -> Rational {
    let mag = BigInt::from_biguint(Sign::Plus, p.pow(e.unsigned_abs() as usize));
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let digits = |x: &str| -> Result<BigInt> {
        if x.is_empty() || !x.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str(x).map_err(|_| bad())
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (digits(n)?, digits(d)?),
        None => (digits(body)?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(bad());
    }
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational square root, if there is one.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
