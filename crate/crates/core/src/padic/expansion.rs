use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{residue, unit_part, val_uint, Prime, Rational, Valuation};
use crate::error::{Error, Result};

/// Working precision used when the caller does not ask for one.
pub const DEFAULT_PRECISION: usize = 64;

/// A truncated canonical p-adic expansion
/// `p^v * (d_0 + d_1 p + ... + d_{N-1} p^{N-1}) + O(p^{v+N})`.
///
/// The digits are held as the residue `d_0 + d_1 p + ...` modulo `p^N`.
/// The exact zero (coming from the rational 0) has no digits and infinite
/// precision.
#[derive(Clone, Debug)]
pub struct PadicExpansion {
    prime: Prime,
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Zero,
    Value {
        valuation: i64,
        unit: BigUint,
        precision: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Second operand of [`arith`]: another expansion, or an integer exponent for
/// `pow`.
#[derive(Clone, Debug)]
pub enum Operand<'a> {
    Expansion(&'a PadicExpansion),
    Exponent(i64),
}

pub fn arith(op: Option<ArithOp>, a: &PadicExpansion, b: Operand<'_>) -> Result<PadicExpansion> {
    match (op, b) {
        (Some(ArithOp::Add), Operand::Expansion(b)) => a.add(b),
        (Some(ArithOp::Sub), Operand::Expansion(b)) => a.sub(b),
        (Some(ArithOp::Mul), Operand::Expansion(b)) => a.mul(b),
        (Some(ArithOp::Div), Operand::Expansion(b)) => a.div(b),
        (None, Operand::Exponent(e)) => a.pow(e),
        _ => Err(Error::InvalidParams(
            "pow takes an integer exponent, field operations take an expansion".into(),
        )),
    }
}

pub fn expand(p: Prime, r: &Rational, precision: usize) -> PadicExpansion {
    PadicExpansion::from_rational(p, r, precision)
}

impl PadicExpansion {
    pub fn zero(prime: Prime) -> Self {
        PadicExpansion {
            prime,
            repr: Repr::Zero,
        }
    }

    pub fn one(prime: Prime, precision: usize) -> Self {
        Self::from_unit(prime, 0, BigUint::one(), precision)
    }

    pub fn from_rational(prime: Prime, r: &Rational, precision: usize) -> Self {
        assert!(precision >= 1, "precision must be at least one digit");
        match unit_part(prime, r) {
            Err(_) => Self::zero(prime),
            Ok((v, u)) => {
                let unit = residue(&u, &prime.pow(precision));
                Self::from_unit(prime, v, unit, precision)
            }
        }
    }

    pub fn from_integer(prime: Prime, n: i64, precision: usize) -> Self {
        Self::from_rational(prime, &Rational::from_integer(BigInt::from(n)), precision)
    }

    /// Builds `p^valuation * unit + O(p^{valuation+precision})`; `unit` must
    /// not be divisible by p.
    pub(crate) fn from_unit(prime: Prime, valuation: i64, unit: BigUint, precision: usize) -> Self {
        debug_assert!(precision >= 1);
        let unit = unit % prime.pow(precision);
        debug_assert!(!(&unit % prime.as_biguint()).is_zero());
        PadicExpansion {
            prime,
            repr: Repr::Value {
                valuation,
                unit,
                precision,
            },
        }
    }

    /// Value known to be `p^shift * residue` modulo `p^absolute`; strips the
    /// factors of p from the residue. Fails when no nonzero digit is known.
    pub(crate) fn from_scaled_residue(
        prime: Prime,
        shift: i64,
        residue: BigUint,
        absolute: i64,
    ) -> Result<Self> {
        let width = absolute - shift;
        if width <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "no digits known below p^{absolute}"
            )));
        }
        let residue = residue % prime.pow(width as usize);
        if residue.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "all known digits cancel; value is O({prime}^{absolute})"
            )));
        }
        let k = val_uint(prime, &residue);
        let unit = residue / prime.pow(k as usize);
        let valuation = shift + k as i64;
        Ok(Self::from_unit(
            prime,
            valuation,
            unit,
            (absolute - valuation) as usize,
        ))
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero => Valuation::Infinite,
            Repr::Value { valuation, .. } => Valuation::Finite(*valuation),
        }
    }

    /// Number of known digits; `None` for the exact zero.
    pub fn precision(&self) -> Option<usize> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Value { precision, .. } => Some(*precision),
        }
    }

    /// The value is known modulo `p^absolute_precision`; `None` for the exact
    /// zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Value {
                valuation,
                precision,
                ..
            } => Some(valuation + *precision as i64),
        }
    }

    /// The digits as a single residue modulo `p^precision`.
    pub fn unit_residue(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Value { unit, .. } => Some(unit),
        }
    }

    pub fn digits(&self) -> Vec<u32> {
        match &self.repr {
            Repr::Zero => Vec::new(),
            Repr::Value {
                unit, precision, ..
            } => {
                let p = self.prime.as_biguint();
                let mut rest = unit.clone();
                let mut out = Vec::with_capacity(*precision);
                for _ in 0..*precision {
                    let (q, r) = rest.div_rem(&p);
                    out.push(r.try_into().expect("digit fits in u32"));
                    rest = q;
                }
                out
            }
        }
    }

    /// The truncated value `p^v * sum d_j p^j` as an exact rational.
    pub fn to_rational(&self) -> Rational {
        match &self.repr {
            Repr::Zero => Rational::zero(),
            Repr::Value {
                valuation, unit, ..
            } => {
                let u = Rational::from_integer(BigInt::from_biguint(Sign::Plus, unit.clone()));
                u * super::rational::prime_power(self.prime, *valuation)
            }
        }
    }

    /// Keeps at most `precision` digits.
    pub fn truncate(&self, precision: usize) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Value {
                valuation,
                unit,
                precision: n,
            } => {
                let keep = precision.min(*n).max(1);
                Self::from_unit(self.prime, *valuation, unit.clone(), keep)
            }
        }
    }

    /// True when `r` agrees with this expansion at every known digit.
    pub fn agrees_with(&self, r: &Rational) -> bool {
        match self.precision() {
            None => r.is_zero(),
            Some(n) => *self == Self::from_rational(self.prime, r, n),
        }
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), other.prime.get()));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Value {
                valuation,
                unit,
                precision,
            } => {
                let m = self.prime.pow(*precision);
                Self::from_unit(self.prime, *valuation, &m - unit, *precision)
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let (
            Repr::Value {
                valuation: va,
                unit: ua,
                precision: na,
            },
            Repr::Value {
                valuation: vb,
                unit: ub,
                precision: nb,
            },
        ) = (&self.repr, &other.repr)
        else {
            return Ok(if self.is_zero() {
                other.clone()
            } else {
                self.clone()
            });
        };
        let absolute = (va + *na as i64).min(vb + *nb as i64);
        let base = (*va).min(*vb);
        if absolute <= base {
            return Err(Error::PrecisionExhausted(format!(
                "sum is O({}^{absolute})",
                self.prime
            )));
        }
        let p = self.prime;
        let m = p.pow((absolute - base) as usize);
        let sa = ua * p.pow((va - base) as usize);
        let sb = ub * p.pow((vb - base) as usize);
        Self::from_scaled_residue(p, base, (sa + sb) % m, absolute)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        match (&self.repr, &other.repr) {
            (
                Repr::Value {
                    valuation: va,
                    unit: ua,
                    precision: na,
                },
                Repr::Value {
                    valuation: vb,
                    unit: ub,
                    precision: nb,
                },
            ) => {
                let n = (*na).min(*nb);
                Ok(Self::from_unit(self.prime, va + vb, ua * ub, n))
            }
            _ => Ok(Self::zero(self.prime)),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero => Err(Error::DivisionByZero),
            Repr::Value {
                valuation,
                unit,
                precision,
            } => {
                let inv = mod_inverse(unit, &self.prime.pow(*precision));
                Ok(Self::from_unit(self.prime, -valuation, inv, *precision))
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let inv = other.inverse()?;
        self.mul(&inv)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        match &self.repr {
            Repr::Zero if e > 0 => Ok(self.clone()),
            Repr::Zero if e < 0 => Err(Error::DivisionByZero),
            Repr::Zero => Ok(Self::one(self.prime, DEFAULT_PRECISION)),
            Repr::Value {
                valuation,
                unit,
                precision,
            } => {
                let m = self.prime.pow(*precision);
                let base = if e < 0 {
                    mod_inverse(unit, &m)
                } else {
                    unit.clone()
                };
                let u = base.modpow(&BigUint::from(e.unsigned_abs()), &m);
                Ok(Self::from_unit(self.prime, valuation * e, u, *precision))
            }
        }
    }

    /// `p^v * (d0 + d1*p + ...) + O(p^{v+N})` with every known digit.
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }

    /// The truncated value as a single integer (or integer over a power of
    /// p), e.g. `81 + O(5^3)`.
    pub fn compact_string(&self) -> String {
        match &self.repr {
            Repr::Zero => "0".to_string(),
            Repr::Value {
                valuation,
                unit,
                precision,
            } => {
                let p = self.prime;
                let abs = valuation + *precision as i64;
                if *valuation >= 0 {
                    let n = unit * p.pow(*valuation as usize);
                    format!("{n} + O({p}^{abs})")
                } else {
                    format!("{unit}/{p}^{} + O({p}^{abs})", -valuation)
                }
            }
        }
    }
}

pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> BigUint {
    if m.is_one() {
        return BigUint::zero();
    }
    a.modinv(m).expect("units are invertible modulo p^N")
}

/// Equal when the primes and valuations match and the digits agree on the
/// overlap of the two precisions.
impl PartialEq for PadicExpansion {
    fn eq(&self, other: &Self) -> bool {
        if self.prime != other.prime {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Zero, Repr::Zero) => true,
            (
                Repr::Value {
                    valuation: va,
                    unit: ua,
                    precision: na,
                },
                Repr::Value {
                    valuation: vb,
                    unit: ub,
                    precision: nb,
                },
            ) => {
                let m = self.prime.pow((*na).min(*nb));
                va == vb && ua % &m == ub % &m
            }
            _ => false,
        }
    }
}

impl fmt::Display for PadicExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Repr::Value {
            valuation,
            precision,
            ..
        } = &self.repr
        else {
            return write!(f, "0");
        };
        let p = self.prime;
        write!(f, "{p}^{valuation} * (")?;
        for (j, d) in self.digits().iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            match j {
                0 => write!(f, "{d}")?,
                1 => write!(f, "{d}*{p}")?,
                _ => write!(f, "{d}*{p}^{j}")?,
            }
        }
        write!(f, ") + O({p}^{})", valuation + *precision as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::{int, ratio};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn expand_examples() {
        let x = expand(p(3), &int(64), 4);
        assert_eq!(x.valuation(), Valuation::Finite(0));
        assert_eq!(x.digits(), vec![1, 0, 1, 2]);

        assert!(expand(p(5), &int(0), 8).is_zero());

        let m1 = expand(p(2), &int(-1), 4);
        assert_eq!(m1.valuation(), Valuation::Finite(0));
        assert_eq!(m1.digits(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn negative_valuation() {
        let x = expand(p(5), &ratio(9, 10), 3);
        assert_eq!(x.valuation(), Valuation::Finite(-1));
        // 9/2 mod 125 = 67 = 2 + 3*5 + 2*25
        assert_eq!(x.digits(), vec![2, 3, 2]);
        assert_eq!(x.compact_string(), "67/5^1 + O(5^2)");
    }

    #[test]
    fn add_carries_into_valuation() {
        let s = expand(p(3), &int(1), 8)
            .add(&expand(p(3), &int(2), 8))
            .unwrap();
        assert_eq!(s, expand(p(3), &int(3), 8));
        assert_eq!(s.valuation(), Valuation::Finite(1));
        // one digit is consumed by the cancellation
        assert_eq!(s.precision(), Some(7));
    }

    #[test]
    fn total_cancellation_is_reported() {
        let a = expand(p(3), &int(5), 4);
        let err = a.sub(&a).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted(_)));
    }

    #[test]
    fn multiplicative_identity() {
        let x = expand(p(7), &ratio(-22, 49), 10);
        assert_eq!(x.mul(&expand(p(7), &int(1), 10)).unwrap(), x);
    }

    #[test]
    fn division_example() {
        let q = expand(p(5), &int(1), 2)
            .div(&expand(p(5), &int(2), 2))
            .unwrap();
        assert_eq!(q.unit_residue().unwrap(), &BigUint::from(13u32));
        assert_eq!(q.precision(), Some(2));
        assert_eq!(
            expand(p(5), &int(1), 2).div(&PadicExpansion::zero(p(5))),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn prime_mismatch() {
        let a = expand(p(3), &int(1), 2);
        let b = expand(p(5), &int(1), 2);
        assert_eq!(a.add(&b), Err(Error::PrimeMismatch(3, 5)));
    }

    #[test]
    fn powers() {
        let x = expand(p(3), &ratio(2, 9), 6);
        assert_eq!(x.pow(3).unwrap(), expand(p(3), &ratio(8, 729), 6));
        assert_eq!(x.pow(-2).unwrap(), expand(p(3), &ratio(81, 4), 6));
        assert_eq!(x.pow(0).unwrap(), expand(p(3), &int(1), 6));
    }

    #[test]
    fn arith_dispatch() {
        let a = expand(p(5), &int(7), 5);
        let b = expand(p(5), &int(3), 5);
        assert_eq!(
            arith(Some(ArithOp::Sub), &a, Operand::Expansion(&b)).unwrap(),
            expand(p(5), &int(4), 5)
        );
        assert_eq!(
            arith(None, &a, Operand::Exponent(2)).unwrap(),
            expand(p(5), &int(49), 5)
        );
        assert!(arith(None, &a, Operand::Expansion(&b)).is_err());
    }

    #[test]
    fn display_formats() {
        let x = expand(p(3), &int(64), 4);
        assert_eq!(x.to_string(), "3^0 * (1 + 0*3 + 1*3^2 + 2*3^3) + O(3^4)");
        assert_eq!(x.compact_string(), "64 + O(3^4)");
        let y = expand(p(3), &int(63), 2);
        assert_eq!(y.to_string(), "3^2 * (1 + 2*3) + O(3^4)");
        assert_eq!(y.compact_string(), "63 + O(3^4)");
        assert_eq!(PadicExpansion::zero(p(3)).to_string(), "0");
    }

    #[test]
    fn equality_on_overlap() {
        let a = expand(p(2), &int(-1), 4);
        let b = expand(p(2), &int(15), 4);
        let c = expand(p(2), &int(-1), 9);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_ne!(expand(p(2), &int(7), 4), b);
        assert_ne!(expand(p(2), &int(2), 4), expand(p(2), &int(1), 4));
    }
}
