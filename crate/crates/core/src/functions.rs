//! Square roots, `exp_p` and `log_p` on their convergence domains.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{
    expand, mod_inverse, unit_part, valuation, PadicExpansion, Prime, Rational, Valuation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SqrtReason {
    OddValuation,
    NonResidue,
    TwoAdicUnitNotOneMod8,
    Exists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SqrtVerdict {
    pub exists: bool,
    pub reason: SqrtReason,
}

impl SqrtVerdict {
    fn from_reason(reason: SqrtReason) -> Self {
        SqrtVerdict {
            exists: reason == SqrtReason::Exists,
            reason,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Exp,
    Log,
}

/// Ball on which a series converges, as a lower bound on a valuation:
/// `v(x) >= threshold` for exp, `v(x - 1) >= threshold` for log.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvergenceDomain {
    pub kind: DomainKind,
    pub threshold: i64,
}

impl ConvergenceDomain {
    pub fn exp(p: Prime) -> Self {
        ConvergenceDomain {
            kind: DomainKind::Exp,
            threshold: if p.is_two() { 2 } else { 1 },
        }
    }

    pub fn log(_p: Prime) -> Self {
        ConvergenceDomain {
            kind: DomainKind::Log,
            threshold: 1,
        }
    }

    /// Whether an element with the given valuation (of `x` for exp, of
    /// `x - 1` for log) lies in the domain.
    pub fn admits(&self, v: Valuation) -> bool {
        v >= Valuation::Finite(self.threshold)
    }
}

/// Square-root test on a unit residue known modulo `p^known` (`known >= 1`,
/// and `>= 3` for p = 2).
fn unit_is_square(p: Prime, unit: &BigUint) -> SqrtReason {
    if p.is_two() {
        let r = (unit % BigUint::from(8u32)).to_u32_digits();
        if r.first().copied().unwrap_or(0) == 1 {
            SqrtReason::Exists
        } else {
            SqrtReason::TwoAdicUnitNotOneMod8
        }
    } else {
        let pp = p.get() as u64;
        let a = u64::try_from(unit % p.as_biguint()).expect("residue below p");
        if pow_mod(a, (pp - 1) / 2, pp) == 1 {
            SqrtReason::Exists
        } else {
            SqrtReason::NonResidue
        }
    }
}

pub fn sqrt_exists(p: Prime, a: &Rational) -> Result<SqrtVerdict> {
    let (v, u) = unit_part(p, a)?;
    if v.rem_euclid(2) == 1 {
        return Ok(SqrtVerdict::from_reason(SqrtReason::OddValuation));
    }
    let unit = crate::padic::residue(&u, &p.pow(3));
    Ok(SqrtVerdict::from_reason(unit_is_square(p, &unit)))
}

/// Same test for a truncated expansion; needs one known digit (three for
/// p = 2).
pub fn sqrt_exists_expansion(x: &PadicExpansion) -> Result<SqrtVerdict> {
    let p = x.prime();
    let (Some(v), Some(n), Some(unit)) = (x.valuation().finite(), x.precision(), x.unit_residue())
    else {
        return Err(Error::ZeroInput);
    };
    if v.rem_euclid(2) == 1 {
        return Ok(SqrtVerdict::from_reason(SqrtReason::OddValuation));
    }
    if p.is_two() && n < 3 {
        return Err(Error::PrecisionExhausted(
            "2-adic square test needs three known digits".into(),
        ));
    }
    Ok(SqrtVerdict::from_reason(unit_is_square(p, unit)))
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Tonelli-Shanks square root of a quadratic residue modulo an odd prime.
fn tonelli_shanks(a: u64, p: u64) -> u64 {
    let a = a % p;
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    r
}

/// Canonical square root of a square unit known modulo `p^known`.
///
/// Returns the root modulo `p^known` for odd p, modulo `2^(known-1)` for
/// p = 2. Branch: leading digit in `1..=(p-1)/2`, or `1 mod 4` when p = 2.
fn unit_sqrt(p: Prime, unit: &BigUint, known: usize) -> (BigUint, usize) {
    if p.is_two() {
        let mut x = BigUint::one();
        for k in 3..known {
            let m = BigUint::one() << (k + 1);
            let diff = (&x * &x + &m - (unit % &m)) % &m;
            if !diff.is_zero() {
                x += BigUint::one() << (k - 1);
            }
        }
        let out = known - 1;
        let m = BigUint::one() << out;
        x %= &m;
        if out >= 2 && (&x % 4u32) == BigUint::from(3u32) {
            x = &m - x;
        }
        return (x, out);
    }
    let pp = p.get() as u64;
    let a0 = u64::try_from(unit % p.as_biguint()).expect("residue below p");
    let mut r = BigUint::from(tonelli_shanks(a0, pp));
    let mut k = 1usize;
    while k < known {
        k = (2 * k).min(known);
        let m = p.pow(k);
        let u = unit % &m;
        let f = (&r * &r + &m - u) % &m;
        let inv = mod_inverse(&((&r << 1u32) % &m), &m);
        r = (&r + &m - (f * inv) % &m) % &m;
    }
    let m = p.pow(known);
    let lead = u64::try_from(&r % p.as_biguint()).expect("digit below p");
    if lead > (pp - 1) / 2 {
        r = &m - r;
    }
    (r, known)
}

pub fn sqrt(p: Prime, a: &Rational, precision: usize) -> Result<PadicExpansion> {
    let verdict = sqrt_exists(p, a)?;
    if !verdict.exists {
        return Err(Error::NoSquareRoot(verdict.reason));
    }
    let (v, u) = unit_part(p, a)?;
    let known = if p.is_two() { precision + 1 } else { precision };
    let unit = crate::padic::residue(&u, &p.pow(known));
    let (root, n) = unit_sqrt(p, &unit, known);
    Ok(PadicExpansion::from_unit(p, v / 2, root, n))
}

/// Square root of a truncated expansion; p = 2 loses one digit.
pub fn sqrt_expansion(x: &PadicExpansion) -> Result<PadicExpansion> {
    let verdict = sqrt_exists_expansion(x)?;
    if !verdict.exists {
        return Err(Error::NoSquareRoot(verdict.reason));
    }
    let p = x.prime();
    let v = x.valuation().finite().expect("nonzero");
    let n = x.precision().expect("nonzero");
    let (root, out) = unit_sqrt(p, x.unit_residue().expect("nonzero"), n);
    Ok(PadicExpansion::from_unit(p, v / 2, root, out))
}

/// v_p(n!) by Legendre's formula.
pub fn factorial_valuation(p: Prime, n: u64) -> u64 {
    let pp = p.get() as u64;
    let mut total = 0;
    let mut q = n / pp;
    while q > 0 {
        total += q;
        q /= pp;
    }
    total
}

fn strip_prime(p: Prime, mut n: u64) -> (u64, u64) {
    let pp = p.get() as u64;
    let mut k = 0;
    while n.is_multiple_of(pp) {
        n /= pp;
        k += 1;
    }
    (k, n)
}

fn floor_log(p: Prime, n: u64) -> i64 {
    let pp = p.get() as u64;
    let mut k = 0;
    let mut x = n;
    while x >= pp {
        x /= pp;
        k += 1;
    }
    k
}

pub fn exp_p(p: Prime, x: &Rational, precision: usize) -> Result<PadicExpansion> {
    exp_expansion(&expand(p, x, precision), precision)
}

/// `exp_p(x) = sum x^n / n!` to absolute precision `min(precision, v(x) + N_x)`.
pub fn exp_expansion(x: &PadicExpansion, precision: usize) -> Result<PadicExpansion> {
    let p = x.prime();
    let domain = ConvergenceDomain::exp(p);
    if !domain.admits(x.valuation()) {
        return Err(Error::OutsideDomain {
            function: "exp_p",
            detail: format!("valuation {} below {}", x.valuation(), domain.threshold),
        });
    }
    let (Some(v), Some(nx), Some(u)) = (x.valuation().finite(), x.precision(), x.unit_residue())
    else {
        return Ok(PadicExpansion::one(p, precision));
    };
    let absolute = (precision as i64).min(v + nx as i64);
    let m = p.pow(absolute as usize);
    let slope_den = p.get() as i64 - 1;

    let mut sum = BigUint::one();
    let mut unit = BigUint::one();
    let mut term_val: i64 = 0;
    let mut n: u64 = 0;
    loop {
        n += 1;
        let lower = n as i64 * v - (n as i64 - 1) / slope_den;
        if lower >= absolute {
            break;
        }
        let (k, rest) = strip_prime(p, n);
        term_val += v - k as i64;
        unit = (unit * u * mod_inverse(&BigUint::from(rest), &m)) % &m;
        if term_val < absolute {
            sum += (&unit * p.pow(term_val as usize)) % &m;
        }
    }
    PadicExpansion::from_scaled_residue(p, 0, sum % &m, absolute)
}

pub fn log_p(p: Prime, x: &Rational, precision: usize) -> Result<PadicExpansion> {
    let y = x - Rational::one();
    if y.is_zero() {
        return Ok(PadicExpansion::zero(p));
    }
    let w = valuation(p, &y);
    let domain = ConvergenceDomain::log(p);
    if !domain.admits(w) {
        return Err(Error::OutsideDomain {
            function: "log_p",
            detail: format!("|x - 1|_p must be < 1 (valuation {w})"),
        });
    }
    log_of_one_plus(&expand(p, &y, precision), precision)
}

/// `log_p` of an expansion in `B(1, 1)`.
pub fn log_expansion(x: &PadicExpansion, precision: usize) -> Result<PadicExpansion> {
    let p = x.prime();
    let abs = x.absolute_precision().unwrap_or(0).max(1) as usize;
    let y = x.sub(&PadicExpansion::one(p, abs))?;
    let domain = ConvergenceDomain::log(p);
    if !domain.admits(y.valuation()) {
        return Err(Error::OutsideDomain {
            function: "log_p",
            detail: format!("|x - 1|_p must be < 1 (valuation {})", y.valuation()),
        });
    }
    log_of_one_plus(&y, precision)
}

/// `log_p(1 + y) = sum (-1)^{n+1} y^n / n` to absolute precision
/// `min(precision, v(y) + N_y)`.
fn log_of_one_plus(y: &PadicExpansion, precision: usize) -> Result<PadicExpansion> {
    let p = y.prime();
    let (Some(w), Some(ny), Some(u)) = (y.valuation().finite(), y.precision(), y.unit_residue())
    else {
        return Ok(PadicExpansion::zero(p));
    };
    let absolute = (precision as i64).min(w + ny as i64);
    if absolute <= w {
        return Err(Error::PrecisionExhausted(format!(
            "log_p(1 + y) has valuation {w}, target precision is {absolute}"
        )));
    }
    let m = p.pow(absolute as usize);
    let mut sum = BigUint::zero();
    let mut upow = BigUint::one();
    let mut n: u64 = 0;
    loop {
        n += 1;
        if n as i64 * w - floor_log(p, n) >= absolute {
            break;
        }
        upow = (upow * u) % &m;
        let (k, rest) = strip_prime(p, n);
        let val = n as i64 * w - k as i64;
        if val >= absolute {
            continue;
        }
        let term = (&upow * mod_inverse(&BigUint::from(rest), &m) * p.pow(val as usize)) % &m;
        if n % 2 == 1 {
            sum += term;
        } else {
            sum += &m - term;
        }
    }
    PadicExpansion::from_scaled_residue(p, 0, sum % &m, absolute)
}
