//! Translation-invariant boundary fields for the q-state Potts model: the
//! recursion, the reduced map `f_m`, its quadratic and membership in `E_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::functions::{exp_p, sqrt, sqrt_exists, sqrt_exists_expansion, sqrt_expansion};
use crate::padic::{
    expand, int, rational_sqrt, render_rational, unit_part, valuation, PadicExpansion, Prime,
    Rational, Valuation,
};

/// Smallest admissible valuation of `z - 1` for `z` in `E_p`.
pub fn ep_threshold(p: Prime) -> i64 {
    if p.is_two() {
        2
    } else {
        1
    }
}

pub fn in_ep(p: Prime, z: &Rational) -> Result<bool> {
    if z.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(valuation(p, &(z - Rational::one())) >= Valuation::Finite(ep_threshold(p)))
}

pub fn in_ep_expansion(z: &PadicExpansion) -> Result<bool> {
    if z.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = z.prime();
    let t = ep_threshold(p);
    let abs = z.absolute_precision().unwrap_or(i64::MAX);
    let one = PadicExpansion::one(p, abs.max(1) as usize);
    match z.sub(&one) {
        Ok(d) => match d.valuation() {
            Valuation::Finite(v) if v < t && abs <= t => Err(undecided(abs, t)),
            v => Ok(v >= Valuation::Finite(t)),
        },
        Err(Error::PrecisionExhausted(_)) if abs >= t => Ok(true),
        Err(Error::PrecisionExhausted(_)) => Err(undecided(abs, t)),
        Err(e) => Err(e),
    }
}

fn undecided(abs: i64, t: i64) -> Error {
    Error::PrecisionExhausted(format!(
        "membership needs z - 1 modulo p^{t}, only p^{abs} is known"
    ))
}

/// The coupling parameter `theta = exp_p(J)`.
#[derive(Clone, Debug)]
pub enum Theta {
    Exact(Rational),
    /// Given through J; the value is a truncated expansion.
    Coupling {
        j: Rational,
        value: PadicExpansion,
    },
}

#[derive(Clone, Debug)]
pub struct ModelParams {
    pub p: Prime,
    pub q: u32,
    pub k: u32,
    pub theta: Theta,
}

impl ModelParams {
    /// Validated parameters; `theta` must lie in `E_p`.
    pub fn new(p: Prime, q: u32, k: u32, theta: Rational) -> Result<Self> {
        Self::with_domain_check(p, q, k, theta, true)
    }

    pub fn with_domain_check(
        p: Prime,
        q: u32,
        k: u32,
        theta: Rational,
        enforce: bool,
    ) -> Result<Self> {
        check_shape(q, k)?;
        if theta.is_zero() {
            return Err(Error::InvalidParams("theta must be nonzero".into()));
        }
        if enforce && !in_ep(p, &theta)? {
            return Err(Error::ThetaOutOfDomain {
                p: p.get(),
                theta: render_rational(&theta),
                valuation: valuation(p, &(&theta - Rational::one())).to_string(),
                required: ep_threshold(p),
            });
        }
        Ok(ModelParams {
            p,
            q,
            k,
            theta: Theta::Exact(theta),
        })
    }

    /// Parameters with `theta = exp_p(j)` computed to `precision` digits.
    /// `j = 0` gives the exact value 1.
    pub fn from_coupling(p: Prime, q: u32, k: u32, j: Rational, precision: usize) -> Result<Self> {
        check_shape(q, k)?;
        if j.is_zero() {
            return Ok(ModelParams {
                p,
                q,
                k,
                theta: Theta::Exact(Rational::one()),
            });
        }
        let value = exp_p(p, &j, precision)?;
        Ok(ModelParams {
            p,
            q,
            k,
            theta: Theta::Coupling { j, value },
        })
    }

    pub fn theta_exact(&self) -> Result<&Rational> {
        match &self.theta {
            Theta::Exact(t) => Ok(t),
            Theta::Coupling { .. } => Err(Error::InvalidParams(
                "this operation needs an exact rational theta".into(),
            )),
        }
    }

    /// `theta` as an expansion with `precision` digits (exact inputs are
    /// expanded, coupling inputs keep their own precision).
    pub fn theta_expansion(&self, precision: usize) -> PadicExpansion {
        match &self.theta {
            Theta::Exact(t) => expand(self.p, t, precision),
            Theta::Coupling { value, .. } => value.clone(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(&self.theta, Theta::Exact(t) if t.is_one())
    }

    pub fn theta_label(&self) -> String {
        match &self.theta {
            Theta::Exact(t) => render_rational(t),
            Theta::Coupling { j, value } => {
                format!(
                    "exp_{}({}) = {}",
                    self.p,
                    render_rational(j),
                    value.compact_string()
                )
            }
        }
    }

    pub fn check_m(&self, m: u32) -> Result<()> {
        if m == 0 || m >= self.q {
            return Err(Error::InvalidM { m, max: self.q - 1 });
        }
        Ok(())
    }
}

fn check_shape(q: u32, k: u32) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidParams(format!(
            "q must be at least 2, got {q}"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    Ok(())
}

/// The vector `(z_1, ..., z_{q-1})`, with `z_q` normalised to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryField(Vec<Rational>);

impl BoundaryField {
    pub fn new(q: u32, z: Vec<Rational>) -> Result<Self> {
        if z.len() + 1 != q as usize {
            return Err(Error::InvalidParams(format!(
                "expected {} components, got {}",
                q - 1,
                z.len()
            )));
        }
        if z.iter().any(Zero::is_zero) {
            return Err(Error::InvalidParams("components must be nonzero".into()));
        }
        Ok(BoundaryField(z))
    }

    pub fn ones(q: u32) -> Self {
        BoundaryField(vec![Rational::one(); q as usize - 1])
    }

    /// `z` on the first `m` components and 1 elsewhere.
    pub fn pattern(q: u32, m: u32, z: &Rational) -> Result<Self> {
        let v = (1..q)
            .map(|i| if i <= m { z.clone() } else { Rational::one() })
            .collect();
        Self::new(q, v)
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }
}

fn pow_k(x: Rational, k: u32) -> Rational {
    num_traits::pow(x, k as usize)
}

/// `f_m(z) = (((theta + m - 1) z + q - m) / (m z + q - m - 1 + theta))^k`.
pub fn f_m_eval(params: &ModelParams, m: u32, z: &Rational) -> Result<Rational> {
    params.check_m(m)?;
    let theta = params.theta_exact()?;
    let (q, m) = (int(params.q as i64), int(m as i64));
    let num = (theta + &m - Rational::one()) * z + &q - &m;
    let den = &m * z + &q - &m - Rational::one() + theta;
    if den.is_zero() {
        return Err(Error::PoleAtInput);
    }
    Ok(pow_k(num / den, params.k))
}

/// Right-hand side of the fixed-point system for a TI boundary field.
pub fn recursion_rhs(params: &ModelParams, z: &BoundaryField) -> Result<BoundaryField> {
    let theta = params.theta_exact()?;
    if z.0.len() + 1 != params.q as usize {
        return Err(Error::InvalidParams("field length must be q - 1".into()));
    }
    let sum: Rational = z.0.iter().sum();
    let den = theta + &sum;
    if den.is_zero() {
        return Err(Error::PoleAtInput);
    }
    let tm1 = theta - Rational::one();
    let out =
        z.0.iter()
            .map(|zi| pow_k((&tm1 * zi + &sum + Rational::one()) / &den, params.k))
            .collect();
    Ok(BoundaryField(out))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointReport {
    pub is_fixed: bool,
    pub in_ep: Vec<bool>,
    pub rhs: BoundaryField,
}

impl FixedPointReport {
    pub fn accepted(&self) -> bool {
        self.is_fixed && self.in_ep.iter().all(|&b| b)
    }
}

pub fn verify_fixed_point(params: &ModelParams, z: &BoundaryField) -> Result<FixedPointReport> {
    let rhs = recursion_rhs(params, z)?;
    let in_ep =
        z.0.iter()
            .map(|zi| in_ep(params.p, zi))
            .collect::<Result<Vec<_>>>()?;
    Ok(FixedPointReport {
        is_fixed: rhs == *z,
        in_ep,
        rhs,
    })
}

/// `a2 z^2 + a1 z + a0 = 0`, the fixed-point equation of `f_m` divided by
/// `z - 1` (k = 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticKV {
    pub a2: Rational,
    pub a1: Rational,
    pub a0: Rational,
    pub d: Rational,
}

impl QuadraticKV {
    pub fn eval(&self, z: &Rational) -> Rational {
        &self.a2 * z * z + &self.a1 * z + &self.a0
    }

    pub fn discriminant(&self) -> Rational {
        &self.a1 * &self.a1 - int(4) * &self.a2 * &self.a0
    }
}

pub fn kv_coeffs(params: &ModelParams, m: u32) -> Result<QuadraticKV> {
    params.check_m(m)?;
    let theta = params.theta_exact()?;
    Ok(kv_from(theta, params.q, m))
}

fn kv_from(theta: &Rational, q: u32, m: u32) -> QuadraticKV {
    let (q, m) = (int(q as i64), int(m as i64));
    let t2 = {
        let t = theta - Rational::one();
        &t * &t
    };
    let qm = &q - &m;
    QuadraticKV {
        a2: &m * &m,
        a1: int(2) * &m * &qm - &t2,
        a0: &qm * &qm,
        d: &t2 - int(4) * &m * &qm,
    }
}

#[derive(Clone, Debug)]
pub enum RootForm {
    Exact(Rational),
    /// `(a + sign * b * sqrt(d)) / (2 m^2)` with the canonical branch of
    /// `sqrt(d)`.
    Conjugate {
        a: Rational,
        b: Rational,
        d: Rational,
        m: u32,
        plus: bool,
    },
    /// Root of the quadratic with a truncated theta.
    Approximate,
}

#[derive(Clone, Debug)]
pub struct Root {
    pub form: RootForm,
    pub value: PadicExpansion,
    /// Certified valuation of `z - 1`.
    pub minus_one: Valuation,
    /// The root is a zero of the denominator of `f_m`.
    pub pole: bool,
}

impl Root {
    pub fn exact(&self) -> Option<&Rational> {
        match &self.form {
            RootForm::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.minus_one.is_infinite()
    }

    pub fn in_ep(&self) -> bool {
        self.minus_one >= Valuation::Finite(ep_threshold(self.value.prime()))
    }

    /// Member of `E_p \ {1}` and a genuine fixed point of `f_m`.
    pub fn admissible(&self) -> bool {
        !self.is_one() && !self.pole && self.in_ep()
    }

    pub fn label(&self) -> String {
        match &self.form {
            RootForm::Exact(r) => render_rational(r),
            RootForm::Conjugate { a, b, d, m, plus } => format!(
                "({} {} {}*sqrt({}))/{}",
                render_rational(a),
                if *plus { "+" } else { "-" },
                render_rational(b),
                render_rational(d),
                2 * m * m
            ),
            RootForm::Approximate => self.value.compact_string(),
        }
    }
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum RootSet {
    NoRoots,
    Double(Root),
    Two(Root, Root),
}

impl RootSet {
    pub fn roots(&self) -> Vec<&Root> {
        match self {
            RootSet::NoRoots => vec![],
            RootSet::Double(r) => vec![r],
            RootSet::Two(a, b) => vec![a, b],
        }
    }

    /// Roots in `E_p \ {1}` that are fixed points of `f_m`.
    pub fn admissible(&self) -> Vec<&Root> {
        self.roots()
            .into_iter()
            .filter(|r| r.admissible())
            .collect()
    }
}

/// Working precisions tried for roots involving an irrational `sqrt(D)`.
pub const ADAPTIVE_START: usize = 16;
pub const ADAPTIVE_MAX: usize = 1024;

/// Roots of the quadratic for the block size `m`, realised to `precision`
/// digits. Requires k = 2.
pub fn solve_kv(params: &ModelParams, m: u32, precision: usize) -> Result<RootSet> {
    params.check_m(m)?;
    if params.k != 2 {
        return Err(Error::UnsupportedOrder(params.k));
    }
    match &params.theta {
        Theta::Exact(theta) => solve_exact(params.p, theta, params.q, m, precision),
        Theta::Coupling { value, .. } => solve_truncated(value, params.q, m),
    }
}

fn exact_root(p: Prime, z: Rational, theta: &Rational, q: u32, m: u32, precision: usize) -> Root {
    let pole = {
        let (qi, mi) = (int(q as i64), int(m as i64));
        (&mi * &z + &qi - &mi - Rational::one() + theta).is_zero()
    };
    Root {
        value: expand(p, &z, precision),
        minus_one: valuation(p, &(&z - Rational::one())),
        form: RootForm::Exact(z),
        pole,
    }
}

/// Whether `s` is the canonical square root among `{s, -s}`.
fn canonical_sign(p: Prime, s: &Rational) -> bool {
    let Ok((_, u)) = unit_part(p, s) else {
        return true;
    };
    let modulus = if p.is_two() { 4u32 } else { p.get() };
    let m = BigInt::from(modulus);
    let r = (u.numer() * u.denom().modinv(&m).expect("unit")).mod_floor(&m);
    if p.is_two() {
        r == BigInt::one()
    } else {
        r <= BigInt::from((modulus - 1) / 2)
    }
}

fn solve_exact(p: Prime, theta: &Rational, q: u32, m: u32, precision: usize) -> Result<RootSet> {
    let kv = kv_from(theta, q, m);
    let two_m2 = int(2) * &kv.a2;
    let a = -&kv.a1;
    let b = theta - Rational::one();
    // theta = 1 makes the quadratic a perfect square whatever D is.
    if kv.d.is_zero() || b.is_zero() {
        let z = &a / &two_m2;
        return Ok(RootSet::Double(exact_root(p, z, theta, q, m, precision)));
    }
    if let Some(s) = rational_sqrt(&kv.d) {
        let s = if canonical_sign(p, &s) { s } else { -s };
        let z1 = (&a + &b * &s) / &two_m2;
        let z2 = (&a - &b * &s) / &two_m2;
        return Ok(RootSet::Two(
            exact_root(p, z1, theta, q, m, precision),
            exact_root(p, z2, theta, q, m, precision),
        ));
    }
    if !sqrt_exists(p, &kv.d)?.exists {
        return Ok(RootSet::NoRoots);
    }
    // z - 1 = (c +- b sqrt(D)) / (2 m^2), and the product of the two
    // numerators is c^2 - b^2 D, known exactly.
    let c = &a - &two_m2;
    let product = &c * &c - &b * &b * &kv.d;
    let v_product = valuation(p, &product);
    let v_den = valuation(p, &two_m2).finite().expect("m is nonzero");
    let mut work = ADAPTIVE_START;
    loop {
        let attempt = (|| -> Result<(PadicExpansion, PadicExpansion, i64, i64)> {
            let s = sqrt(p, &kv.d, work)?;
            let bs = expand(p, &b, work).mul(&s)?;
            let ce = expand(p, &c, work);
            let np = ce.add(&bs)?;
            let nm = ce.sub(&bs)?;
            let (vp, vm) = (np.valuation(), nm.valuation());
            if Valuation::Finite(vp.or_max() + vm.or_max()) != v_product {
                return Err(Error::PrecisionExhausted(
                    "root valuations disagree with the exact product".into(),
                ));
            }
            let ae = expand(p, &a, work);
            let den = expand(p, &two_m2, work);
            let z1 = ae.add(&bs)?.div(&den)?;
            let z2 = ae.sub(&bs)?.div(&den)?;
            Ok((z1, z2, vp.or_max() - v_den, vm.or_max() - v_den))
        })();
        match attempt {
            Ok((z1, z2, w1, w2))
                if work >= ADAPTIVE_MAX
                    || (z1.precision() >= Some(precision) && z2.precision() >= Some(precision)) =>
            {
                let fit = |z: PadicExpansion| {
                    if z.precision() > Some(precision) {
                        z.truncate(precision)
                    } else {
                        z
                    }
                };
                let mk = |z: PadicExpansion, w: i64, plus: bool| Root {
                    form: RootForm::Conjugate {
                        a: a.clone(),
                        b: b.clone(),
                        d: kv.d.clone(),
                        m,
                        plus,
                    },
                    value: fit(z),
                    minus_one: Valuation::Finite(w),
                    pole: false,
                };
                return Ok(RootSet::Two(mk(z1, w1, true), mk(z2, w2, false)));
            }
            Ok(_) | Err(Error::PrecisionExhausted(_)) if work < ADAPTIVE_MAX => work *= 2,
            Ok(_) => unreachable!("handled by the first arm"),
            Err(e) => return Err(e),
        }
    }
}

/// Roots for a truncated theta. Decisions that the available digits cannot
/// settle raise `PrecisionExhausted`.
fn solve_truncated(theta: &PadicExpansion, q: u32, m: u32) -> Result<RootSet> {
    let p = theta.prime();
    let n = theta.precision().unwrap_or(ADAPTIVE_MAX);
    let c = |x: i64| PadicExpansion::from_integer(p, x, n);
    let (qi, mi) = (q as i64, m as i64);
    let b = theta.sub(&c(1))?;
    let t2 = b.mul(&b)?;
    let a = t2.sub(&c(2 * mi * (qi - mi)))?;
    let d = t2.sub(&c(4 * mi * (qi - mi)))?;
    if !sqrt_exists_expansion(&d)?.exists {
        return Ok(RootSet::NoRoots);
    }
    let s = sqrt_expansion(&d)?;
    let bs = b.mul(&s)?;
    let two_m2 = c(2 * mi * mi);
    let cc = a.sub(&two_m2)?;
    let np = cc.add(&bs)?;
    let nm = cc.sub(&bs)?;
    let product = t2.sub(&c(qi * qi))?.mul(&c(4 * mi * mi))?;
    if np.valuation().or_max() + nm.valuation().or_max() != product.valuation().or_max() {
        return Err(Error::PrecisionExhausted(
            "root valuations disagree with the product".into(),
        ));
    }
    let v_den = two_m2.valuation().or_max();
    let z1 = a.add(&bs)?.div(&two_m2)?;
    let z2 = a.sub(&bs)?.div(&two_m2)?;
    let mk = |value: PadicExpansion, num: &PadicExpansion| Root {
        form: RootForm::Approximate,
        value,
        minus_one: Valuation::Finite(num.valuation().or_max() - v_den),
        pole: false,
    };
    Ok(RootSet::Two(mk(z1, &np), mk(z2, &nm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ratio;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn params(pp: u64, q: u32, k: u32, theta: Rational) -> ModelParams {
        ModelParams::with_domain_check(p(pp), q, k, theta, false).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(in_ep(p(3), &int(64)).unwrap());
        assert!(!in_ep(p(5), &int(2)).unwrap());
        assert!(in_ep(p(2), &int(5)).unwrap());
        assert!(!in_ep(p(2), &int(3)).unwrap());
        assert_eq!(in_ep(p(3), &int(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn membership_of_expansions() {
        assert!(in_ep_expansion(&expand(p(3), &int(64), 4)).unwrap());
        assert!(!in_ep_expansion(&expand(p(2), &int(3), 4)).unwrap());
        assert!(in_ep_expansion(&expand(p(2), &int(1), 2)).unwrap());
        assert!(matches!(
            in_ep_expansion(&expand(p(2), &int(1), 1)),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(
            ModelParams::new(p(5), 5, 2, int(2)),
            Err(Error::ThetaOutOfDomain { .. })
        ));
        assert!(ModelParams::new(p(5), 5, 2, int(6)).is_ok());
        assert!(ModelParams::with_domain_check(p(5), 5, 2, int(2), false).is_ok());
        assert!(ModelParams::new(p(5), 1, 2, int(6)).is_err());
    }

    #[test]
    fn f_m_examples() {
        let pr = params(3, 3, 2, int(4));
        assert_eq!(f_m_eval(&pr, 1, &int(1)).unwrap(), int(1));
        assert_eq!(f_m_eval(&pr, 1, &int(4)).unwrap(), int(4));
        let pr = params(5, 5, 2, int(6));
        let x = ratio(3, 7);
        let lhs = f_m_eval(&pr, 2, &x).unwrap();
        let rhs = f_m_eval(&pr, 3, &(Rational::one() / &x)).unwrap();
        assert_eq!(lhs * rhs, int(1));
    }

    #[test]
    fn f_m_pole() {
        // denominator z + 1 + theta vanishes at z = -5 for q = 3, theta = 4
        let pr = params(3, 3, 2, int(4));
        assert_eq!(f_m_eval(&pr, 1, &int(-5)), Err(Error::PoleAtInput));
        assert!(matches!(
            f_m_eval(&pr, 3, &int(1)),
            Err(Error::InvalidM { .. })
        ));
    }

    #[test]
    fn recursion_witnesses() {
        let pr = params(3, 3, 3, int(-2));
        let z = BoundaryField::new(3, vec![int(64), int(-125)]).unwrap();
        let rep = verify_fixed_point(&pr, &z).unwrap();
        assert!(rep.is_fixed);
        assert_eq!(rep.in_ep, vec![true, true]);

        let pr = params(3, 6, 3, ratio(-37, 20));
        let z = BoundaryField::new(6, vec![int(64), int(-125), int(1), int(1), int(1)]).unwrap();
        assert!(verify_fixed_point(&pr, &z).unwrap().accepted());

        let pr = params(3, 3, 2, int(4));
        let rep =
            verify_fixed_point(&pr, &BoundaryField::new(3, vec![int(4), int(4)]).unwrap()).unwrap();
        assert!(!rep.is_fixed);
        assert_eq!(rep.rhs.components()[0], ratio(49, 16));
    }

    #[test]
    fn ones_are_fixed() {
        let pr = params(5, 7, 2, int(6));
        assert!(verify_fixed_point(&pr, &BoundaryField::ones(7))
            .unwrap()
            .accepted());
    }

    #[test]
    fn kv_examples() {
        let kv = kv_coeffs(&params(3, 3, 2, int(13)), 1).unwrap();
        assert_eq!(
            (kv.a2.clone(), kv.a1.clone(), kv.a0.clone()),
            (int(1), int(-140), int(4))
        );
        assert_eq!(kv.d, int(136));
        let t = int(12);
        assert_eq!(kv.discriminant(), &t * &t * &kv.d);
        let kv = kv_coeffs(&params(2, 4, 2, int(5)), 2).unwrap();
        assert_eq!(
            (kv.a2, kv.a1, kv.a0, kv.d),
            (int(4), int(-8), int(4), int(0))
        );
    }

    #[test]
    fn solve_exact_roots() {
        let rs = solve_kv(&params(3, 3, 2, int(4)), 1, 8).unwrap();
        let RootSet::Two(a, b) = rs else { panic!() };
        let mut got = vec![a.exact().unwrap().clone(), b.exact().unwrap().clone()];
        got.sort();
        assert_eq!(got, vec![int(1), int(4)]);

        let rs = solve_kv(&params(2, 4, 2, int(5)), 2, 8).unwrap();
        let RootSet::Double(r) = rs else { panic!() };
        assert_eq!(r.exact(), Some(&int(1)));
    }

    #[test]
    fn solve_symbolic_roots() {
        let rs = solve_kv(&params(3, 3, 2, int(13)), 1, 12).unwrap();
        let RootSet::Two(a, b) = rs else { panic!() };
        assert_eq!(
            a.minus_one.or_max() + b.minus_one.or_max(),
            3,
            "valuations of z - 1 sum to v(9 - 144)"
        );
        // Vieta: z1 z2 = 4
        let prod = a.value.mul(&b.value).unwrap();
        assert!(prod.agrees_with(&int(4)));
        assert!(a.label().contains("sqrt(136)"));
    }

    #[test]
    fn degenerate_theta_root_is_a_pole() {
        let rs = solve_kv(&params(3, 6, 2, int(1)), 2, 8).unwrap();
        let RootSet::Double(r) = rs else { panic!() };
        assert_eq!(r.exact(), Some(&int(-2)));
        assert!(r.pole);
        assert!(RootSet::Double(r).admissible().is_empty());
    }

    #[test]
    fn double_root_inside_ep() {
        // (theta - 1)^2 = 4 m (q - m) with q = 15, m = 3
        let rs = solve_kv(&params(3, 15, 2, int(13)), 3, 8).unwrap();
        let RootSet::Double(r) = rs else { panic!() };
        assert_eq!(r.exact(), Some(&int(4)));
        assert!(r.admissible());
    }

    #[test]
    fn rejects_higher_order() {
        assert_eq!(
            solve_kv(&params(3, 3, 3, int(4)), 1, 8).unwrap_err(),
            Error::UnsupportedOrder(3)
        );
    }

    #[test]
    fn coupling_path() {
        let pr = ModelParams::from_coupling(p(5), 5, 2, int(5), 40).unwrap();
        assert!(matches!(pr.theta, Theta::Coupling { .. }));
        let rs = solve_kv(&pr, 1, 20).unwrap();
        assert!(rs.roots().len() <= 2);
        assert!(ModelParams::from_coupling(p(5), 5, 2, int(0), 40)
            .unwrap()
            .is_degenerate());
    }
}
