//! Counting translation-invariant measures from the per-m classifications,
//! and the closed-form counts checked against them.

use num_traits::Zero;
use rayon::prelude::*;

use super::rules::ThetaFacts;
use super::{boundedness_report, classify_m, MClassification, Method};
use crate::error::{Error, Result};
use crate::functions::sqrt_exists;
use crate::padic::{int, unit_part, valuation, PadicExpansion, Prime, Rational, Valuation};
use crate::potts::{ModelParams, Theta};

pub fn binomial(n: u32, k: u32) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Number of subsets of size m among q spin values.
pub fn multiplicity(q: u32, m: u32) -> Result<u128> {
    if m == 0 || m >= q {
        return Err(Error::InvalidM { m, max: q - 1 });
    }
    binomial(q, m).ok_or(Error::Overflow)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Exact(u128),
    AtMost(u128),
}

impl Bound {
    pub fn admits(self, n: u128) -> bool {
        match self {
            Bound::Exact(b) => n == b,
            Bound::AtMost(b) => n <= b,
        }
    }
}

/// A closed-form count and whether it agrees with the computed count.
/// Non-binding forms are outside the range where they were found to be
/// reliable; a disagreement there is reported as a warning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormCheck {
    pub case: &'static str,
    pub bounds: Vec<(Bound, bool)>,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct MEntry {
    pub class: MClassification,
    pub multiplicity: u128,
    /// Measures contributed by this block size.
    pub contribution: u128,
}

#[derive(Clone, Debug)]
pub struct TipgmReport {
    pub p: Prime,
    pub q: u32,
    pub theta: String,
    pub degenerate: bool,
    pub per_m: Vec<MEntry>,
    pub n_ti: u128,
    pub mu0_bounded: bool,
    /// `Some(false)` when nontrivial measures exist; they are never bounded.
    pub nontrivial_bounded: Option<bool>,
    pub closed_form: Option<ClosedFormCheck>,
    pub warnings: Vec<String>,
}

pub fn count_tipgm(params: &ModelParams, method: Method, precision: usize) -> Result<TipgmReport> {
    count_tipgm_with(params, precision, |m| {
        classify_m(params, m, method, precision)
    })
}

/// Same as [`count_tipgm`] with a caller-supplied per-m classifier.
pub fn count_tipgm_with<F>(
    params: &ModelParams,
    precision: usize,
    classify: F,
) -> Result<TipgmReport>
where
    F: Fn(u32) -> Result<MClassification> + Sync,
{
    if params.k != 2 {
        return Err(Error::UnsupportedOrder(params.k));
    }
    let q = params.q;
    let classes: Vec<MClassification> = (1..=q / 2)
        .into_par_iter()
        .map(&classify)
        .collect::<Result<_>>()?;

    let mut n_ti: u128 = 1;
    let mut per_m = Vec::with_capacity(classes.len());
    for class in classes {
        let mult = multiplicity(q, class.m)?;
        let raw = mult
            .checked_mul(class.count as u128)
            .ok_or(Error::Overflow)?;
        // For q = 2m the roots pair up as z and 1/z under complementation.
        let contribution = if 2 * class.m == q { raw / 2 } else { raw };
        n_ti = n_ti.checked_add(contribution).ok_or(Error::Overflow)?;
        per_m.push(MEntry {
            class,
            multiplicity: mult,
            contribution,
        });
    }

    let mut report = TipgmReport {
        p: params.p,
        q,
        theta: params.theta_label(),
        degenerate: params.is_degenerate(),
        per_m,
        n_ti,
        mu0_bounded: true,
        nontrivial_bounded: None,
        closed_form: None,
        warnings: Vec::new(),
    };
    if !params.is_degenerate() {
        let facts = ThetaFacts::new(params)?;
        if let Some(check) = closed_form(params, &facts, n_ti)? {
            for (bound, binding) in &check.bounds {
                if bound.admits(n_ti) {
                    continue;
                }
                let msg = format!(
                    "closed form {} predicts {:?}, computed N_TI = {n_ti}",
                    check.case, bound
                );
                if *binding {
                    return Err(Error::ClosedFormMismatch(msg));
                }
                report.warnings.push(msg);
            }
            report.warnings.extend(case6_ball_warning(params)?);
            report.closed_form = Some(check);
        }
    }
    boundedness_report(params, &mut report, precision)?;
    Ok(report)
}

fn pow2(e: u32) -> Option<u128> {
    1u128.checked_shl(e)
}

/// q = p^s * n with n not divisible by p.
fn split_q(p: u32, q: u32) -> (u32, u32) {
    let (mut s, mut n) = (0, q);
    while n % p == 0 {
        n /= p;
        s += 1;
    }
    (s, n)
}

/// Closed-form count for the parameter families where one is known.
/// `None` when no family applies or the numbers overflow.
pub fn closed_form(
    params: &ModelParams,
    facts: &ThetaFacts,
    n_ti: u128,
) -> Result<Option<ClosedFormCheck>> {
    let p = params.p.get();
    let q = params.q;
    let vt = facts.vt.or_max();
    let vq = facts.vq;
    let special = facts.special;
    let mk = |case, bounds: Vec<(Bound, bool)>| {
        let holds = bounds.iter().all(|(b, _)| b.admits(n_ti));
        Some(ClosedFormCheck {
            case,
            bounds,
            holds,
        })
    };

    if !q.is_multiple_of(p) {
        return Ok(mk("case1", vec![(Bound::Exact(1), true)]));
    }
    if p == 2 {
        if vq <= 1 {
            return Ok(mk("case5", vec![(Bound::Exact(1), true)]));
        }
        if q == 4 {
            let mut bounds = vec![(Bound::AtMost(15), true)];
            if case6_sqrt(params)? {
                bounds.push((Bound::Exact(15), true));
            }
            return Ok(mk("case6", bounds));
        }
        return Ok(None);
    }
    let (s, n) = split_q(p, q);
    let all = || pow2(q).map(|x| x - 1);
    let half = || pow2(q - 1);
    let central = || {
        if q.is_multiple_of(2) {
            binomial(q, q / 2)
        } else {
            Some(0)
        }
    };
    if s == 1 && n == 1 {
        let Some(v) = (if special { half() } else { all() }) else {
            return Ok(None);
        };
        return Ok(mk("case2", vec![(Bound::Exact(v), true)]));
    }
    let sum = |step: u32| -> Option<u128> {
        (1..=n / 2).try_fold(0u128, |acc, j| acc.checked_add(binomial(q, step * j)?))
    };
    if s == 1 && n < p {
        let Some(v) = (|| {
            let sum = sum(p)?;
            if special {
                half()?.checked_add(central()?)?.checked_sub(sum)
            } else {
                all()?
                    .checked_add(central()?)?
                    .checked_sub(sum.checked_mul(2)?)
            }
        })() else {
            return Ok(None);
        };
        let binding = if special { q % 2 == 1 } else { vt > vq };
        return Ok(mk("case3", vec![(Bound::Exact(v), binding)]));
    }
    if s >= 2 && n < p {
        let step = q / n;
        let Some(v) = (|| {
            all()?
                .checked_add(central()?)?
                .checked_sub(sum(step)?.checked_mul(2)?)
        })() else {
            return Ok(None);
        };
        let mut bounds = vec![(Bound::AtMost(v), n == 1)];
        if n == 1 {
            let full = !special && facts.vdiff >= Valuation::Finite(2 * vq);
            if full {
                bounds.push((Bound::Exact(v), true));
            } else {
                bounds.push((Bound::AtMost(v - 1), true));
            }
        }
        return Ok(mk("case4", bounds));
    }
    Ok(None)
}

/// `(theta - 5)(theta + 3)`, exact or truncated.
enum Case6Product {
    Exact(Rational),
    Approx(PadicExpansion),
}

fn case6_product(params: &ModelParams) -> Result<Case6Product> {
    match &params.theta {
        Theta::Exact(t) => Ok(Case6Product::Exact((t - int(5)) * (t + int(3)))),
        Theta::Coupling { value, .. } => {
            let n = value.precision().unwrap_or(1);
            let c = |x| PadicExpansion::from_integer(params.p, x, n);
            Ok(Case6Product::Approx(
                value.sub(&c(5))?.mul(&value.add(&c(3))?)?,
            ))
        }
    }
}

fn case6_sqrt(params: &ModelParams) -> Result<bool> {
    match case6_product(params)? {
        Case6Product::Exact(r) if r.is_zero() => Ok(false),
        Case6Product::Exact(r) => Ok(sqrt_exists(params.p, &r)?.exists),
        Case6Product::Approx(x) => Ok(crate::functions::sqrt_exists_expansion(&x)?.exists),
    }
}

/// Membership of theta in the union of 2-adic balls printed alongside the
/// q = 4 count: `|x-29| <= 2^-7`, `|x-93| <= 2^-8`, `|x-165| <= 2^-8`, or
/// `|x - 5 - 2^s| <= 2^-(s+3)` for some `s >= 1`.
pub fn case6_ball_membership(theta: &Rational) -> bool {
    let two = Prime::new(2).expect("2 is prime");
    let near = |c: i64, e: i64| valuation(two, &(theta - int(c))) >= Valuation::Finite(e);
    if near(29, 7) || near(93, 8) || near(165, 8) {
        return true;
    }
    // x - 5 = 2^s (1 + 8t)
    match unit_part(two, &(theta - int(5))) {
        Ok((s, u)) if s >= 1 => {
            let num = u.numer() * u.denom();
            let r = ((num % 8) + 8) % 8;
            r == 1.into()
        }
        _ => false,
    }
}

fn case6_ball_warning(params: &ModelParams) -> Result<Option<String>> {
    if params.p.get() != 2 || params.q != 4 {
        return Ok(None);
    }
    let Theta::Exact(theta) = &params.theta else {
        return Ok(None);
    };
    let by_ball = case6_ball_membership(theta);
    let by_sqrt = case6_sqrt(params)?;
    if by_ball == by_sqrt {
        return Ok(None);
    }
    let product = (theta - int(5)) * (theta + int(3));
    Ok(Some(format!(
        "printed 2-adic ball description for q = 4 says sqrt((theta-5)(theta+3)) {} at theta = {}, \
         but (theta-5)(theta+3) = {} {} a square in Q_2 by the square-root criterion",
        if by_ball { "exists" } else { "does not exist" },
        params.theta_label(),
        crate::padic::render_rational(&product),
        if by_sqrt { "is" } else { "is not" },
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(p: u64, q: u32, theta: i64) -> TipgmReport {
        let pr = ModelParams::with_domain_check(Prime::new(p).unwrap(), q, 2, int(theta), false)
            .unwrap();
        count_tipgm(&pr, Method::Both, 32).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(130, 65), None);
        assert_eq!(multiplicity(5, 1).unwrap(), 5);
        assert_eq!(multiplicity(4, 2).unwrap(), 6);
        assert_eq!(multiplicity(9, 2).unwrap(), multiplicity(9, 7).unwrap());
        assert!(multiplicity(4, 4).is_err());
    }

    #[test]
    fn documented_counts() {
        assert_eq!(report(5, 5, 11).n_ti, 31);
        assert_eq!(report(5, 5, 6).n_ti, 16);
        assert_eq!(report(5, 7, 6).n_ti, 1);
        assert_eq!(report(2, 3, 5).n_ti, 1);
        assert_eq!(report(5, 5, 11).closed_form.unwrap().case, "case2");
    }

    #[test]
    fn case6_discrepancy_is_reported() {
        let r = report(2, 4, 29);
        assert_eq!(r.n_ti, 9);
        assert_eq!(r.warnings.len(), 1, "{:?}", r.warnings);
        assert!(r.warnings[0].contains("768"));
        assert!(case6_ball_membership(&int(29)));
        let r = report(2, 4, 93);
        assert_eq!(r.n_ti, 15);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn case6_ball_shapes() {
        // 5 + 2 * 9 = 23: v(x - 5) = 1, unit 9 = 1 mod 8
        assert!(case6_ball_membership(&int(23)));
        assert!(!case6_ball_membership(&int(11)));
    }

    #[test]
    fn degenerate_counts_only_mu0() {
        let r = report(3, 6, 1);
        assert_eq!(r.n_ti, 1);
        assert!(r.degenerate);
    }
}
