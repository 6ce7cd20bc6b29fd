//! The norm-comparison decision tree. Every comparison is between integer
//! valuations; the only non-valuation input is the square-root test on `D`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::functions::{sqrt_exists, sqrt_exists_expansion, SqrtVerdict};
use crate::padic::{int, valuation, valuation_int, PadicExpansion, Prime, Rational, Valuation};
use crate::potts::{ModelParams, Theta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// theta = 1: the quadratic has only the pole root.
    Degenerate,
    Pro11,
    Pro12(u8),
    Pro13(u8),
    Pro21,
    Pro22(u8),
    Pro23(u8),
}

impl Rule {
    pub fn id(self) -> String {
        match self {
            Rule::Degenerate => "degenerate".into(),
            Rule::Pro11 => "pro11".into(),
            Rule::Pro21 => "pro21".into(),
            Rule::Pro12(c) => format!("pro12-case{c}"),
            Rule::Pro13(c) => format!("pro13-case{c}"),
            Rule::Pro22(c) => format!("pro22-case{c}"),
            Rule::Pro23(c) => format!("pro23-case{c}"),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// How a case whose count depends on `sqrt(D)` was resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditional {
    Sqrt(SqrtVerdict),
    /// `D = 0`: a single double root.
    DoubleRoot,
}

#[derive(Clone, Debug)]
enum ThetaValue {
    Exact(Rational),
    Approx(PadicExpansion),
}

/// Facts about theta shared by every block size m.
#[derive(Clone, Debug)]
pub struct ThetaFacts {
    pub p: Prime,
    pub q: u32,
    pub degenerate: bool,
    /// v(theta - 1)
    pub vt: Valuation,
    pub vq: i64,
    /// v((theta - 1)^2 - q^2)
    pub vdiff: Valuation,
    /// theta in {1 - q, 1 + q}
    pub special: bool,
    theta: ThetaValue,
}

impl ThetaFacts {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let p = params.p;
        let q = params.q;
        let vq = valuation_int(p, q as i64).or_max();
        match &params.theta {
            Theta::Exact(t) => {
                let b = t - Rational::one();
                let diff = &b * &b - int(q as i64) * int(q as i64);
                let vdiff = valuation(p, &diff);
                Ok(ThetaFacts {
                    p,
                    q,
                    degenerate: b.is_zero(),
                    vt: valuation(p, &b),
                    vq,
                    vdiff,
                    special: vdiff.is_infinite(),
                    theta: ThetaValue::Exact(t.clone()),
                })
            }
            Theta::Coupling { value, .. } => {
                let n = value.precision().unwrap_or(1);
                let b = value.sub(&PadicExpansion::one(p, n))?;
                let qq = PadicExpansion::from_integer(p, q as i64 * q as i64, n);
                let diff = b.mul(&b)?.sub(&qq)?;
                Ok(ThetaFacts {
                    p,
                    q,
                    degenerate: false,
                    vt: b.valuation(),
                    vq,
                    vdiff: diff.valuation(),
                    special: false,
                    theta: ThetaValue::Approx(value.clone()),
                })
            }
        }
    }

    /// Square-root test on `D = (theta - 1)^2 - 4m(q - m)`; `None` when
    /// `D = 0`.
    fn sqrt_d(&self, m: u32) -> Result<Option<SqrtVerdict>> {
        let c = 4 * m as i64 * (self.q as i64 - m as i64);
        match &self.theta {
            ThetaValue::Exact(t) => {
                let b = t - Rational::one();
                let d = &b * &b - int(c);
                if d.is_zero() {
                    Ok(None)
                } else {
                    sqrt_exists(self.p, &d).map(Some)
                }
            }
            ThetaValue::Approx(x) => {
                let n = x.precision().unwrap_or(1);
                let b = x.sub(&PadicExpansion::one(self.p, n))?;
                let d = b
                    .mul(&b)?
                    .sub(&PadicExpansion::from_integer(self.p, c, n))?;
                sqrt_exists_expansion(&d).map(Some)
            }
        }
    }
}

/// Valuations entering the decision tree for one block size m.
#[derive(Clone, Debug)]
pub struct RuleInputs<'a> {
    pub facts: &'a ThetaFacts,
    pub m: u32,
    pub vm: i64,
    /// v(q - 2m)
    pub vq2m: Valuation,
}

impl<'a> RuleInputs<'a> {
    pub fn new(facts: &'a ThetaFacts, m: u32) -> Self {
        RuleInputs {
            facts,
            m,
            vm: valuation_int(facts.p, m as i64).or_max(),
            vq2m: valuation_int(facts.p, facts.q as i64 - 2 * m as i64),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleOutcome {
    pub rule: Rule,
    pub count: u8,
    pub conditional: Option<Conditional>,
}

enum Count {
    Fixed(u8),
    /// Two roots when `sqrt(D)` exists, one when `D = 0`, none otherwise.
    IfSqrt,
}

/// Runs the decision tree. Exactly one case must apply.
pub fn evaluate_rules(inp: &RuleInputs<'_>) -> Result<RuleOutcome> {
    let f = inp.facts;
    if f.degenerate {
        return Ok(RuleOutcome {
            rule: Rule::Degenerate,
            count: 0,
            conditional: None,
        });
    }
    let fin = Valuation::Finite;
    let vm = inp.vm;
    let vq = f.vq;
    let Some(vt) = f.vt.finite() else {
        return Err(Error::UnmatchedCase("theta - 1 vanishes".into()));
    };
    let vdiff = f.vdiff;
    let vq2m = inp.vq2m;

    let cases: Vec<(Rule, bool, Count)> = if !f.p.is_two() {
        if vq == 0 {
            vec![(Rule::Pro11, true, Count::Fixed(0))]
        } else if f.special {
            let c34 = vm == vq;
            let q2m_top = vq2m.is_infinite() || vq2m == fin(vq);
            vec![
                (Rule::Pro12(1), vm < vq, Count::Fixed(1)),
                (Rule::Pro12(2), vm > vq, Count::Fixed(0)),
                (Rule::Pro12(3), c34 && q2m_top, Count::Fixed(0)),
                (Rule::Pro12(4), c34 && !q2m_top, Count::Fixed(1)),
            ]
        } else {
            let all_eq = vm == vt && vt == vq;
            let diff_high = vdiff > fin(2 * vq);
            vec![
                (Rule::Pro13(1), vm < vt.min(vq), Count::Fixed(2)),
                (Rule::Pro13(2), vt < vm.min(vq), Count::Fixed(0)),
                (Rule::Pro13(3), vq < vm.min(vt), Count::Fixed(0)),
                (Rule::Pro13(4), vm == vt && vt < vq, Count::Fixed(0)),
                (Rule::Pro13(5), vm == vq && vq < vt, Count::Fixed(0)),
                (
                    Rule::Pro13(6),
                    vt == vq && vq < vm && diff_high,
                    Count::Fixed(1),
                ),
                (
                    Rule::Pro13(7),
                    vt == vq && vq < vm && !diff_high,
                    Count::Fixed(0),
                ),
                (Rule::Pro13(8), all_eq && !diff_high, Count::Fixed(0)),
                (
                    Rule::Pro13(9),
                    all_eq && diff_high && vq2m == fin(vq),
                    Count::Fixed(1),
                ),
                (
                    Rule::Pro13(10),
                    all_eq && diff_high && vq2m > fin(vq),
                    Count::IfSqrt,
                ),
            ]
        }
    } else if vq <= 1 {
        vec![(Rule::Pro21, true, Count::Fixed(0))]
    } else if f.special {
        let q_is_2m = vq2m.is_infinite();
        vec![
            (Rule::Pro22(1), vm < vq && !q_is_2m, Count::Fixed(1)),
            (Rule::Pro22(2), vm >= vq || q_is_2m, Count::Fixed(0)),
        ]
    } else {
        let a = vm + 2;
        vec![
            (Rule::Pro23(1), a < vt.min(vq), Count::Fixed(2)),
            (Rule::Pro23(2), vt < vq.min(a), Count::Fixed(0)),
            (Rule::Pro23(3), vq < vt.min(a), Count::Fixed(0)),
            (Rule::Pro23(4), a == vt && vt < vq, Count::Fixed(0)),
            (Rule::Pro23(5), a == vq && vq < vt, Count::Fixed(0)),
            (Rule::Pro23(6), a == vt && vt == vq, Count::Fixed(2)),
            (Rule::Pro23(7), vm == vt && vt == vq, Count::Fixed(1)),
            (Rule::Pro23(8), vm < vt && vt == vq && vq < a, Count::IfSqrt),
            (Rule::Pro23(9), vt == vq && vq < vm, Count::Fixed(1)),
        ]
    };

    let mut hits = cases.into_iter().filter(|(_, guard, _)| *guard);
    let (rule, _, count) = hits.next().ok_or_else(|| {
        Error::UnmatchedCase(format!(
            "p={} q={} m={} v(m)={vm} v(theta-1)={vt} v(q)={vq}",
            f.p, f.q, inp.m
        ))
    })?;
    if let Some((other, _, _)) = hits.next() {
        return Err(Error::UnmatchedCase(format!(
            "cases {rule} and {other} both apply (p={} q={} m={})",
            f.p, f.q, inp.m
        )));
    }
    let (count, conditional) = match count {
        Count::Fixed(c) => (c, None),
        Count::IfSqrt => match f.sqrt_d(inp.m)? {
            None => (1, Some(Conditional::DoubleRoot)),
            Some(v) => (if v.exists { 2 } else { 0 }, Some(Conditional::Sqrt(v))),
        },
    };
    Ok(RuleOutcome {
        rule,
        count,
        conditional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ratio;

    fn outcome(p: u64, q: u32, theta: Rational, m: u32) -> RuleOutcome {
        let pr =
            ModelParams::with_domain_check(Prime::new(p).unwrap(), q, 2, theta, false).unwrap();
        let facts = ThetaFacts::new(&pr).unwrap();
        evaluate_rules(&RuleInputs::new(&facts, m)).unwrap()
    }

    #[test]
    fn rule_ids() {
        assert_eq!(Rule::Pro13(1).id(), "pro13-case1");
        assert_eq!(Rule::Pro22(1).to_string(), "pro22-case1");
        assert_eq!(Rule::Degenerate.id(), "degenerate");
    }

    #[test]
    fn odd_prime_cases() {
        assert_eq!(outcome(5, 7, int(6), 1).rule, Rule::Pro11);
        assert_eq!(outcome(5, 5, int(6), 1).rule, Rule::Pro12(1));
        assert_eq!(outcome(5, 5, int(-4), 2).count, 1);
        let o = outcome(5, 5, int(11), 2);
        assert_eq!((o.rule, o.count), (Rule::Pro13(1), 2));
        // v(theta - 1) = 2 > v(q) = 1 = v(m) for q = 15, m = 5
        assert_eq!(outcome(5, 15, int(26), 5).rule, Rule::Pro13(5));
        assert_eq!(outcome(3, 6, ratio(4, 1), 1).rule, Rule::Pro13(1));
    }

    #[test]
    fn two_adic_cases() {
        assert_eq!(outcome(2, 6, int(5), 1).rule, Rule::Pro21);
        assert_eq!(outcome(2, 4, int(5), 1).rule, Rule::Pro22(1));
        let o = outcome(2, 4, int(29), 1);
        assert_eq!((o.rule, o.count), (Rule::Pro23(6), 2));
        assert_eq!(outcome(2, 8, int(5), 1).rule, Rule::Pro23(4));
        let o = outcome(2, 4, int(29), 2);
        assert_eq!(o.rule, Rule::Pro23(8));
        assert_eq!(
            o.conditional,
            Some(Conditional::Sqrt(SqrtVerdict {
                exists: false,
                reason: crate::functions::SqrtReason::TwoAdicUnitNotOneMod8
            }))
        );
    }
}
