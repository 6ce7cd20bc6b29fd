//! Summary statements derived from the case analysis, kept as independent
//! predictions so they can be checked against the decision tree, and the
//! measure classes attached to each root.

use num_traits::{One, Zero};

use super::rules::{RuleInputs, ThetaFacts};
use crate::error::Result;
use crate::functions::{log_expansion, sqrt_exists};
use crate::padic::{int, valuation, PadicExpansion, Rational, Valuation};
use crate::potts::{ModelParams, Root, Theta};

use super::count::multiplicity;

/// A predicted quantity together with the clause that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub clause: &'static str,
    pub value: u8,
}

fn pred(clause: &'static str, value: u8) -> Option<Prediction> {
    Some(Prediction { clause, value })
}

/// Root count for unit block sizes (`v(m) = 0`) from the corollaries; `None`
/// when no corollary covers the parameters.
pub fn corollary_prediction(facts: &ThetaFacts, m: u32) -> Option<Prediction> {
    let inp = RuleInputs::new(facts, m);
    if facts.degenerate {
        return None;
    }
    let vt = facts.vt.or_max();
    let vq = facts.vq;
    let by_special = |c| pred(c, if facts.special { 1 } else { 2 });
    if !facts.p.is_two() {
        let p = facts.p.get();
        if facts.q == p && (m as u64) < p as u64 {
            return by_special("cor12");
        }
        if vq >= 1 && inp.vm == 0 {
            return by_special("cor11");
        }
        return None;
    }
    if inp.vm != 0 {
        return None;
    }
    match vq {
        0 | 1 => pred("cor21-1", 0),
        2 if vt == 2 => by_special("cor21-2"),
        2 => pred("cor21-2", 0),
        _ if vt >= 3 => by_special("cor21-3"),
        _ => pred("cor21-3", 0),
    }
}

/// `sqrt(x)` exists and `v(x)` is positive; `D = 0` is reported separately.
fn positive_square(facts: &ThetaFacts, x: &Rational) -> Result<bool> {
    if valuation(facts.p, x) <= Valuation::Finite(0) {
        return Ok(false);
    }
    Ok(sqrt_exists(facts.p, x)?.exists)
}

/// Number of measures for block size m, as a multiple of `C(q, m)`, read off
/// the summary theorems. Requires an exact theta. For `q = 2m` the roots z
/// and 1/z give the same measures, so the value is half the root count.
///
/// Two readings differ from a literal transcription: the clauses conditioned
/// on "`p^-2s x` is a unit for some `s >= 1`" also require the unit to be a
/// square, and the 2-adic clause for `theta in {1 - q, 1 + q}` with
/// `|m| > |q| > |4m|` excludes `q = 2m`, where the only root is 1.
pub fn theorem_prediction(params: &ModelParams, m: u32) -> Result<Prediction> {
    let facts = ThetaFacts::new(params)?;
    let Theta::Exact(theta) = &params.theta else {
        return Err(crate::error::Error::InvalidParams(
            "theorem predictions need an exact theta".into(),
        ));
    };
    let inp = RuleInputs::new(&facts, m);
    let (vm, vq) = (inp.vm, facts.vq);
    let vt = facts.vt.or_max();
    let sp = facts.special;
    let fin = Valuation::Finite;
    let q = params.q as i64;
    let mi = m as i64;
    let b = theta - Rational::one();
    let d = &b * &b - int(4 * mi * (q - mi));
    let diff_mid = facts.vdiff > fin(2 * vq) && !facts.vdiff.is_infinite();
    let q2m_mid = inp.vq2m > fin(vq) && !inp.vq2m.is_infinite();
    let q_is_2m = q == 2 * mi;
    if facts.degenerate {
        return Ok(Prediction {
            clause: "degenerate",
            value: 0,
        });
    }
    let hit = |c: &'static str, v: u8| {
        Ok(Prediction {
            clause: c,
            value: v,
        })
    };

    if !facts.p.is_two() {
        let all_eq = vm == vt && vt == vq;
        if vm < vt.min(vq) && !sp {
            return hit("tigm1-1a", 2);
        }
        if all_eq && diff_mid && q2m_mid {
            if d.is_zero() {
                return hit("double-root", 1);
            }
            if positive_square(&facts, &d)? {
                return hit("tigm1-1b", 2);
            }
        }
        if vm < vt.min(vq) && sp {
            return hit("tigm1-2a", 1);
        }
        if vm > vt && vt == vq && diff_mid {
            return hit("tigm1-2b", 1);
        }
        if all_eq && diff_mid && inp.vq2m == fin(vq) {
            return hit("tigm1-2c", 1);
        }
        if all_eq && sp && q2m_mid {
            return hit("tigm1-2d", 1);
        }
        if q_is_2m && vt == vq && diff_mid {
            let diff = &b * &b - int(q * q);
            if positive_square(&facts, &diff)? {
                return hit("tigm1-2e", 1);
            }
        }
        return hit("tigm1-none", 0);
    }

    if vq <= 1 {
        return hit("tigm2-none", 0);
    }
    let a = vm + 2;
    let band = vm < vt && vt == vq && vq < a;
    if a < vt.min(vq) && !sp {
        return hit("tigm2-1a", 2);
    }
    if a == vt && vt == vq && !sp {
        return hit("tigm2-1b", 2);
    }
    if band && !q_is_2m && !sp {
        if d.is_zero() {
            return hit("double-root", 1);
        }
        if sqrt_exists(facts.p, &d)?.exists {
            return hit("tigm2-1c", 2);
        }
    }
    if a < vt.min(vq) && sp {
        return hit("tigm2-2a", 1);
    }
    if a == vt && vt == vq && sp {
        return hit("tigm2-2b", 1);
    }
    if vm == vt && vt == vq && !sp {
        return hit("tigm2-2c", 1);
    }
    if band && sp && !q_is_2m {
        return hit("tigm2-2d", 1);
    }
    if vt == vq && vq < vm && !sp {
        return hit("tigm2-2e", 1);
    }
    if band && q_is_2m && !sp {
        let c = &b / int(q);
        if sqrt_exists(facts.p, &(&c * &c - Rational::one()))?.exists {
            return hit("tigm2-2f", 1);
        }
    }
    hit("tigm2-none", 0)
}

/// The class of measures attached to a root z of `f_m`: subsets M of size m
/// carry the field `h(M) = log_p z` on M; the complements carry `-h(M)`.
#[derive(Clone, Debug)]
pub struct MeasureClass {
    pub m: u32,
    pub multiplicity: u128,
    pub root: String,
    pub h: PadicExpansion,
    pub complement_size: u32,
    pub complement_h: PadicExpansion,
}

pub fn measure_class(
    params: &ModelParams,
    m: u32,
    root: &Root,
    precision: usize,
) -> Result<MeasureClass> {
    let h = log_expansion(&root.value, precision)?;
    Ok(MeasureClass {
        m,
        multiplicity: multiplicity(params.q, m)?,
        root: root.label(),
        complement_h: h.neg(),
        h,
        complement_size: params.q - m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Prime;
    use crate::potts::{f_m_eval, solve_kv};

    fn pr(p: u64, q: u32, theta: i64) -> ModelParams {
        ModelParams::with_domain_check(Prime::new(p).unwrap(), q, 2, int(theta), false).unwrap()
    }

    #[test]
    fn corollaries_on_examples() {
        let f = ThetaFacts::new(&pr(5, 5, 11)).unwrap();
        assert_eq!(corollary_prediction(&f, 2), pred("cor12", 2));
        let f = ThetaFacts::new(&pr(5, 5, 6)).unwrap();
        assert_eq!(corollary_prediction(&f, 1), pred("cor12", 1));
        let f = ThetaFacts::new(&pr(2, 4, 9)).unwrap();
        assert_eq!(corollary_prediction(&f, 1), pred("cor21-2", 0));
        assert_eq!(corollary_prediction(&f, 2), None);
    }

    #[test]
    fn theorem_on_examples() {
        assert_eq!(theorem_prediction(&pr(5, 5, 11), 1).unwrap().value, 2);
        assert_eq!(
            theorem_prediction(&pr(5, 5, 6), 2).unwrap().clause,
            "tigm1-2a"
        );
        assert_eq!(theorem_prediction(&pr(3, 4, 4), 1).unwrap().value, 0);
        assert_eq!(theorem_prediction(&pr(2, 8, 9), 4).unwrap().value, 0);
    }

    #[test]
    fn complement_class_has_opposite_field() {
        let params = pr(5, 5, 6);
        let roots = solve_kv(&params, 1, 20).unwrap();
        let root = roots.admissible()[0].clone();
        let mc = measure_class(&params, 1, &root, 20).unwrap();
        assert_eq!(mc.multiplicity, 5);
        assert_eq!(mc.complement_size, 4);
        // 1/z solves f_{q-m}
        let z = root.exact().unwrap();
        let inv = Rational::one() / z;
        assert_eq!(f_m_eval(&params, 4, &inv).unwrap(), inv);
        let h_inv = log_expansion(&crate::padic::expand(params.p, &inv, 20), 20).unwrap();
        assert_eq!(h_inv, mc.complement_h);
    }
}
