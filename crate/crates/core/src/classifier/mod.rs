//! Classification of the fixed points of `f_m` in `E_p \ {1}` by exact
//! norm comparisons, counting of translation-invariant measures and their
//! boundedness.

mod bounded;
mod count;
mod rules;
mod theorems;

pub use bounded::{
    boundedness_report, partition_norm_trajectory, PartitionTrajectory, TrajectoryStep,
};
pub use count::{
    binomial, closed_form, count_tipgm, count_tipgm_with, multiplicity, Bound, ClosedFormCheck,
    MEntry, TipgmReport,
};
pub use rules::{evaluate_rules, Conditional, Rule, RuleInputs, RuleOutcome, ThetaFacts};
pub use theorems::{
    corollary_prediction, measure_class, theorem_prediction, MeasureClass, Prediction,
};

use crate::error::{Error, Result};
use crate::potts::{solve_kv, ModelParams, RootSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Rules,
    Direct,
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rules" => Ok(Method::Rules),
            "direct" => Ok(Method::Direct),
            "both" => Ok(Method::Both),
            _ => Err(Error::InvalidParams(format!("unknown method `{s}`"))),
        }
    }
}

/// Number of fixed points of `f_m` in `E_p \ {1}` and how it was decided.
#[derive(Clone, Debug)]
pub struct MClassification {
    pub m: u32,
    pub count: u8,
    /// Proposition case that fired; absent for the direct method.
    pub rule: Option<Rule>,
    /// Admissible roots; absent for the rules-only method.
    pub roots: Option<RootSet>,
    pub conditional: Option<Conditional>,
}

fn check_classifiable(params: &ModelParams, m: u32) -> Result<()> {
    if params.k != 2 {
        return Err(Error::UnsupportedOrder(params.k));
    }
    let max = params.q / 2;
    if m == 0 || m > max {
        return Err(Error::InvalidM { m, max });
    }
    Ok(())
}

pub fn classify_m(
    params: &ModelParams,
    m: u32,
    method: Method,
    precision: usize,
) -> Result<MClassification> {
    check_classifiable(params, m)?;
    match method {
        Method::Rules => classify_rules(params, m),
        Method::Direct => classify_direct(params, m, precision),
        Method::Both => {
            let r = classify_rules(params, m)?;
            let d = classify_direct(params, m, precision)?;
            if r.count != d.count {
                return Err(Error::RuleDirectMismatch(mismatch_evidence(params, &r, &d)));
            }
            Ok(MClassification {
                roots: d.roots,
                ..r
            })
        }
    }
}

pub fn classify_rules(params: &ModelParams, m: u32) -> Result<MClassification> {
    check_classifiable(params, m)?;
    let facts = ThetaFacts::new(params)?;
    let outcome = evaluate_rules(&RuleInputs::new(&facts, m))?;
    Ok(MClassification {
        m,
        count: outcome.count,
        rule: Some(outcome.rule),
        roots: None,
        conditional: outcome.conditional,
    })
}

pub fn classify_direct(params: &ModelParams, m: u32, precision: usize) -> Result<MClassification> {
    check_classifiable(params, m)?;
    let roots = solve_kv(params, m, precision)?;
    let count = roots.admissible().len() as u8;
    Ok(MClassification {
        m,
        count,
        rule: None,
        roots: Some(roots),
        conditional: None,
    })
}

pub(crate) fn mismatch_evidence(
    params: &ModelParams,
    rules: &MClassification,
    direct: &MClassification,
) -> String {
    let roots = direct
        .roots
        .as_ref()
        .map(|rs| {
            rs.roots()
                .iter()
                .map(|r| format!("{} [v(z-1)={}, pole={}]", r.label(), r.minus_one, r.pole))
                .collect::<Vec<_>>()
                .join("; ")
        })
        .unwrap_or_default();
    format!(
        "p={} q={} theta={} m={}: rule {} gives {}, direct gives {} (roots: {})",
        params.p,
        params.q,
        params.theta_label(),
        rules.m,
        rules.rule.map(|r| r.id()).unwrap_or_else(|| "-".into()),
        rules.count,
        direct.count,
        roots
    )
}
