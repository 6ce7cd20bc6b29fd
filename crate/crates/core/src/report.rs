//! Serializable reports and their table rendering. Tables are rendered from
//! the same structures as the JSON output, so both carry identical data.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifier::{Bound, Conditional, TipgmReport};
use crate::padic::{norm, render_rational, Prime};
use crate::potts::{FixedPointReport, ModelParams, Theta};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub p: u32,
    pub q: u32,
    pub k: u32,
    pub theta: String,
    /// J when theta was given as `exp_p(J)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<String>,
}

impl ParamsJson {
    pub fn from_params(params: &ModelParams) -> Self {
        let (theta, coupling) = match &params.theta {
            Theta::Exact(t) => (render_rational(t), None),
            Theta::Coupling { j, value } => (value.to_string(), Some(render_rational(j))),
        };
        ParamsJson {
            p: params.p.get(),
            q: params.q,
            k: params.k,
            theta,
            coupling,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MJson {
    pub m: u32,
    pub count: u8,
    pub rule: Option<String>,
    /// Admissible roots as expansions; `None` when only the rules ran.
    pub roots: Option<Vec<String>>,
    /// Exact or symbolic form of each admissible root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_forms: Option<Vec<String>>,
    pub multiplicity: u128,
    pub contribution: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormJson {
    pub case: String,
    pub bounds: Vec<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyJson {
    pub params: ParamsJson,
    pub per_m: Vec<MJson>,
    pub n_ti: u128,
    pub mu0_bounded: bool,
    pub nontrivial_bounded: Option<bool>,
    pub closed_form: Option<ClosedFormJson>,
    pub warnings: Vec<String>,
}

fn conditional_label(c: &Conditional) -> String {
    match c {
        Conditional::DoubleRoot => "D = 0 (double root)".into(),
        Conditional::Sqrt(v) if v.exists => "sqrt(D) exists".into(),
        Conditional::Sqrt(v) => format!("sqrt(D) does not exist ({:?})", v.reason),
    }
}

fn bound_label(b: &Bound, binding: bool) -> String {
    let s = match b {
        Bound::Exact(v) => format!("= {v}"),
        Bound::AtMost(v) => format!("<= {v}"),
    };
    if binding {
        s
    } else {
        format!("{s} (advisory)")
    }
}

impl ClassifyJson {
    pub fn new(params: &ModelParams, report: &TipgmReport) -> Self {
        let per_m = report
            .per_m
            .iter()
            .map(|e| {
                let adm = e.class.roots.as_ref().map(|rs| rs.admissible());
                MJson {
                    m: e.class.m,
                    count: e.class.count,
                    rule: e.class.rule.map(|r| r.id()),
                    roots: adm
                        .as_ref()
                        .map(|rs| rs.iter().map(|r| r.value.to_string()).collect()),
                    root_forms: adm.map(|rs| rs.iter().map(|r| r.label()).collect()),
                    multiplicity: e.multiplicity,
                    contribution: e.contribution,
                    conditional: e.class.conditional.as_ref().map(conditional_label),
                }
            })
            .collect();
        ClassifyJson {
            params: ParamsJson::from_params(params),
            per_m,
            n_ti: report.n_ti,
            mu0_bounded: report.mu0_bounded,
            nontrivial_bounded: report.nontrivial_bounded,
            closed_form: report.closed_form.as_ref().map(|c| ClosedFormJson {
                case: c.case.to_string(),
                bounds: c.bounds.iter().map(|(b, k)| bound_label(b, *k)).collect(),
                holds: c.holds,
            }),
            warnings: report.warnings.clone(),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(
            out,
            "p = {}, q = {}, k = {}, theta = {}",
            p.p, p.q, p.k, p.theta
        );
        if let Some(j) = &p.coupling {
            let _ = writeln!(out, "coupling J = {j}");
        }
        let _ = writeln!(
            out,
            "{:>3}  {:>5}  {:<14}  {:>12}  {:>12}  roots",
            "m", "count", "rule", "multiplicity", "contribution"
        );
        for e in &self.per_m {
            let roots = match &e.roots {
                None => "-".to_string(),
                Some(r) if r.is_empty() => "none".to_string(),
                Some(r) => r.join("; "),
            };
            let _ = writeln!(
                out,
                "{:>3}  {:>5}  {:<14}  {:>12}  {:>12}  {}",
                e.m,
                e.count,
                e.rule.as_deref().unwrap_or("-"),
                e.multiplicity,
                e.contribution,
                roots
            );
            if let Some(forms) = &e.root_forms {
                for f in forms {
                    let _ = writeln!(out, "{:>3}  root form {f}", "");
                }
            }
            if let Some(c) = &e.conditional {
                let _ = writeln!(out, "{:>3}  {c}", "");
            }
        }
        let _ = writeln!(out, "N_TI = {}", self.n_ti);
        let _ = writeln!(out, "mu0 bounded: {}", yes_no(self.mu0_bounded));
        match self.nontrivial_bounded {
            Some(b) => {
                let _ = writeln!(out, "nontrivial measures bounded: {}", yes_no(b));
            }
            None => {
                let _ = writeln!(out, "nontrivial measures bounded: n/a (none exist)");
            }
        }
        if let Some(c) = &self.closed_form {
            let _ = writeln!(
                out,
                "closed form {}: {} ({})",
                c.case,
                c.bounds.join(", "),
                if c.holds { "holds" } else { "fails" }
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub z: String,
    pub rhs: String,
    /// `|z - 1|_p`
    pub norm_minus_one: String,
    pub in_ep: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub params: ParamsJson,
    pub is_fixed: bool,
    pub all_in_ep: bool,
    pub components: Vec<ComponentJson>,
}

impl VerifyJson {
    pub fn new(params: &ModelParams, z: &[crate::padic::Rational], rep: &FixedPointReport) -> Self {
        let components = z
            .iter()
            .zip(rep.rhs.components())
            .zip(&rep.in_ep)
            .map(|((zi, ri), &m)| ComponentJson {
                z: render_rational(zi),
                rhs: render_rational(ri),
                norm_minus_one: norm(params.p, &(zi - crate::padic::int(1))).render(params.p),
                in_ep: m,
            })
            .collect();
        VerifyJson {
            params: ParamsJson::from_params(params),
            is_fixed: rep.is_fixed,
            all_in_ep: rep.in_ep.iter().all(|&b| b),
            components,
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(
            out,
            "p = {}, q = {}, k = {}, theta = {}",
            p.p, p.q, p.k, p.theta
        );
        let _ = writeln!(out, "fixed point: {}", yes_no(self.is_fixed));
        for (i, c) in self.components.iter().enumerate() {
            let _ = writeln!(
                out,
                "z_{} = {}  rhs = {}  |z-1|_{} = {}  in E_{}: {}",
                i + 1,
                c.z,
                c.rhs,
                p.p,
                c.norm_minus_one,
                p.p,
                yes_no(c.in_ep)
            );
        }
        let _ = writeln!(
            out,
            "all components in E_{}: {}",
            p.p,
            yes_no(self.all_in_ep)
        );
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanLine {
    pub theta: String,
    pub n_ti: Option<u128>,
    pub per_m_counts: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanJson {
    pub p: u32,
    pub q: u32,
    pub points: Vec<ScanLine>,
}

impl ScanJson {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for l in &self.points {
            let counts = l
                .per_m_counts
                .iter()
                .map(u8::to_string)
                .collect::<Vec<_>>()
                .join(",");
            let _ = match (&l.n_ti, &l.error) {
                (Some(n), _) => writeln!(
                    out,
                    "p = {} q = {} theta = {}  N_TI = {n}  counts = [{counts}]",
                    self.p, self.q, l.theta
                ),
                (None, Some(e)) => writeln!(
                    out,
                    "p = {} q = {} theta = {}  error: {e}",
                    self.p, self.q, l.theta
                ),
                (None, None) => Ok(()),
            };
            for m in &l.mismatches {
                let _ = writeln!(out, "  mismatch: {m}");
            }
            for w in &l.warnings {
                let _ = writeln!(out, "  warning: {w}");
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckJson {
    pub checked: usize,
    pub two_root_points: usize,
    pub mismatches: Vec<String>,
}

impl CrosscheckJson {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "checked {} points ({} with two distinct roots): {} mismatches",
            self.checked,
            self.two_root_points,
            self.mismatches.len()
        );
        for m in &self.mismatches {
            let _ = writeln!(out, "mismatch: {m}");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicJson {
    pub op: String,
    pub p: u32,
    pub input: String,
    pub result: String,
}

impl PadicJson {
    pub fn new(op: &str, p: Prime, input: &str, result: String) -> Self {
        PadicJson {
            op: op.to_string(),
            p: p.get(),
            input: input.to_string(),
            result,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{count_tipgm, Method};
    use crate::padic::int;

    #[test]
    fn classify_json_round_trips() {
        let params = ModelParams::new(Prime::new(5).unwrap(), 5, 2, int(11)).unwrap();
        let report = count_tipgm(&params, Method::Both, 24).unwrap();
        let json = ClassifyJson::new(&params, &report);
        let text = serde_json::to_string(&json).unwrap();
        let back: ClassifyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, json);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert_eq!(back.n_ti, 31);
        assert!(json.to_table().contains("N_TI = 31"));
    }

    #[test]
    fn rules_only_has_no_roots() {
        let params = ModelParams::new(Prime::new(5).unwrap(), 5, 2, int(6)).unwrap();
        let report = count_tipgm(&params, Method::Rules, 24).unwrap();
        let json = ClassifyJson::new(&params, &report);
        assert!(json.per_m.iter().all(|m| m.roots.is_none()));
        let v: serde_json::Value = serde_json::to_value(&json).unwrap();
        assert!(v["per_m"][0]["roots"].is_null());
        assert_eq!(v["n_ti"], 16);
    }
}
