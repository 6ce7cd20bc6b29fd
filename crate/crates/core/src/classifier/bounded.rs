//! Boundedness of the measures through the norms of the partition functions
//! `Z_{n+1} = a^{2|V_n|}` with `a = m(z - 1) + q + theta - 1`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::TipgmReport;
use crate::error::{Error, Result};
use crate::padic::{int, valuation, PadicExpansion, Rational, Valuation};
use crate::potts::{ModelParams, Root, Theta};

/// Fills in the boundedness flags: `mu_0` is bounded exactly when p does not
/// divide q, and no nontrivial measure is bounded. Every admissible root with
/// known form is checked to have `v(a) >= 1`.
pub fn boundedness_report(
    params: &ModelParams,
    report: &mut TipgmReport,
    precision: usize,
) -> Result<()> {
    report.mu0_bounded = !params.q.is_multiple_of(params.p.get());
    report.nontrivial_bounded = if report.n_ti > 1 { Some(false) } else { None };
    for entry in &report.per_m {
        let Some(roots) = &entry.class.roots else {
            continue;
        };
        for root in roots.admissible() {
            let va = base_valuation(params, entry.class.m, root, precision)?;
            if va < Valuation::Finite(1) {
                report.warnings.push(format!(
                    "root {} for m = {} has v(a) = {va}; its partition functions do not vanish",
                    root.label(),
                    entry.class.m
                ));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryStep {
    pub n: u32,
    /// |W_n|
    pub sphere: BigUint,
    /// |V_n|
    pub ball: BigUint,
    /// Valuation of `Z_{n+1}`, so `|Z_{n+1}|_p = p^-exponent`.
    pub exponent: BigUint,
}

#[derive(Clone, Debug)]
pub struct PartitionTrajectory {
    pub m: u32,
    pub root: String,
    /// v(a), with `a = m(z - 1) + q + theta - 1`.
    pub base_valuation: i64,
    pub steps: Vec<TrajectoryStep>,
}

impl PartitionTrajectory {
    /// Norms of `Z_n` tend to 0.
    pub fn diverges(&self) -> bool {
        self.base_valuation >= 1
    }

    /// Checks `e_{n+1} - e_n = 2 v(a) |W_n|` step by step, using the sphere
    /// sizes rather than the ball sizes the exponents were built from.
    pub fn increments_match(&self) -> bool {
        if self.base_valuation < 0 {
            return true;
        }
        let va = BigUint::from(self.base_valuation as u64);
        self.steps.windows(2).all(|w| {
            w[1].exponent.clone() == &w[0].exponent + BigUint::from(2u32) * &va * &w[1].sphere
        })
    }
}

/// `a` for a root of `f_m`.
fn base_valuation(
    params: &ModelParams,
    m: u32,
    root: &Root,
    precision: usize,
) -> Result<Valuation> {
    let q = params.q as i64;
    if let (Some(z), Theta::Exact(theta)) = (root.exact(), &params.theta) {
        let a = int(m as i64) * (z - Rational::one()) + int(q) + theta - Rational::one();
        return Ok(valuation(params.p, &a));
    }
    // v(m(z-1)) is certified; the sum only needs digits when it ties with
    // v(q + theta - 1).
    let p = params.p;
    let vz = Valuation::Finite(
        root.minus_one.or_max() + crate::padic::valuation_int(p, m as i64).or_max(),
    );
    let rest = match &params.theta {
        Theta::Exact(theta) => valuation(p, &(theta + int(q - 1))),
        Theta::Coupling { value, .. } => value
            .add(&PadicExpansion::from_integer(p, q - 1, precision))?
            .valuation(),
    };
    if vz != rest {
        return Ok(vz.min(rest));
    }
    let n = root.value.precision().unwrap_or(precision);
    let zm1 = root.value.sub(&PadicExpansion::one(p, n))?;
    let a = zm1
        .mul(&PadicExpansion::from_integer(p, m as i64, n))?
        .add(&params.theta_expansion(precision))?
        .add(&PadicExpansion::from_integer(p, q - 1, n))?;
    Ok(a.valuation())
}

/// Exponents of `|Z_{n+1}|_p` for `n = 0 .. n_max - 1` (k = 2).
pub fn partition_norm_trajectory(
    params: &ModelParams,
    m: u32,
    root: &Root,
    n_max: u32,
    precision: usize,
) -> Result<PartitionTrajectory> {
    if params.k != 2 {
        return Err(Error::UnsupportedOrder(params.k));
    }
    params.check_m(m)?;
    let va = base_valuation(params, m, root, precision)?;
    let Some(va) = va.finite() else {
        return Err(Error::PoleAtInput);
    };
    let k = BigUint::from(params.k);
    let mut steps = Vec::with_capacity(n_max as usize);
    let mut ball = BigUint::one();
    let mut sphere = BigUint::zero();
    for n in 0..n_max {
        if n >= 1 {
            // |W_n| = (k + 1) k^(n - 1)
            sphere = if n == 1 { &k + 1u32 } else { &sphere * &k };
            ball += &sphere;
        }
        let exponent = if va >= 0 {
            BigUint::from(2u32) * &ball * BigUint::from(va as u64)
        } else {
            BigUint::zero()
        };
        steps.push(TrajectoryStep {
            n,
            sphere: sphere.clone(),
            ball: ball.clone(),
            exponent,
        });
    }
    Ok(PartitionTrajectory {
        m,
        root: root.label(),
        base_valuation: va,
        steps,
    })
}
