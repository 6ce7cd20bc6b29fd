//! Brute-force verifiers: square tables modulo `p^N`, residue solutions of
//! the fixed-point congruences, and the rules-versus-direct grid check.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::classifier::{classify_direct, classify_rules, MClassification};
use crate::error::{Error, Result};
use crate::padic::{int, ratio, residue, unit_part, valuation, Prime, Rational, Valuation};
use crate::potts::{ModelParams, RootSet, Theta};

/// Largest residue space enumerated in one go.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;
/// Largest number of lift candidates examined at one level.
pub const LIFT_LIMIT: u128 = 4_000_000;

/// Which residues modulo `p^N` are squares, by squaring every residue.
pub struct BruteSquares {
    p: Prime,
    n: u32,
    modulus: u64,
    square: Vec<bool>,
}

impl BruteSquares {
    pub fn new(p: Prime, n: u32) -> Result<Self> {
        let modulus = (p.get() as u64)
            .checked_pow(n)
            .filter(|&m| m as u128 <= 64 * ENUMERATION_LIMIT)
            .ok_or(Error::SearchSpaceTooLarge {
                candidates: (p.get() as u128).saturating_pow(n),
                limit: 64 * ENUMERATION_LIMIT,
            })?;
        let mut square = vec![false; modulus as usize];
        for y in 0..modulus {
            square[((y as u128 * y as u128) % modulus as u128) as usize] = true;
        }
        Ok(BruteSquares {
            p,
            n,
            modulus,
            square,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_square(&self, r: u64) -> bool {
        self.square[(r % self.modulus) as usize]
    }

    /// Every y modulo `p^N` with `y^2 = r`.
    pub fn roots_of(&self, r: u64) -> Vec<u64> {
        let m = self.modulus as u128;
        (0..self.modulus)
            .filter(|&y| (y as u128 * y as u128) % m == r as u128 % m)
            .collect()
    }

    /// Strips `p^(2t)` from a and looks the unit up in the table.
    pub fn sqrt_exists(&self, a: &Rational) -> Result<bool> {
        if self.p.is_two() && self.n < 3 {
            return Err(Error::InvalidParams(
                "2-adic enumeration needs N >= 3".into(),
            ));
        }
        let (v, u) = unit_part(self.p, a)?;
        if v.rem_euclid(2) == 1 {
            return Err(Error::OddValuationShortcut);
        }
        let r = residue(&u, &BigUint::from(self.modulus))
            .to_u64()
            .expect("below the modulus");
        Ok(self.is_square(r))
    }
}

pub fn brute_sqrt_exists(p: Prime, a: &Rational, n: u32) -> Result<bool> {
    BruteSquares::new(p, n)?.sqrt_exists(a)
}

/// Residue solutions of `z_i (theta + S)^k = ((theta - 1) z_i + S + 1)^k`,
/// `S = sum z_j`, modulo `p^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSolutionSet {
    pub n: u32,
    pub modulus: u64,
    pub solutions: BTreeSet<Vec<u64>>,
    /// Residues modulo `p^N` of solutions modulo `p^L` for the deepest level
    /// `L` reached (at least N + 1); only these can come from p-adic
    /// solutions.
    pub stable: BTreeSet<Vec<u64>>,
    pub depth: u32,
    /// The reduced set stopped shrinking before the depth limit.
    pub converged: bool,
}

/// Extra levels searched beyond N.
pub const MAX_EXTRA_DEPTH: u32 = 16;
/// Consecutive unchanged levels required before the reduced set is accepted.
const CONFIRMATION: u32 = 2;

struct Congruence {
    theta: u128,
    k: u32,
    modulus: u128,
}

impl Congruence {
    fn mul(&self, a: u128, b: u128) -> u128 {
        (a % self.modulus) * (b % self.modulus) % self.modulus
    }

    fn pow(&self, mut b: u128, mut e: u32) -> u128 {
        let mut r = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    fn holds(&self, z: &[u64]) -> bool {
        let m = self.modulus;
        let s = z.iter().fold(1u128, |acc, &x| (acc + x as u128) % m) + m - 1;
        let den = self.pow((self.theta + s) % m, self.k);
        let tm1 = (self.theta + m - 1) % m;
        z.iter().all(|&zi| {
            let lhs = self.mul(zi as u128, den);
            let rhs = self.pow((self.mul(tm1, zi as u128) + s + 1) % m, self.k);
            lhs == rhs
        })
    }
}

fn residue_u128(r: &Rational, modulus: u128) -> u128 {
    residue(r, &BigUint::from(modulus))
        .to_u128()
        .expect("below the modulus")
}

pub fn brute_fixed_points_mod(params: &ModelParams, n: u32) -> Result<ResidueSolutionSet> {
    let Theta::Exact(theta) = &params.theta else {
        return Err(Error::InvalidParams(
            "enumeration needs an exact theta".into(),
        ));
    };
    if valuation(params.p, theta) < Valuation::Finite(0) {
        return Err(Error::InvalidParams("theta must be p-integral".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let p = params.p.get() as u128;
    let dim = params.q - 1;
    let candidates = p.checked_pow(n * dim).unwrap_or(u128::MAX);
    if candidates > ENUMERATION_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            candidates,
            limit: ENUMERATION_LIMIT,
        });
    }
    // Keep products of two residues below 2^128.
    let max_level = (1..=n + MAX_EXTRA_DEPTH)
        .take_while(|&l| p.checked_pow(l).is_some_and(|m| m < 1 << 62))
        .last()
        .unwrap_or(1);

    let mut level = 1u32;
    let mut current: BTreeSet<Vec<u64>> = enumerate_level_one(params, theta, dim)?;
    let mut solutions = BTreeSet::new();
    let mut reduced_history: Vec<BTreeSet<Vec<u64>>> = Vec::new();
    let modulus_n = p.pow(n) as u64;
    loop {
        if level == n {
            solutions = current.clone();
        }
        if level >= n {
            let reduced: BTreeSet<Vec<u64>> = current
                .iter()
                .map(|z| z.iter().map(|&x| x % modulus_n).collect())
                .collect();
            reduced_history.push(reduced);
            let h = &reduced_history;
            let settled = h.len() > CONFIRMATION as usize
                && h[h.len() - 1 - CONFIRMATION as usize..]
                    .windows(2)
                    .all(|w| w[0] == w[1]);
            if settled || level >= max_level || current.is_empty() {
                return Ok(ResidueSolutionSet {
                    n,
                    modulus: modulus_n,
                    solutions,
                    stable: h.last().cloned().unwrap_or_default(),
                    depth: level,
                    converged: settled || current.is_empty(),
                });
            }
        }
        match lift(params, theta, &current, level, dim) {
            Ok(next) => current = next,
            // The reduced set so far is still a valid necessary condition
            // once at least one level beyond N has been checked.
            Err(Error::SearchSpaceTooLarge { .. }) if level > n => {
                return Ok(ResidueSolutionSet {
                    n,
                    modulus: modulus_n,
                    solutions,
                    stable: reduced_history.pop().unwrap_or_default(),
                    depth: level,
                    converged: false,
                });
            }
            Err(e) => return Err(e),
        }
        level += 1;
    }
}

fn congruence(params: &ModelParams, theta: &Rational, level: u32) -> Congruence {
    let modulus = (params.p.get() as u128).pow(level);
    Congruence {
        theta: residue_u128(theta, modulus),
        k: params.k,
        modulus,
    }
}

fn enumerate_level_one(
    params: &ModelParams,
    theta: &Rational,
    dim: u32,
) -> Result<BTreeSet<Vec<u64>>> {
    let c = congruence(params, theta, 1);
    let p = params.p.get() as u64;
    let total = p.pow(dim);
    Ok((0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let z: Vec<u64> = (0..dim)
                .map(|_| {
                    let d = idx % p;
                    idx /= p;
                    d
                })
                .collect();
            c.holds(&z).then_some(z)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}

/// Solutions modulo `p^(level+1)` lying over `current`.
fn lift(
    params: &ModelParams,
    theta: &Rational,
    current: &BTreeSet<Vec<u64>>,
    level: u32,
    dim: u32,
) -> Result<BTreeSet<Vec<u64>>> {
    let p = params.p.get() as u64;
    let per = p.pow(dim);
    let work = current.len() as u128 * per as u128;
    if work > LIFT_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            candidates: work,
            limit: LIFT_LIMIT,
        });
    }
    let c = congruence(params, theta, level + 1);
    let step = p.pow(level);
    let base: Vec<&Vec<u64>> = current.iter().collect();
    Ok(base
        .par_iter()
        .flat_map_iter(|z| {
            let c = &c;
            (0..per).filter_map(move |mut idx| {
                let w: Vec<u64> = z
                    .iter()
                    .map(|&x| {
                        let d = idx % p;
                        idx /= p;
                        x + d * step
                    })
                    .collect();
                c.holds(&w).then_some(w)
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}

/// Residue of a rational modulo `p^N`, for comparing exact points with
/// enumerated ones.
pub fn residue_mod(p: Prime, r: &Rational, n: u32) -> Result<u64> {
    if valuation(p, r) < Valuation::Finite(0) {
        return Err(Error::InvalidParams("value must be p-integral".into()));
    }
    residue(r, &p.pow(n as usize))
        .to_u64()
        .ok_or(Error::Overflow)
}

/// One (p, q, theta, m) tuple.
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub p: Prime,
    pub q: u32,
    pub theta: Rational,
    pub m: u32,
}

#[derive(Clone, Debug, Default)]
pub struct GridSpec {
    pub points: Vec<GridPoint>,
}

/// The first `count` p-adic units in the sequence `1, -1, 2, -1/2, 3, ...`.
pub fn unit_samples(p: Prime, count: usize) -> Vec<Rational> {
    let mut out = vec![int(1), int(-1)];
    let mut n = 2i64;
    while out.len() < count {
        if n % p.get() as i64 != 0 {
            out.push(int(n));
            out.push(ratio(-1, n));
        }
        n += 1;
    }
    out.truncate(count);
    out
}

impl GridSpec {
    /// `theta = 1 + u p^v` for every listed unit u and valuation v, every
    /// `q` in `q_range` and every `m <= q/2`.
    pub fn product(
        p: Prime,
        q_range: std::ops::RangeInclusive<u32>,
        valuations: &[i64],
        units: &[Rational],
    ) -> Self {
        let mut points = Vec::new();
        for q in q_range {
            for &v in valuations {
                for u in units {
                    let theta = int(1) + u * crate::padic::prime_power(p, v);
                    for m in 1..=q / 2 {
                        points.push(GridPoint {
                            p,
                            q,
                            theta: theta.clone(),
                            m,
                        });
                    }
                }
            }
        }
        GridSpec { points }
    }

    /// p in {2, 3, 5, 7}, q in 2..=12, three valuations of `theta - 1`
    /// (1..=3 for odd p, 2..=4 for p = 2, the smallest inside `E_2`) and four
    /// unit parts.
    pub fn default_grid() -> Self {
        let mut points = Vec::new();
        for p in [2u64, 3, 5, 7] {
            let p = Prime::new(p).expect("prime");
            let vals: &[i64] = if p.is_two() { &[2, 3, 4] } else { &[1, 2, 3] };
            points.extend(Self::product(p, 2..=12, vals, &unit_samples(p, 4)).points);
        }
        GridSpec { points }
    }

    pub fn singleton(p: Prime, q: u32, theta: Rational, m: u32) -> Self {
        GridSpec {
            points: vec![GridPoint { p, q, theta, m }],
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mismatch {
    pub point: GridPoint,
    pub rules: Option<MClassification>,
    pub direct: Option<MClassification>,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct MismatchReport {
    pub checked: usize,
    /// Points where the quadratic has two distinct roots.
    pub two_root_points: usize,
    pub mismatches: Vec<Mismatch>,
}

impl MismatchReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn crosscheck(grid: &GridSpec, precision: usize) -> MismatchReport {
    crosscheck_with(grid, precision, classify_rules)
}

/// Grid check with a caller-supplied rule classifier. Each point compares the
/// rule count with the direct count, and two-root points also check Vieta's
/// relations and the product norm of `z - 1`.
pub fn crosscheck_with<F>(grid: &GridSpec, precision: usize, rules: F) -> MismatchReport
where
    F: Fn(&ModelParams, u32) -> Result<MClassification> + Sync,
{
    let results: Vec<(bool, Option<Mismatch>)> = grid
        .points
        .par_iter()
        .map(|pt| check_point(pt, precision, &rules))
        .collect();
    let mut report = MismatchReport {
        checked: results.len(),
        ..Default::default()
    };
    for (two, mismatch) in results {
        report.two_root_points += two as usize;
        report.mismatches.extend(mismatch);
    }
    report
}

fn check_point<F>(pt: &GridPoint, precision: usize, rules: &F) -> (bool, Option<Mismatch>)
where
    F: Fn(&ModelParams, u32) -> Result<MClassification>,
{
    let fail = |r: Option<MClassification>, d: Option<MClassification>, detail: String| {
        Some(Mismatch {
            point: pt.clone(),
            rules: r,
            direct: d,
            detail,
        })
    };
    let params = match ModelParams::with_domain_check(pt.p, pt.q, 2, pt.theta.clone(), false) {
        Ok(x) => x,
        Err(e) => return (false, fail(None, None, e.to_string())),
    };
    let r = rules(&params, pt.m);
    let d = classify_direct(&params, pt.m, precision);
    let (r, d) = match (r, d) {
        (Ok(r), Ok(d)) => (r, d),
        (r, d) => {
            let detail = format!(
                "rules: {:?}; direct: {:?}",
                r.as_ref().err(),
                d.as_ref().err()
            );
            return (false, fail(r.ok(), d.ok(), detail));
        }
    };
    let roots = d.roots.as_ref().expect("direct method keeps roots");
    let two = matches!(roots, RootSet::Two(..));
    if r.count != d.count {
        let detail = crate::classifier::mismatch_evidence(&params, &r, &d);
        return (two, fail(Some(r), Some(d), detail));
    }
    if let Err(detail) = vieta_and_product_norm(&params, pt.m, roots) {
        return (two, fail(Some(r), Some(d), detail));
    }
    (two, None)
}

/// For two distinct roots: `z1 z2 = (q-m)^2/m^2`, `z1 + z2 = -a1/a2` on the
/// available digits, and `v(z1 - 1) + v(z2 - 1) = v(q^2 - (theta-1)^2) - 2 v(m)`.
pub fn vieta_and_product_norm(
    params: &ModelParams,
    m: u32,
    roots: &RootSet,
) -> std::result::Result<(), String> {
    let RootSet::Two(z1, z2) = roots else {
        return Ok(());
    };
    let Theta::Exact(theta) = &params.theta else {
        return Ok(());
    };
    let p = params.p;
    let (q, mi) = (int(params.q as i64), int(m as i64));
    let b = theta - Rational::one();
    let product = (&q - &mi) * (&q - &mi) / (&mi * &mi);
    let sum = (&b * &b - int(2) * &mi * (&q - &mi)) / (&mi * &mi);
    let prod_ok = z1
        .value
        .mul(&z2.value)
        .map(|x| x.agrees_with(&product))
        .unwrap_or(false);
    let sum_ok = z1
        .value
        .add(&z2.value)
        .map(|x| x.agrees_with(&sum))
        .unwrap_or(false);
    let lhs = Valuation::Finite(z1.minus_one.or_max().saturating_add(z2.minus_one.or_max()));
    let lhs = if z1.is_one() || z2.is_one() {
        Valuation::Infinite
    } else {
        lhs
    };
    let rhs = match valuation(p, &(&q * &q - &b * &b)) {
        Valuation::Finite(v) => {
            Valuation::Finite(v - 2 * valuation(p, &mi).finite().expect("m is nonzero"))
        }
        Valuation::Infinite => Valuation::Infinite,
    };
    if prod_ok && sum_ok && lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "p={p} q={} theta={} m={m}: product ok {prod_ok}, sum ok {sum_ok}, \
             v((z1-1)(z2-1)) = {lhs}, expected {rhs}",
            params.q,
            params.theta_label()
        ))
    }
}

/// Every rational `a/b` with `0 < |a| <= bound`, `1 <= b <= bound`, in
/// lowest terms.
pub fn small_rationals(bound: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    for b in 1..=bound {
        for a in 1..=bound {
            if a.gcd(&b) == 1 {
                out.push(ratio(a, b));
                out.push(ratio(-a, b));
            }
        }
    }
    out
}

/// Rationals where the square-root criterion and enumeration modulo `p^N`
/// disagree.
pub fn sqrt_oracle_mismatches(p: Prime, bound: i64, n: u32) -> Result<Vec<Rational>> {
    let table = BruteSquares::new(p, n)?;
    let mut bad = Vec::new();
    for a in small_rationals(bound) {
        let expected = crate::functions::sqrt_exists(p, &a)?.exists;
        let brute = match table.sqrt_exists(&a) {
            Ok(b) => b,
            Err(Error::OddValuationShortcut) => false,
            Err(e) => return Err(e),
        };
        if expected != brute {
            bad.push(a);
        }
    }
    Ok(bad)
}

/// Whether every residue vector has all non-1 components congruent.
pub fn follows_block_pattern(z: &[u64]) -> bool {
    let mut others = z.iter().filter(|&&x| x != 1);
    match others.next() {
        None => true,
        Some(first) => others.all(|x| x == first),
    }
}
