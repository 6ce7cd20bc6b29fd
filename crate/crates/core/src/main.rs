use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use padic_potts::classifier::{count_tipgm, Method};
use padic_potts::functions::{exp_p, log_p, sqrt};
use padic_potts::oracle::{crosscheck, unit_samples, GridSpec};
use padic_potts::padic::{
    expand, int, norm, parse_rational, prime_power, PadicExpansion, Prime, Rational,
};
use padic_potts::potts::{verify_fixed_point, BoundaryField, ModelParams};
use padic_potts::report::{
    ClassifyJson, CrosscheckJson, PadicJson, ScanJson, ScanLine, VerifyJson,
};
use padic_potts::Error;

#[derive(Parser)]
#[command(
    name = "padic-potts",
    version,
    about = "Exact p-adic arithmetic and translation-invariant Gibbs measures of the p-adic Potts model"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Accept theta outside E_p.
    #[arg(long, global = true)]
    allow_out_of_domain: bool,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Work {
    /// Working precision in p-adic digits [env: PADIC_POTTS_PRECISION] [default: 64].
    #[arg(long, value_parser = clap::value_parser!(u32).range(8..))]
    precision: Option<u32>,
}

const PRECISION_ENV: &str = "PADIC_POTTS_PRECISION";
const DEFAULT_PRECISION: u32 = 64;

/// The flag wins over the environment, which wins over the default.
fn resolve_precision(flag: Option<u32>, min: u32) -> Result<usize, Error> {
    if let Some(n) = flag {
        return Ok(n as usize);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(s) => match s.trim().parse::<u32>() {
            Ok(n) if n >= min => Ok(n as usize),
            _ => Err(Error::InvalidParams(format!(
                "{PRECISION_ENV} = {s:?} is not an integer >= {min}"
            ))),
        },
        Err(_) => Ok(DEFAULT_PRECISION as usize),
    }
}

impl Work {
    fn digits(&self) -> Result<usize, Error> {
        resolve_precision(self.precision, 8)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Rules,
    Direct,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rules => Method::Rules,
            MethodArg::Direct => Method::Direct,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count translation-invariant measures for order-two trees.
    Classify {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        q: u32,
        /// theta as an exact rational.
        #[arg(
            long,
            allow_hyphen_values = true,
            required_unless_present = "coupling",
            conflicts_with = "coupling"
        )]
        theta: Option<String>,
        /// Coupling J; theta = exp_p(J) is computed to the working precision.
        #[arg(long, allow_hyphen_values = true)]
        coupling: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[command(flatten)]
        work: Work,
    },
    /// Check whether a boundary field is a fixed point of the recursion.
    Verify {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        q: u32,
        #[arg(short, default_value_t = 2)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Comma-separated components z_1, ..., z_{q-1}.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        z: Vec<String>,
    },
    /// Classify a list or grid of theta values.
    Scan {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        q: u32,
        /// Comma-separated theta values.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', conflicts_with_all = ["valuations", "units"])]
        theta_list: Option<Vec<String>>,
        /// Valuations v of theta - 1 = u p^v.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        valuations: Option<Vec<i64>>,
        /// Number of unit parts u taken from 1, -1, 2, -1/2, 3, ...
        #[arg(long, default_value_t = 4)]
        units: usize,
        /// Compare rules with the direct solver at every point.
        #[arg(long)]
        crosscheck: bool,
        #[command(flatten)]
        work: Work,
    },
    /// Compare rule-based and direct classification on a grid.
    Crosscheck {
        /// Single point instead of the default grid.
        #[arg(short, requires_all = ["q", "theta", "m"])]
        p: Option<u64>,
        #[arg(short)]
        q: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(short)]
        m: Option<u32>,
        #[command(flatten)]
        work: Work,
    },
    /// Single p-adic computations.
    Padic {
        #[command(subcommand)]
        op: PadicOp,
    },
}

#[derive(Args)]
struct PadicArgs {
    #[arg(short)]
    p: u64,
    /// Rational input.
    #[arg(allow_hyphen_values = true)]
    x: String,
    /// Digits of the result [env: PADIC_POTTS_PRECISION] [default: 64].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    precision: Option<u32>,
    /// Print every digit instead of the compact form.
    #[arg(long)]
    digits: bool,
}

#[derive(Subcommand)]
enum PadicOp {
    /// |x|_p as a power of p.
    Norm(PadicArgs),
    Expand(PadicArgs),
    /// Canonical square root.
    Sqrt(PadicArgs),
    Exp(PadicArgs),
    Log(PadicArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ThetaOutOfDomain { .. }
        | Error::OutsideDomain { .. }
        | Error::NoSquareRoot(_)
        | Error::InvalidPrime(_)
        | Error::InvalidRational(_)
        | Error::InvalidParams(_)
        | Error::InvalidM { .. }
        | Error::UnsupportedOrder(_)
        | Error::ZeroInput
        | Error::PrimeMismatch(..) => 2,
        Error::PrecisionExhausted(_) => 3,
        Error::RuleDirectMismatch(_) | Error::ClosedFormMismatch(_) | Error::UnmatchedCase(_) => 4,
        Error::PoleAtInput | Error::DivisionByZero => 5,
        Error::SearchSpaceTooLarge { .. } | Error::OddValuationShortcut | Error::Overflow => 1,
    }
}

struct Output {
    format: Format,
    out: Option<std::path::PathBuf>,
}

impl Output {
    fn emit<T: Serialize>(&self, value: &T, table: impl FnOnce(&T) -> String) -> Result<(), Error> {
        let json = serde_json::to_string_pretty(value).expect("reports serialize");
        if let Some(path) = &self.out {
            std::fs::write(path, format!("{json}\n")).map_err(|e| {
                Error::InvalidParams(format!("cannot write {}: {e}", path.display()))
            })?;
        }
        match self.format {
            Format::Json => println!("{json}"),
            Format::Table => print!("{}", table(value)),
        }
        Ok(())
    }
}

fn model(p: u64, q: u32, k: u32, theta: &str, allow: bool) -> Result<ModelParams, Error> {
    ModelParams::with_domain_check(Prime::new(p)?, q, k, parse_rational(theta)?, !allow)
}

fn render(x: &PadicExpansion, digits: bool) -> String {
    if digits {
        x.canonical_string()
    } else {
        x.compact_string()
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
    }
    let out = Output {
        format: cli.format,
        out: cli.out,
    };
    let allow = cli.allow_out_of_domain;
    match cli.command {
        Command::Classify {
            p,
            q,
            theta,
            coupling,
            method,
            work,
        } => {
            let n = work.digits()?;
            let params = match (theta, coupling) {
                (Some(t), _) => model(p, q, 2, &t, allow)?,
                (None, Some(j)) => {
                    ModelParams::from_coupling(Prime::new(p)?, q, 2, parse_rational(&j)?, n)?
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            let report = count_tipgm(&params, method.into(), n)?;
            if out.format == Format::Json {
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
            }
            out.emit(&ClassifyJson::new(&params, &report), ClassifyJson::to_table)?;
            Ok(0)
        }
        Command::Verify { p, q, k, theta, z } => {
            let params = model(p, q, k, &theta, allow)?;
            let z = z
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<Rational>, _>>()?;
            let field = BoundaryField::new(q, z.clone())?;
            let rep = verify_fixed_point(&params, &field)?;
            out.emit(&VerifyJson::new(&params, &z, &rep), VerifyJson::to_table)?;
            Ok(if rep.accepted() { 0 } else { 1 })
        }
        Command::Scan {
            p,
            q,
            theta_list,
            valuations,
            units,
            crosscheck: check,
            work,
        } => {
            let prime = Prime::new(p)?;
            let thetas: Vec<Rational> = match (theta_list, valuations) {
                (Some(list), _) => list
                    .iter()
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_rational(s))
                    .collect::<Result<_, _>>()?,
                (None, Some(vals)) => {
                    let us = unit_samples(prime, units);
                    vals.iter()
                        .flat_map(|&v| us.iter().map(move |u| int(1) + u * prime_power(prime, v)))
                        .collect()
                }
                (None, None) => Vec::new(),
            };
            let n = work.digits()?;
            let method = if check { Method::Both } else { Method::Rules };
            let points: Vec<ScanLine> = thetas
                .par_iter()
                .map(|t| scan_point(prime, q, t, method, n, allow))
                .collect();
            let failed = points.iter().any(|l| l.error.is_some());
            let mismatched = points.iter().any(|l| !l.mismatches.is_empty());
            out.emit(
                &ScanJson {
                    p: prime.get(),
                    q,
                    points,
                },
                ScanJson::to_table,
            )?;
            Ok(if mismatched {
                4
            } else if failed {
                1
            } else {
                0
            })
        }
        Command::Crosscheck {
            p,
            q,
            theta,
            m,
            work,
        } => {
            let grid = match (p, q, theta, m) {
                (Some(p), Some(q), Some(t), Some(m)) => {
                    GridSpec::singleton(Prime::new(p)?, q, parse_rational(&t)?, m)
                }
                _ => GridSpec::default_grid(),
            };
            let report = crosscheck(&grid, work.digits()?);
            let json = CrosscheckJson {
                checked: report.checked,
                two_root_points: report.two_root_points,
                mismatches: report.mismatches.iter().map(|m| m.detail.clone()).collect(),
            };
            out.emit(&json, CrosscheckJson::to_table)?;
            Ok(if report.is_clean() { 0 } else { 4 })
        }
        Command::Padic { op } => {
            let (name, args) = match &op {
                PadicOp::Norm(a) => ("norm", a),
                PadicOp::Expand(a) => ("expand", a),
                PadicOp::Sqrt(a) => ("sqrt", a),
                PadicOp::Exp(a) => ("exp", a),
                PadicOp::Log(a) => ("log", a),
            };
            let p = Prime::new(args.p)?;
            let x = parse_rational(&args.x)?;
            let n = resolve_precision(args.precision, 1)?;
            let result = match op {
                PadicOp::Norm(_) => norm(p, &x).render(p),
                PadicOp::Expand(_) => render(&expand(p, &x, n), args.digits),
                PadicOp::Sqrt(_) => render(&sqrt(p, &x, n)?, args.digits),
                PadicOp::Exp(_) => render(&exp_p(p, &x, n)?, args.digits),
                PadicOp::Log(_) => render(&log_p(p, &x, n)?, args.digits),
            };
            out.emit(&PadicJson::new(name, p, &args.x, result), |j| {
                format!("{}\n", j.result)
            })?;
            Ok(0)
        }
    }
}

fn scan_point(
    p: Prime,
    q: u32,
    theta: &Rational,
    method: Method,
    n: usize,
    allow: bool,
) -> ScanLine {
    let label = padic_potts::padic::render_rational(theta);
    let fail = |e: Error| ScanLine {
        theta: label.clone(),
        n_ti: None,
        per_m_counts: vec![],
        error: Some(e.to_string()),
        mismatches: vec![],
        warnings: vec![],
    };
    let params = match ModelParams::with_domain_check(p, q, 2, theta.clone(), !allow) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    match count_tipgm(&params, method, n) {
        Ok(r) => ScanLine {
            theta: label,
            n_ti: Some(r.n_ti),
            per_m_counts: r.per_m.iter().map(|e| e.class.count).collect(),
            error: None,
            mismatches: vec![],
            warnings: r.warnings,
        },
        Err(Error::RuleDirectMismatch(m)) => ScanLine {
            mismatches: vec![m],
            ..fail(Error::RuleDirectMismatch(String::new()))
        },
        Err(e) => fail(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
