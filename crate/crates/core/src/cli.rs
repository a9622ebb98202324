//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 1 when a computation reports failure, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::cm::{class_invariant, ImagQuadOrder, DEFAULT_DIGITS, MIN_DIGITS};
use crate::decomposition::{decompose_form, j4_hauptmodul_relation, sturm_truncation};
use crate::elliptic::verify_identities;
use crate::error::Error;
use crate::eta::{cusp_orders, cusp_width, eta_quotient_series, ligozat_check, EtaQuotient};
use crate::reciprocity::{class_number, class_polynomial, coset_reps, degree_formula, verify_sign_flip};
use crate::series::QSeries;
use crate::exponent;

pub const DIGITS_ENV: &str = "ETAFORGE_DIGITS";
pub const MIN_TRUNC: u64 = 20;

#[derive(Parser, Debug)]
#[command(name = "etaforge", version, about = "Exact q-series and class invariants for eta-quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Working precision in decimal digits (default 300, or $ETAFORGE_DIGITS).
    #[arg(long, global = true)]
    digits: Option<u32>,

    /// Truncation order O(q^T) for series work.
    #[arg(long, global = true, default_value_t = 200)]
    trunc: u64,

    #[arg(long = "degree-bound", global = true, default_value_t = 6)]
    degree_bound: u32,

    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,

    /// Emit plain text.
    #[arg(long, global = true)]
    text: bool,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct QuotientArgs {
    #[arg(long)]
    level: u64,
    /// Exponents as d:m pairs, e.g. 1:-8,4:8.
    #[arg(long, allow_hyphen_values = true)]
    exps: String,
}

#[derive(Args, Debug, Clone)]
struct OrderArgs {
    /// Fundamental discriminant d_K < 0.
    #[arg(long, allow_hyphen_values = true)]
    disc: i64,
    #[arg(long)]
    conductor: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// q-expansion of an eta-quotient.
    Expand(QuotientArgs),
    /// Modularity conditions for an eta-quotient.
    Ligozat(QuotientArgs),
    /// Orders of an eta-quotient at the cusps of Gamma0(N).
    CuspOrders(QuotientArgs),
    /// Exact Siegel, eta and Weierstrass identity suite.
    VerifyIdentities,
    /// Writes an eta-quotient form on Gamma0(2^n) in the generator monomials.
    Decompose {
        #[command(flatten)]
        target: QuotientArgs,
        #[arg(long, default_value_t = 0)]
        weight: u32,
    },
    /// j(4 tau) as a rational function of eta(4 tau)^8 / eta(tau)^8.
    J4Relation,
    /// 256 eta(N tau_K)^8 / eta((N/4) tau_K)^8.
    ClassInvariant(OrderArgs),
    /// Integer minimal polynomial of the class invariant over K.
    MinPoly(OrderArgs),
    /// Class number, ring class degree and coset count.
    Degree(OrderArgs),
    /// Checks that h_m(tau_K) has the conjugate -h_m(tau_K) for conductor 2^m.
    VerifySignFlip(OrderArgs),
}

struct Config {
    digits: u32,
    trunc: u64,
    degree_bound: u32,
    text: bool,
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

struct Report {
    json: serde_json::Value,
    text: String,
    ok: bool,
}

impl Report {
    fn new<T: Serialize>(value: &T, text: String, ok: bool) -> Result<Self, Failure> {
        let json = serde_json::to_value(value).map_err(|e| Failure::Compute(e.to_string()))?;
        Ok(Self { json, text, ok })
    }
}

pub fn parse_exps(s: &str) -> Result<Vec<(u64, i64)>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (d, m) = p
                .split_once(':')
                .ok_or_else(|| format!("expected d:m, got {p:?}"))?;
            let d = d.trim().parse::<u64>().map_err(|e| format!("{d:?}: {e}"))?;
            let m = m.trim().parse::<i64>().map_err(|e| format!("{m:?}: {e}"))?;
            Ok((d, m))
        })
        .collect()
}

fn quotient(q: &QuotientArgs) -> Result<EtaQuotient, Failure> {
    let exps = parse_exps(&q.exps).map_err(Failure::Usage)?;
    EtaQuotient::new(q.level, exps).map_err(|e| Failure::Usage(e.to_string()))
}

fn order(o: &OrderArgs) -> Result<ImagQuadOrder, Failure> {
    ImagQuadOrder::new(o.disc, o.conductor).map_err(|e| Failure::Usage(e.to_string()))
}

fn config(cli: &Cli) -> Result<Config, Failure> {
    let digits = match cli.digits {
        Some(d) => d,
        None => match std::env::var(DIGITS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{DIGITS_ENV}={v:?} is not a number")))?,
            Err(_) => DEFAULT_DIGITS,
        },
    };
    if digits < MIN_DIGITS {
        return Err(Failure::Usage(format!("--digits must be at least {MIN_DIGITS}")));
    }
    if cli.trunc < MIN_TRUNC {
        return Err(Failure::Usage(format!("--trunc must be at least {MIN_TRUNC}")));
    }
    Ok(Config {
        digits,
        trunc: cli.trunc,
        degree_bound: cli.degree_bound,
        text: cli.text,
        out: cli.out.clone(),
    })
}

fn series_text(s: &QSeries) -> String {
    format!("{s}\n")
}

fn execute(cmd: &Command, cfg: &Config) -> Result<Report, Failure> {
    let trunc = exponent(cfg.trunc as i64, 1);
    match cmd {
        Command::Expand(q) => {
            let e = quotient(q)?;
            let s = eta_quotient_series(&e, trunc);
            Report::new(&json!({ "quotient": e, "series": s }), series_text(&s), true)
        }
        Command::Ligozat(q) => {
            let e = quotient(q)?;
            let r = ligozat_check(&e);
            let text = format!(
                "{e}\nweight {}\nsum m_d = {} (even: {})\nsum d m_d = {} (0 mod 24: {})\nsum (N/d) m_d = {} (0 mod 24: {})\nsquare product: {}\npasses: {}\n",
                r.weight, r.sum_exponents, r.cond_parity, r.sum_d_m, r.cond_24a, r.sum_n_over_d_m, r.cond_24b, r.cond_square, r.passes
            );
            Report::new(&r, text, true)
        }
        Command::CuspOrders(q) => {
            let e = quotient(q)?;
            let rows: Vec<_> = cusp_orders(&e)
                .into_iter()
                .map(|(c, o)| {
                    json!({
                        "cusp": c.to_string(),
                        "width": cusp_width(e.level(), c.c as u64),
                        "order": o.to_string(),
                    })
                })
                .collect();
            let text = rows
                .iter()
                .map(|r| format!("{}  width {}  order {}\n", r["cusp"].as_str().unwrap_or(""), r["width"], r["order"].as_str().unwrap_or("")))
                .collect();
            Report::new(&json!({ "quotient": e, "cusps": rows }), text, true)
        }
        Command::VerifyIdentities => {
            let reports = verify_identities(trunc, exponent(4, 1));
            let ok = reports.iter().all(|r| r.pass);
            let text = reports
                .iter()
                .map(|r| {
                    format!(
                        "{}  {}  O(q^{})\n",
                        if r.pass { "PASS" } else { "FAIL" },
                        r.identity,
                        r.trunc
                    )
                })
                .collect();
            Report::new(&reports, text, ok)
        }
        Command::Decompose { target, weight } => {
            let e = quotient(target)?;
            let level = e.level();
            if !level.is_power_of_two() || level < 4 {
                return Err(Failure::Usage(format!("level {level} must be 2^n with n >= 2")));
            }
            let n = level.trailing_zeros();
            let need = sturm_truncation(level, *weight as u64, cfg.degree_bound as u64);
            let t = exponent(need.max(cfg.trunc) as i64, 1);
            let s = eta_quotient_series(&e, t);
            let comb = decompose_form(&s, n, *weight, cfg.degree_bound)?;
            let text = comb
                .terms
                .iter()
                .map(|(c, q)| format!("{c} * {q}\n"))
                .collect();
            Report::new(&comb, text, true)
        }
        Command::J4Relation => {
            let r = j4_hauptmodul_relation(cfg.degree_bound as usize)?;
            let fmt = |p: &[rug::Rational]| p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
            let text = format!("A: [{}]\nB: [{}]\n", fmt(&r.numer), fmt(&r.denom));
            Report::new(&r, text, true)
        }
        Command::ClassInvariant(o) => {
            let ord = order(o)?;
            let v = class_invariant(&ord, cfg.digits)?;
            let text = format!("{}\n", v.re_string());
            Report::new(&json!({ "d_K": ord.d_k(), "N": ord.conductor(), "value": v }), text, true)
        }
        Command::MinPoly(o) => {
            let ord = order(o)?;
            let r = class_polynomial(&ord, cfg.digits)?;
            let text = format!(
                "{}\nmax rounding residual {}\nagrees at {} digits: {}\n",
                r.poly.join(" "),
                r.max_rounding_residual,
                r.rung_digits,
                r.rung_agrees
            );
            let ok = r.rung_agrees;
            Report::new(&r, text, ok)
        }
        Command::Degree(o) => {
            let ord = order(o)?;
            let h = class_number(ord.d_k())?;
            let deg = degree_formula(&ord)?;
            let cosets = if ord.conductor() >= 2 { coset_reps(&ord)?.len() as u64 } else { 1 };
            let text = format!("class number {h}\ndegree {deg}\ncosets {cosets}\n");
            let ok = cosets * h == deg;
            Report::new(
                &json!({ "d_K": ord.d_k(), "N": ord.conductor(), "class_number": h, "degree": deg, "cosets": cosets }),
                text,
                ok,
            )
        }
        Command::VerifySignFlip(o) => {
            let ord = order(o)?;
            let n = ord.conductor();
            if !n.is_power_of_two() || n < 8 {
                return Err(Failure::Usage(format!("conductor {n} must be 2^m with m >= 3")));
            }
            let r = verify_sign_flip(n.trailing_zeros(), &ord, cfg.digits)?;
            let text = format!(
                "gamma {}  lift {}\nresidual 1e{:.1}\npass: {}\n",
                r.gamma, r.lift, r.residual_log10, r.pass
            );
            let ok = r.pass;
            Report::new(&r, text, ok)
        }
    }
}

fn emit(cfg: &Config, report: &Report) -> std::io::Result<()> {
    let body = if cfg.text {
        report.text.clone()
    } else {
        let mut s = serde_json::to_string_pretty(&report.json)?;
        s.push('\n');
        s
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(Failure::Usage(m)) | Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            return 2;
        }
    };
    match execute(&cli.command, &cfg) {
        Ok(report) => {
            if let Err(e) = emit(&cfg, &report) {
                eprintln!("error: {e}");
                return 1;
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}
