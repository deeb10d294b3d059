use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qfrac_core::check::{fmt_num, run_check, CheckConfig, Status, Suite};
use qfrac_core::explore::{default_pairs, default_points, explore_right_semigroup, write_explore_csv};
use qfrac_core::expr::Expr;
use qfrac_core::series::{reset_term_counter, term_counter};
use qfrac_core::{
    left_caputo, left_frac_integral, left_riemann_deriv, q_exp_big_e, q_exp_e, q_factorial_power, q_gamma,
    q_mittag_leffler, right_caputo, right_frac_integral, right_riemann_deriv, FracOrder, MLParams, QError,
    QParams, RightOpContext, Truncation,
};

const EXIT_FAIL: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "qfrac", version, about = "Nabla q-fractional calculus: evaluate, verify identities, explore")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one operator at one or more points.
    Eval(EvalArgs),
    /// Run an identity suite and write the report.
    Check(CheckArgs),
    /// Measure the finite-b right semigroup residual over an (alpha, beta) grid.
    Explore(ExploreArgs),
}

#[derive(Args)]
struct Common {
    /// Relative tolerance of the series/product stopping rule.
    #[arg(long, env = "QFRAC_REL_TOL")]
    rel_tol: Option<f64>,
    /// Hard cap on terms per series or product.
    #[arg(long, env = "QFRAC_MAX_TERMS")]
    max_terms: Option<usize>,
    /// Output path; `-` is stdout.
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long)]
    verbose: bool,
}

impl Common {
    fn truncation(&self) -> Result<Truncation, CliError> {
        let mut t = Truncation::default();
        if let Some(r) = self.rel_tol {
            t.rel_tol = r;
        }
        if let Some(m) = self.max_terms {
            t.max_terms = m;
        }
        t.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(t)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Gamma,
    Qfact,
    Ml,
    #[value(name = "eq")]
    SmallE,
    #[value(name = "Eq")]
    BigE,
    Fracint,
    Fracder,
    Caputo,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Gamma => "gamma",
            Target::Qfact => "qfact",
            Target::Ml => "ml",
            Target::SmallE => "eq",
            Target::BigE => "Eq",
            Target::Fracint => "fracint",
            Target::Fracder => "fracder",
            Target::Caputo => "caputo",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(value_enum)]
    target: Target,
    #[arg(long)]
    q: f64,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Lower limit of left operators.
    #[arg(long)]
    a: Option<f64>,
    /// Upper limit of right operators; `inf` is allowed.
    #[arg(long)]
    b: Option<f64>,
    /// Evaluation points (space or comma separated).
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
    /// Mittag-Leffler arguments.
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    z: Vec<f64>,
    #[arg(long)]
    z0: Option<f64>,
    /// Integrand in the expression language (s, t, numbers, + - * /, ^, sqr, inv).
    #[arg(long)]
    f: Option<String>,
    /// Second argument of `qfact`, `(t - s)_q^alpha`.
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, value_enum, default_value = "left")]
    side: Side,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Negative-control fixture: perturb Gamma_q inside the recurrence identity.
    #[arg(long, hide = true)]
    corrupt_gamma: bool,
    #[command(flatten)]
    common: Common,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value = "1")]
    f: String,
    /// Inner orders; crossed with --beta. Defaults to 0.25, 0.5, 0.75, 1.5.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    alpha: Vec<f64>,
    /// Outer orders; crossed with --alpha.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    beta: Vec<f64>,
    /// Explicit grid `a:b,a:b,...`; overrides --alpha/--beta. An empty string is an empty grid.
    #[arg(long)]
    pairs: Option<String>,
    /// Evaluation points; defaults to b q, b q^2, b q^3.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    t: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
    Io(io::Error),
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn open_out(path: &str) -> Result<Box<dyn Write>, CliError> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn need(x: Option<f64>, flag: &str) -> Result<f64, CliError> {
    x.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this target")))
}

fn parse_f(src: Option<&str>) -> Result<Expr, CliError> {
    let src = src.ok_or_else(|| CliError::Usage("--f is required for this target".into()))?;
    Expr::parse(src).map_err(|e| CliError::Usage(format!("--f: {e}")))
}

#[derive(Serialize)]
struct EvalRow {
    target: &'static str,
    q: f64,
    alpha: Option<f64>,
    point: Option<f64>,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<u64>,
}

fn cmd_eval(args: EvalArgs) -> Result<u8, CliError> {
    let p = QParams::with_truncation(args.q, args.common.truncation()?)?;
    let target = args.target;
    let alpha = args.alpha;
    let mut rows = Vec::new();
    let mut emit = |point: Option<f64>, eval: &mut dyn FnMut() -> Result<f64, QError>| -> Result<(), CliError> {
        reset_term_counter();
        let value = eval()?;
        let terms = args.common.verbose.then(term_counter);
        rows.push(EvalRow { target: target.name(), q: args.q, alpha, point, value, terms });
        Ok(())
    };
    let points = |v: &Vec<f64>, flag: &str| -> Result<Vec<f64>, CliError> {
        if v.is_empty() {
            Err(CliError::Usage(format!("--{flag} is required for this target")))
        } else {
            Ok(v.clone())
        }
    };

    match target {
        Target::Gamma => {
            let a = need(alpha, "alpha")?;
            emit(None, &mut || q_gamma(a, &p))?;
        }
        Target::Qfact => {
            let a = need(alpha, "alpha")?;
            let s = need(args.s, "s")?;
            for t in points(&args.t, "t")? {
                emit(Some(t), &mut || q_factorial_power(t, s, a, &p))?;
            }
        }
        Target::Ml => {
            let ml = MLParams::new(
                need(alpha, "alpha")?,
                args.beta.unwrap_or(1.0),
                need(args.lambda, "lambda")?,
                args.z0.unwrap_or(0.0),
            )?;
            for z in points(&args.z, "z")? {
                emit(Some(z), &mut || q_mittag_leffler(&ml, z, &p))?;
            }
        }
        Target::SmallE => {
            for t in points(&args.t, "t")? {
                emit(Some(t), &mut || q_exp_e(t, &p))?;
            }
        }
        Target::BigE => {
            for t in points(&args.t, "t")? {
                emit(Some(t), &mut || q_exp_big_e(t, &p))?;
            }
        }
        Target::Fracint | Target::Fracder | Target::Caputo => {
            let order = FracOrder::new(need(alpha, "alpha")?)?;
            let f = parse_f(args.f.as_deref())?;
            let ts = points(&args.t, "t")?;
            match args.side {
                Side::Left => {
                    let a = args.a.unwrap_or(0.0);
                    for t in ts {
                        emit(Some(t), &mut || match target {
                            Target::Fracint => left_frac_integral(&f, a, &order, t, &p),
                            Target::Fracder => left_riemann_deriv(&f, a, &order, t, &p),
                            _ => left_caputo(&f, a, &order, t, &p),
                        })?;
                    }
                }
                Side::Right => {
                    let ctx = RightOpContext::from_value(need(args.b, "b")?, &p)?;
                    for t in ts {
                        emit(Some(t), &mut || match target {
                            Target::Fracint => right_frac_integral(&f, &ctx, &order, t, &p),
                            Target::Fracder => right_riemann_deriv(&f, &ctx, &order, t, &p),
                            _ => right_caputo(&f, &ctx, &order, t, &p),
                        })?;
                    }
                }
            }
        }
    }

    let mut out = open_out(&args.common.out)?;
    match args.format {
        Format::Json => {
            for r in &rows {
                serde_json::to_writer(&mut out, r).map_err(io::Error::from)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let mut header = vec!["target", "q", "alpha", "point", "value"];
            if args.common.verbose {
                header.push("terms");
            }
            w.write_record(&header)?;
            let num = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
            for r in &rows {
                let mut rec =
                    vec![r.target.to_string(), fmt_num(r.q), num(r.alpha), num(r.point), fmt_num(r.value)];
                if let Some(n) = r.terms {
                    rec.push(n.to_string());
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> Result<u8, CliError> {
    let cfg = CheckConfig { seed: args.seed, truncation: args.common.truncation()?, corrupt_gamma: args.corrupt_gamma };
    let started = Instant::now();
    let report = run_check(args.suite, &cfg)?;
    let mut out = open_out(&args.common.out)?;
    match args.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv => report.write_csv(&mut out)?,
    }
    out.flush()?;
    if args.common.verbose {
        for r in report.records.iter().filter(|r| r.status != Status::Pass) {
            eprintln!(
                "{} {} q={} alpha={:?} a={:?} b={:?} t={:?} [{}] rel_err={:?} {}",
                r.status.as_str(),
                r.identity_id,
                r.q,
                r.alpha,
                r.a,
                r.b,
                r.t,
                r.detail,
                r.rel_err,
                r.error.as_deref().unwrap_or("")
            );
        }
    }
    eprintln!(
        "check {}: {} records, {} passed, {} failed, {} errors in {:.2}s",
        report.suite,
        report.total,
        report.passed,
        report.failed,
        report.errors,
        started.elapsed().as_secs_f64()
    );
    Ok(match report.status {
        Status::Pass => 0,
        Status::Fail => EXIT_FAIL,
        Status::Error => EXIT_NUMERIC,
    })
}

fn parse_pairs(src: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let bad = || CliError::Usage(format!("--pairs expects `alpha:beta,...`, got {src:?}"));
    src.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (a, b) = item.split_once(':').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn cmd_explore(args: ExploreArgs) -> Result<u8, CliError> {
    let p = QParams::with_truncation(args.q, args.common.truncation()?)?;
    let f = Expr::parse(&args.f).map_err(|e| CliError::Usage(format!("--f: {e}")))?;
    let pairs = match &args.pairs {
        Some(src) => parse_pairs(src)?,
        None if args.alpha.is_empty() && args.beta.is_empty() => default_pairs(),
        None => {
            let defaults = [0.25, 0.5, 0.75, 1.5];
            let alphas = if args.alpha.is_empty() { defaults.to_vec() } else { args.alpha.clone() };
            let betas = if args.beta.is_empty() { defaults.to_vec() } else { args.beta.clone() };
            alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect()
        }
    };
    let points = if args.t.is_empty() { default_points(args.b, &p) } else { args.t.clone() };
    let records = explore_right_semigroup(&f, &pairs, &points, args.b, &p)?;
    let mut out = open_out(&args.common.out)?;
    write_explore_csv(&records, &mut out)?;
    out.flush()?;
    let errored = records.iter().filter(|r| r.error.is_some()).count();
    if args.common.verbose {
        eprintln!("explore: {} rows, {} with errors", records.len(), errored);
    }
    Ok(if !records.is_empty() && errored == records.len() { EXIT_NUMERIC } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Explore(a) => cmd_explore(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
