//! Identity harness: parameter sweeps over the calculus identities, each
//! evaluated on both sides and compared at a per-identity tolerance.
//!
//! Cases are built deterministically (seeded draws come from [`Lcg`]), run in
//! parallel, and reported in build order, so a given seed and truncation
//! policy always produce the same report.

mod suites;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QError, QResult};
use crate::params::{QParams, Truncation};
use crate::series::{reset_term_counter, term_counter};
use crate::special::q_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Special,
    Frac,
    Ivp,
    All,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Core, Suite::Special, Suite::Frac, Suite::Ivp];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Special => "special",
            Suite::Frac => "frac",
            Suite::Ivp => "ivp",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core" => Ok(Suite::Core),
            "special" => Ok(Suite::Special),
            "frac" => Ok(Suite::Frac),
            "ivp" => Ok(Suite::Ivp),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite '{s}' (expected core, special, frac, ivp or all)")),
        }
    }
}

/// Settings for one harness run.
#[derive(Debug, Clone, Default)]
pub struct CheckConfig {
    pub seed: u64,
    pub truncation: Truncation,
    /// Test fixture: perturbs `Gamma_q` inside the recurrence identity only,
    /// so exactly those records fail.
    pub corrupt_gamma: bool,
}

impl CheckConfig {
    pub(crate) fn params(&self, q: f64) -> QResult<QParams> {
        QParams::with_truncation(q, self.truncation)
    }

    pub(crate) fn gamma(&self) -> GammaFn {
        if self.corrupt_gamma {
            corrupted_gamma
        } else {
            q_gamma
        }
    }
}

pub(crate) type GammaFn = fn(f64, &QParams) -> QResult<f64>;

fn corrupted_gamma(alpha: f64, p: &QParams) -> QResult<f64> {
    Ok(q_gamma(alpha, p)? * (1.0 + 1e-6 * alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// One evaluated identity instance.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub identity_id: String,
    pub suite: Suite,
    pub q: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    /// `null` in JSON when the upper limit is infinite; see `detail`.
    pub b: Option<f64>,
    pub t: Option<f64>,
    pub detail: String,
    pub value_lhs: Option<f64>,
    pub value_rhs: Option<f64>,
    pub rel_err: Option<f64>,
    pub tol: f64,
    pub terms: u64,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub seed: u64,
    pub status: Status,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub records: Vec<Record>,
}

impl CheckReport {
    /// 0 when everything passed, 2 if any record errored, else 1.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)
    }

    pub const CSV_HEADER: [&'static str; 12] =
        ["identity_id", "q", "alpha", "beta", "a", "b", "t", "value_lhs", "value_rhs", "rel_err", "terms", "status"];

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::CSV_HEADER)?;
        let num = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        for r in &self.records {
            out.write_record([
                r.identity_id.clone(),
                fmt_num(r.q),
                num(r.alpha),
                num(r.beta),
                num(r.a),
                num(r.b),
                num(r.t),
                num(r.value_lhs),
                num(r.value_rhs),
                num(r.rel_err),
                r.terms.to_string(),
                r.status.as_str().to_string(),
            ])?;
        }
        out.flush()
    }
}

/// Shortest round-trip formatting; exponent form outside `[1e-5, 1e16)`.
pub fn fmt_num(x: f64) -> String {
    let m = x.abs();
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if m == 0.0 || (1e-5..1e16).contains(&m) || x.is_nan() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// How the two sides of an identity are compared.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Compare {
    /// `|lhs - rhs| / scale <= tol`, `scale = max(|lhs|, |rhs|)` unless the
    /// case supplies one.
    Relative(f64),
    /// Bitwise equality of the two values (`0.0 == -0.0`).
    Exact,
    /// `lhs <= rhs + slack`.
    AtMost(f64),
}

pub(crate) struct Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: Option<f64>,
}

impl Outcome {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Outcome { lhs, rhs, scale: None }
    }

    pub fn scaled(lhs: f64, rhs: f64, scale: f64) -> Self {
        Outcome { lhs, rhs, scale: Some(scale) }
    }

    /// For right-hand sides that are sums which may cancel to zero: the error
    /// is measured against the largest of `|lhs|`, `|rhs|` and the summands.
    pub fn with_terms(lhs: f64, terms: &[f64]) -> Self {
        let rhs = terms.iter().sum();
        let scale = terms.iter().fold(lhs.abs().max(f64::abs(rhs)), |m, x| m.max(x.abs()));
        Outcome { lhs, rhs, scale: Some(scale) }
    }
}

type Runner = Box<dyn Fn() -> QResult<Outcome> + Send + Sync>;

pub(crate) struct Case {
    pub id: &'static str,
    pub suite: Suite,
    pub q: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub t: Option<f64>,
    pub detail: String,
    pub compare: Compare,
    pub run: Runner,
}

impl Case {
    pub fn new(id: &'static str, suite: Suite, q: f64, compare: Compare, run: Runner) -> Self {
        Case { id, suite, q, alpha: None, beta: None, a: None, b: None, t: None, detail: String::new(), compare, run }
    }

    pub fn alpha(mut self, x: f64) -> Self {
        self.alpha = Some(x);
        self
    }

    pub fn beta(mut self, x: f64) -> Self {
        self.beta = Some(x);
        self
    }

    pub fn a(mut self, x: f64) -> Self {
        self.a = Some(x);
        self
    }

    pub fn b(mut self, x: f64) -> Self {
        self.b = Some(x);
        self
    }

    pub fn t(mut self, x: f64) -> Self {
        self.t = Some(x);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn execute(&self) -> Record {
        reset_term_counter();
        let result = (self.run)();
        let terms = term_counter();
        let tol = match self.compare {
            Compare::Relative(t) | Compare::AtMost(t) => t,
            Compare::Exact => 0.0,
        };
        let mut rec = Record {
            identity_id: format!("{}.{}", self.suite, self.id),
            suite: self.suite,
            q: self.q,
            alpha: self.alpha,
            beta: self.beta,
            a: self.a,
            b: self.b,
            t: self.t,
            detail: self.detail.clone(),
            value_lhs: None,
            value_rhs: None,
            rel_err: None,
            tol,
            terms,
            status: Status::Error,
            error: None,
        };
        match result {
            Err(e) => rec.error = Some(e.to_string()),
            Ok(o) if !o.lhs.is_finite() || !o.rhs.is_finite() => {
                rec.value_lhs = Some(o.lhs);
                rec.value_rhs = Some(o.rhs);
                rec.error = Some(QError::Domain("non-finite value".into()).to_string());
            }
            Ok(o) => {
                let (err, pass) = match self.compare {
                    Compare::Relative(tol) => {
                        let scale = o.scale.unwrap_or(o.lhs.abs().max(o.rhs.abs()));
                        let diff = (o.lhs - o.rhs).abs();
                        let err = if diff == 0.0 { 0.0 } else { diff / scale };
                        (err, err <= tol)
                    }
                    Compare::Exact => {
                        let diff = (o.lhs - o.rhs).abs();
                        (diff, o.lhs == o.rhs)
                    }
                    Compare::AtMost(slack) => {
                        let excess = (o.lhs - o.rhs).max(0.0);
                        (excess, o.lhs <= o.rhs + slack)
                    }
                };
                rec.value_lhs = Some(o.lhs);
                rec.value_rhs = Some(o.rhs);
                rec.rel_err = Some(err);
                rec.status = if pass { Status::Pass } else { Status::Fail };
            }
        }
        rec
    }
}

/// Builds the cases of one suite (or all four) in a fixed order.
pub(crate) fn build_cases(suite: Suite, cfg: &CheckConfig) -> QResult<Vec<Case>> {
    let mut cases = Vec::new();
    for s in Suite::ALL {
        if suite == s || suite == Suite::All {
            match s {
                Suite::Core => suites::core(cfg, &mut cases)?,
                Suite::Special => suites::special(cfg, &mut cases)?,
                Suite::Frac => suites::frac(cfg, &mut cases)?,
                Suite::Ivp => suites::ivp(cfg, &mut cases)?,
                Suite::All => unreachable!(),
            }
        }
    }
    Ok(cases)
}

/// Runs a suite and collects its report.
pub fn run_check(suite: Suite, cfg: &CheckConfig) -> QResult<CheckReport> {
    cfg.truncation.validate()?;
    let cases = build_cases(suite, cfg)?;
    let records: Vec<Record> = cases.par_iter().map(Case::execute).collect();
    let passed = records.iter().filter(|r| r.status == Status::Pass).count();
    let failed = records.iter().filter(|r| r.status == Status::Fail).count();
    let errors = records.iter().filter(|r| r.status == Status::Error).count();
    let status = if errors > 0 {
        Status::Error
    } else if failed > 0 {
        Status::Fail
    } else {
        Status::Pass
    };
    Ok(CheckReport { suite, seed: cfg.seed, status, total: records.len(), passed, failed, errors, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Core, Suite::Special, Suite::Frac, Suite::Ivp, Suite::All] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn compare_modes() {
        let mk = |c: Compare, o: fn() -> QResult<Outcome>| Case::new("x", Suite::Core, 0.5, c, Box::new(o)).execute();
        assert_eq!(mk(Compare::Relative(1e-3), || Ok(Outcome::new(1.0, 1.0005))).status, Status::Pass);
        assert_eq!(mk(Compare::Relative(1e-4), || Ok(Outcome::new(1.0, 1.0005))).status, Status::Fail);
        assert_eq!(mk(Compare::Exact, || Ok(Outcome::new(0.0, -0.0))).status, Status::Pass);
        assert_eq!(mk(Compare::Exact, || Ok(Outcome::new(1e-300, 0.0))).status, Status::Fail);
        assert_eq!(mk(Compare::AtMost(1e-9), || Ok(Outcome::new(0.5, 0.5))).status, Status::Pass);
        assert_eq!(mk(Compare::AtMost(1e-9), || Ok(Outcome::new(0.6, 0.5))).status, Status::Fail);
        let e = mk(Compare::Exact, || Err(QError::Pole("x".into())));
        assert_eq!(e.status, Status::Error);
        assert!(e.error.is_some());
    }
}
