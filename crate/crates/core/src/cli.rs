//! The `infconvex` command line: one scenario per run, one JSON report on
//! standard output.
//!
//! Exit codes: 0 holds or no witness, 1 violated or witness found,
//! 2 inconclusive, 3 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::checkers::{
    check_jensen_discrete, check_t_convexity, check_ts_convexity, infinite_combination_report,
    pavic_bracket, SampleOptions, Status, DEFAULT_SAMPLES, DEFAULT_TOL,
};
use crate::distribution::DiscreteDistribution;
use crate::domain::{ConvexDomain, Shape};
use crate::error::{Error, Result};
use crate::expansion::lambda_expand;
use crate::funcparse::{builtin, resolve_function, ScalarFunction};
use crate::point::ConvexityParams;
use crate::search::{exp_condition, find_counterexample, SearchOptions, DEFAULT_BUDGET};
use crate::sequence::BoundedSequence;
use crate::weights::WeightSequence;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

pub const DEFAULT_EXPAND_DEPTH: usize = 40;
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 4096;
pub const DEFAULT_MU_RATIO: f64 = 2.0 / 3.0;

#[derive(Debug, Parser)]
#[command(
    name = "infconvex",
    version,
    about = "Check, demonstrate and attack convexity inequalities with infinite convex combinations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample t-convexity: f(tx + (1-t)y) <= t f(x) + (1-t) f(y)
    CheckT(Inputs),
    /// Sample (t,s)-convexity: f(tx + (1-t)y) <= s f(x) + (1-s) f(y)
    CheckTs(Inputs),
    /// Discrete Jensen: f(E xi) <= E f(xi)
    Jensen(Inputs),
    /// f(sum lambda_i x_i) <= sum mu_i f(x_i) for one bounded sequence
    CheckInf(Inputs),
    /// f(ta + (1-t)b) <= sum lambda_i f(x_i) <= t f(a) + (1-t) f(b) on an interval
    Bracket(Inputs),
    /// Greedy rational expansion t = sum lambda_i q_i
    Expand(Inputs),
    /// Search finite-support sequences for a violation of the infinite inequality
    Hunt(Inputs),
    /// Reproduce the exp counterexample for lambda != mu
    Remark(RemarkArgs),
}

#[derive(Debug, Default, Args)]
pub struct Inputs {
    /// Scenario JSON file; flags override its fields
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Expression in x1..xd, or builtin:<name>
    #[arg(long)]
    pub function: Option<String>,
    /// Domain JSON, "a,b" for an interval, or "R^d"
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Weights JSON, "geometric:r", "zeta:p" or "prefix:w1,w2,...;r"
    #[arg(long)]
    pub lambda: Option<String>,
    /// Same syntax as --lambda; defaults to lambda
    #[arg(long)]
    pub mu: Option<String>,
    /// Sequence JSON, "x1,x2,...;fill", "periodic:x1,x2,..." or "constant:x"
    #[arg(long, allow_hyphen_values = true)]
    pub sequence: Option<String>,
    /// Distribution JSON or "x1:p1,x2:p2,..." for scalar atoms
    #[arg(long, allow_hyphen_values = true)]
    pub distribution: Option<String>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Series or expansion depth N
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Objective evaluations for hunt
    #[arg(long)]
    pub budget: Option<usize>,
    /// Sampled pairs for check-t and check-ts
    #[arg(long)]
    pub samples: Option<usize>,
    /// Free points per candidate sequence for hunt
    #[arg(long)]
    pub support: Option<usize>,
    #[arg(long)]
    pub denominator_bound: Option<u64>,
    /// Compact single-line JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RemarkArgs {
    /// Ratio r of the geometric mu, so mu_1 = 1 - r
    #[arg(long, default_value_t = DEFAULT_MU_RATIO)]
    pub mu_ratio: f64,
    /// Ratio of the geometric lambda
    #[arg(long, default_value_t = 0.5)]
    pub lambda_ratio: f64,
    /// Emit JSON instead of the narrative
    #[arg(long)]
    pub json: bool,
}

/// Contents of a `--scenario` file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub function: Option<String>,
    pub domain: Option<ConvexDomain>,
    pub lambda: Option<WeightSequence>,
    pub mu: Option<WeightSequence>,
    pub sequence: Option<BoundedSequence>,
    pub distribution: Option<DiscreteDistribution>,
    #[serde(default)]
    pub parameters: Parameters,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub t: Option<f64>,
    pub s: Option<f64>,
    #[serde(alias = "N")]
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub samples: Option<usize>,
    pub support: Option<usize>,
    pub denominator_bound: Option<u64>,
}

/// Outcome of one subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub status: String,
    pub exit_code: i32,
    pub result: Value,
}

impl Report {
    fn new(command: &str, status: &str, exit_code: i32, result: Value) -> Self {
        Self {
            command: command.to_string(),
            status: status.to_string(),
            exit_code,
            result,
        }
    }

    fn from_status(command: &str, status: Status, result: Value) -> Self {
        let (name, code) = match status {
            Status::HoldsOnSamples => ("holds-on-samples", EXIT_HOLDS),
            Status::Violated => ("violated", EXIT_VIOLATED),
            Status::Inconclusive => ("inconclusive", EXIT_INCONCLUSIVE),
        };
        Self::new(command, name, code, result)
    }

    fn input_error(command: &str, message: String) -> Self {
        Self::new(
            command,
            "input-error",
            EXIT_INPUT_ERROR,
            json!({ "error": message }),
        )
    }
}

/// Parses `args` (including the program name), runs the subcommand and writes
/// the report. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_HOLDS;
                }
                _ => EXIT_INPUT_ERROR,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    if let Command::Remark(args) = &cli.command {
        return run_remark(args, out, err);
    }
    let (name, compact) = match &cli.command {
        Command::CheckT(i) => ("check-t", i.json),
        Command::CheckTs(i) => ("check-ts", i.json),
        Command::Jensen(i) => ("jensen", i.json),
        Command::CheckInf(i) => ("check-inf", i.json),
        Command::Bracket(i) => ("bracket", i.json),
        Command::Expand(i) => ("expand", i.json),
        Command::Hunt(i) => ("hunt", i.json),
        Command::Remark(_) => unreachable!(),
    };
    let report = match execute(&cli.command, err) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "infconvex {name}: {e}");
            Report::input_error(name, e.to_string())
        }
    };
    write_json(out, &report, compact);
    report.exit_code
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T, compact: bool) {
    let text = if compact {
        serde_json::to_string(value)
    } else {
        serde_json::to_string_pretty(value)
    }
    .expect("reports serialize");
    let _ = writeln!(out, "{text}");
}

/// Runs a parsed subcommand without printing its report.
pub fn execute(command: &Command, err: &mut dyn Write) -> Result<Report> {
    match command {
        Command::CheckT(i) => {
            let s = Resolved::new(i)?;
            let f = s.function()?;
            let d = s.domain()?;
            let t = s.require_t()?;
            let v = check_t_convexity(&f, &d, t, s.sample_options())?;
            Ok(Report::from_status(
                "check-t",
                v.status,
                json!({ "t": t, "verdict": v }),
            ))
        }
        Command::CheckTs(i) => {
            let s = Resolved::new(i)?;
            let f = s.function()?;
            let d = s.domain()?;
            let params = ConvexityParams::new(s.require_t()?, s.require("s", s.params.s)?)?;
            let v = check_ts_convexity(&f, &d, params, s.sample_options())?;
            Ok(Report::from_status(
                "check-ts",
                v.status,
                json!({ "t": params.t(), "s": params.s(), "verdict": v }),
            ))
        }
        Command::Jensen(i) => {
            let s = Resolved::new(i)?;
            let f = s.function()?;
            let d = s.domain()?;
            let dist = s
                .scenario
                .distribution
                .clone()
                .ok_or_else(|| missing("distribution"))?;
            let v = check_jensen_discrete(&f, &d, &dist, s.tol())?;
            let mean = dist.mean();
            Ok(Report::from_status(
                "jensen",
                v.status,
                json!({ "mean": mean, "verdict": v }),
            ))
        }
        Command::CheckInf(i) => {
            let s = Resolved::new(i)?;
            let f = s.function()?;
            let d = s.domain()?;
            let lambda = s.lambda()?;
            let mu = s.mu()?;
            let seq = s.sequence()?;
            let depth = s.params.depth.unwrap_or_else(|| lambda.default_depth());
            let r = infinite_combination_report(&f, &d, &lambda, &mu, &seq, depth, s.tol())?;
            Ok(Report::from_status(
                "check-inf",
                r.verdict.status,
                json!({ "depth": depth, "report": r }),
            ))
        }
        Command::Bracket(i) => {
            let s = Resolved::new(i)?;
            let d = s.domain()?;
            let (a, b) = match d.shape() {
                Shape::Interval { lower, upper } => (*lower, *upper),
                _ => {
                    return Err(Error::Precondition(
                        "bracket needs an interval domain".into(),
                    ))
                }
            };
            let f = s.function()?;
            let lambda = s.lambda()?;
            let seq = s.sequence()?;
            let depth = s.params.depth.unwrap_or_else(|| lambda.default_depth());
            let r = pavic_bracket(&f, a, b, &lambda, &seq, depth, s.tol())?;
            let status = if r.sandwich_holds {
                Status::HoldsOnSamples
            } else {
                Status::Violated
            };
            Ok(Report::from_status(
                "bracket",
                status,
                json!({ "depth": depth, "bracket": r }),
            ))
        }
        Command::Expand(i) => {
            let s = Resolved::new(i)?;
            let lambda = s.lambda()?;
            let t = s.require_t()?;
            let depth = s.params.depth.unwrap_or(DEFAULT_EXPAND_DEPTH);
            let bound = s
                .params
                .denominator_bound
                .unwrap_or(DEFAULT_DENOMINATOR_BOUND);
            match lambda_expand(&lambda, t, depth, bound) {
                Ok(e) => {
                    let reconstruction = e.reconstruction(&lambda)?;
                    let result = json!({
                        "expansion": e,
                        "reconstruction": reconstruction,
                        "error": (t - reconstruction).abs(),
                        "error_bound": lambda.tail_mass(depth + 1)?,
                        "windows_hold": e.windows_hold(&lambda)?,
                    });
                    Ok(Report::new("expand", "ok", EXIT_HOLDS, result))
                }
                Err(e @ Error::InfeasibleStep { .. }) => Ok(Report::new(
                    "expand",
                    "inconclusive",
                    EXIT_INCONCLUSIVE,
                    json!({ "error": e.to_string() }),
                )),
                Err(e) => Err(e),
            }
        }
        Command::Hunt(i) => {
            let s = Resolved::new(i)?;
            let f = s.function()?;
            let d = s.domain()?;
            let lambda = s.lambda()?;
            let mu = s.mu()?;
            let opts = SearchOptions {
                support_size: s.params.support.unwrap_or(1),
                budget: s.params.budget.unwrap_or(DEFAULT_BUDGET),
                seed: s.params.seed.unwrap_or(0),
                tol: s.tol(),
                depth: s.params.depth,
                ..SearchOptions::default()
            };
            let found = find_counterexample(&f, &d, &lambda, &mu, opts, |p| {
                let _ = writeln!(
                    err,
                    "restart {} best certified gap {:e} evaluations {}",
                    p.restart, p.best_gap, p.evaluations
                );
            })?;
            Ok(match found {
                Some(w) => Report::new("hunt", "witness", EXIT_VIOLATED, json!({ "witness": w })),
                None => Report::new("hunt", "absent", EXIT_HOLDS, json!({ "witness": null })),
            })
        }
        Command::Remark(_) => Err(Error::Precondition("remark has no scenario".into())),
    }
}

fn missing(what: &str) -> Error {
    Error::Precondition(format!("missing {what} (flag --{what} or scenario field)"))
}

fn bad(what: &str, text: &str, e: impl std::fmt::Display) -> Error {
    Error::Precondition(format!("cannot parse {what} '{text}': {e}"))
}

/// Scenario file merged with flags.
struct Resolved {
    scenario: Scenario,
    params: Parameters,
}

impl Resolved {
    fn new(i: &Inputs) -> Result<Self> {
        let mut scenario = match &i.scenario {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Precondition(format!("cannot read scenario {}: {e}", path.display()))
                })?;
                serde_json::from_str::<Scenario>(&text)
                    .map_err(|e| Error::Precondition(format!("malformed scenario: {e}")))?
            }
            None => Scenario::default(),
        };
        if let Some(f) = &i.function {
            scenario.function = Some(f.clone());
        }
        if let Some(d) = &i.domain {
            scenario.domain = Some(parse_domain_arg(d)?);
        }
        if let Some(w) = &i.lambda {
            scenario.lambda = Some(parse_weights_arg(w)?);
        }
        if let Some(w) = &i.mu {
            scenario.mu = Some(parse_weights_arg(w)?);
        }
        if let Some(s) = &i.sequence {
            scenario.sequence = Some(parse_sequence_arg(s)?);
        }
        if let Some(s) = &i.distribution {
            scenario.distribution = Some(parse_distribution_arg(s)?);
        }
        let mut params = scenario.parameters.clone();
        macro_rules! take {
            ($($field:ident),*) => { $( if i.$field.is_some() { params.$field = i.$field; } )* };
        }
        take!(
            t,
            s,
            depth,
            tol,
            seed,
            budget,
            samples,
            support,
            denominator_bound
        );
        Ok(Self { scenario, params })
    }

    fn domain(&self) -> Result<ConvexDomain> {
        self.scenario
            .domain
            .clone()
            .ok_or_else(|| missing("domain"))
    }

    fn function(&self) -> Result<ScalarFunction> {
        let spec = self
            .scenario
            .function
            .as_deref()
            .ok_or_else(|| missing("function"))?;
        resolve_function(spec, self.domain()?.dimension())
    }

    fn lambda(&self) -> Result<WeightSequence> {
        self.scenario
            .lambda
            .clone()
            .ok_or_else(|| missing("lambda"))
    }

    fn mu(&self) -> Result<WeightSequence> {
        match &self.scenario.mu {
            Some(m) => Ok(m.clone()),
            None => self.lambda(),
        }
    }

    fn sequence(&self) -> Result<BoundedSequence> {
        self.scenario
            .sequence
            .clone()
            .ok_or_else(|| missing("sequence"))
    }

    fn require(&self, what: &str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| missing(what))
    }

    fn require_t(&self) -> Result<f64> {
        self.require("t", self.params.t)
    }

    fn tol(&self) -> f64 {
        self.params.tol.unwrap_or(DEFAULT_TOL)
    }

    fn sample_options(&self) -> SampleOptions {
        SampleOptions {
            samples: self.params.samples.unwrap_or(DEFAULT_SAMPLES),
            tol: self.tol(),
            seed: self.params.seed.unwrap_or(0),
        }
    }
}

fn parse_floats(what: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| bad(what, text, e)))
        .collect()
}

/// JSON, `"a,b"` (interval) or `"R^d"` / `"R"` (whole space).
pub fn parse_domain_arg(text: &str) -> Result<ConvexDomain> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| bad("domain", text, e));
    }
    if t == "R" {
        return ConvexDomain::whole_space(1);
    }
    if let Some(d) = t.strip_prefix("R^") {
        let d: usize = d.parse().map_err(|e| bad("domain", text, e))?;
        return ConvexDomain::whole_space(d);
    }
    match parse_floats("domain", t)?.as_slice() {
        [a, b] => ConvexDomain::interval(*a, *b),
        _ => Err(bad("domain", text, "expected 'a,b'")),
    }
}

/// JSON, `"geometric:r"`, `"zeta:p"` or `"prefix:w1,...,wk;r"`.
pub fn parse_weights_arg(text: &str) -> Result<WeightSequence> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| bad("weights", text, e));
    }
    let (kind, rest) = t
        .split_once(':')
        .ok_or_else(|| bad("weights", text, "expected kind:parameters"))?;
    let one = |s: &str| s.trim().parse::<f64>().map_err(|e| bad("weights", text, e));
    match kind {
        "geometric" => WeightSequence::geometric(one(rest)?),
        "zeta" | "zeta-like" => WeightSequence::zeta_like(one(rest)?),
        "prefix" | "explicit-prefix" => {
            let (prefix, ratio) = rest
                .split_once(';')
                .ok_or_else(|| bad("weights", text, "expected prefix:w1,...;r"))?;
            WeightSequence::explicit_prefix(parse_floats("weights", prefix)?, one(ratio)?)
        }
        other => Err(bad("weights", text, format!("unknown kind '{other}'"))),
    }
}

/// JSON, `"x1,...,xk;fill"`, `"periodic:x1,...,xk"` or `"constant:x"` (scalar points).
pub fn parse_sequence_arg(text: &str) -> Result<BoundedSequence> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| bad("sequence", text, e));
    }
    let scalars = |s: &str| -> Result<Vec<Vec<f64>>> {
        Ok(parse_floats("sequence", s)?
            .into_iter()
            .map(|x| vec![x])
            .collect())
    };
    if let Some(rest) = t.strip_prefix("periodic:") {
        return BoundedSequence::periodic(scalars(rest)?);
    }
    if let Some(rest) = t.strip_prefix("constant:") {
        let x = rest
            .trim()
            .parse::<f64>()
            .map_err(|e| bad("sequence", text, e))?;
        return BoundedSequence::constant(vec![x]);
    }
    let (points, fill) = t
        .split_once(';')
        .ok_or_else(|| bad("sequence", text, "expected x1,...,xk;fill"))?;
    let fill = fill
        .trim()
        .parse::<f64>()
        .map_err(|e| bad("sequence", text, e))?;
    BoundedSequence::finite_support(scalars(points)?, vec![fill])
}

/// JSON or `"x1:p1,x2:p2,..."` with scalar atoms.
pub fn parse_distribution_arg(text: &str) -> Result<DiscreteDistribution> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| bad("distribution", text, e));
    }
    let atoms = t
        .split(',')
        .map(|pair| {
            let (x, p) = pair
                .split_once(':')
                .ok_or_else(|| bad("distribution", text, "expected x:p pairs"))?;
            let x = x
                .trim()
                .parse::<f64>()
                .map_err(|e| bad("distribution", text, e))?;
            let p = p
                .trim()
                .parse::<f64>()
                .map_err(|e| bad("distribution", text, e))?;
            Ok((vec![x], p))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteDistribution::new(atoms)
}

/// Numbers of the exp counterexample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemarkReport {
    pub lambda1: f64,
    pub mu1: f64,
    /// `(e^{λ₁} − 1)/(e − 1)`
    pub threshold: f64,
    pub condition_holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub status: Status,
}

/// `f = exp` on ℝ, `λ`, `μ` geometric, `x₁ = 1` and `xᵢ = 0` afterwards.
pub fn remark_demo(lambda_ratio: f64, mu_ratio: f64) -> Result<RemarkReport> {
    let lambda = WeightSequence::geometric(lambda_ratio)?;
    let mu = WeightSequence::geometric(mu_ratio)?;
    let f = builtin("exp")?;
    let domain = ConvexDomain::whole_space(1)?;
    let seq = BoundedSequence::finite_support(vec![vec![1.0]], vec![0.0])?;
    let depth = lambda.default_depth().max(mu.default_depth());
    let r = infinite_combination_report(&f, &domain, &lambda, &mu, &seq, depth, DEFAULT_TOL)?;
    let (lambda1, mu1) = (lambda.first(), mu.first());
    Ok(RemarkReport {
        lambda1,
        mu1,
        threshold: lambda1.exp_m1() / (std::f64::consts::E - 1.0),
        condition_holds: exp_condition(lambda1, mu1)?,
        lhs: r.lhs,
        rhs: r.rhs,
        gap: r.verdict.gap,
        status: r.verdict.status,
    })
}

fn run_remark(args: &RemarkArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let r = match remark_demo(args.lambda_ratio, args.mu_ratio) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "infconvex remark: {e}");
            let report = Report::input_error("remark", e.to_string());
            if args.json {
                write_json(out, &report, false);
            }
            return EXIT_INPUT_ERROR;
        }
    };
    let code = Report::from_status("remark", r.status, Value::Null).exit_code;
    if args.json {
        let status = match r.status {
            Status::HoldsOnSamples => "holds",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
        };
        let report = Report::new(
            "remark",
            status,
            code,
            serde_json::to_value(&r).expect("serializes"),
        );
        write_json(out, &report, false);
        return code;
    }
    let verdict = match r.status {
        Status::Violated => "VIOLATED",
        Status::HoldsOnSamples => "holds",
        Status::Inconclusive => "inconclusive",
    };
    let _ = writeln!(out, "f(x) = exp(x) on R, x_1 = 1, x_i = 0 for i >= 2");
    let _ = writeln!(
        out,
        "lambda geometric, lambda_1 = {:.10}; mu geometric, mu_1 = {:.10}",
        r.lambda1, r.mu1
    );
    let _ = writeln!(
        out,
        "condition (e^lambda_1 - 1)/(e - 1) = {:.10} > mu_1: {}",
        r.threshold, r.condition_holds
    );
    let _ = writeln!(out, "lhs f(sum lambda_i x_i) = e^lambda_1 = {:.10}", r.lhs);
    let _ = writeln!(
        out,
        "rhs sum mu_i f(x_i) = mu_1 e + 1 - mu_1 = {:.10}",
        r.rhs
    );
    let _ = writeln!(out, "gap lhs - rhs = {:.10}", r.gap);
    let _ = writeln!(out, "verdict: {verdict}");
    code
}
