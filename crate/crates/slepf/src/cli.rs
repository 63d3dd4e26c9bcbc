//! Command-line front end.
//!
//! Every command writes one artifact: a JSON object, or a CSV table with a
//! header row. JSON artifacts carry the resolved configuration under
//! `config`. For CSV artifacts the configuration goes to a sidecar file
//! `<output>.json` when `--output` is given and to stderr otherwise, so the
//! table itself stays plain RFC 4180.
//!
//! Option values are resolved in the order: command-line flag, config file
//! (`--config`, TOML or JSON, flat keys), built-in default. Seeds fall back
//! to the `SLEPF_SEED` environment variable before the built-in 0.

use crate::cft_params::KappaParams;
use crate::coulomb::{coulomb_n1, coulomb_n2_detailed, oracle_suite};
use crate::error::Error;
use crate::exact_pf::{z_alpha, Method};
use crate::fusion::{default_separations, fused_pde_residual, numeric_fusion_limit, fused_z4, ope_check, FusionConstants};
use crate::ising::{corner_marks, crossing_experiment, Dynamics, IsingConfig};
use crate::linkpat::LinkPattern;
use crate::loewner::{rng_for, sample_driving, zipper_trace};
use crate::mc_pf::{estimate_z, CascadeConfig, LinkChoice};
use crate::pde_verify::{asymptotics_suite, covariance_suite, martingale_suite, pde_suite, MartingaleOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "slepf", version, about = "Multiple-SLE pure partition functions: evaluation and cross-checks")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML or JSON file with default option values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Conformal weights and central charge for kappa.
    Params(KappaArg),
    /// Partition-function evaluation and verification.
    #[command(subcommand)]
    Pf(PfCommand),
    /// Monte-Carlo cascade estimates.
    #[command(subcommand)]
    Mc(McCommand),
    /// Chordal SLE samples.
    #[command(subcommand)]
    Sle(SleCommand),
    /// Critical Ising interface connectivities.
    #[command(subcommand)]
    Ising(IsingCommand),
    /// Fusion constants, third-order PDE and OPE checks.
    #[command(subcommand)]
    Fusion(FusionCommand),
    /// Screening-integral oracle suite.
    #[command(subcommand)]
    Coulomb(CoulombCommand),
}

#[derive(Debug, Args)]
struct KappaArg {
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum PfCommand {
    /// Evaluate Z_alpha at the given points.
    Eval(PfEval),
    /// Run a verification suite; exits 1 if it fails.
    Verify(PfVerify),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMethod {
    Exact,
    Coulomb,
}

#[derive(Debug, Args)]
struct PfEval {
    #[arg(long)]
    kappa: Option<f64>,
    /// Link pattern such as "1-2,3-4".
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated increasing points.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    #[arg(long, value_enum)]
    method: Option<EvalMethod>,
    /// Relative tolerance of the screening integrals.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    Pde,
    Cov,
    Asy,
    Bounds,
    Martingale,
}

#[derive(Debug, Args)]
struct PfVerify {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Random maps (cov) or Loewner paths (martingale).
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum McCommand {
    /// Estimate Z_alpha with the cascade construction.
    Estimate(McEstimateArgs),
}

#[derive(Debug, Args)]
struct McEstimateArgs {
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    /// Relative Loewner step.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    stop_eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// "first", "random" or a link "a-b".
    #[arg(long)]
    link_choice: Option<String>,
}

#[derive(Debug, Subcommand)]
enum SleCommand {
    /// Brownian driving function, optionally with the traced curve.
    Sample(SleSample),
}

#[derive(Debug, Args)]
struct SleSample {
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Add the curve points (x, y) computed by the zipper evaluation.
    #[arg(long)]
    trace: bool,
    /// Also write the traced curve as an SVG polyline.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum IsingCommand {
    /// Empirical connectivity frequencies against the prediction.
    Crossing(IsingCrossing),
}

#[derive(Debug, Args)]
struct IsingCrossing {
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// "corners" or comma-separated ring-edge indices.
    #[arg(long)]
    arcs: Option<String>,
    /// Updates between samples.
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long, value_enum)]
    dynamics: Option<Dynamics>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum FusionCommand {
    /// Constants, fused PDE residuals, numeric limit and OPE exponents.
    Check(KappaArg),
}

#[derive(Debug, Subcommand)]
enum CoulombCommand {
    /// Compare the screening integrals with the closed forms.
    Check(KappaArg),
}

/// Defaults read from `--config`. Keys mirror the long option names with
/// underscores.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDefaults {
    kappa: Option<f64>,
    alpha: Option<String>,
    points: Option<Vec<f64>>,
    method: Option<String>,
    tolerance: Option<f64>,
    suite: Option<Suite>,
    samples: Option<u64>,
    seed: Option<u64>,
    dt: Option<f64>,
    stop_eps: Option<f64>,
    link_choice: Option<String>,
    steps: Option<usize>,
    width: Option<usize>,
    height: Option<usize>,
    arcs: Option<String>,
    sweeps: Option<usize>,
    burn_in: Option<usize>,
    chains: Option<usize>,
    dynamics: Option<String>,
    beta: Option<f64>,
    threads: Option<usize>,
}

/// Why a command did not succeed.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Precondition(_) | Error::Unsupported(_) | Error::Capacity(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Artifact produced by a command, plus whether its checks passed.
enum Artifact {
    Json(Value),
    Csv { header: Vec<String>, rows: Vec<Vec<String>>, meta: Value },
}

struct Outcome {
    artifact: Artifact,
    pass: bool,
    side_files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn ok(artifact: Artifact) -> Self {
        Self { artifact, pass: true, side_files: Vec::new() }
    }
}

/// Entry point of the `slepf` binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parse `argv`, execute and write the artifact. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => match emit(&cli, outcome.artifact, &outcome.side_files, out, err) {
            Ok(()) => {
                if outcome.pass {
                    EXIT_OK
                } else {
                    EXIT_FAIL
                }
            }
            Err(msg) => {
                let _ = writeln!(err, "error: {msg}");
                EXIT_FAIL
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAIL
        }
    }
}

fn execute(cli: &Cli) -> CmdResult<Outcome> {
    let defaults = match &cli.config {
        Some(path) => load_defaults(path)?,
        None => FileDefaults::default(),
    };
    let threads = cli.threads.or(defaults.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Runtime(format!("cannot start thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, &defaults))
}

fn load_defaults(path: &Path) -> CmdResult<FileDefaults> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }
}

fn dispatch(command: &Command, d: &FileDefaults) -> CmdResult<Outcome> {
    match command {
        Command::Params(a) => cmd_params(a, d),
        Command::Pf(PfCommand::Eval(a)) => cmd_pf_eval(a, d),
        Command::Pf(PfCommand::Verify(a)) => cmd_pf_verify(a, d),
        Command::Mc(McCommand::Estimate(a)) => cmd_mc_estimate(a, d),
        Command::Sle(SleCommand::Sample(a)) => cmd_sle_sample(a, d),
        Command::Ising(IsingCommand::Crossing(a)) => cmd_ising_crossing(a, d),
        Command::Fusion(FusionCommand::Check(a)) => cmd_fusion_check(a, d),
        Command::Coulomb(CoulombCommand::Check(a)) => cmd_coulomb_check(a, d),
    }
}

fn required<T: Clone>(flag: &Option<T>, file: &Option<T>, name: &str) -> CmdResult<T> {
    flag.clone()
        .or_else(|| file.clone())
        .ok_or_else(|| Failure::Usage(format!("missing required option --{}", name.replace('_', "-"))))
}

fn or_default<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> CmdResult<u64> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var("SLEPF_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("SLEPF_SEED is not an unsigned integer: '{v}'"))),
        Err(_) => Ok(0),
    }
}

fn resolve_kappa(flag: Option<f64>, d: &FileDefaults) -> CmdResult<f64> {
    let kappa = required(&flag, &d.kappa, "kappa")?;
    KappaParams::new(kappa)?;
    Ok(kappa)
}

fn parse_points(text: &str) -> CmdResult<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad point '{t}' in --points"))))
        .collect()
}

fn resolve_points(flag: &Option<String>, d: &FileDefaults, default: Option<Vec<f64>>) -> CmdResult<Vec<f64>> {
    match (flag, &d.points, default) {
        (Some(t), _, _) => parse_points(t),
        (None, Some(p), _) => Ok(p.clone()),
        (None, None, Some(p)) => Ok(p),
        (None, None, None) => Err(Failure::Usage("missing required option --points".into())),
    }
}

fn resolve_alpha(flag: &Option<String>, d: &FileDefaults) -> CmdResult<LinkPattern> {
    Ok(required(flag, &d.alpha, "alpha")?.parse::<LinkPattern>()?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

/// JSON artifact: the fields of `result` at top level, plus `command` and
/// the resolved `config`.
fn report(command: &str, config: Value, result: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("command".into(), Value::String(command.into()));
    obj.insert("config".into(), config);
    match result {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    Value::Object(obj)
}

fn cmd_params(a: &KappaArg, d: &FileDefaults) -> CmdResult<Outcome> {
    let kappa = resolve_kappa(a.kappa, d)?;
    let p = KappaParams::new(kappa)?;
    let result = json!({ "kappa": p.kappa, "h": p.h, "c": p.c, "h13": p.h13() });
    Ok(Outcome::ok(Artifact::Json(report("params", json!({ "kappa": kappa }), result))))
}

fn cmd_pf_eval(a: &PfEval, d: &FileDefaults) -> CmdResult<Outcome> {
    let kappa = resolve_kappa(a.kappa, d)?;
    let alpha = resolve_alpha(&a.alpha, d)?;
    let pts = resolve_points(&a.points, d, None)?;
    let method = match (a.method, &d.method) {
        (Some(m), _) => m,
        (None, Some(s)) => EvalMethod::from_str(s, true).map_err(|_| Failure::Usage(format!("unknown method '{s}'")))?,
        (None, None) => EvalMethod::Exact,
    };
    let tolerance = or_default(&a.tolerance, &d.tolerance, 1e-8);
    if pts.len() != alpha.n_points() {
        return Err(Failure::Usage(format!("pattern '{alpha}' needs {} points, got {}", alpha.n_points(), pts.len())));
    }
    let (value, abs_error, method_tag) = match method {
        EvalMethod::Exact => (z_alpha(kappa, &alpha, &pts)?, 0.0, Method::Exact),
        EvalMethod::Coulomb => match alpha.n_links() {
            1 => (coulomb_n1(kappa, pts[0], pts[1])?, 0.0, Method::Coulomb),
            2 => {
                let s = coulomb_n2_detailed(kappa, &alpha, &pts, tolerance)?;
                (s.value, s.error, Method::Coulomb)
            }
            n => return Err(Failure::Usage(format!("screening integrals cover one or two links, got {n}"))),
        },
    };
    let config = json!({ "kappa": kappa, "alpha": alpha.to_string(), "points": pts, "method": to_value(&method_tag), "tolerance": tolerance });
    let result = json!({ "value": value, "abs_error": abs_error, "method": to_value(&method_tag) });
    Ok(Outcome::ok(Artifact::Json(report("pf eval", config, result))))
}

fn cmd_pf_verify(a: &PfVerify, d: &FileDefaults) -> CmdResult<Outcome> {
    let suite = required(&a.suite, &d.suite, "suite")?;
    let kappa = resolve_kappa(a.kappa, d)?;
    let seed = resolve_seed(a.seed, d.seed)?;
    let (name, config, result, pass) = match suite {
        Suite::Pde => {
            let pts = resolve_points(&a.points, d, Some(vec![0.0, 1.0, 2.0, 4.0]))?;
            let tol = or_default(&a.tolerance, &d.tolerance, 1e-4);
            let r = pde_suite(kappa, &pts, tol)?;
            ("pde", json!({ "points": pts, "tolerance": tol }), to_value(&r), r.pass)
        }
        Suite::Cov => {
            let pts = resolve_points(&a.points, d, Some(vec![0.0, 1.0, 2.0, 4.0]))?;
            let tol = or_default(&a.tolerance, &d.tolerance, 1e-8);
            let maps = or_default(&a.samples, &d.samples, 100);
            let r = covariance_suite(kappa, &pts, maps as usize, seed, tol)?;
            ("cov", json!({ "points": pts, "tolerance": tol, "samples": maps, "seed": seed }), to_value(&r), r.pass)
        }
        Suite::Asy => {
            let tol = or_default(&a.tolerance, &d.tolerance, 1e-4);
            let r = asymptotics_suite(kappa, tol)?;
            ("asy", json!({ "tolerance": tol }), to_value(&r), r.pass)
        }
        Suite::Bounds => {
            let r = crate::exact_pf::bounds_suite(kappa, 10)?;
            ("bounds", json!({ "grid_per_axis": 10 }), to_value(&r), r.pass)
        }
        Suite::Martingale => {
            // Gaps well above sqrt(T): a Z-weighted curve that reaches its
            // partner before T drains mass and biases the mean downward.
            let pts = resolve_points(&a.points, d, Some(vec![0.0, 3.0, 6.0, 12.0]))?;
            let paths = or_default(&a.samples, &d.samples, 10_000);
            let opts = MartingaleOptions { paths, seed, ..MartingaleOptions::default() };
            let r = martingale_suite(kappa, &pts, &opts)?;
            ("martingale", json!({ "points": pts, "samples": paths, "seed": seed }), to_value(&r), r.pass)
        }
    };
    let mut config = config;
    config["suite"] = json!(name);
    config["kappa"] = json!(kappa);
    Ok(Outcome { artifact: Artifact::Json(report("pf verify", config, result)), pass, side_files: Vec::new() })
}

fn parse_link_choice(s: &str) -> CmdResult<LinkChoice> {
    match s.trim() {
        "first" => Ok(LinkChoice::First),
        "random" => Ok(LinkChoice::Random),
        other => {
            let p: LinkPattern = other.parse()?;
            match p.links() {
                [(a, b)] => Ok(LinkChoice::Fixed(*a, *b)),
                _ => Err(Failure::Usage(format!("link choice must be first, random or a single link a-b, got '{s}'"))),
            }
        }
    }
}

fn cmd_mc_estimate(a: &McEstimateArgs, d: &FileDefaults) -> CmdResult<Outcome> {
    let kappa = resolve_kappa(a.kappa, d)?;
    let alpha = resolve_alpha(&a.alpha, d)?;
    let pts = resolve_points(&a.points, d, None)?;
    let mut cfg = CascadeConfig::new(kappa, alpha, pts);
    cfg.samples = or_default(&a.samples, &d.samples, cfg.samples);
    cfg.dt = or_default(&a.dt, &d.dt, cfg.dt);
    cfg.stop_eps = or_default(&a.stop_eps, &d.stop_eps, cfg.stop_eps);
    cfg.seed = resolve_seed(a.seed, d.seed)?;
    if let Some(s) = a.link_choice.as_ref().or(d.link_choice.as_ref()) {
        cfg.link_choice = parse_link_choice(s)?;
    }
    let est = estimate_z(&cfg)?;
    Ok(Outcome::ok(Artifact::Json(report("mc estimate", to_value(&cfg), to_value(&est)))))
}

fn cmd_sle_sample(a: &SleSample, d: &FileDefaults) -> CmdResult<Outcome> {
    let kappa = resolve_kappa(a.kappa, d)?;
    let steps = or_default(&a.steps, &d.steps, 1000);
    let dt = or_default(&a.dt, &d.dt, 1e-3);
    let seed = resolve_seed(a.seed, d.seed)?;
    if steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    let driving = sample_driving(kappa, steps as f64 * dt, dt, 0.0, &mut rng_for(seed, 0))?;
    let want_trace = a.trace || a.svg.is_some();
    let trace = if want_trace { Some(zipper_trace(&driving)) } else { None };
    let mut header = vec!["t".to_string(), "w".to_string()];
    if a.trace {
        header.extend(["x".to_string(), "y".to_string()]);
    }
    let rows = driving
        .w
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let mut row = vec![fmt_float(k as f64 * dt), fmt_float(w)];
            if let (true, Some(tr)) = (a.trace, &trace) {
                row.push(fmt_float(tr[k].re));
                row.push(fmt_float(tr[k].im));
            }
            row
        })
        .collect();
    let mut side_files = Vec::new();
    if let (Some(path), Some(tr)) = (&a.svg, &trace) {
        side_files.push((path.clone(), svg_polyline(tr.iter().map(|z| (z.re, z.im)))));
    }
    let meta = json!({ "command": "sle sample", "config": { "kappa": kappa, "steps": steps, "dt": dt, "seed": seed, "w0": 0.0, "trace": a.trace } });
    Ok(Outcome { artifact: Artifact::Csv { header, rows, meta }, pass: true, side_files })
}

/// SVG document with one polyline, flipped so that the imaginary axis points up.
fn svg_polyline(points: impl Iterator<Item = (f64, f64)>) -> String {
    let pts: Vec<(f64, f64)> = points.collect();
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let pad = 0.05 * (x1 - x0).max(y1).max(1e-12);
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 + 2.0 * pad);
    let mut body = String::new();
    for (k, &(x, y)) in pts.iter().enumerate() {
        if k > 0 {
            body.push(' ');
        }
        let _ = write!(body, "{:.6},{:.6}", x - x0 + pad, y1 + pad - y);
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.6} {h:.6}\">\n\
         <polyline fill=\"none\" stroke=\"black\" stroke-width=\"{sw:.6}\" points=\"{body}\"/>\n</svg>\n",
        sw = 0.002 * w.max(h)
    )
}

fn parse_arcs(arcs: &str, width: usize, height: usize) -> CmdResult<Vec<usize>> {
    if arcs.trim() == "corners" {
        return Ok(corner_marks(width, height).to_vec());
    }
    arcs.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad ring index '{t}' in --arcs"))))
        .collect()
}

fn cmd_ising_crossing(a: &IsingCrossing, d: &FileDefaults) -> CmdResult<Outcome> {
    let width = required(&a.width, &d.width, "width")?;
    let height = required(&a.height, &d.height, "height")?;
    let mut cfg = IsingConfig::corners(width, height);
    cfg.marks = parse_arcs(&or_default(&a.arcs, &d.arcs, "corners".into()), width, height)?;
    cfg.sweeps = or_default(&a.sweeps, &d.sweeps, cfg.sweeps);
    cfg.samples = or_default(&a.samples, &d.samples, cfg.samples as u64) as usize;
    cfg.burn_in = or_default(&a.burn_in, &d.burn_in, cfg.burn_in);
    cfg.chains = or_default(&a.chains, &d.chains, cfg.chains);
    cfg.beta = or_default(&a.beta, &d.beta, cfg.beta);
    cfg.seed = resolve_seed(a.seed, d.seed)?;
    cfg.dynamics = match (a.dynamics, &d.dynamics) {
        (Some(x), _) => x,
        (None, Some(s)) => Dynamics::from_str(s, true).map_err(|_| Failure::Usage(format!("unknown dynamics '{s}'")))?,
        (None, None) => cfg.dynamics,
    };
    let res = crossing_experiment(&cfg)?;
    let header = ["alpha", "count", "empirical", "stderr", "stderr_batch", "predicted"].map(String::from).to_vec();
    let rows = res
        .rows
        .iter()
        .map(|r| {
            vec![
                r.alpha.to_string(),
                r.count.to_string(),
                fmt_float(r.empirical),
                fmt_float(r.stderr),
                fmt_float(r.stderr_batch),
                r.predicted.map(fmt_float).unwrap_or_default(),
            ]
        })
        .collect();
    let meta = json!({ "command": "ising crossing", "config": to_value(&res.config), "samples": res.samples });
    Ok(Outcome::ok(Artifact::Csv { header, rows, meta }))
}

fn cmd_fusion_check(a: &KappaArg, d: &FileDefaults) -> CmdResult<Outcome> {
    let kappa = resolve_kappa(a.kappa, d)?;
    const TOL: f64 = 1e-4;
    let (xi, x3, x4) = (0.0, 1.0, 3.0);
    let constants = FusionConstants::new(2, 2, 1, kappa)?;
    let residuals = fused_pde_residual(kappa, xi, x3, x4, 1e-3)?;
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.relative));
    let exact = fused_z4(kappa, xi, x3, x4)?;
    let limit = numeric_fusion_limit(kappa, xi, x3, x4, &default_separations(1.0))?;
    let limit_error = (limit.value - exact).abs() / exact.abs();
    let ope = ope_check(kappa, x3, x4, 1e-2)?;
    let pass = max_residual < TOL && limit_error < TOL && ope.pass;
    let result = json!({
        "constants": to_value(&constants),
        "residuals": to_value(&residuals),
        "max_relative_residual": max_residual,
        "fused_value": exact,
        "numeric_limit": to_value(&limit),
        "limit_relative_error": limit_error,
        "ope": to_value(&ope),
        "tolerance": TOL,
        "pass": pass,
    });
    let config = json!({ "kappa": kappa, "points": [xi, x3, x4] });
    Ok(Outcome { artifact: Artifact::Json(report("fusion check", config, result)), pass, side_files: Vec::new() })
}

fn cmd_coulomb_check(a: &KappaArg, d: &FileDefaults) -> CmdResult<Outcome> {
    let kappa = resolve_kappa(a.kappa, d)?;
    let (tol_n1, tol_n2) = (1e-8, 1e-6);
    let r = oracle_suite(&[kappa], tol_n1, tol_n2)?;
    let config = json!({ "kappa": kappa, "tolerance_n1": tol_n1, "tolerance_n2": tol_n2 });
    let pass = r.pass;
    Ok(Outcome { artifact: Artifact::Json(report("coulomb check", config, to_value(&r))), pass, side_files: Vec::new() })
}

fn emit(cli: &Cli, artifact: Artifact, side_files: &[(PathBuf, String)], out: &mut dyn Write, err: &mut dyn Write) -> Result<(), String> {
    for (path, text) in side_files {
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let (payload, meta) = match artifact {
        Artifact::Json(v) => (render_json(&v), None),
        Artifact::Csv { header, rows, meta } => (render_csv(&header, &rows)?, Some(render_json(&meta))),
    };
    match &cli.output {
        Some(path) => {
            std::fs::write(path, &payload).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            if let Some(meta) = meta {
                let mut side = path.clone().into_os_string();
                side.push(".json");
                std::fs::write(&side, meta).map_err(|e| format!("cannot write metadata: {e}"))?;
            }
        }
        None => {
            out.write_all(payload.as_bytes()).map_err(|e| e.to_string())?;
            if let Some(meta) = meta {
                err.write_all(meta.as_bytes()).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(())
}

fn render_csv(header: &[String], rows: &[Vec<String>]) -> Result<String, String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header).map_err(|e| e.to_string())?;
    for r in rows {
        w.write_record(r).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

/// Decimal text with 15 significant digits. Magnitudes outside
/// `[1e-5, 1e15)` use exponent notation; non-finite values have no JSON
/// spelling and are rendered as `null` by the caller.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        format!("{:.*}", (14 - e) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}

/// Pretty JSON with floats printed by [`fmt_float`] and keys in sorted order.
pub fn render_json(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, 0);
    s.push('\n');
    s
}

fn write_value(s: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => s.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => s.push_str(&u.to_string()),
            (None, Some(i), _) => s.push_str(&i.to_string()),
            (None, None, Some(f)) if f.is_finite() => s.push_str(&fmt_float(f)),
            _ => s.push_str("null"),
        },
        Value::Array(items) => {
            if items.is_empty() {
                s.push_str("[]");
                return;
            }
            s.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                s.push_str(&"  ".repeat(indent + 1));
                write_value(s, item, indent + 1);
                s.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            s.push_str(&"  ".repeat(indent));
            s.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                s.push_str("{}");
                return;
            }
            s.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                s.push_str(&"  ".repeat(indent + 1));
                s.push_str(&Value::String(key.clone()).to_string());
                s.push_str(": ");
                write_value(s, item, indent + 1);
                s.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            s.push_str(&"  ".repeat(indent));
            s.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("slepf").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn float_format_keeps_fifteen_digits() {
        assert_eq!(fmt_float(0.5), "0.500000000000000");
        assert_eq!(fmt_float(-12.25), "-12.2500000000000");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_float(2.5e-9), "2.50000000000000e-9");
        assert_eq!(fmt_float(0.0), "0.0");
    }

    #[test]
    fn params_reports_weights() {
        let (code, out, _) = run_str(&["params", "--kappa", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["h"].as_f64(), Some(0.5));
        assert_eq!(v["c"].as_f64(), Some(0.5));
        assert_eq!(v["config"]["kappa"].as_f64(), Some(3.0));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["params", "--kappa", "-1"]).0, 2);
        assert_eq!(run_str(&["params", "--bogus"]).0, 2);
        assert_eq!(run_str(&["pf", "eval", "--kappa", "3", "--alpha", "1-3", "--points", "0,1"]).0, 2);
        assert_eq!(run_str(&["params"]).0, 2);
    }
}
