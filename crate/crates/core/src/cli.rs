//! Command-line front end: `closed-form`, `optimize`, `verify` and `sweep`.
//!
//! Exit codes: 0 success, 1 check failure or numerical breakdown, 2 usage or
//! configuration error. Outputs carry no timestamps, so identical flags give
//! byte-identical output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::ChannelKind;
use crate::closed_form::{eop_from_norm, upsilon2_gamma, upsilon2_general_form, Branch};
use crate::error::Error;
use crate::optimize::{multiplicativity_report, optimize_upsilon2, OptimizerConfig};
use crate::verify::{all_passed, linspace, manifest_json_lines, run_suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Fixed CSV header of `sweep`.
pub const SWEEP_HEADER: &str = "d,param,a,b,upsilon2,branch,m,opt_value,gap,seed";

#[derive(Debug, Parser)]
#[command(name = "upsilon", version, about = "Constrained maximal output 2-norms of CP maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the closed form for one channel.
    ClosedForm {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize the output 2-norm numerically.
    Optimize {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the check suite described by a key=value config file.
    Verify {
        config: Option<PathBuf>,
        /// Print the suite manifest instead of running it.
        #[arg(long)]
        manifest: bool,
        /// Overrides the config seed.
        #[arg(long, env = "UPSILON_SEED")]
        seed: Option<u64>,
        /// Overrides every check tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate closed forms (and optionally optimizer values) over a parameter grid.
    Sweep {
        #[arg(long, default_value = "gamma")]
        channel: ChannelKind,
        #[arg(long)]
        d: usize,
        /// Comma-separated parameter values; overrides --points.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Evenly spaced points across the parameter range.
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// Also run the optimizer at each point.
        #[arg(long)]
        optimize: bool,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ChannelArgs {
    #[arg(long, default_value = "gamma")]
    channel: ChannelKind,
    #[arg(long)]
    d: usize,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Number of channel copies.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Output (environment) dimension d_B.
    #[arg(long = "d-env")]
    d_env: Option<usize>,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, env = "UPSILON_SEED", default_value_t = 0)]
    seed: u64,
    /// Relative-change stopping tolerance of the optimizer.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl RunArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig { d_b: self.d_env, tol: self.tol, ..OptimizerConfig::default() }
            .with_seed(self.seed)
            .with_restarts(self.restarts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// A CLI failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::NonConvergence { .. }) { EXIT_FAILURE } else { EXIT_USAGE };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: EXIT_USAGE, message: e.to_string() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::ClosedForm { channel, format, out } => {
            let param = resolve_param(&channel)?;
            let row = closed_form_row(channel.channel, channel.d, param)?
                .ok_or_else(|| Failure::usage(format!("{} has no closed form", channel.channel)))?;
            let text = match format {
                Format::Json => serde_json::to_string(&row).expect("row serializes") + "\n",
                Format::Csv => format!("d,param,a,b,upsilon2,branch,m,eop2\n{}\n", row.csv()),
            };
            emit(&text, out, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Optimize { channel, run, out } => {
            let param = resolve_param(&channel)?;
            let text = optimize_json(channel.channel, channel.d, param, &run)?;
            emit(&(text + "\n"), out, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { config, manifest, seed, tol, out } => {
            if manifest {
                emit(&manifest_json_lines(), out, stdout)?;
                return Ok(EXIT_OK);
            }
            let path = config.ok_or_else(|| Failure::usage("verify needs a config file (or --manifest)"))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let mut suite = SuiteConfig::parse(&text)?;
            if let Some(seed) = seed {
                suite.seed = seed;
            }
            if let Some(tol) = tol {
                if !(tol >= 0.0) {
                    return Err(Failure::usage("--tol must be nonnegative"));
                }
                suite.tolerance = Some(tol);
            }
            let results = run_suite(&suite);
            let mut lines = String::new();
            for r in &results {
                lines.push_str(&r.to_json());
                lines.push('\n');
            }
            let passed = all_passed(&results);
            let summary = serde_json::json!({
                "summary": {
                    "checks": results.len(),
                    "failed": results.iter().filter(|r| !r.passed).count(),
                    "all_passed": passed,
                    "seed": suite.seed,
                }
            });
            lines.push_str(&summary.to_string());
            lines.push('\n');
            emit(&lines, out, stdout)?;
            Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Sweep { channel, d, grid, points, optimize, run, format, out } => {
            let values = match grid {
                Some(g) => parse_grid(&g)?,
                None => {
                    channel.check_param(d, 0.0).or_else(|e| match e {
                        Error::OutOfRange { name: "d", .. } => Err(e),
                        _ => Ok(()),
                    })?;
                    let (lo, hi) = channel.param_range(d);
                    linspace(lo, hi, points)
                }
            };
            for &v in &values {
                channel.check_param(d, v).map_err(|e| range_failure(channel, d, e))?;
            }
            let rows = sweep_rows(channel, d, &values, optimize, &run)?;
            let text = match format {
                Format::Csv => {
                    let mut s = String::from(SWEEP_HEADER);
                    s.push('\n');
                    for r in &rows {
                        s.push_str(&r.csv());
                        s.push('\n');
                    }
                    s
                }
                Format::Json => rows.iter().map(|r| serde_json::to_string(r).expect("row serializes") + "\n").collect(),
            };
            emit(&text, out, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(text: &str, out: Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure { code: EXIT_FAILURE, message: format!("cannot write {}: {e}", path.display()) }),
        None => {
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Failure::usage(format!("bad grid value {s:?}"))))
        .collect()
}

fn param_name(kind: ChannelKind) -> &'static str {
    if kind.uses_t() {
        "t"
    } else {
        "p"
    }
}

fn range_failure(kind: ChannelKind, d: usize, e: Error) -> Failure {
    match e {
        Error::OutOfRange { name, value, .. } if name != "d" => {
            let (lo, hi) = kind.param_range(d);
            Failure::usage(format!(
                "{name} = {value} is outside the CP-range [{lo}, {hi}] of {kind} at d = {d}"
            ))
        }
        other => other.into(),
    }
}

fn resolve_param(args: &ChannelArgs) -> Result<f64, Failure> {
    let kind = args.channel;
    let (wanted, other) = if kind.uses_t() { (args.t, args.p) } else { (args.p, args.t) };
    if other.is_some() {
        let other_name = if kind.uses_t() { "p" } else { "t" };
        return Err(Failure::usage(format!("{kind} takes --{}, not --{other_name}", param_name(kind))));
    }
    let value = wanted.ok_or_else(|| Failure::usage(format!("{kind} needs --{}", param_name(kind))))?;
    kind.check_param(args.d, value).map_err(|e| range_failure(kind, args.d, e))?;
    Ok(value)
}

/// One closed-form evaluation, in output column order.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormRow {
    pub d: usize,
    pub param: f64,
    pub a: f64,
    pub b: f64,
    pub upsilon2: f64,
    pub branch: Branch,
    pub m: f64,
    pub eop2: f64,
}

impl ClosedFormRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.d,
            num(self.param),
            num(self.a),
            num(self.b),
            num(self.upsilon2),
            self.branch,
            num(self.m),
            num(self.eop2)
        )
    }
}

/// 17 significant digits, enough to round-trip a binary64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Closed form for a channel family, or `None` when it has no tabulated `(a, b)`.
pub fn closed_form_row(kind: ChannelKind, d: usize, param: f64) -> crate::error::Result<Option<ClosedFormRow>> {
    kind.check_param(d, param)?;
    let Some((a, b)) = kind.analytic_ab(d, param) else {
        return Ok(None);
    };
    // Γ_t goes through m(d, t) directly so the marginal branch is exactly 1/d
    let cf = match kind {
        ChannelKind::Gamma => upsilon2_gamma(d, param)?,
        _ => upsilon2_general_form(a, b, kind.input_dim(d))?,
    };
    Ok(Some(ClosedFormRow {
        d,
        param,
        a,
        b,
        upsilon2: cf.upsilon2,
        branch: cf.branch,
        m: cf.m_value,
        eop2: eop_from_norm(2.0, cf.upsilon2)?,
    }))
}

fn optimize_json(kind: ChannelKind, d: usize, param: f64, run: &RunArgs) -> Result<String, Failure> {
    let n = kind.build(d, param)?;
    let config = run.config();
    if run.n <= 1 {
        return Ok(optimize_upsilon2(&n, &config)?.to_json());
    }
    let report = multiplicativity_report(&n, run.n, &config)?;
    let mut value: serde_json::Value = serde_json::from_str(&report.n_copy.to_json()).expect("report is JSON");
    let map = value.as_object_mut().expect("report is an object");
    map.insert("copies".into(), report.copies.into());
    map.insert("one_copy".into(), report.one_copy.into());
    map.insert("one_copy_source".into(), serde_json::to_value(report.one_copy_source).expect("serializes"));
    map.insert("multiplicativity_gap".into(), report.gap.into());
    Ok(value.to_string())
}

/// One sweep row; closed-form columns are empty for maps without tabulated constants,
/// optimizer columns are empty unless requested.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub param: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub upsilon2: Option<f64>,
    pub branch: Option<Branch>,
    pub m: Option<f64>,
    pub opt_value: Option<f64>,
    pub gap: Option<f64>,
    pub seed: u64,
}

impl SweepRow {
    fn csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            self.d,
            num(self.param),
            opt(self.a),
            opt(self.b),
            opt(self.upsilon2),
            self.branch.map(|b| b.to_string()).unwrap_or_default(),
            opt(self.m),
            opt(self.opt_value),
            opt(self.gap),
            self.seed
        );
        s
    }
}

/// Rows of a sweep, in grid order.
///
/// With `optimize`, `opt_value` is the best `υ₂(N^{⊗n})` found and `gap` is
/// `upsilon2 − opt_value` for one copy, or `opt_value − upsilon2ⁿ` (the
/// multiplicativity gap) for `n > 1`.
fn sweep_rows(kind: ChannelKind, d: usize, values: &[f64], optimize: bool, run: &RunArgs) -> Result<Vec<SweepRow>, Failure> {
    let config = run.config();
    let mut rows = Vec::with_capacity(values.len());
    for &param in values {
        let cf = closed_form_row(kind, d, param)?;
        let (mut opt_value, mut gap) = (None, None);
        if optimize {
            let n = kind.build(d, param)?;
            if run.n <= 1 {
                let r = optimize_upsilon2(&n, &config)?;
                opt_value = Some(r.best_value);
                gap = r.gap;
            } else {
                let r = multiplicativity_report(&n, run.n, &config)?;
                opt_value = Some(r.n_copy.best_value);
                gap = Some(r.gap);
            }
        }
        rows.push(SweepRow {
            d,
            param,
            a: cf.as_ref().map(|c| c.a),
            b: cf.as_ref().map(|c| c.b),
            upsilon2: cf.as_ref().map(|c| c.upsilon2),
            branch: cf.as_ref().map(|c| c.branch),
            m: cf.as_ref().map(|c| c.m),
            opt_value,
            gap,
            seed: run.seed,
        });
    }
    Ok(rows)
}
