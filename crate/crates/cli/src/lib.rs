//! Command-line front end: argument parsing, validation, report output.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use switchwalk::dynamics::{kappa_measure, positivity_trace, ClockSet, TraceRow};
use switchwalk::exact::{
    ballot_prob, barrier_positive_profile, influence_exact, influence_oracle_profile,
    positive_endpoint_prob_dp, reflection_pair, stay_positive_prob, strip_stay_prob_dp,
    strip_stay_prob_from, MAX_ORACLE_N,
};
use switchwalk::experiments::{
    alpha_tail_report, influence_profile, k_periods, kappa_experiment, noise_sensitivity_curve,
    phi_experiment, u_abs_v_experiment, EstimateRow, InfluenceMode, Provenance, RunConfig,
};
use switchwalk::{Error, WalkKind};

/// Exit code for a failed registered check.
pub const EXIT_CHECK_FAILED: i32 = 2;
/// Exit code for usage and validation errors.
pub const EXIT_USAGE: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "switchwalk",
    version,
    about = "Switch random walks: exact tables and simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed
    #[arg(long, env = "SWITCHWALK_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Zero wall-time fields so that output is byte-for-byte reproducible
    #[arg(long)]
    no_timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum What {
    Stay,
    Influence,
    Barrier,
    Tail,
    Identities,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Auto,
    Exact,
    Float,
    Oracle,
    Mc,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Switch,
    Compass,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact tables: P(P_k) for k <= n, influence profile, barrier
    /// probabilities, tails, or identity checks up to n
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = What::Influence)]
        what: What,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Samples for `--mode mc`
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the influence formula with brute-force enumeration
    Oracle {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Dump the event trace of one dynamical run
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Joint positivity at times 0 and eps
    Ns {
        #[arg(long)]
        n: usize,
        /// One value or a comma-separated list
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Kind::Switch)]
        kind: Kind,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// P(U' > |V'|) over K(n) periods
    Uv {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Moments of the time spent positive
    Kappa {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Normalised pair energy of the positive times
    Phi {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        gamma: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact tail at the barrier n^alpha against the two bounds
    Tail {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Finished output plus an optional failed check to report after writing it.
struct Output {
    body: String,
    check_failure: Option<String>,
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    #[serde(flatten)]
    provenance: Provenance,
}

#[derive(Serialize)]
struct Document<'a, R: Serialize> {
    meta: Meta<'a>,
    rows: &'a [R],
}

#[derive(Serialize)]
struct TraceCsvRow {
    event_index: usize,
    time: f64,
    bit: usize,
    new_value: i8,
    status_after: u8,
}

impl From<&TraceRow> for TraceCsvRow {
    fn from(r: &TraceRow) -> Self {
        Self {
            event_index: r.event_index,
            time: r.time,
            bit: r.bit,
            new_value: r.new_value,
            status_after: u8::from(r.status_after),
        }
    }
}

fn render<R: Serialize>(command: &str, common: &Common, rows: &[R]) -> Result<String, Failure> {
    let internal = |e: &dyn std::fmt::Display| Failure {
        code: EXIT_USAGE,
        message: format!("cannot encode output: {e}"),
    };
    match common.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| internal(&e))?;
            }
            let bytes = w.into_inner().map_err(|e| internal(&e))?;
            String::from_utf8(bytes).map_err(|e| internal(&e))
        }
        Format::Json => {
            let mut provenance = Provenance::new(common.seed);
            if common.no_timing {
                provenance.timestamp = 0;
            }
            let doc = Document {
                meta: Meta {
                    command,
                    provenance,
                },
                rows,
            };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| internal(&e))?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn report_rows(mut rows: Vec<EstimateRow>, common: &Common) -> Vec<EstimateRow> {
    if common.no_timing {
        for r in &mut rows {
            r.seconds = 0.0;
        }
    }
    rows
}

fn require(cond: bool, msg: impl Into<String>) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::usage(msg))
    }
}

fn require_n(n: usize) -> Result<(), Failure> {
    require(n >= 1, "--n must be >= 1")
}

fn require_trials(trials: u64) -> Result<(), Failure> {
    require(trials >= 1, "--trials must be >= 1")
}

fn run_config(trials: u64, common: &Common) -> RunConfig {
    RunConfig::new(trials, common.seed).with_workers(common.workers)
}

fn exact_row(name: &str, n: usize, p: &switchwalk::DyadicProb) -> EstimateRow {
    let mut row = EstimateRow::new(name, n, 0, p.to_f64());
    row.exact = Some(p.to_string());
    row
}

fn count_row(name: &str, n: usize, checks: u64, mismatches: u64) -> EstimateRow {
    EstimateRow::new(name, n, checks, mismatches as f64)
}

/// Identity checks up to size `n`: `(name, checks, mismatches)`.
fn identity_checks(n: usize) -> Result<Vec<(&'static str, u64, u64)>, Error> {
    let mut out = Vec::new();
    let (mut checks, mut bad) = (0, 0);
    for z in 1..=n as i64 {
        for j in 1..=n {
            let (a, b) = reflection_pair(z, j)?;
            checks += 1;
            bad += u64::from(a != b);
        }
    }
    out.push(("identity_reflection", checks, bad));
    let (mut checks, mut bad) = (0, 0);
    for j in 1..=n {
        for z in 1..=j as i64 {
            checks += 1;
            bad += u64::from(ballot_prob(j, z)? != positive_endpoint_prob_dp(j, z));
        }
    }
    out.push(("identity_ballot", checks, bad));
    let (mut checks, mut bad) = (0, 0);
    for z in 1..=(n as i64).min(8) {
        for x in 1..2 * z {
            for steps in 0..=n {
                checks += 1;
                bad +=
                    u64::from(strip_stay_prob_from(x, z, steps) != strip_stay_prob_dp(x, z, steps));
            }
        }
    }
    out.push(("identity_strip", checks, bad));
    let (mut checks, mut bad) = (0, 0);
    let dp = barrier_positive_profile(n, 0.0);
    for k in 1..=n {
        checks += 1;
        bad += u64::from(influence_exact(k, 1)? != dp[k - 1].scale(2, 0));
    }
    out.push(("identity_first_bit", checks, bad));
    Ok(out)
}

fn execute(cmd: Command) -> Result<Output, Failure> {
    let ok = |body| {
        Ok(Output {
            body,
            check_failure: None,
        })
    };
    match cmd {
        Command::Exact {
            n,
            what,
            mode,
            alpha,
            trials,
            common,
        } => {
            require_n(n)?;
            require(
                alpha >= 0.0 && alpha.is_finite(),
                "--alpha must be finite and >= 0",
            )?;
            let rows = match what {
                What::Stay => (1..=n)
                    .map(|k| exact_row("stay_positive", k, &stay_positive_prob(k)))
                    .collect(),
                What::Barrier => barrier_positive_profile(n, alpha)
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let mut r = exact_row("barrier_positive", i + 1, p);
                        r.alpha = Some(alpha);
                        r
                    })
                    .collect(),
                What::Tail => {
                    require(alpha > 0.5, "--alpha must exceed 1/2 for tail")?;
                    alpha_tail_report(n, alpha)?.rows
                }
                What::Influence => {
                    let mode = match mode {
                        Mode::Auto => InfluenceMode::Auto,
                        Mode::Exact => InfluenceMode::Exact,
                        Mode::Float => InfluenceMode::Float,
                        Mode::Oracle => InfluenceMode::Oracle,
                        Mode::Mc => InfluenceMode::Mc,
                    };
                    if mode == InfluenceMode::Oracle {
                        require(
                            n <= MAX_ORACLE_N,
                            format!("oracle mode needs --n <= {MAX_ORACLE_N}"),
                        )?;
                    }
                    if mode == InfluenceMode::Mc {
                        require_trials(trials)?;
                    }
                    influence_profile(n, mode, &run_config(trials, &common))?.rows
                }
                What::Identities => {
                    let checks = identity_checks(n)?;
                    let failed: Vec<_> = checks.iter().filter(|c| c.2 > 0).map(|c| c.0).collect();
                    let rows: Vec<_> = checks.iter().map(|c| count_row(c.0, n, c.1, c.2)).collect();
                    let body = render("exact", &common, &report_rows(rows, &common))?;
                    return Ok(Output {
                        body,
                        check_failure: (!failed.is_empty())
                            .then(|| format!("identity mismatches: {}", failed.join(", "))),
                    });
                }
            };
            ok(render("exact", &common, &report_rows(rows, &common))?)
        }
        Command::Oracle { n, common } => {
            require_n(n)?;
            require(n <= MAX_ORACLE_N, format!("--n must be <= {MAX_ORACLE_N}"))?;
            let oracle = influence_oracle_profile(n)?;
            let mut rows = Vec::new();
            let mut mismatched = Vec::new();
            for (m, o) in (1..=n).zip(&oracle) {
                let f = influence_exact(n, m)?;
                if &f != o {
                    mismatched.push(m);
                }
                for (name, p) in [("influence_oracle", o), ("influence_exact", &f)] {
                    let mut r = exact_row(name, n, p);
                    r.m = Some(m);
                    rows.push(r);
                }
            }
            Ok(Output {
                body: render("oracle", &common, &rows)?,
                check_failure: (!mismatched.is_empty())
                    .then(|| format!("formula differs from enumeration at m = {mismatched:?}")),
            })
        }
        Command::Simulate { n, alpha, common } => {
            require_n(n)?;
            require(
                alpha >= 0.0 && alpha.is_finite(),
                "--alpha must be finite and >= 0",
            )?;
            let clocks = ClockSet::sample(n, 1.0, common.seed)?;
            let (timeline, trace) = positivity_trace(&clocks, n, alpha)?;
            let body = match common.format {
                Format::Csv => {
                    let rows: Vec<TraceCsvRow> = trace.iter().map(TraceCsvRow::from).collect();
                    render("simulate", &common, &rows)?
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Sim<'a> {
                        kappa: f64,
                        breakpoints: &'a [f64],
                        status: &'a [bool],
                        trace: Vec<TraceCsvRow>,
                    }
                    let sim = Sim {
                        kappa: kappa_measure(&timeline),
                        breakpoints: timeline.breakpoints(),
                        status: timeline.status(),
                        trace: trace.iter().map(TraceCsvRow::from).collect(),
                    };
                    render("simulate", &common, std::slice::from_ref(&sim))?
                }
            };
            ok(body)
        }
        Command::Ns {
            n,
            eps,
            kind,
            trials,
            common,
        } => {
            require_n(n)?;
            require_trials(trials)?;
            require(
                eps.iter().all(|e| *e >= 0.0 && e.is_finite()),
                "--eps values must be finite and >= 0",
            )?;
            let kinds: &[WalkKind] = match kind {
                Kind::Switch => &[WalkKind::Switch],
                Kind::Compass => &[WalkKind::Compass],
                Kind::Both => &[WalkKind::Switch, WalkKind::Compass],
            };
            let cfg = run_config(trials, &common);
            let mut rows = Vec::new();
            for &k in kinds {
                rows.extend(noise_sensitivity_curve(n, &eps, k, &cfg)?.rows);
            }
            ok(render("ns", &common, &report_rows(rows, &common))?)
        }
        Command::Uv {
            n,
            eps,
            trials,
            common,
        } => {
            require_n(n)?;
            require_trials(trials)?;
            require(eps > 0.0 && eps.is_finite(), "--eps must be finite and > 0")?;
            require(
                k_periods(n, eps) >= 2,
                format!("K(n) = {} < 2 for n = {n}, eps = {eps}", k_periods(n, eps)),
            )?;
            let row = u_abs_v_experiment(n, eps, &run_config(trials, &common))?;
            ok(render("uv", &common, &report_rows(vec![row], &common))?)
        }
        Command::Kappa { n, trials, common } => {
            require_n(n)?;
            require_trials(trials)?;
            let rows = kappa_experiment(n, &run_config(trials, &common))?.rows;
            ok(render("kappa", &common, &report_rows(rows, &common))?)
        }
        Command::Phi {
            n,
            alpha,
            gamma,
            trials,
            common,
        } => {
            require_n(n)?;
            require_trials(trials)?;
            require(
                alpha >= 0.0 && alpha.is_finite(),
                "--alpha must be finite and >= 0",
            )?;
            require((0.0..1.0).contains(&gamma), "--gamma must lie in [0, 1)")?;
            let rows = phi_experiment(n, alpha, gamma, &run_config(trials, &common))?.rows;
            ok(render("phi", &common, &report_rows(rows, &common))?)
        }
        Command::Tail { n, alpha, common } => {
            require_n(n)?;
            require(alpha > 0.5 && alpha.is_finite(), "--alpha must exceed 1/2")?;
            let rows = alpha_tail_report(n, alpha)?.rows;
            ok(render("tail", &common, &report_rows(rows, &common))?)
        }
    }
}

fn destination(cmd: &Command) -> Option<PathBuf> {
    let common = match cmd {
        Command::Exact { common, .. }
        | Command::Oracle { common, .. }
        | Command::Simulate { common, .. }
        | Command::Ns { common, .. }
        | Command::Uv { common, .. }
        | Command::Kappa { common, .. }
        | Command::Phi { common, .. }
        | Command::Tail { common, .. } => common,
    };
    common.out.clone()
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 on usage or validation errors, 2
/// when a registered check fails.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let out = destination(&cli.command);
    let output = match execute(cli.command) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let written = match &out {
        Some(path) => fs::write(path, &output.body),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(output.body.as_bytes())
                .and_then(|_| stdout.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    match output.check_failure {
        Some(msg) => {
            eprintln!("check failed: {msg}");
            EXIT_CHECK_FAILED
        }
        None => 0,
    }
}
