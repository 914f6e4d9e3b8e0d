//! Command-line front end: `solve`, `simulate`, `sweep`, `validate` and
//! `presets`.
//!
//! Exit codes: 0 on success, 1 when validation fails or a run errors, 2 on
//! usage or configuration errors.

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{load_config, parse_config, read_config, validate_scenario, validate_sweep, ConfigError, LoadedConfig};

use crate::experiments::{
    self, format_float, preset, write_csv, CellKind, Engines, RateExpr, RateName, ResultRow, Scenario, SweepSpec, ValidationOptions,
    PRESETS,
};
use crate::model::{RateParams, Scheme, SchemeConfig};
use crate::sim::{self, RNG_NAME};
use crate::solver::{dropping_probabilities, solve_iterative};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const AFTER_HELP: &str = "\
Presets:
  table1  validation grid, UFA and UTA, both engines
  fig4    UTA vs Q, curves lambda_l in {1,5,10}*mu_w
  fig5    UTA vs Q, curves mu_lu in {0.5,1,2}*mu_w
  fig6    UTA vs Q, curves lambda_w in {1,5,10}*mu_w
  fig7    UTA vs Q, curves mu_w in {5,10,20}
  fig8    UTA vs Q, curves mu_s in {0.1,0.5,1}
  fig9    UTA vs Q, curves (mu_on, mu_off)
  fig10   UTAB vs Q, curves (mu_on, mu_off)
  fig11   all schemes vs Q
  fig12   UFAB and UTAB vs q_theta at Q=5
Rates accept numbers or expressions such as 5*mu_w.
Exit codes: 0 success, 1 validation failure or run error, 2 usage or config error.";

#[derive(Debug, Parser)]
#[command(name = "laacoex", version, about = "LAA/Wi-Fi unlicensed band allocation: analytic model, simulation and sweeps", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Markov model and print the dropping probabilities.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the discrete-event simulation for one scenario.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a preset or configured sweep and write a result table.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recompute the reference validation table and compare cell by cell.
    Validate {
        #[command(flatten)]
        sim: SimArgs,
        /// Relative stopping tolerance of the iterative solver.
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the built-in presets.
    Presets {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pretty,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write results to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (sweep defaults to csv, everything else to pretty).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Simulation seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Packet arrivals (LAA and Wi-Fi) per simulation run.
    #[arg(long)]
    pub sessions: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Allocation scheme: ufa, uta, ufab or utab.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Start from a built-in preset (see the list below).
    #[arg(long)]
    pub preset: Option<String>,
    /// Start from a TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Relative stopping tolerance of the iterative solver.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// LAA arrival rate.
    #[arg(long)]
    pub lambda_l: Option<RateExpr>,
    /// Wi-Fi arrival rate.
    #[arg(long)]
    pub lambda_w: Option<RateExpr>,
    /// LAA service rate on an unlicensed channel.
    #[arg(long)]
    pub mu_lu: Option<RateExpr>,
    /// Wi-Fi service rate.
    #[arg(long)]
    pub mu_w: Option<RateExpr>,
    /// Sensing completion rate.
    #[arg(long)]
    pub mu_s: Option<RateExpr>,
    /// ON expiry rate.
    #[arg(long)]
    pub mu_on: Option<RateExpr>,
    /// OFF expiry rate.
    #[arg(long)]
    pub mu_off: Option<RateExpr>,
    /// LAA buffer size Q.
    #[arg(long)]
    pub q: Option<u32>,
    /// Buffer threshold for ufab/utab.
    #[arg(long)]
    pub q_theta: Option<u32>,
    /// Number of unlicensed channels D (the analytic model needs 1).
    #[arg(long)]
    pub d: Option<u32>,
}

impl ScenarioArgs {
    fn rate_overrides(&self) -> Vec<(RateName, RateExpr)> {
        [
            (RateName::LambdaL, self.lambda_l),
            (RateName::LambdaW, self.lambda_w),
            (RateName::MuLu, self.mu_lu),
            (RateName::MuW, self.mu_w),
            (RateName::MuS, self.mu_s),
            (RateName::MuOn, self.mu_on),
            (RateName::MuOff, self.mu_off),
        ]
        .into_iter()
        .filter_map(|(n, e)| e.map(|e| (n, e)))
        .collect()
    }

    fn apply(&self, s: &mut Scenario, sim: Option<&SimArgs>) {
        if let Some(k) = self.scheme {
            s.scheme.scheme = k;
        }
        if let Some(q) = self.q {
            s.scheme.queue = q;
        }
        if let Some(t) = self.q_theta {
            s.scheme.threshold = t;
        }
        if let Some(d) = self.d {
            s.scheme.channels = d;
        }
        if let Some(a) = self.tolerance {
            s.solver.alpha = a;
        }
        for (n, e) in self.rate_overrides() {
            s.rates.set(n, e);
        }
        if let Some(sim) = sim {
            if let Some(seed) = sim.seed {
                s.sim.seed = seed;
            }
            if let Some(n) = sim.sessions {
                s.sim.sessions = n;
            }
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Run(format!("csv error: {e}"))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let invocation = invocation(&args);
    let result = match &cli.command {
        Command::Solve { scenario, output } => solve(scenario, output, &invocation, stdout),
        Command::Simulate { scenario, sim, output } => simulate(scenario, sim, output, &invocation, stdout),
        Command::Sweep { scenario, sim, output } => run_sweep(scenario, sim, output, &invocation, stdout, stderr),
        Command::Validate { sim, tolerance, output } => validate(sim, *tolerance, output, &invocation, stdout),
        Command::Presets { output } => list_presets(output, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Run(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_FAILED
        }
    }
}

/// The command line without the program name and the output path, which
/// does not affect results; shell-quoted so it can be split back.
fn invocation(args: &[String]) -> String {
    let mut parts = Vec::new();
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
            continue;
        }
        if a.starts_with("--out=") {
            continue;
        }
        parts.push(a.as_str());
    }
    shlex::try_join(parts).unwrap_or_else(|_| args[1..].join(" "))
}

fn emit(output: &OutputArgs, stdout: &mut dyn Write, body: &[u8]) -> Result<(), Failure> {
    match &output.out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Run(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(body).map_err(Failure::from),
    }
}

/// Base scenario from `--config`, `--preset` or the validation defaults,
/// with inline overrides applied.
fn scenario_from(args: &ScenarioArgs, sim: Option<&SimArgs>) -> Result<Scenario, Failure> {
    let mut s = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => return Err(Failure::Usage("--config and --preset are mutually exclusive".into())),
        (Some(path), None) => match read_config(path)? {
            LoadedConfig::Scenario(s) => s,
            LoadedConfig::Sweep(spec) => spec.base,
        },
        (None, Some(name)) => preset_spec(name)?.base,
        (None, None) => Scenario::new(
            "cli",
            SchemeConfig::ufa(2),
            experiments::RateSpec::absolute(&RateParams::table1(25.0)),
        ),
    };
    s.scheme.relaxed_threshold = false;
    args.apply(&mut s, sim);
    validate_scenario(&s, true)?;
    Ok(s)
}

fn preset_spec(name: &str) -> Result<SweepSpec, Failure> {
    preset(name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        Failure::Usage(format!("unknown preset '{name}' (available: {})", names.join(", ")))
    })
}

fn scenario_metadata(s: &Scenario, command: &str, invocation: &str) -> Vec<(String, String)> {
    let mut m = vec![
        ("tool".into(), format!("laacoex {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), command.into()),
        ("invocation".into(), invocation.into()),
        ("scenario".into(), s.name.clone()),
        ("scheme".into(), s.scheme.scheme.name().into()),
        ("d".into(), s.scheme.channels.to_string()),
        ("q".into(), s.scheme.queue.to_string()),
    ];
    if s.scheme.scheme.has_threshold() {
        m.push(("q_theta".into(), s.scheme.threshold.to_string()));
    }
    m.push(("rates".into(), s.rates.to_string()));
    if let Ok(r) = s.rates.resolve() {
        let abs: Vec<String> = r.named().iter().map(|(k, v)| format!("{k}={v}")).collect();
        m.push(("rates_resolved".into(), abs.join(" ")));
    }
    m.push(("engines".into(), s.engines.to_string()));
    m.push(("tolerance".into(), format_float(s.solver.alpha)));
    m.push(("max_iterations".into(), s.solver.max_iterations.to_string()));
    if s.engines.simulation() {
        m.push(("sessions".into(), s.sim.sessions.to_string()));
        m.push(("seed".into(), s.sim.seed.to_string()));
        m.push(("batches".into(), s.sim.batches.to_string()));
        m.push(("rng".into(), RNG_NAME.into()));
        for (q, d) in &s.sim.distributions {
            m.push((format!("distribution.{q}"), format!("{d:?}")));
        }
    }
    m
}

/// `# key = value` lines shared by every output format.
fn metadata_block(meta: &[(String, String)]) -> String {
    meta.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}

fn solve(args: &ScenarioArgs, output: &OutputArgs, invocation: &str, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let mut s = scenario_from(args, None)?;
    s.engines = Engines::Analytic;
    if s.scheme.channels != 1 {
        return Err(Failure::Usage(format!("d: the analytic model needs d = 1, got {}", s.scheme.channels)));
    }
    let rates = s.rates.resolve().map_err(Failure::Usage)?;
    let sol = solve_iterative(&s.scheme, &rates, &s.solver).map_err(|e| Failure::Run(e.to_string()))?;
    let p = dropping_probabilities(&sol.distribution, &s.scheme);
    let mut meta = scenario_metadata(&s, "solve", invocation);
    meta.push(("iterations".into(), sol.iterations.to_string()));

    let body = match output.format.unwrap_or(Format::Pretty) {
        Format::Pretty => format!("{}P_b,l = {:.6}\nP_b,w = {:.6}\n", metadata_block(&meta), p.p_bl, p.p_bw).into_bytes(),
        Format::Csv => {
            let row = ResultRow {
                scenario: s.name.clone(),
                scheme: s.scheme.scheme,
                axis: "-".into(),
                axis_value: None,
                analytic: Some(p),
                simulated: None,
                err_bl_pct: None,
                err_bw_pct: None,
                seed: None,
            };
            let mut buf = Vec::new();
            write_csv(&[row], &meta, &mut buf)?;
            buf
        }
    };
    emit(output, stdout, &body)?;
    Ok(EXIT_OK)
}

fn simulate(
    args: &ScenarioArgs,
    sim_args: &SimArgs,
    output: &OutputArgs,
    invocation: &str,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut s = scenario_from(args, Some(sim_args))?;
    s.engines = Engines::Simulation;
    let cfg = s.sim_config().map_err(|e| Failure::Usage(e.to_string()))?;
    let stats = sim::run(&cfg).map_err(|e| match e {
        sim::SimError::Config(m) => Failure::Usage(m),
        other => Failure::Run(other.to_string()),
    })?;
    let meta = scenario_metadata(&s, "simulate", invocation);
    let body = match output.format.unwrap_or(Format::Pretty) {
        Format::Pretty => {
            let mut t = metadata_block(&meta);
            t += &format!("laa_arrivals    {}\n", stats.laa_arrivals);
            t += &format!("laa_drops       {}\n", stats.laa_drops);
            t += &format!("wifi_arrivals   {}\n", stats.wifi_arrivals);
            t += &format!("wifi_drops_laa  {}\n", stats.wifi_drops_laa_occupied);
            t += &format!("wifi_drops_all  {}\n", stats.wifi_drops_total);
            t += &format!("P_b,l = {:.6} ± {:.6}\n", stats.p_bl_hat, stats.ci95_bl);
            t += &format!("P_b,w = {:.6} ± {:.6}\n", stats.p_bw_hat, stats.ci95_bw);
            t.into_bytes()
        }
        Format::Csv => {
            let row = ResultRow {
                scenario: s.name.clone(),
                scheme: s.scheme.scheme,
                axis: "-".into(),
                axis_value: None,
                analytic: None,
                simulated: Some(experiments::SimEstimate {
                    p_bl: stats.p_bl_hat,
                    p_bw: stats.p_bw_hat,
                    ci_bl: stats.ci95_bl,
                    ci_bw: stats.ci95_bw,
                }),
                err_bl_pct: None,
                err_bw_pct: None,
                seed: Some(s.sim.seed),
            };
            let mut buf = Vec::new();
            write_csv(&[row], &meta, &mut buf)?;
            buf
        }
    };
    emit(output, stdout, &body)?;
    Ok(EXIT_OK)
}

fn run_sweep(
    args: &ScenarioArgs,
    sim_args: &SimArgs,
    output: &OutputArgs,
    invocation: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut spec = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => return Err(Failure::Usage("--config and --preset are mutually exclusive".into())),
        (Some(path), None) => match read_config(path)? {
            LoadedConfig::Sweep(spec) => spec,
            LoadedConfig::Scenario(_) => {
                return Err(Failure::Usage(format!("{}: no [sweep] table in this config", path.display())))
            }
        },
        (None, Some(name)) => preset_spec(name)?,
        (None, None) => return Err(Failure::Usage("sweep needs --preset or --config".into())),
    };
    if let Some(k) = args.scheme {
        spec.schemes = vec![k];
    }
    args.clone_without_scheme().apply(&mut spec.base, Some(sim_args));
    validate_sweep(&spec)?;

    let outcome = experiments::sweep(&spec).map_err(Failure::Usage)?;
    for w in &outcome.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }

    let mut meta = scenario_metadata(&spec.base, "sweep", invocation);
    meta[3] = ("scenario".into(), spec.name.clone());
    meta.retain(|(k, _)| k != "scheme");
    let schemes: Vec<&str> = spec.schemes.iter().map(|s| s.name()).collect();
    meta.push(("schemes".into(), schemes.join(",")));
    meta.push(("axis".into(), spec.axis.key().into()));
    let values: Vec<String> = spec.values.iter().map(|v| v.to_string()).collect();
    meta.push(("values".into(), values.join(",")));
    for ser in &spec.series {
        let r: Vec<String> = ser.rates.iter().map(|(n, e)| format!("{n}={e}")).collect();
        meta.push(("series".into(), format!("{} [{}]", ser.label, r.join(" "))));
    }
    meta.push(("rows".into(), outcome.rows.len().to_string()));

    let body = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&outcome.rows, &meta, &mut buf)?;
            buf
        }
        Format::Pretty => pretty_rows(&outcome.rows, &meta).into_bytes(),
    };
    emit(output, stdout, &body)?;
    for f in &outcome.failures {
        let _ = writeln!(stderr, "error: {f}");
    }
    Ok(if outcome.failures.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

impl ScenarioArgs {
    fn clone_without_scheme(&self) -> ScenarioArgs {
        ScenarioArgs {
            scheme: None,
            preset: None,
            config: None,
            tolerance: self.tolerance,
            lambda_l: self.lambda_l,
            lambda_w: self.lambda_w,
            mu_lu: self.mu_lu,
            mu_w: self.mu_w,
            mu_s: self.mu_s,
            mu_on: self.mu_on,
            mu_off: self.mu_off,
            q: self.q,
            q_theta: self.q_theta,
            d: self.d,
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

fn pretty_rows(rows: &[ResultRow], meta: &[(String, String)]) -> String {
    let mut t = metadata_block(meta);
    t += &format!(
        "{:<44} {:<5} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
        "scenario", "scheme", "axis", "p_bl", "p_bw", "p_bl_sim", "p_bw_sim"
    );
    for r in rows {
        t += &format!(
            "{:<44} {:<5} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
            r.scenario,
            r.scheme.name(),
            r.axis_value.map(|v| v.to_string()).unwrap_or_default(),
            fmt_opt(r.analytic.map(|a| a.p_bl)),
            fmt_opt(r.analytic.map(|a| a.p_bw)),
            fmt_opt(r.simulated.map(|s| s.p_bl)),
            fmt_opt(r.simulated.map(|s| s.p_bw)),
        );
    }
    t
}

fn validate(
    sim_args: &SimArgs,
    tolerance: Option<f64>,
    output: &OutputArgs,
    invocation: &str,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut opts = ValidationOptions::default();
    if let Some(n) = sim_args.sessions {
        if n < 10 {
            return Err(Failure::Usage("sessions: must be at least 10".into()));
        }
        opts.sessions = n;
    }
    if let Some(s) = sim_args.seed {
        opts.seed = s;
    }
    if let Some(a) = tolerance {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Failure::Usage(format!("tolerance: must be positive, got {a}")));
        }
        opts.solver_alpha = a;
    }
    let report = experiments::validate_reference_with(&opts);
    let meta: Vec<(String, String)> = vec![
        ("tool".into(), format!("laacoex {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), "validate".into()),
        ("invocation".into(), invocation.into()),
        ("sessions".into(), opts.sessions.to_string()),
        ("seed".into(), opts.seed.to_string()),
        ("rng".into(), RNG_NAME.into()),
        ("tolerance".into(), format_float(opts.solver_alpha)),
        ("reference_sha256".into(), experiments::reference_checksum()),
        ("reference_checksum_ok".into(), report.checksum_ok.to_string()),
    ];
    let body = match output.format.unwrap_or(Format::Pretty) {
        Format::Pretty => {
            let mut t = metadata_block(&meta);
            for c in &report.cells {
                t += &format!("{c}\n");
            }
            for (kind, label) in [
                (CellKind::Analytic, "analytic cells"),
                (CellKind::Simulation, "simulation cells"),
                (CellKind::ErrorPct, "error cells"),
                (CellKind::PublishedErrorPct, "published error consistency"),
            ] {
                let (ok, n) = report.tally(kind);
                t += &format!("{label}: {ok}/{n} passing\n");
            }
            t += if report.passed() { "validation PASSED\n" } else { "validation FAILED\n" };
            t.into_bytes()
        }
        Format::Csv => {
            let mut buf = metadata_block(&meta).into_bytes();
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["scheme", "metric", "kind", "lambda_l", "expected", "actual", "tolerance", "status"])?;
            for c in &report.cells {
                w.write_record([
                    c.scheme.name().to_string(),
                    c.metric.to_string(),
                    c.kind.to_string(),
                    c.lambda_l.to_string(),
                    format_float(c.expected),
                    format_float(c.actual),
                    format_float(c.tolerance),
                    format!("{:?}", c.status).to_lowercase(),
                ])?;
            }
            w.flush()?;
            drop(w);
            buf
        }
    };
    emit(output, stdout, &body)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

fn list_presets(output: &OutputArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let mut t = String::new();
    match output.format.unwrap_or(Format::Pretty) {
        Format::Pretty => {
            for p in PRESETS {
                let spec = p.spec();
                t += &format!("{:<7} {} ({} points)\n", p.name, p.description, spec.len());
            }
        }
        Format::Csv => {
            t += "name,points,description\n";
            for p in PRESETS {
                t += &format!("{},{},\"{}\"\n", p.name, p.spec().len(), p.description);
            }
        }
    }
    emit(output, stdout, t.as_bytes())?;
    Ok(EXIT_OK)
}
