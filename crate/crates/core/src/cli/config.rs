//! TOML run configuration.
//!
//! ```toml
//! name = "ufa-light"
//! scheme = "ufa"          # ufa | uta | ufab | utab
//! d = 1                   # optional, default 1
//! q = 2
//! q_theta = 1             # threshold schemes only
//! engines = "both"        # analytic | simulation | both (default analytic)
//!
//! [rates]                 # numbers or "k*<rate>" expressions
//! lambda_l = 25
//! lambda_w = "0.125*mu_w"
//! mu_lu = 25
//! mu_w = 40
//! mu_s = 1
//! mu_on = 0.1
//! mu_off = 0.1
//!
//! [solver]                # optional
//! alpha = 1e-6
//! max_iterations = 1000000
//!
//! [sim]                   # optional
//! sessions = 1000000
//! seed = 7919
//! batches = 10
//! [sim.distributions]
//! laa_service = { deterministic = { value = 0.04 } }
//!
//! [sweep]                 # optional; turns the file into a sweep
//! axis = "q"              # q | q_theta | lambda_l | lambda_w | mu_lu | mu_w | mu_s | mu_on_off
//! values = [1, 2, 3]      # pairs [[on, off], ...] for mu_on_off
//! schemes = ["uta", "utab"]
//! [[sweep.series]]
//! label = "heavy"
//! rates = { lambda_l = "5*mu_w" }
//! ```
//!
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::experiments::{AxisValue, Engines, RateExpr, RateName, RateSpec, Scenario, Series, SimSettings, SweepAxis, SweepSpec};
use crate::model::{ModelError, Scheme, SchemeConfig};
use crate::sim::{DistributionSpec, Quantity};
use crate::solver::SolverSettings;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Result of loading a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedConfig {
    Scenario(Scenario),
    Sweep(SweepSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    scheme: Option<Scheme>,
    d: Option<u32>,
    q: Option<u32>,
    q_theta: Option<u32>,
    engines: Option<Engines>,
    rates: RawRates,
    solver: Option<RawSolver>,
    sim: Option<RawSim>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    lambda_l: RateExpr,
    lambda_w: RateExpr,
    mu_lu: RateExpr,
    mu_w: RateExpr,
    mu_s: RateExpr,
    mu_on: RateExpr,
    mu_off: RateExpr,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    alpha: Option<f64>,
    max_iterations: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    sessions: Option<u64>,
    seed: Option<u64>,
    batches: Option<u32>,
    #[serde(default)]
    distributions: BTreeMap<Quantity, DistributionSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    values: Vec<RawAxisValue>,
    schemes: Option<Vec<Scheme>>,
    #[serde(default)]
    series: Vec<RawSeries>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAxisValue {
    Int(i64),
    Float(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    label: String,
    rates: BTreeMap<String, RateExpr>,
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let loaded = read_config(path)?;
    match &loaded {
        LoadedConfig::Scenario(s) => validate_scenario(s, true)?,
        LoadedConfig::Sweep(spec) => validate_sweep(spec)?,
    }
    Ok(loaded)
}

/// Reads and parses a configuration file without semantic checks, so that
/// command-line overrides can be applied first.
pub fn read_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text).map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// Parses configuration text; see the module docs for the schema.
pub fn parse_config(text: &str) -> Result<LoadedConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: PathBuf::from("<config>"),
        message: e.to_string(),
    })?;

    let r = &raw.rates;
    let rates = RateSpec::absolute(&crate::model::RateParams::table1(0.0))
        .with(RateName::LambdaL, r.lambda_l)
        .with(RateName::LambdaW, r.lambda_w)
        .with(RateName::MuLu, r.mu_lu)
        .with(RateName::MuW, r.mu_w)
        .with(RateName::MuS, r.mu_s)
        .with(RateName::MuOn, r.mu_on)
        .with(RateName::MuOff, r.mu_off);

    let mut solver = SolverSettings::default();
    if let Some(s) = &raw.solver {
        solver.alpha = s.alpha.unwrap_or(solver.alpha);
        solver.max_iterations = s.max_iterations.unwrap_or(solver.max_iterations);
    }
    let mut sim = SimSettings::default();
    if let Some(s) = raw.sim {
        sim.sessions = s.sessions.unwrap_or(sim.sessions);
        sim.seed = s.seed.unwrap_or(sim.seed);
        sim.batches = s.batches.unwrap_or(sim.batches);
        sim.distributions = s.distributions;
    }

    let scheme_kind = match (raw.scheme, &raw.sweep) {
        (Some(s), _) => s,
        (None, Some(sw)) => sw
            .schemes
            .as_ref()
            .and_then(|v| v.first().copied())
            .ok_or_else(|| ConfigError::field("scheme", "missing (set scheme or sweep.schemes)"))?,
        (None, None) => return Err(ConfigError::field("scheme", "missing")),
    };
    let q = raw.q.ok_or_else(|| ConfigError::field("q", "missing"))?;
    let scheme = SchemeConfig {
        scheme: scheme_kind,
        channels: raw.d.unwrap_or(1),
        queue: q,
        threshold: raw.q_theta.unwrap_or(0),
        relaxed_threshold: false,
    };
    let name = raw.name.unwrap_or_else(|| "config".into());
    let mut scenario = Scenario::new(name.clone(), scheme, rates);
    scenario.solver = solver;
    scenario.sim = sim;
    scenario.engines = raw.engines.unwrap_or(Engines::Analytic);

    let Some(sw) = raw.sweep else {
        return Ok(LoadedConfig::Scenario(scenario));
    };
    let axis: SweepAxis = sw.axis.parse().map_err(|m: String| ConfigError::field("sweep.axis", m))?;
    let values = sw
        .values
        .into_iter()
        .map(|v| match v {
            RawAxisValue::Int(i) => AxisValue::Scalar(i as f64),
            RawAxisValue::Float(f) => AxisValue::Scalar(f),
            RawAxisValue::Pair([a, b]) => AxisValue::Pair(a, b),
        })
        .collect();
    let mut series = Vec::new();
    for (i, s) in sw.series.into_iter().enumerate() {
        let mut rates = Vec::new();
        for (k, e) in s.rates {
            let n: RateName = k
                .parse()
                .map_err(|m: String| ConfigError::field(format!("sweep.series[{i}].rates"), m))?;
            rates.push((n, e));
        }
        series.push(Series::new(s.label, rates));
    }
    scenario.scheme.relaxed_threshold = true;
    Ok(LoadedConfig::Sweep(SweepSpec {
        name,
        base: scenario,
        axis,
        values,
        schemes: sw.schemes.unwrap_or_else(|| vec![scheme_kind]),
        series,
    }))
}

/// Semantic checks; errors name the offending field. `strict` enforces
/// `1 <= q_theta <= Q - 1`.
pub fn validate_scenario(s: &Scenario, strict: bool) -> Result<(), ConfigError> {
    let mut scheme = s.scheme;
    if strict {
        scheme.relaxed_threshold = false;
    }
    scheme.validate().map_err(|e| match e {
        ModelError::NoChannels => ConfigError::field("d", e.to_string()),
        ModelError::NoQueue => ConfigError::field("q", e.to_string()),
        ModelError::Threshold { .. } => ConfigError::field("q_theta", e.to_string()),
        other => ConfigError::field("scheme", other.to_string()),
    })?;
    s.rates.resolve().map_err(|m| ConfigError::field("rates", m))?;
    if !(s.solver.alpha > 0.0 && s.solver.alpha.is_finite()) {
        return Err(ConfigError::field("solver.alpha", format!("must be positive, got {}", s.solver.alpha)));
    }
    if s.solver.max_iterations == 0 {
        return Err(ConfigError::field("solver.max_iterations", "must be at least 1"));
    }
    if s.sim.sessions == 0 {
        return Err(ConfigError::field("sim.sessions", "must be at least 1"));
    }
    if s.sim.batches < 2 {
        return Err(ConfigError::field("sim.batches", format!("must be at least 2, got {}", s.sim.batches)));
    }
    if s.sim.sessions < u64::from(s.sim.batches) {
        return Err(ConfigError::field("sim.sessions", "must be at least sim.batches"));
    }
    for (q, d) in &s.sim.distributions {
        d.check(*q)
            .map_err(|m| ConfigError::field(format!("sim.distributions.{q}"), m))?;
    }
    Ok(())
}

pub fn validate_sweep(spec: &SweepSpec) -> Result<(), ConfigError> {
    spec.validate().map_err(|m| ConfigError::field("sweep", m))?;
    let thresholds = spec.schemes.iter().any(|s| s.has_threshold());
    if thresholds && spec.axis != SweepAxis::Threshold && spec.base.scheme.threshold == 0 {
        return Err(ConfigError::field("q_theta", "required for threshold schemes"));
    }
    // Structural values of individual points are checked when they run.
    let mut base = spec.base.clone();
    base.scheme.scheme = Scheme::Ufa;
    validate_scenario(&base, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::DEFAULT_ALPHA;

    const RATES: &str = "[rates]\nlambda_l = 25\nlambda_w = 5\nmu_lu = 25\nmu_w = 40\nmu_s = 1\nmu_on = 0.1\nmu_off = 0.1\n";

    fn scenario(text: &str) -> Scenario {
        match parse_config(text).unwrap() {
            LoadedConfig::Scenario(s) => s,
            other => panic!("expected scenario, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let s = scenario(&format!("scheme = \"ufa\"\nq = 2\n{RATES}"));
        validate_scenario(&s, true).unwrap();
        assert_eq!(s.solver.alpha, DEFAULT_ALPHA);
        assert_eq!(s.sim.sessions, 1_000_000);
        assert_eq!(s.sim.batches, 10);
        assert_eq!(s.scheme.channels, 1);
        assert_eq!(s.engines, Engines::Analytic);
    }

    #[test]
    fn threshold_error_names_q_theta() {
        let s = scenario(&format!("scheme = \"ufab\"\nq = 3\nq_theta = 3\n{RATES}"));
        match validate_scenario(&s, true) {
            Err(ConfigError::Field { field, .. }) => assert_eq!(field, "q_theta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_rate_is_rejected() {
        let text = format!("scheme = \"ufa\"\nq = 2\n{}", RATES.replace("lambda_w = 5", "lambda_w = -5"));
        let s = scenario(&text);
        match validate_scenario(&s, true) {
            Err(ConfigError::Field { field, message }) => {
                assert_eq!(field, "rates");
                assert!(message.contains("lambda_w"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(&format!("scheme = \"ufa\"\nq = 2\ncolour = 1\n{RATES}")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        assert!(err.to_string().contains("colour"));
        let err = parse_config(&format!("scheme = \"ufa\"\nq = 2\n{RATES}mu_x = 3\n")).unwrap_err();
        assert!(err.to_string().contains("mu_x"));
    }

    #[test]
    fn parse_errors_carry_line_context() {
        let err = parse_config("scheme = \nq = 2\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn expressions_and_distributions() {
        let text = format!(
            "scheme = \"uta\"\nq = 3\nengines = \"both\"\n{}\n[sim]\nseed = 5\n[sim.distributions]\nlaa_service = {{ deterministic = {{ value = 0.04 }} }}\n",
            RATES.replace("lambda_l = 25", "lambda_l = \"0.5*mu_w\"")
        );
        let s = scenario(&text);
        validate_scenario(&s, true).unwrap();
        assert_eq!(s.rates.resolve().unwrap().lambda_l, 20.0);
        assert_eq!(s.sim.seed, 5);
        assert_eq!(
            s.sim.distributions.get(&Quantity::LaaService),
            Some(&DistributionSpec::deterministic(0.04))
        );
    }

    #[test]
    fn ftp_preset_only_for_service() {
        let text = format!(
            "scheme = \"uta\"\nq = 3\n{RATES}\n[sim.distributions]\non_duration = {{ custom = {{ ftp = {{ mean_file_bytes = 1.0, bytes_per_sec = 1.0, file_size = \"fixed\" }} }} }}\n"
        );
        let s = scenario(&text);
        match validate_scenario(&s, true) {
            Err(ConfigError::Field { field, .. }) => assert_eq!(field, "sim.distributions.on_duration"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_section() {
        let text = format!(
            "name = \"s\"\nq = 4\nq_theta = 2\n{RATES}\n[sweep]\naxis = \"mu_on_off\"\nvalues = [[0.5, 2], [1, 1]]\nschemes = [\"uta\", \"utab\"]\n[[sweep.series]]\nlabel = \"heavy\"\nrates = {{ lambda_l = \"5*mu_w\" }}\n"
        );
        let LoadedConfig::Sweep(spec) = parse_config(&text).unwrap() else {
            panic!("expected sweep");
        };
        validate_sweep(&spec).unwrap();
        assert_eq!(spec.axis, SweepAxis::OnOff);
        assert_eq!(spec.values, vec![AxisValue::Pair(0.5, 2.0), AxisValue::Pair(1.0, 1.0)]);
        assert_eq!(spec.series.len(), 1);
        assert_eq!(spec.len(), 4);
    }

    #[test]
    fn sweep_needs_threshold_for_threshold_schemes() {
        let text = format!("q = 4\n{RATES}\n[sweep]\naxis = \"q\"\nvalues = [2, 3]\nschemes = [\"ufab\"]\n");
        let LoadedConfig::Sweep(spec) = parse_config(&text).unwrap() else {
            panic!("expected sweep");
        };
        match validate_sweep(&spec) {
            Err(ConfigError::Field { field, .. }) => assert_eq!(field, "q_theta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        let err = load_config(Path::new("/nonexistent/laacoex.toml")).unwrap_err();
        assert!(matches!(err, ConfigError::Io { .. }));
    }
}
