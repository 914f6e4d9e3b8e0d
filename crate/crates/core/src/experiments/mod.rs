//! Scenarios, parameter sweeps, figure presets and validation against the
//! published reference table.

mod export;
mod presets;
mod rates;
mod reference;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Scheme, SchemeConfig};
use crate::sim::{self, DistributionSpec, Quantity, SimConfig, SimError, DEFAULT_BATCHES, DEFAULT_SESSIONS};
use crate::solver::{dropping_probabilities, solve_iterative, DroppingProbabilities, SolverError, SolverSettings};

pub use export::{format_float, write_csv, CSV_HEADER};
pub use presets::{preset, preset_names, PresetInfo, PRESETS};
pub use rates::{RateExpr, RateName, RateSpec};
pub use reference::{
    published, reference_checksum, validate_reference, validate_reference_with, CellCheck, CellKind, CellStatus,
    Metric, ReferenceCell, ValidationOptions, ValidationReport, REFERENCE_SEED, TABLE1_CSV, TABLE1_LAMBDAS,
    TABLE1_SHA256,
};
pub use sweep::{sweep, AxisValue, Series, SweepAxis, SweepOutcome, SweepSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("scenario '{scenario}': {source}")]
    Solver {
        scenario: String,
        #[source]
        source: SolverError,
    },
    #[error("scenario '{scenario}': {source}")]
    Sim {
        scenario: String,
        #[source]
        source: SimError,
    },
    #[error("scenario '{scenario}': {message}")]
    Invalid { scenario: String, message: String },
}

/// Which engines a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engines {
    Analytic,
    Simulation,
    Both,
}

impl Engines {
    pub fn analytic(self) -> bool {
        matches!(self, Engines::Analytic | Engines::Both)
    }

    pub fn simulation(self) -> bool {
        matches!(self, Engines::Simulation | Engines::Both)
    }
}

impl fmt::Display for Engines {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engines::Analytic => "analytic",
            Engines::Simulation => "simulation",
            Engines::Both => "both",
        })
    }
}

impl FromStr for Engines {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Engines::Analytic),
            "simulation" => Ok(Engines::Simulation),
            "both" => Ok(Engines::Both),
            _ => Err(format!("unknown engines '{s}' (expected analytic, simulation or both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub sessions: u64,
    pub seed: u64,
    pub batches: u32,
    /// Laws replacing the exponential defaults.
    pub distributions: BTreeMap<Quantity, DistributionSpec>,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            sessions: DEFAULT_SESSIONS,
            seed: REFERENCE_SEED,
            batches: DEFAULT_BATCHES,
            distributions: BTreeMap::new(),
        }
    }
}

/// One fully specified run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub scheme: SchemeConfig,
    pub rates: RateSpec,
    pub solver: SolverSettings,
    pub sim: SimSettings,
    pub engines: Engines,
}

impl Scenario {
    pub fn new(name: impl Into<String>, scheme: SchemeConfig, rates: RateSpec) -> Self {
        Scenario {
            name: name.into(),
            scheme,
            rates,
            solver: SolverSettings::default(),
            sim: SimSettings::default(),
            engines: Engines::Analytic,
        }
    }

    pub fn with_engines(mut self, engines: Engines) -> Self {
        self.engines = engines;
        self
    }

    pub fn sim_config(&self) -> Result<SimConfig, ExperimentError> {
        let rates = self.rates.resolve().map_err(|m| self.invalid(m))?;
        let mut cfg = SimConfig::new(self.scheme, rates, self.sim.sessions, self.sim.seed);
        cfg.batches = self.sim.batches;
        cfg.overrides = self.sim.distributions.clone();
        Ok(cfg)
    }

    fn invalid(&self, message: String) -> ExperimentError {
        ExperimentError::Invalid {
            scenario: self.name.clone(),
            message,
        }
    }
}

/// Simulated estimates with their 95 % half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub p_bl: f64,
    pub p_bw: f64,
    pub ci_bl: f64,
    pub ci_bw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub scheme: Scheme,
    /// Swept parameter, `-` for a standalone scenario.
    pub axis: String,
    pub axis_value: Option<AxisValue>,
    pub analytic: Option<DroppingProbabilities>,
    pub simulated: Option<SimEstimate>,
    pub err_bl_pct: Option<f64>,
    pub err_bw_pct: Option<f64>,
    /// Seed of the simulation, if one ran.
    pub seed: Option<u64>,
}

/// `|sim - analytic| / analytic × 100`, undefined when `analytic` is 0.
pub fn relative_error_pct(sim: f64, analytic: f64) -> Option<f64> {
    (analytic > 0.0).then(|| (sim - analytic).abs() / analytic * 100.0)
}

/// Runs the requested engines for one scenario.
pub fn run_scenario(s: &Scenario) -> Result<ResultRow, ExperimentError> {
    let rates = s.rates.resolve().map_err(|m| s.invalid(m))?;
    s.scheme.validate().map_err(|e| s.invalid(e.to_string()))?;

    let analytic = if s.engines.analytic() {
        let sol = solve_iterative(&s.scheme, &rates, &s.solver).map_err(|source| ExperimentError::Solver {
            scenario: s.name.clone(),
            source,
        })?;
        Some(dropping_probabilities(&sol.distribution, &s.scheme))
    } else {
        None
    };

    let simulated = if s.engines.simulation() {
        let stats = sim::run(&s.sim_config()?).map_err(|source| ExperimentError::Sim {
            scenario: s.name.clone(),
            source,
        })?;
        Some(SimEstimate {
            p_bl: stats.p_bl_hat,
            p_bw: stats.p_bw_hat,
            ci_bl: stats.ci95_bl,
            ci_bw: stats.ci95_bw,
        })
    } else {
        None
    };

    let (err_bl_pct, err_bw_pct) = match (analytic, simulated) {
        (Some(a), Some(m)) => (relative_error_pct(m.p_bl, a.p_bl), relative_error_pct(m.p_bw, a.p_bw)),
        _ => (None, None),
    };

    Ok(ResultRow {
        scenario: s.name.clone(),
        scheme: s.scheme.scheme,
        axis: "-".into(),
        axis_value: None,
        analytic,
        simulated,
        err_bl_pct,
        err_bw_pct,
        seed: simulated.map(|_| s.sim.seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RateParams;

    #[test]
    fn preset_row_counts() {
        let expected = [
            ("table1", 10),
            ("fig4", 15),
            ("fig5", 15),
            ("fig6", 15),
            ("fig7", 24),
            ("fig8", 24),
            ("fig9", 15),
            ("fig10", 15),
            ("fig11", 36),
            ("fig12", 10),
        ];
        assert_eq!(preset_names(), expected.map(|e| e.0).to_vec());
        for (name, rows) in expected {
            let spec = preset(name).unwrap();
            assert_eq!(spec.len(), rows, "{name}");
            if name != "table1" {
                let out = sweep(&spec).unwrap();
                assert_eq!(out.rows.len(), rows, "{name}");
                assert!(out.failures.is_empty(), "{name}: {:?}", out.failures);
            }
        }
        assert!(preset("fig13").is_none());
    }

    #[test]
    fn fig12_warns_about_relaxed_threshold() {
        let out = sweep(&preset("fig12").unwrap()).unwrap();
        assert_eq!(out.warnings.len(), 2);
        let schemes: Vec<_> = out.rows.iter().map(|r| r.scheme).collect();
        assert!(schemes[..5].iter().all(|&s| s == Scheme::Ufab));
        assert!(schemes[5..].iter().all(|&s| s == Scheme::Utab));
        let axis: Vec<_> = out.rows[..5].iter().map(|r| r.axis_value.unwrap().scalar().unwrap()).collect();
        assert_eq!(axis, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn reference_table_is_intact() {
        assert_eq!(reference_checksum(), TABLE1_SHA256);
        let cells = published();
        assert_eq!(cells.len(), 60);
        let first = cells
            .iter()
            .find(|c| c.scheme == Scheme::Ufa && c.metric == Metric::Pbl && c.kind == CellKind::Analytic && c.lambda_l == 25.0)
            .unwrap();
        assert_eq!(first.value, 0.250425);
    }

    #[test]
    fn relative_error_definition() {
        let e = relative_error_pct(0.255031, 0.250425).unwrap();
        assert!((e - 1.839273).abs() < 1e-6, "{e}");
        assert_eq!(relative_error_pct(0.1, 0.0), None);
    }

    #[test]
    fn anomalous_cell_is_flagged() {
        let opts = ValidationOptions {
            sessions: 10_000,
            ..ValidationOptions::default()
        };
        let report = validate_reference_with(&opts);
        assert!(report.checksum_ok);
        let flagged: Vec<_> = report.cells.iter().filter(|c| c.status == CellStatus::Flagged).collect();
        assert_eq!(flagged.len(), 2);
        for c in flagged {
            assert_eq!((c.scheme, c.metric, c.lambda_l), (Scheme::Ufa, Metric::Pbw, 25.0));
            assert_eq!(c.expected, 0.001844);
        }
        let (ok, n) = report.tally(CellKind::PublishedErrorPct);
        assert_eq!((ok, n), (19, 19));
    }

    #[test]
    fn rate_expressions() {
        let e: RateExpr = "5*mu_w".parse().unwrap();
        assert_eq!(e, RateExpr::times_mu_w(5.0));
        assert_eq!("mu_w*0.5".parse::<RateExpr>().unwrap(), RateExpr::times_mu_w(0.5));
        assert_eq!("mu_w".parse::<RateExpr>().unwrap(), RateExpr::times_mu_w(1.0));
        assert_eq!("2.5".parse::<RateExpr>().unwrap(), RateExpr::Absolute(2.5));
        assert!("5*nu".parse::<RateExpr>().is_err());
        assert!("".parse::<RateExpr>().is_err());

        let spec = RateSpec::absolute(&RateParams::table1(25.0))
            .with(RateName::MuW, 10.0)
            .with(RateName::LambdaL, RateExpr::times_mu_w(5.0))
            .with(RateName::MuS, RateExpr::times(10.0, RateName::MuOn));
        let r = spec.resolve().unwrap();
        assert_eq!((r.lambda_l, r.mu_s), (50.0, 1.0));

        let cyclic = spec
            .with(RateName::MuOn, RateExpr::times(1.0, RateName::MuOff))
            .with(RateName::MuOff, RateExpr::times(1.0, RateName::MuOn));
        assert!(cyclic.resolve().is_err());
        let negative = RateSpec::absolute(&RateParams::table1(25.0)).with(RateName::LambdaW, -1.0);
        let err = negative.resolve().unwrap_err();
        assert!(err.contains("lambda_w"), "{err}");
    }

    #[test]
    fn scenario_engines() {
        let s = Scenario::new("t", SchemeConfig::ufa(2), RateSpec::absolute(&RateParams::table1(37.0)));
        let row = run_scenario(&s).unwrap();
        assert!(row.simulated.is_none() && row.err_bl_pct.is_none() && row.seed.is_none());
        let a = row.analytic.unwrap();
        assert!((a.p_bl - 0.412706).abs() < 1e-5);

        let mut both = s.with_engines(Engines::Both);
        both.sim.sessions = 20_000;
        let row = run_scenario(&both).unwrap();
        assert!(row.analytic.is_some() && row.simulated.is_some() && row.err_bl_pct.is_some());
        assert_eq!(row.seed, Some(REFERENCE_SEED));
    }

    #[test]
    fn fig4_base_point_runs_both_engines() {
        let spec = preset("fig4").unwrap();
        let (points, _) = spec.points();
        let mut first = points[0].clone().with_engines(Engines::Both);
        first.sim.sessions = 20_000;
        assert_eq!(first.scheme.queue, 1);
        let row = run_scenario(&first).unwrap();
        assert!(row.analytic.is_some() && row.simulated.is_some());
    }

    #[test]
    fn scenario_errors_name_the_scenario() {
        let mut s = Scenario::new("broken", SchemeConfig::ufab(2, 5), RateSpec::absolute(&RateParams::table1(1.0)));
        let err = run_scenario(&s).unwrap_err();
        assert!(err.to_string().contains("broken"));
        s.scheme = SchemeConfig::ufa(2);
        s.solver.max_iterations = 1;
        s.solver.alpha = 1e-15;
        assert!(matches!(run_scenario(&s), Err(ExperimentError::Solver { .. })));
    }

    #[test]
    fn csv_layout() {
        let s = Scenario::new("t", SchemeConfig::ufa(2), RateSpec::absolute(&RateParams::table1(25.0)));
        let row = run_scenario(&s).unwrap();
        let mut buf = Vec::new();
        write_csv(&[row], &[("seed".into(), "1".into())], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# seed = 1");
        assert_eq!(lines[1], CSV_HEADER.join(","));
        assert!(lines[2].starts_with("t,ufa,-,,0.25481"));
        assert!(lines[2].ends_with(",,,,,,,"));
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(3e-323), "3e-323");
        assert_eq!(format_float(1e-6), "1e-6");
        for x in [0.1 + 0.2, 1.0 / 3.0, 7.5e-12, 123456.789] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_axis_keys_round_trip() {
        for key in ["q", "q_theta", "lambda_l", "lambda_w", "mu_lu", "mu_w", "mu_s", "mu_on_off"] {
            assert_eq!(key.parse::<SweepAxis>().unwrap().key(), key);
        }
        assert!("lambda".parse::<SweepAxis>().is_err());
    }
}
