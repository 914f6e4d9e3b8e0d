//! Acceptance criteria, one line each. Exits non-zero if any criterion
//! fails.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use laacoex::cli;
use laacoex::experiments::{
    preset, published, sweep, validate_reference_with, CellKind, CellStatus, Metric, ResultRow, ValidationOptions,
    REFERENCE_SEED, TABLE1_LAMBDAS,
};
use laacoex::model::{RateParams, Scheme, SchemeConfig};
use laacoex::sim::{self, total_variation, uniform, SimConfig};
use laacoex::solver::{dropping_probabilities, solve_direct, solve_iterative, SolverSettings};

const ANALYTIC_TOL: f64 = 1e-4;
const SIM_TOL: f64 = 0.015;
const ERROR_TOL_PP: f64 = 0.5;
const ORACLE_TOL: f64 = 1e-6;
/// Stopping tolerance used for the oracle comparison.
const ORACLE_ALPHA: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-9;
const TV_TOL: f64 = 0.02;
const FLAT_TOL: f64 = 1e-3;
const SESSIONS: u64 = 1_000_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

fn table1_configs() -> Vec<(Scheme, f64)> {
    [Scheme::Ufa, Scheme::Uta]
        .into_iter()
        .flat_map(|s| TABLE1_LAMBDAS.map(|l| (s, l)))
        .collect()
}

fn published_value(scheme: Scheme, metric: Metric, kind: CellKind, l: f64) -> f64 {
    published()
        .into_iter()
        .find(|c| c.scheme == scheme && c.metric == metric && c.kind == kind && c.lambda_l == l)
        .map(|c| c.value)
        .unwrap()
}

fn table1_analytic() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    for (scheme, l) in table1_configs() {
        let cfg = SchemeConfig::new(scheme, 1, 2, 0);
        let sol = solve_iterative(&cfg, &RateParams::table1(l), &SolverSettings::default()).unwrap();
        let p = dropping_probabilities(&sol.distribution, &cfg);
        for (metric, ours) in [(Metric::Pbl, p.p_bl), (Metric::Pbw, p.p_bw)] {
            let theirs = published_value(scheme, metric, CellKind::Analytic, l);
            let diff = (ours - theirs).abs();
            worst = worst.max(diff);
            if diff > ANALYTIC_TOL {
                failing.push(format!(
                    "{scheme} {metric} lambda_l={l}: computed {ours:.6}, published {theirs:.6}, |diff| {diff:.2e}"
                ));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failing.is_empty() && elapsed < 1.0;
    let mut o = Outcome::new(
        pass,
        format!(
            "{}/20 analytic cells within {ANALYTIC_TOL:e} (max |diff| {worst:.2e}), {elapsed:.3} s",
            20 - failing.len()
        ),
    );
    o.details = failing;
    o
}

fn table1_simulation(opts: &ValidationOptions) -> Outcome {
    let report = validate_reference_with(opts);
    let (sim_ok, sim_n) = report.tally(CellKind::Simulation);
    let (err_ok, err_n) = report.tally(CellKind::ErrorPct);
    let flagged = report.cells.iter().filter(|c| c.status == CellStatus::Flagged).count();
    let pass = sim_ok == sim_n && err_ok == err_n;
    let mut o = Outcome::new(
        pass,
        format!(
            "{sim_ok}/{sim_n} simulation cells within {SIM_TOL}, {err_ok}/{err_n} error cells within {ERROR_TOL_PP} pp ({flagged} flagged cells excluded)"
        ),
    );
    o.details = report
        .cells
        .iter()
        .filter(|c| matches!(c.kind, CellKind::Simulation | CellKind::ErrorPct) && c.status == CellStatus::Fail)
        .map(|c| c.to_string())
        .collect();
    o
}

fn valid_configs() -> Vec<SchemeConfig> {
    let mut out = Vec::new();
    for q in 1..=5 {
        out.push(SchemeConfig::ufa(q));
        out.push(SchemeConfig::uta(q));
        for t in 1..q {
            out.push(SchemeConfig::ufab(q, t));
            out.push(SchemeConfig::utab(q, t));
        }
    }
    out
}

fn random_rates(rng: &mut ChaCha8Rng) -> RateParams {
    let mut draw = || 10f64.powf(-1.5 + 3.5 * uniform(rng));
    RateParams {
        lambda_l: draw(),
        lambda_w: draw(),
        mu_lu: draw(),
        mu_w: draw(),
        mu_s: draw(),
        mu_on: draw(),
        mu_off: draw(),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let configs = valid_configs();
    let mut worst: f64 = 0.0;
    let mut worst_default: f64 = 0.0;
    let mut errors = Vec::new();
    let mut runs = 0;
    for cfg in &configs {
        for _ in 0..20 {
            let r = random_rates(&mut rng);
            runs += 1;
            let direct = match solve_direct(cfg, &r) {
                Ok(d) => d,
                Err(e) => {
                    errors.push(format!("{cfg:?} {r:?}: direct solve failed: {e}"));
                    continue;
                }
            };
            match solve_iterative(cfg, &r, &SolverSettings::with_alpha(ORACLE_ALPHA)) {
                Ok(it) => {
                    let gap = it.distribution.max_abs_diff(&direct.distribution);
                    if gap > ORACLE_TOL {
                        errors.push(format!("{cfg:?} {r:?}: max-norm gap {gap:.2e}"));
                    }
                    worst = worst.max(gap);
                }
                Err(e) => errors.push(format!("{cfg:?} {r:?}: iterative solve failed: {e}")),
            }
            if let Ok(it) = solve_iterative(cfg, &r, &SolverSettings::default()) {
                worst_default = worst_default.max(it.distribution.max_abs_diff(&direct.distribution));
            }
        }
    }
    let mut o = Outcome::new(
        errors.is_empty(),
        format!(
            "{} configurations x 20 rate vectors ({runs} solves), max-norm gap {worst:.2e} at alpha={ORACLE_ALPHA:e} (tolerance {ORACLE_TOL:e}); at the default alpha=1e-6 the max gap is {worst_default:.2e}",
            configs.len()
        ),
    );
    o.details = errors;
    o
}

fn closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    let mut exact = f64::NAN;
    for rho in [0.25f64, 0.5, 1.0, 2.0] {
        for q in 1..=5u32 {
            let k = f64::from(q + 1);
            let expected = if rho == 1.0 {
                1.0 / (k + 1.0)
            } else {
                (1.0 - rho) * rho.powf(k) / (1.0 - rho.powf(k + 1.0))
            };
            let rates = RateParams {
                lambda_l: 25.0 * rho,
                lambda_w: 0.0,
                mu_lu: 25.0,
                ..RateParams::table1(0.0)
            };
            let cfg = SchemeConfig::ufa(q);
            let direct = dropping_probabilities(&solve_direct(&cfg, &rates).unwrap().distribution, &cfg).p_bl;
            let iterative = dropping_probabilities(
                &solve_iterative(&cfg, &rates, &SolverSettings::with_alpha(1e-13)).unwrap().distribution,
                &cfg,
            )
            .p_bl;
            for (route, got) in [("direct", direct), ("iterative", iterative)] {
                let diff = (got - expected).abs();
                worst = worst.max(diff);
                if diff > CLOSED_FORM_TOL {
                    failing.push(format!("rho={rho} Q={q} {route}: {got} vs {expected}"));
                }
            }
            if rho == 1.0 && q == 2 {
                exact = iterative;
            }
        }
    }
    let exact_ok = (exact - 0.25).abs() <= CLOSED_FORM_TOL;
    let mut o = Outcome::new(
        failing.is_empty() && exact_ok,
        format!("20 (rho, Q) points on both solvers, max |diff| {worst:.2e}; rho=1, Q=2 gives {exact:.12}"),
    );
    o.details = failing;
    o
}

fn occupancy_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    for (i, (scheme, l)) in table1_configs().into_iter().enumerate() {
        let cfg = SchemeConfig::new(scheme, 1, 2, 0);
        let rates = RateParams::table1(l);
        let pi = solve_direct(&cfg, &rates).unwrap().distribution;
        let stats = sim::run(&SimConfig::new(cfg, rates, SESSIONS, REFERENCE_SEED + i as u64)).unwrap();
        let tv = total_variation(&stats, &pi);
        worst = worst.max(tv);
        if tv > TV_TOL {
            failing.push(format!("{scheme} lambda_l={l}: total variation {tv:.4}"));
        }
    }
    let mut o = Outcome::new(
        failing.is_empty(),
        format!("10 configurations at {SESSIONS} sessions, max total variation {worst:.4} (tolerance {TV_TOL})"),
    );
    o.details = failing;
    o
}

fn analytic(row: &ResultRow) -> (f64, f64) {
    let a = row.analytic.expect("analytic engine");
    (a.p_bl, a.p_bw)
}

fn figure_trends() -> Outcome {
    let mut details = Vec::new();

    let fig4 = sweep(&preset("fig4").unwrap()).unwrap();
    let mut fig4_ok = fig4.failures.is_empty();
    for curve in fig4.rows.chunks(5) {
        for w in curve.windows(2) {
            let (a, b) = (analytic(&w[0]), analytic(&w[1]));
            if b.0 > a.0 || b.1 < a.1 {
                fig4_ok = false;
                details.push(format!(
                    "fig4 {} Q={} -> {}: p_bl {:.6} -> {:.6}, p_bw {:.6} -> {:.6}",
                    w[0].scenario,
                    w[0].axis_value.unwrap(),
                    w[1].axis_value.unwrap(),
                    a.0,
                    b.0,
                    a.1,
                    b.1
                ));
            }
        }
    }

    let fig11 = sweep(&preset("fig11").unwrap()).unwrap();
    let mut fig11_ok = fig11.failures.is_empty();
    for q in 1..=9 {
        let at: Vec<&ResultRow> = fig11
            .rows
            .iter()
            .filter(|r| r.axis_value.unwrap().scalar() == Some(f64::from(q)))
            .collect();
        let get = |s: Scheme| analytic(at.iter().find(|r| r.scheme == s).unwrap());
        let ufa_bl = get(Scheme::Ufa).0;
        let utab_bw = get(Scheme::Utab).1;
        for s in Scheme::ALL {
            let (bl, bw) = get(s);
            if bl < ufa_bl {
                fig11_ok = false;
                details.push(format!("fig11 Q={q}: {s} p_bl {bl:.6} below UFA {ufa_bl:.6}"));
            }
            if bw < utab_bw {
                fig11_ok = false;
                details.push(format!("fig11 Q={q}: {s} p_bw {bw:.6} below UTAB {utab_bw:.6}"));
            }
        }
    }

    let fig12 = sweep(&preset("fig12").unwrap()).unwrap();
    let mut fig12_ok = fig12.failures.is_empty();
    for scheme in [Scheme::Ufab, Scheme::Utab] {
        let bw: Vec<f64> = fig12
            .rows
            .iter()
            .filter(|r| r.scheme == scheme && r.axis_value.unwrap().scalar().unwrap() <= 4.0)
            .map(|r| analytic(r).1)
            .collect();
        let spread = bw.iter().cloned().fold(f64::MIN, f64::max) - bw.iter().cloned().fold(f64::MAX, f64::min);
        if spread > FLAT_TOL {
            fig12_ok = false;
            details.push(format!(
                "fig12 {scheme}: p_bw over q_theta=1..4 is {:?}, spread {spread:.4} (tolerance {FLAT_TOL})",
                bw.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
            ));
        }
    }

    let word = |ok: bool| if ok { "ok" } else { "FAIL" };
    let mut o = Outcome::new(
        fig4_ok && fig11_ok && fig12_ok,
        format!(
            "fig4 monotone in Q: {}; fig11 UFA lowest p_bl and UTAB lowest p_bw: {}; fig12 p_bw flat for q_theta<=4: {}",
            word(fig4_ok),
            word(fig11_ok),
            word(fig12_ok)
        ),
    );
    o.details = details;
    o
}

fn invoke(args: &[String]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("laacoex".to_string()).chain(args.iter().cloned());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&err).into_owned())
}

fn recorded_invocation(text: &str) -> Option<Vec<String>> {
    let line = text.lines().find_map(|l| l.strip_prefix("# invocation = "))?;
    shlex::split(line)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("deterministic run.toml");
    fs::write(
        &config,
        "name = \"det\"\nq = 3\nq_theta = 1\nengines = \"both\"\n\
         [rates]\nlambda_l = \"0.5*mu_w\"\nlambda_w = \"0.5*mu_w\"\nmu_lu = \"mu_w\"\nmu_w = 10\nmu_s = \"mu_w\"\nmu_on = 1\nmu_off = 1\n\
         [sim]\nsessions = 40000\nseed = 99\n\
         [sim.distributions]\nlaa_service = { deterministic = { value = 0.1 } }\n\
         [sweep]\naxis = \"q\"\nvalues = [2, 3, 4]\nschemes = [\"uta\", \"utab\"]\n",
    )
    .unwrap();
    let config = config.to_str().unwrap().to_string();
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--format", "csv", "--scheme", "uta", "--lambda-l", "62.5"],
        vec!["solve", "--scheme", "utab", "--q", "4", "--q-theta", "2", "--mu-w", "10", "--lambda-l", "5*mu_w"],
        vec!["simulate", "--format", "csv", "--scheme", "utab", "--q", "4", "--q-theta", "2", "--sessions", "100000", "--seed", "5"],
        vec!["simulate", "--scheme", "ufa", "--sessions", "50000"],
        vec!["sweep", "--preset", "fig11"],
        vec!["sweep", "--preset", "fig12", "--format", "pretty"],
        vec!["sweep", "--preset", "table1", "--sessions", "50000", "--seed", "3"],
        vec!["sweep", "--config", config.as_str()],
        vec!["validate", "--sessions", "50000", "--format", "csv"],
        vec!["presets"],
    ];

    let mut failing = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        let first = dir.path().join(format!("run{i}-a.out"));
        let again = dir.path().join(format!("run{i}-b.out"));
        let mut args: Vec<String> = case.iter().map(|s| s.to_string()).collect();
        args.extend(["--out".to_string(), first.to_str().unwrap().to_string()]);
        let (code_a, err) = invoke(&args);
        if code_a == cli::EXIT_USAGE {
            failing.push(format!("{case:?}: usage error: {err}"));
            continue;
        }
        let a = fs::read(&first).unwrap_or_default();
        let text = String::from_utf8_lossy(&a);
        let rerun = match recorded_invocation(&text) {
            Some(r) => r,
            None if case[0] == "presets" => case.iter().map(|s| s.to_string()).collect(),
            None => {
                failing.push(format!("{case:?}: no recorded invocation"));
                continue;
            }
        };
        let mut rerun_args = rerun;
        rerun_args.extend(["--out".to_string(), again.to_str().unwrap().to_string()]);
        let (code_b, _) = invoke(&rerun_args);
        let b = fs::read(&again).unwrap_or_default();
        if a.is_empty() || a != b || code_a != code_b {
            failing.push(format!("{case:?}: re-run from metadata differs ({} vs {} bytes)", a.len(), b.len()));
        }
    }
    let mut o = Outcome::new(
        failing.is_empty(),
        format!(
            "{}/{} invocations reproduced byte for byte from their recorded metadata",
            cases.len() - failing.len(),
            cases.len()
        ),
    );
    o.details = failing;
    o
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("reference analytic cells", table1_analytic),
        ("reference simulation cells", || table1_simulation(&ValidationOptions::default())),
        ("iterative vs direct solver", oracle_equivalence),
        ("birth-death closed form", closed_form),
        ("simulated occupancy vs stationary distribution", occupancy_agreement),
        ("figure trends", figure_trends),
        ("CLI determinism", determinism),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "acceptance {}: {status} {name}: {} [{:.1} s]",
            i + 1,
            o.summary,
            start.elapsed().as_secs_f64()
        );
        for d in &o.details {
            println!("    {d}");
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
