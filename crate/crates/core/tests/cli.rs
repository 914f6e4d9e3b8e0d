use std::fs;

use laacoex::cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("laacoex").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn metadata<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# {key} = ");
    text.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

#[test]
fn solve_prints_both_probabilities() {
    let (code, out, _) = call(&["solve", "--scheme", "ufa", "--preset", "table1", "--lambda-l", "25"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("P_b,l = 0.254817"), "{out}");
    assert!(out.contains("P_b,w = 0.745183"), "{out}");
}

#[test]
fn solve_echoes_effective_parameters() {
    let (code, out, _) = call(&[
        "solve", "--format", "csv", "--scheme", "utab", "--q", "4", "--q-theta", "2", "--mu-w", "10", "--lambda-l",
        "5*mu_w", "--tolerance", "1e-9",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(metadata(&out, "scheme"), Some("utab"));
    assert_eq!(metadata(&out, "q"), Some("4"));
    assert_eq!(metadata(&out, "q_theta"), Some("2"));
    assert_eq!(metadata(&out, "tolerance"), Some("1e-9"));
    assert!(metadata(&out, "rates").unwrap().contains("lambda_l=5*mu_w"));
    assert!(metadata(&out, "rates_resolved").unwrap().contains("lambda_l=50"));
    assert!(metadata(&out, "tool").unwrap().starts_with("laacoex "));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["solve", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&[]).0, EXIT_USAGE);
    let (code, _, err) = call(&["solve", "--scheme", "ufab", "--q", "3", "--q-theta", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("q_theta"), "{err}");
    let (code, _, err) = call(&["solve", "--lambda-w=-1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("lambda_w"), "{err}");
    assert_eq!(call(&["solve", "--d", "2"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--preset", "nope"]).0, EXIT_USAGE);
    assert_eq!(call(&["solve", "--config", "/nonexistent.toml"]).0, EXIT_USAGE);
}

#[test]
fn help_lists_presets_flags_and_exit_codes() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    for name in laacoex::experiments::preset_names() {
        assert!(out.contains(name), "{name}");
    }
    assert!(out.contains("Exit codes"));
    let (code, out, _) = call(&["sweep", "--help"]);
    assert_eq!(code, EXIT_OK);
    for flag in [
        "--scheme", "--preset", "--config", "--out", "--format", "--seed", "--sessions", "--tolerance", "--lambda-l",
        "--lambda-w", "--mu-lu", "--mu-w", "--mu-s", "--mu-on", "--mu-off", "--q", "--q-theta", "--d",
    ] {
        assert!(out.contains(flag), "{flag}");
    }
    assert_eq!(call(&["--version"]).0, EXIT_OK);
}

#[test]
fn sweep_writes_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    let (code, out, err) = call(&["sweep", "--preset", "fig12", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert!(err.contains("warning"), "{err}");
    let text = fs::read_to_string(&path).unwrap();
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("scenario,scheme,axis,axis_value"));
    assert_eq!(rows.len(), 11);
    assert_eq!(metadata(&text, "invocation"), Some("sweep --preset fig12"));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(
        &path,
        "scheme = \"uta\"\nq = 3\n[rates]\nlambda_l = 25\nlambda_w = 5\nmu_lu = 25\nmu_w = 40\nmu_s = 1\nmu_on = 0.1\nmu_off = 0.1\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (_, base, _) = call(&["solve", "--format", "csv", "--config", p]);
    let (code, out, _) = call(&["solve", "--format", "csv", "--config", p, "--q", "2", "--scheme", "ufa"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(metadata(&base, "q"), Some("3"));
    assert_eq!(metadata(&out, "q"), Some("2"));
    assert_eq!(metadata(&out, "scheme"), Some("ufa"));
    assert!(out.contains("config,ufa,-,,0.254816"), "{out}");
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--format", "csv", "--scheme", "uta", "--sessions", "50000", "--seed", "17"];
    let (code, a, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, call(&args).1);
    assert_eq!(metadata(&a, "seed"), Some("17"));
    assert_eq!(metadata(&a, "rng"), Some("chacha8"));
    assert_ne!(a, call(&["simulate", "--format", "csv", "--scheme", "uta", "--sessions", "50000", "--seed", "18"]).1);
}

#[test]
fn config_sweep_and_scheme_filter() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    fs::write(
        &path,
        "name = \"mini\"\nq = 3\nq_theta = 1\n[rates]\nlambda_l = \"0.5*mu_w\"\nlambda_w = \"0.5*mu_w\"\nmu_lu = \"mu_w\"\nmu_w = 10\nmu_s = \"mu_w\"\nmu_on = 1\nmu_off = 1\n[sweep]\naxis = \"q\"\nvalues = [2, 3]\nschemes = [\"uta\", \"utab\"]\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["sweep", "--config", p]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("mini")).count(), 4);
    let (_, out, _) = call(&["sweep", "--config", p, "--scheme", "utab", "--format", "pretty"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("mini")).count(), 2);
}

#[test]
fn presets_listing() {
    let (code, out, _) = call(&["presets"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 10);
    assert!(out.contains("fig11") && out.contains("36 points"));
}

#[test]
fn validation_failure_exits_one() {
    let (code, out, _) = call(&["validate", "--sessions", "20000"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("validation FAILED"));
    assert!(out.contains("flagged"));
    let (_, csv, _) = call(&["validate", "--sessions", "20000", "--format", "csv"]);
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 81);
}
