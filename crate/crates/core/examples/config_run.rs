//! Loads a TOML configuration and runs it, scenario or sweep.

use std::io;
use std::path::PathBuf;

use laacoex::cli::{load_config, LoadedConfig};
use laacoex::experiments::{run_scenario, sweep, write_csv};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/utab_sweep.toml")));
    let rows = match load_config(&path) {
        Ok(LoadedConfig::Scenario(s)) => vec![run_scenario(&s).expect("scenario runs")],
        Ok(LoadedConfig::Sweep(spec)) => {
            let out = sweep(&spec).expect("sweep runs");
            for f in &out.failures {
                eprintln!("error: {f}");
            }
            out.rows
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let meta = vec![("config".to_string(), path.display().to_string())];
    write_csv(&rows, &meta, io::stdout().lock()).expect("write csv");
}
