//! Runs a figure preset and writes the result table as CSV.

use std::io;

use laacoex::experiments::{preset, preset_names, sweep, write_csv};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "fig4".into());
    let Some(spec) = preset(&name) else {
        eprintln!("unknown preset {name}; choose one of {}", preset_names().join(", "));
        std::process::exit(2);
    };
    let outcome = sweep(&spec).expect("preset is valid");
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let meta = vec![("preset".to_string(), name), ("axis".to_string(), spec.axis.to_string())];
    write_csv(&outcome.rows, &meta, io::stdout().lock()).expect("write csv");
}
