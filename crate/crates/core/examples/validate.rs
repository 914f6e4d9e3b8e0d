//! Recomputes the reference table and prints every cell check.

use laacoex::experiments::{validate_reference_with, CellKind, ValidationOptions};

fn main() {
    let sessions = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let report = validate_reference_with(&ValidationOptions {
        sessions,
        ..ValidationOptions::default()
    });
    println!("reference checksum ok: {}", report.checksum_ok);
    for cell in &report.cells {
        println!("{cell}");
    }
    for kind in [CellKind::Analytic, CellKind::Simulation, CellKind::ErrorPct, CellKind::PublishedErrorPct] {
        let (ok, n) = report.tally(kind);
        println!("{kind}: {ok}/{n}");
    }
}
