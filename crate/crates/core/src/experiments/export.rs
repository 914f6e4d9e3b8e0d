use std::io::Write;

use super::ResultRow;

pub const CSV_HEADER: [&str; 13] = [
    "scenario",
    "scheme",
    "axis",
    "axis_value",
    "p_bl_analytic",
    "p_bw_analytic",
    "p_bl_sim",
    "p_bw_sim",
    "ci_bl",
    "ci_bw",
    "err_bl_pct",
    "err_bw_pct",
    "seed",
];

/// Shortest round-trip form; exponent notation outside `[1e-5, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt_f(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// Writes `# key = value` metadata lines followed by the result table.
/// Missing values are empty fields; floats use their shortest round-trip
/// form so identical runs give identical bytes.
pub fn write_csv<W: Write>(rows: &[ResultRow], metadata: &[(String, String)], mut out: W) -> csv::Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let a = r.analytic;
        let s = r.simulated;
        w.write_record([
            r.scenario.clone(),
            r.scheme.name().to_string(),
            r.axis.clone(),
            r.axis_value.map(|v| v.to_string()).unwrap_or_default(),
            opt_f(a.map(|a| a.p_bl)),
            opt_f(a.map(|a| a.p_bw)),
            opt_f(s.map(|s| s.p_bl)),
            opt_f(s.map(|s| s.p_bw)),
            opt_f(s.map(|s| s.ci_bl)),
            opt_f(s.map(|s| s.ci_bw)),
            opt_f(r.err_bl_pct),
            opt_f(r.err_bw_pct),
            r.seed.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
