//! Line-oriented event trace: `time kind w x y z`, tab separated, one event
//! per line after a `#` header. Times use the shortest decimal form that
//! round-trips, so a parsed trace is bit-identical to the recorded one.

use std::io::{self, BufRead, Write};

use crate::model::SystemState;

use super::engine::{EventKind, EventRecord};

pub const TRACE_HEADER: &str = "# time\tkind\tw\tx\ty\tz";

pub fn write_trace<W: Write>(records: &[EventRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in records {
        let (w, x, y, z) = r.state.tuple();
        writeln!(out, "{}\t{}\t{w}\t{x}\t{y}\t{z}", r.time, r.kind)?;
    }
    Ok(())
}

pub fn parse_trace<R: BufRead>(input: R) -> io::Result<Vec<EventRecord>> {
    let bad = |line: usize, msg: String| io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"));
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(bad(i + 1, format!("expected 6 fields, found {}", f.len())));
        }
        let time: f64 = f[0].parse().map_err(|e| bad(i + 1, format!("time: {e}")))?;
        let kind: EventKind = f[1].parse().map_err(|e| bad(i + 1, e))?;
        let mut n = [0u32; 4];
        for (k, v) in f[2..].iter().enumerate() {
            n[k] = v.parse().map_err(|e| bad(i + 1, format!("state: {e}")))?;
        }
        let state = SystemState::from_tuple((n[0], n[1], n[2], n[3]))
            .ok_or_else(|| bad(i + 1, format!("unknown phase {}", n[0])))?;
        records.push(EventRecord { time, kind, state });
    }
    Ok(records)
}
