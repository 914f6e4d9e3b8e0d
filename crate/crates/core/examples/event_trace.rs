//! Steps the simulator one event at a time and writes the trace.

use std::io;

use laacoex::model::{RateParams, SchemeConfig};
use laacoex::sim::{write_trace, SimConfig, Simulator};

fn main() -> io::Result<()> {
    let cfg = SimConfig::new(SchemeConfig::utab(4, 2), RateParams::table1(25.0), 40, 3);
    let mut sim = Simulator::new(cfg).expect("valid config");
    let mut trace = Vec::new();
    while !sim.is_finished() {
        trace.push(sim.step().expect("event"));
    }
    write_trace(&trace, io::stdout().lock())
}
