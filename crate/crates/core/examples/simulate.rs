//! Runs the simulator for one configuration and compares it with the
//! analytic model.

use laacoex::model::{RateParams, SchemeConfig};
use laacoex::sim::{run, total_variation, SimConfig};
use laacoex::solver::{dropping_probabilities, solve_direct};

fn main() {
    let sessions = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let cfg = SchemeConfig::uta(2);
    let rates = RateParams::table1(37.0);

    let stats = run(&SimConfig::new(cfg, rates, sessions, 1)).unwrap();
    let pi = solve_direct(&cfg, &rates).unwrap().distribution;
    let exact = dropping_probabilities(&pi, &cfg);

    println!("sessions          {sessions}");
    println!("simulated time    {:.1} s ({} events)", stats.sim_time, stats.events);
    println!("LAA arrivals      {} (direct {}, buffered {}, dropped {})", stats.laa_arrivals, stats.laa_served_direct, stats.laa_buffered, stats.laa_drops);
    println!("Wi-Fi arrivals    {} (blocked by LAA {}, blocked total {})", stats.wifi_arrivals, stats.wifi_drops_laa_occupied, stats.wifi_drops_total);
    println!("P_b,l             {:.5} ± {:.5}  (analytic {:.5})", stats.p_bl_hat, stats.ci95_bl, exact.p_bl);
    println!("P_b,w             {:.5} ± {:.5}  (analytic {:.5})", stats.p_bw_hat, stats.ci95_bw, exact.p_bw);
    println!("total variation   {:.4}", total_variation(&stats, &pi));
}
