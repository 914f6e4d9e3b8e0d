//! Cross-checks the iterative solver against the dense direct solve,
//! including a chain with unreachable states.

use laacoex::model::{RateParams, SchemeConfig};
use laacoex::solver::{solve_direct, solve_iterative, SolverSettings};

fn main() {
    let configs = [
        SchemeConfig::ufa(3),
        SchemeConfig::uta(3),
        SchemeConfig::ufab(4, 2),
        SchemeConfig::utab(4, 2),
    ];
    for cfg in configs {
        let rates = RateParams::table1(50.0);
        let direct = solve_direct(&cfg, &rates).unwrap();
        for alpha in [1e-6, 1e-10] {
            let it = solve_iterative(&cfg, &rates, &SolverSettings::with_alpha(alpha)).unwrap();
            println!(
                "{:<5} Q={} alpha={alpha:e}: {:>5} sweeps, max |pi_it - pi_direct| = {:.2e}",
                cfg.scheme,
                cfg.queue,
                it.iterations,
                it.distribution.max_abs_diff(&direct.distribution)
            );
        }
    }

    // Without LAA traffic the buffer never fills; the direct solver prunes
    // those states.
    let idle = solve_direct(&SchemeConfig::uta(2), &RateParams::table1(0.0)).unwrap();
    let pruned: Vec<String> = idle.pruned.iter().map(|s| s.to_string()).collect();
    println!("UTA with lambda_l = 0 pruned {} states: {}", pruned.len(), pruned.join(" "));
}
