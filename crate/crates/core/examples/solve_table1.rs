//! Solves the reference grid analytically and prints it next to the
//! published values.

use laacoex::experiments::{published, CellKind, Metric, TABLE1_LAMBDAS};
use laacoex::model::{RateParams, Scheme, SchemeConfig};
use laacoex::solver::{dropping_probabilities, solve_iterative, SolverSettings};

fn main() {
    let table = published();
    let lookup = |scheme, metric, l| {
        table
            .iter()
            .find(|c| c.scheme == scheme && c.metric == metric && c.kind == CellKind::Analytic && c.lambda_l == l)
            .map(|c| c.value)
            .unwrap()
    };

    println!("{:<6} {:>8} {:>10} {:>10} {:>10} {:>10} {:>6}", "scheme", "lambda_l", "P_bl", "ref", "P_bw", "ref", "sweeps");
    for scheme in [Scheme::Ufa, Scheme::Uta] {
        let cfg = SchemeConfig::new(scheme, 1, 2, 0);
        for l in TABLE1_LAMBDAS {
            let sol = solve_iterative(&cfg, &RateParams::table1(l), &SolverSettings::default()).unwrap();
            let p = dropping_probabilities(&sol.distribution, &cfg);
            println!(
                "{:<6} {:>8} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>6}",
                scheme.name(),
                l,
                p.p_bl,
                lookup(scheme, Metric::Pbl, l),
                p.p_bw,
                lookup(scheme, Metric::Pbw, l),
                sol.iterations
            );
        }
    }
}
