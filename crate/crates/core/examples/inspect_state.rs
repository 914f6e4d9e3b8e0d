//! Prints the indicator vector, outgoing transitions and balance terms of
//! a few states.

use laacoex::model::{balance_terms, delta_vector, enumerate_states, transition_list, RateParams, SchemeConfig, SystemState};

fn main() {
    let rates = RateParams::table1(25.0);
    let cases = [
        (SchemeConfig::ufa(2), (2, 0, 0, 0)),
        (SchemeConfig::uta(2), (1, 0, 0, 1)),
        (SchemeConfig::uta(2), (2, 0, 1, 1)),
        (SchemeConfig::utab(5, 2), (0, 0, 1, 3)),
    ];
    for (cfg, tuple) in cases {
        let state = SystemState::from_tuple(tuple).unwrap();
        let space = enumerate_states(&cfg).unwrap();
        let uniform = 1.0 / space.len() as f64;
        println!("{} {state}", cfg.scheme);
        println!("  delta = 1 at {:?}", delta_vector(&state, &cfg).ones());
        for t in transition_list(&state, &cfg, &rates) {
            println!("  -> {} at rate {} ({:?})", t.target, t.rate, t.via);
        }
        let terms = balance_terms(&state, &space, |_| uniform, &rates).unwrap();
        println!("  uniform pi: eps_A = {:.4}, eps_B = {}", terms.eps_a, terms.eps_b);
    }
}
