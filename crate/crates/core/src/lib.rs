//! Analytic and simulated models of LAA/Wi-Fi coexistence on unlicensed
//! channels under four allocation schemes.

pub mod model;
pub mod solver;
pub mod sim;
pub mod experiments;
pub mod cli;
