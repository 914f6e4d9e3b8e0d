//! Seeded discrete-event simulation of the coexistence model.
//!
//! The simulator applies the same scheme rules as the analytic model but
//! draws every duration from a configurable law, tracks each packet in
//! service individually and counts arrivals, drops and time-weighted state
//! occupancy. Runs are reproducible from `(config, seed)`.

mod dist;
mod engine;
mod stats;
mod trace;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{ModelError, RateParams, SchemeConfig};

pub use dist::{sample, uniform, CustomPreset, DistributionSpec, FileSizeLaw, FtpTraffic, Quantity};
pub use engine::{run, run_with_trace, EventKind, EventRecord, Simulator};
pub use stats::{total_variation, SimStats};
pub use trace::{parse_trace, write_trace, TRACE_HEADER};

/// Identifier of the pseudo-random generator, recorded in run metadata.
pub const RNG_NAME: &str = "chacha8";
pub const DEFAULT_SESSIONS: u64 = 1_000_000;
pub const DEFAULT_BATCHES: u32 = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("simulation already reached its session target")]
    Finished,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: SchemeConfig,
    pub rates: RateParams,
    /// Per-quantity laws replacing the exponential defaults.
    pub overrides: BTreeMap<Quantity, DistributionSpec>,
    /// Target number of packet arrivals, LAA and Wi-Fi combined.
    pub sessions: u64,
    pub seed: u64,
    /// Batches for the batch-means confidence intervals.
    pub batches: u32,
}

impl SimConfig {
    pub fn new(scheme: SchemeConfig, rates: RateParams, sessions: u64, seed: u64) -> Self {
        SimConfig {
            scheme,
            rates,
            overrides: BTreeMap::new(),
            sessions,
            seed,
            batches: DEFAULT_BATCHES,
        }
    }

    pub fn with_override(mut self, quantity: Quantity, spec: DistributionSpec) -> Self {
        self.overrides.insert(quantity, spec);
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.scheme.validate()?;
        self.rates.validate()?;
        if self.sessions == 0 {
            return Err(SimError::Config("sessions must be at least 1".into()));
        }
        if self.batches < 2 {
            return Err(SimError::Config(format!("batches must be at least 2, got {}", self.batches)));
        }
        if self.sessions < u64::from(self.batches) {
            return Err(SimError::Config(format!(
                "sessions ({}) must be at least the batch count ({})",
                self.sessions, self.batches
            )));
        }
        for (q, spec) in &self.overrides {
            spec.check(*q).map_err(SimError::Config)?;
        }
        if self.law(Quantity::LaaInterArrival).is_none() && self.law(Quantity::WifiInterArrival).is_none() {
            return Err(SimError::Config("both arrival rates are zero; no sessions can occur".into()));
        }
        Ok(())
    }

    /// Effective law of `quantity`; `None` for an arrival stream with rate 0.
    pub fn law(&self, quantity: Quantity) -> Option<DistributionSpec> {
        if let Some(spec) = self.overrides.get(&quantity) {
            return Some(*spec);
        }
        let r = &self.rates;
        let rate = match quantity {
            Quantity::LaaInterArrival => r.lambda_l,
            Quantity::WifiInterArrival => r.lambda_w,
            Quantity::LaaService => r.mu_lu,
            Quantity::WifiService => r.mu_w,
            Quantity::Sensing => r.mu_s,
            Quantity::OnDuration => r.mu_on,
            Quantity::OffDuration => r.mu_off,
        };
        (rate > 0.0).then_some(DistributionSpec::exponential(rate))
    }
}
