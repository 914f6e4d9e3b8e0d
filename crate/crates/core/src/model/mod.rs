//! Markov model of LAA/Wi-Fi coexistence on shared unlicensed channels.
//!
//! A state `(w, x, y, z)` records the LAA cell phase, the LAA and Wi-Fi
//! packets in service and the LAA packets waiting in the FIFO buffer. Each
//! allocation scheme supplies its own table of 24 indicator predicates; the
//! balance equation built from them is shared.

mod balance;
mod delta;
mod space;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use balance::{balance_row, balance_terms, transition_list, BalanceRow, BalanceTerms, Transition};
pub use delta::{delta_vector, DeltaVector, Move};
pub use space::{enumerate_states, StateSpace};

/// Ratio between the head-of-queue start rate and the ON expiry rate.
pub const SERVICE_START_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("analytic state spaces need exactly one channel (D = {0})")]
    ChannelCount(u32),
    #[error("channel count must be at least 1")]
    NoChannels,
    #[error("queue capacity must be at least 1")]
    NoQueue,
    #[error("buffer threshold q_theta = {threshold} outside {lo}..={hi} for queue size {queue}")]
    Threshold {
        threshold: u32,
        queue: u32,
        lo: u32,
        hi: u32,
    },
    #[error("rate {name} = {value} is invalid ({reason})")]
    Rate {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("state {0} has no outgoing transition but receives inflow")]
    DegenerateState(SystemState),
    #[error("state {0} is not part of the state space")]
    UnknownState(SystemState),
    #[error("distribution has {got} entries, state space has {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Phase of the LAA small cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    Off = 0,
    Sensing = 1,
    On = 2,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Off, Phase::Sensing, Phase::On];

    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn from_code(w: u32) -> Option<Phase> {
        match w {
            0 => Some(Phase::Off),
            1 => Some(Phase::Sensing),
            2 => Some(Phase::On),
            _ => None,
        }
    }

    fn up(self) -> Option<Phase> {
        Phase::from_code(self.code() + 1)
    }

    fn down(self) -> Option<Phase> {
        self.code().checked_sub(1).and_then(Phase::from_code)
    }
}

/// The Markov state `n = (w, x, y, z)`.
///
/// Fields are ordered so that the derived `Ord` is lexicographic in
/// `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SystemState {
    pub phase: Phase,
    /// LAA packets in service.
    pub laa: u32,
    /// Wi-Fi packets in service.
    pub wifi: u32,
    /// LAA packets waiting in the buffer.
    pub queued: u32,
}

impl SystemState {
    pub fn new(phase: Phase, laa: u32, wifi: u32, queued: u32) -> Self {
        SystemState {
            phase,
            laa,
            wifi,
            queued,
        }
    }

    /// Builds a state from its numeric encoding; `None` for an unknown phase.
    pub fn from_tuple((w, x, y, z): (u32, u32, u32, u32)) -> Option<Self> {
        Phase::from_code(w).map(|p| SystemState::new(p, x, y, z))
    }

    pub fn tuple(&self) -> (u32, u32, u32, u32) {
        (self.phase.code(), self.laa, self.wifi, self.queued)
    }

    /// Free channels `D_f = D - x - y`.
    pub fn free_channels(&self, channels: u32) -> u32 {
        channels.saturating_sub(self.laa + self.wifi)
    }

    /// Free buffer slots `Q_f = Q - z`.
    pub fn free_slots(&self, queue: u32) -> u32 {
        queue.saturating_sub(self.queued)
    }

    /// True when the state respects `x + y <= D` and `z <= Q`.
    pub fn is_legal(&self, config: &SchemeConfig) -> bool {
        self.laa + self.wifi <= config.channels
            && self.queued <= config.queue
            && (config.scheme.has_phases() || self.phase == Phase::On)
    }

    fn shifted(&self, phase: Phase, dx: i32, dy: i32, dz: i32) -> Option<SystemState> {
        Some(SystemState {
            phase,
            laa: self.laa.checked_add_signed(dx)?,
            wifi: self.wifi.checked_add_signed(dy)?,
            queued: self.queued.checked_add_signed(dz)?,
        })
    }
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (w, x, y, z) = self.tuple();
        write!(f, "({w},{x},{y},{z})")
    }
}

/// Unlicensed band allocation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Unlicensed full allocation.
    Ufa,
    /// Unlicensed time-division allocation.
    Uta,
    /// UFA with a buffer threshold.
    Ufab,
    /// UTA with a buffer threshold.
    Utab,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Ufa, Scheme::Uta, Scheme::Ufab, Scheme::Utab];

    /// UTA-family schemes cycle through OFF, Sensing and ON.
    pub fn has_phases(self) -> bool {
        matches!(self, Scheme::Uta | Scheme::Utab)
    }

    pub fn has_threshold(self) -> bool {
        matches!(self, Scheme::Ufab | Scheme::Utab)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ufa => "ufa",
            Scheme::Uta => "uta",
            Scheme::Ufab => "ufab",
            Scheme::Utab => "utab",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name().to_uppercase())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ufa" => Ok(Scheme::Ufa),
            "uta" => Ok(Scheme::Uta),
            "ufab" => Ok(Scheme::Ufab),
            "utab" => Ok(Scheme::Utab),
            other => Err(format!("unknown scheme '{other}' (expected ufa, uta, ufab or utab)")),
        }
    }
}

/// Scheme kind plus the structural parameters `D`, `Q` and `Q_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    /// Unlicensed channels `D`.
    pub channels: u32,
    /// Buffer capacity `Q`.
    pub queue: u32,
    /// Buffer threshold `Q_θ`; ignored by UFA and UTA.
    pub threshold: u32,
    /// Accept `Q_θ = Q` (used by the threshold sweep presets).
    pub relaxed_threshold: bool,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, channels: u32, queue: u32, threshold: u32) -> Self {
        SchemeConfig {
            scheme,
            channels,
            queue,
            threshold,
            relaxed_threshold: false,
        }
    }

    pub fn ufa(queue: u32) -> Self {
        Self::new(Scheme::Ufa, 1, queue, 0)
    }

    pub fn uta(queue: u32) -> Self {
        Self::new(Scheme::Uta, 1, queue, 0)
    }

    pub fn ufab(queue: u32, threshold: u32) -> Self {
        Self::new(Scheme::Ufab, 1, queue, threshold)
    }

    pub fn utab(queue: u32, threshold: u32) -> Self {
        Self::new(Scheme::Utab, 1, queue, threshold)
    }

    pub fn with_relaxed_threshold(mut self) -> Self {
        self.relaxed_threshold = true;
        self
    }

    /// Range of admissible thresholds for the configured queue.
    pub fn threshold_range(&self) -> (u32, u32) {
        let hi = if self.relaxed_threshold {
            self.queue
        } else {
            self.queue.saturating_sub(1)
        };
        (1, hi)
    }

    /// Checks the structural invariants; any `D >= 1` is accepted.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.channels == 0 {
            return Err(ModelError::NoChannels);
        }
        if self.queue == 0 {
            return Err(ModelError::NoQueue);
        }
        if self.scheme.has_threshold() {
            let (lo, hi) = self.threshold_range();
            if self.threshold < lo || self.threshold > hi {
                return Err(ModelError::Threshold {
                    threshold: self.threshold,
                    queue: self.queue,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Checks the invariants plus the single-channel restriction of the
    /// analytic model.
    pub fn validate_analytic(&self) -> Result<(), ModelError> {
        self.validate()?;
        if self.channels != 1 {
            return Err(ModelError::ChannelCount(self.channels));
        }
        Ok(())
    }
}

impl fmt::Display for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} D={} Q={}", self.scheme, self.channels, self.queue)?;
        if self.scheme.has_threshold() {
            write!(f, " Qθ={}", self.threshold)?;
        }
        Ok(())
    }
}

/// Exponential rates of the seven random durations, in events per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    /// LAA arrival rate `λ_ℓ`.
    pub lambda_l: f64,
    /// Wi-Fi arrival rate `λ_w`.
    pub lambda_w: f64,
    /// LAA service rate on an unlicensed channel `μ_ℓu`.
    pub mu_lu: f64,
    /// Wi-Fi service rate `μ_w`.
    pub mu_w: f64,
    /// Sensing completion rate `μ_s`.
    pub mu_s: f64,
    /// ON expiry rate `μ_on`.
    pub mu_on: f64,
    /// OFF expiry rate `μ_off`.
    pub mu_off: f64,
}

impl RateParams {
    /// Header parameters of the validation table with the given LAA load.
    pub fn table1(lambda_l: f64) -> Self {
        RateParams {
            lambda_l,
            lambda_w: 5.0,
            mu_lu: 25.0,
            mu_w: 40.0,
            mu_s: 1.0,
            mu_on: 0.1,
            mu_off: 0.1,
        }
    }

    /// Head-of-queue service start rate `μ'_on`.
    pub fn mu_on_prime(&self) -> f64 {
        SERVICE_START_FACTOR * self.mu_on
    }

    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("lambda_l", self.lambda_l),
            ("lambda_w", self.lambda_w),
            ("mu_lu", self.mu_lu),
            ("mu_w", self.mu_w),
            ("mu_s", self.mu_s),
            ("mu_on", self.mu_on),
            ("mu_off", self.mu_off),
        ]
    }

    /// Arrival rates may be zero; every service and phase rate must be
    /// strictly positive.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (i, (name, value)) in self.named().into_iter().enumerate() {
            if !value.is_finite() {
                return Err(ModelError::Rate {
                    name,
                    value,
                    reason: "not finite",
                });
            }
            let arrival = i < 2;
            if arrival && value < 0.0 {
                return Err(ModelError::Rate {
                    name,
                    value,
                    reason: "negative",
                });
            }
            if !arrival && value <= 0.0 {
                return Err(ModelError::Rate {
                    name,
                    value,
                    reason: "must be positive",
                });
            }
        }
        Ok(())
    }
}
