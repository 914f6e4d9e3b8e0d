//! Stationary distribution of the analytic model and the dropping
//! probabilities derived from it.
//!
//! [`solve_iterative`] is the normalized Gauss–Seidel fixed point of the
//! balance equation. [`solve_direct`] solves the generator system exactly and
//! serves as its oracle.

mod direct;
mod iterative;

use thiserror::Error;

use crate::model::{ModelError, SchemeConfig, StateSpace, SystemState};

pub use direct::{solve_direct, DirectSolution};
pub use iterative::{solve_iterative, IterativeSolution};

pub const DEFAULT_ALPHA: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no convergence after {iterations} sweeps (largest relative change {max_change:e})")]
    NonConvergence { iterations: usize, max_change: f64 },
    #[error("chain has {classes} closed classes; the stationary distribution is not unique")]
    SingularSystem { classes: usize },
    #[error("linear solve failed: {0}")]
    Numerical(String),
    #[error("invalid solver settings: {0}")]
    Settings(String),
}

/// Starting point of the iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialGuess {
    /// `1/|S|` everywhere.
    #[default]
    Uniform,
    /// Non-negative weights in state-space order; normalized before use.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// Relative per-state stopping tolerance.
    pub alpha: f64,
    /// Cap on full sweeps.
    pub max_iterations: usize,
    pub init: InitialGuess,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            alpha: DEFAULT_ALPHA,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            init: InitialGuess::Uniform,
        }
    }
}

impl SolverSettings {
    pub fn with_alpha(alpha: f64) -> Self {
        SolverSettings {
            alpha,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(SolverError::Settings(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::Settings("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Normalized probability mass over a state space.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    space: StateSpace,
    pi: Vec<f64>,
}

impl StationaryDistribution {
    /// Wraps `pi` (in state-space order) after checking length and signs.
    /// The values are not renormalized.
    pub fn new(space: StateSpace, pi: Vec<f64>) -> Result<Self, ModelError> {
        if pi.len() != space.len() {
            return Err(ModelError::LengthMismatch {
                expected: space.len(),
                got: pi.len(),
            });
        }
        if let Some(&v) = pi.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(ModelError::Rate {
                name: "pi",
                value: v,
                reason: "probabilities must be finite and non-negative",
            });
        }
        Ok(StationaryDistribution { space, pi })
    }

    /// All mass on one state.
    pub fn point(space: StateSpace, state: &SystemState) -> Result<Self, ModelError> {
        let idx = space.index_of(state).ok_or(ModelError::UnknownState(*state))?;
        let mut pi = vec![0.0; space.len()];
        pi[idx] = 1.0;
        Ok(StationaryDistribution { space, pi })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.pi
    }

    /// Probability of `state`; zero outside the space.
    pub fn prob(&self, state: &SystemState) -> f64 {
        self.space.index_of(state).map_or(0.0, |i| self.pi[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SystemState, f64)> {
        self.space.states().iter().zip(self.pi.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.pi.iter().sum()
    }

    /// Largest per-state absolute difference, taken over both spaces.
    pub fn max_abs_diff(&self, other: &StationaryDistribution) -> f64 {
        let a = self.iter().map(|(s, p)| (p - other.prob(s)).abs());
        let b = other.iter().map(|(s, p)| (p - self.prob(s)).abs());
        a.chain(b).fold(0.0, f64::max)
    }
}

/// LAA and Wi-Fi dropping probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DroppingProbabilities {
    /// Mass of `{z = Q}`.
    pub p_bl: f64,
    /// Mass of `{x = D}`.
    pub p_bw: f64,
}

pub fn dropping_probabilities(dist: &StationaryDistribution, config: &SchemeConfig) -> DroppingProbabilities {
    let mut p_bl = 0.0;
    let mut p_bw = 0.0;
    for (s, p) in dist.iter() {
        if s.queued == config.queue {
            p_bl += p;
        }
        if s.laa == config.channels {
            p_bw += p;
        }
    }
    DroppingProbabilities { p_bl, p_bw }
}
