use std::collections::HashMap;

use super::{ModelError, Phase, SchemeConfig, SystemState};

/// The legal states of a scheme in lexicographic `(w, x, y, z)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    config: SchemeConfig,
    states: Vec<SystemState>,
    index: HashMap<SystemState, usize>,
}

impl StateSpace {
    /// Enumerates every state with `x + y <= D` and `z <= Q` for any
    /// channel count. The analytic entry point is [`enumerate_states`].
    pub fn build(config: &SchemeConfig) -> Result<StateSpace, ModelError> {
        config.validate()?;
        let phases: &[Phase] = if config.scheme.has_phases() {
            &Phase::ALL
        } else {
            &[Phase::On]
        };
        let mut states = Vec::new();
        for &w in phases {
            for x in 0..=config.channels {
                for y in 0..=config.channels - x {
                    for z in 0..=config.queue {
                        states.push(SystemState::new(w, x, y, z));
                    }
                }
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(StateSpace {
            config: *config,
            states,
            index,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &SystemState) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn contains(&self, state: &SystemState) -> bool {
        self.index.contains_key(state)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SystemState> {
        self.states.iter()
    }
}

/// State space of the single-channel analytic model.
pub fn enumerate_states(config: &SchemeConfig) -> Result<StateSpace, ModelError> {
    config.validate_analytic()?;
    StateSpace::build(config)
}
